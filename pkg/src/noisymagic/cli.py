"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 numerical failure
(LP non-convergence or a failed self-check), 3 infeasible LP.  Every
failure writes one line ``noisymagic: error=<kind> message=<text>`` to
stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .channels import (
    channel_from_dict,
    channel_stabilizer_norm,
    ptm_of_gate,
    unit_cell_norms,
)
from .circuits import NoisyCircuit
from .gadgets import (
    ResourceState,
    fused_t_resource,
    noise_teleport,
    push_dephasing,
    teleport_diagonal_gate,
    unit_cell_resource,
)
from .pauli import PauliVector
from .rom import (
    CACHE_ENV,
    SCHEMA_VERSION,
    DecompositionCache,
    InfeasibleError,
    QuasiDecomposition,
    SolverError,
    full_basis,
    reduced_basis,
    reduced_basis_count,
    rom,
)
from .rqc import (
    RqcSpec,
    crossover,
    grid,
    heisenberg_cost,
    scaling_sweep,
    stabilizer_cost,
    stabilizer_factors,
    heisenberg_factors,
    unit_cell_counts,
)
from .samplers import heisenberg_estimate, stabilizer_sampling_estimate
from .stabilizer import stabilizer_state_count

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_INFEASIBLE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# output helpers


def _json_text(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _csv_text(rows: list[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["schema_version", *columns])
    for r in rows:
        w.writerow([SCHEMA_VERSION, *(_fmt(r[c]) for c in columns)])
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def _emit(args, text: str) -> None:
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)


def _parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (inclusive) or a comma list."""
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            return grid(start, stop, step)
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad grid {text!r}") from exc


def _rate(text: str) -> float:
    v = float(text)
    if not 0 <= v <= 1:
        raise argparse.ArgumentTypeError(f"rate {v} outside [0, 1]")
    return v


def _cache(args) -> DecompositionCache | None:
    directory = args.cache_dir or os.environ.get(CACHE_ENV)
    return DecompositionCache(directory) if directory else None


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc.msg}") from exc


# ---------------------------------------------------------------------------
# subcommands


def _state_from_args(args) -> ResourceState:
    s = args.state
    if s == "T":
        base = teleport_diagonal_gate(math.pi / 4)
    elif s == "U":
        if args.theta is None:
            raise UsageError("--state U needs --theta")
        base = teleport_diagonal_gate(args.theta)
    elif s == "dephased":
        base = push_dephasing(args.theta if args.theta is not None else math.pi / 4, args.p)
    elif s == "fused":
        base = fused_t_resource(args.p, args.fold, args.convention)
    elif s in ("unit2", "unit3"):
        base = unit_cell_resource(int(s[-1]), args.p, args.p2, args.convention)
    elif s == "vector":
        if not args.vector:
            raise UsageError("--state vector needs --vector FILE")
        data = _read_json(args.vector)
        try:
            v = PauliVector(int(data["n"]), np.asarray(data["coeffs"], dtype=float))
        except (KeyError, ValueError) as exc:
            raise UsageError(f"bad vector file: {exc}") from exc
        tq = tuple(data.get("t_qubits", range(v.n)))
        base = ResourceState(v, tq, "custom")
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown state {s}")
    return base.copies(args.copies) if args.copies > 1 else base


def cmd_rom(args) -> int:
    state = _state_from_args(args)
    if state.n > 8:
        raise UsageError(f"{state.n} qubits exceeds the 8-qubit limit")
    if args.basis == "full" and state.n > 4:
        raise UsageError("full basis is limited to 4 qubits; use --basis reduced")
    basis = state.basis(args.basis)
    cache = _cache(args)
    dec = cache.rom(state.vector, basis) if cache else rom(state.vector, basis)
    out = dec.to_dict()
    out.update({"state": state.description, "target_digest": state.vector.digest(), "n_basis": len(basis)})
    _emit(args, _json_text(out))
    return EXIT_OK


def cmd_basis(args) -> int:
    if args.kind == "full":
        if not 1 <= args.n <= 4:
            raise UsageError("full basis enumeration supports n = 1..4")
        b = full_basis(args.n)
        expected = stabilizer_state_count(args.n)
    else:
        tq = list(range(args.n)) if args.t_qubits is None else [int(q) for q in args.t_qubits.split(",") if q]
        b = reduced_basis(tq, args.n)
        expected = reduced_basis_count(args.n) if len(tq) == args.n else None
    out = {
        "schema_version": SCHEMA_VERSION,
        "tag": b.tag,
        "n": b.n,
        "columns": len(b),
        "formula_count": expected,
        "nonzeros": int(b.matrix.nnz),
    }
    _emit(args, _json_text(out))
    return EXIT_OK


def cmd_channel_norm(args) -> int:
    out: dict = {"schema_version": SCHEMA_VERSION}
    if args.unit:
        d2, d3 = unit_cell_norms(args.p, args.p2 if args.p2 is not None else args.p)
        out.update({"channel": f"unit{args.unit}", "norm": d2 if args.unit == 2 else d3})
        ptm = None
    elif args.gate:
        ptm = ptm_of_gate(args.gate, args.theta)
        out.update({"channel": args.gate})
    elif args.noise:
        params = {"p": args.p} if args.noise != "pauli" else {"p_x": args.px, "p_y": args.py, "p_z": args.pz}
        ptm = channel_from_dict({"kind": args.noise, "params": params}).ptm()
        out.update({"channel": args.noise, "params": params})
    else:
        raise UsageError("give one of --gate, --noise or --unit")
    if ptm is not None:
        out["norm"] = channel_stabilizer_norm(ptm)
        if args.ptm_csv:
            Path(args.ptm_csv).write_text(ptm.to_csv())
    _emit(args, _json_text(out))
    return EXIT_OK


def cmd_gadget(args) -> int:
    gate = ("U", args.theta) if args.gate == "U" else args.gate
    if args.gate == "U" and args.theta is None:
        raise UsageError("--gate U needs --theta")
    noise_kind = args.noise
    params = {"p": args.p}
    noise = channel_from_dict({"kind": noise_kind, "params": params})
    try:
        res, diag = noise_teleport(gate, noise)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    noisy = diag.apply(res.vector)
    dec = rom(noisy, full_basis(2))
    out = {
        "schema_version": SCHEMA_VERSION,
        "gate": str(args.gate),
        "theta": args.theta,
        "noise": noise.to_dict(),
        "resource_coeffs": [float(x) for x in noisy.coeffs],
        "diagonal_noise": diag.weights(),
        "rom": dec.l1,
        "decomposition": dec.to_dict(),
    }
    _emit(args, _json_text(out))
    return EXIT_OK


def cmd_simulate(args) -> int:
    circuit = NoisyCircuit.from_dict(_read_json(args.circuit)) if args.circuit else None
    if circuit is None:
        raise UsageError("--circuit FILE is required")
    decs = []
    if args.decomposition:
        try:
            decs.append(QuasiDecomposition.from_dict(_read_json(args.decomposition)))
        except (KeyError, ValueError) as exc:
            raise UsageError(f"bad decomposition file: {exc}") from exc
    results = {}
    methods = ("stabilizer", "heisenberg") if args.method == "both" else (args.method,)
    for m in methods:
        if m == "stabilizer":
            g = circuit.to_gadgetized(_cache(args), decs)
            r = stabilizer_sampling_estimate(g, args.shots, args.seed, args.delta, args.epsilon, args.threads)
        else:
            r = heisenberg_estimate(circuit.to_heisenberg(), args.shots, args.seed, args.delta, args.epsilon, args.threads)
        results[m] = r.to_dict()
    out = {"schema_version": SCHEMA_VERSION, "results": results}
    if args.exact:
        if circuit.n > 10:
            raise UsageError("--exact supports at most 10 qubits")
        out["exact"] = circuit.exact_expectation()
    _emit(args, _json_text(out))
    return EXIT_OK


def cmd_compare_units(args) -> int:
    grid_vals = _parse_grid(args.p_grid)
    cache = _cache(args)
    rows = []
    for p in grid_vals:
        h = heisenberg_factors(p, p)
        s = stabilizer_factors(p, p, False, cache)
        o = stabilizer_factors(p, p, True, cache)
        for k, unit in enumerate(("unit2", "unit3")):
            rows.append({"p": p, "unit": unit, "heisenberg": h[k], "stabilizer": s[k], "optimized_stabilizer": o[k]})
    columns = ["p", "unit", "heisenberg", "stabilizer", "optimized_stabilizer"]
    if args.format == "csv":
        _emit(args, _csv_text(rows, columns))
        return EXIT_OK
    out = {
        "schema_version": SCHEMA_VERSION,
        "rows": rows,
        # first grid p where Heisenberg is no worse than optimized stabilizer sampling
        "crossover": {u: crossover(u, grid_vals, cache=cache) for u in ("unit2", "unit3")},
    }
    _emit(args, _json_text(out))
    return EXIT_OK


_COST_COLUMNS = ["p", "t", "method", "cost_log2", "alpha"]


def cmd_rqc_costs(args) -> int:
    rows = []
    cache = _cache(args)
    for p in _parse_grid(args.p_grid):
        spec = RqcSpec(args.m, args.n, args.d, p, None, args.seed)
        reports = [stabilizer_cost(spec, False, cache), stabilizer_cost(spec, True, cache), heisenberg_cost(spec)]
        for r in reports:
            rows.append({"p": p, "t": r.t, "method": r.method, "cost_log2": r.cost_log2, "alpha": r.alpha})
    _emit(args, _csv_text(rows, _COST_COLUMNS))
    return EXIT_OK


def cmd_scaling(args) -> int:
    table = scaling_sweep(_parse_grid(args.p_grid), args.threads, _cache(args))
    rows = []
    names = {"alpha_stab": "stabilizer", "alpha_opt": "optimized_stabilizer", "alpha_heis": "heisenberg"}
    for r in table:
        for key, method in names.items():
            rows.append(
                {"p": r["p"], "t": float(args.t), "method": method, "cost_log2": r[key] * args.t, "alpha": r[key]}
            )
    _emit(args, _csv_text(rows, _COST_COLUMNS))
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_checks

    failed = []
    lines = []
    for name, ok, detail in run_checks():
        lines.append(f"{'ok  ' if ok else 'FAIL'} {name}: {detail}\n")
        if not ok:
            failed.append(name)
    _emit(args, "".join(lines))
    if failed:
        _fail("verify-failed", "failed checks: " + ",".join(failed))
        return EXIT_NUMERIC
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", "-o", help="output file (default stdout)")
    common.add_argument("--threads", type=int, default=1, help="worker count; never changes results")
    common.add_argument("--cache-dir", help=f"decomposition cache (default ${CACHE_ENV})")

    p = _Parser(prog="noisymagic", description="Noisy magic-state simulation cost toolkit")
    p.add_argument("--version", action="version", version=f"noisymagic {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("rom", parents=[common], help="robustness of magic of a resource state")
    r.add_argument("--state", choices=["T", "U", "dephased", "fused", "unit2", "unit3", "vector"], default="T")
    r.add_argument("--copies", type=int, default=1)
    r.add_argument("--basis", choices=["auto", "full", "reduced"], default="auto")
    r.add_argument("--theta", type=float)
    r.add_argument("--p", type=_rate, default=0.0)
    r.add_argument("--p2", type=_rate)
    r.add_argument("--fold", type=int, choices=[1, 2], default=1)
    r.add_argument("--convention", choices=["replacement", "error"], default="replacement")
    r.add_argument("--vector", help="JSON file with n, coeffs and optional t_qubits")
    r.set_defaults(func=cmd_rom)

    b = sub.add_parser("basis", parents=[common], help="stabilizer basis sizes")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--kind", choices=["full", "reduced"], default="full")
    b.add_argument("--t-qubits", help="comma list; default all qubits")
    b.set_defaults(func=cmd_basis)

    c = sub.add_parser("channel-norm", parents=[common], help="channel stabilizer norm")
    c.add_argument("--gate")
    c.add_argument("--theta", type=float)
    c.add_argument("--noise", choices=["depo1", "depo2", "dephasing", "pauli"])
    c.add_argument("--unit", type=int, choices=[2, 3])
    c.add_argument("--p", type=_rate, default=0.0)
    c.add_argument("--p2", type=_rate)
    c.add_argument("--px", type=_rate, default=0.0)
    c.add_argument("--py", type=_rate, default=0.0)
    c.add_argument("--pz", type=_rate, default=0.0)
    c.add_argument("--ptm-csv", help="also write the PTM as CSV")
    c.set_defaults(func=cmd_channel_norm)

    g = sub.add_parser("gadget", parents=[common], help="noise-teleported gadget resource")
    g.add_argument("--gate", default="T", help="T, TDG, S, Z or U")
    g.add_argument("--theta", type=float)
    g.add_argument("--noise", choices=["depo1", "dephasing", "x_error", "y_error", "z_error"], default="depo1")
    g.add_argument("--p", type=_rate, default=0.0)
    g.set_defaults(func=cmd_gadget)

    s = sub.add_parser("simulate", parents=[common], help="estimate <A> by sampling")
    s.add_argument("--circuit", required=True, help="circuit JSON")
    s.add_argument("--decomposition", help="decomposition JSON to use for a matching resource")
    s.add_argument("--method", choices=["stabilizer", "heisenberg", "both"], default="both")
    s.add_argument("--shots", type=int)
    s.add_argument("--delta", type=float, default=0.05)
    s.add_argument("--epsilon", type=float, default=0.05)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--exact", action="store_true", help="also report the dense-oracle value")
    s.set_defaults(func=cmd_simulate)

    u = sub.add_parser("compare-units", parents=[common], help="per-unit-cell factors and crossovers")
    u.add_argument("--p-grid", default="0:0.2:0.01")
    u.add_argument("--format", choices=["csv", "json"], default="csv", help="json adds the crossover points")
    u.set_defaults(func=cmd_compare_units)

    q = sub.add_parser("rqc-costs", parents=[common], help="costs of an m x n x d random circuit")
    q.add_argument("--m", type=int, default=6)
    q.add_argument("--n", type=int, default=6)
    q.add_argument("--d", type=int, default=12)
    q.add_argument("--p-grid", default="0,0.05,0.1,0.15,0.2")
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(func=cmd_rqc_costs)

    a = sub.add_parser("scaling", parents=[common], help="scaling exponents alpha(p)")
    a.add_argument("--p-grid", default="0:0.2:0.01")
    a.add_argument("--t", type=int, default=40, help="T count for the cost_log2 column")
    a.set_defaults(func=cmd_scaling)

    v = sub.add_parser("verify", parents=[common], help="run the dense-oracle self-checks")
    v.set_defaults(func=cmd_verify)
    return p


def _fail(kind: str, message: str) -> None:
    one_line = " ".join(str(message).split())
    sys.stderr.write(f"noisymagic: error={kind} message={json.dumps(one_line)}\n")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "threads", 1) < 1:
            raise UsageError("--threads must be at least 1")
        if getattr(args, "copies", 1) < 1:
            raise UsageError("--copies must be at least 1")
        return args.func(args)
    except UsageError as exc:
        _fail("usage", str(exc))
        return EXIT_USAGE
    except InfeasibleError as exc:
        _fail("infeasible", str(exc))
        return EXIT_INFEASIBLE
    except SolverError as exc:
        _fail("solver", str(exc))
        return EXIT_NUMERIC
    except (ValueError, KeyError, OSError) as exc:
        _fail("input", str(exc))
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())
