"""Cost model for noisy random quantum circuits built from unit cells.

A unit cell is two single-qubit gates (drawn from sqrt(X), sqrt(Y), T) on a
nearest-neighbour pair followed by a CZ.  Cells with 0, 1 and 2 T gates are
types 1, 2 and 3.  Per-cell factors are

* Heisenberg propagation: the channel stabilizer norm of the cell,
* stabilizer sampling: the ROM of the cell's noisy resource state,
* optimized stabilizer sampling: ``sqrt`` of the ROM of two copies.

A circuit cost is the squared product of per-cell factors and its scaling
exponent is ``alpha = log2(cost) / t`` with ``t`` the T count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .channels import unit_cell_norms
from .circuits import Instruction, NoisyCircuit
from .gadgets import unit_cell_resource
from .pauli import PauliString
from .rom import SCHEMA_VERSION, DecompositionCache

METHODS = ("stabilizer", "optimized_stabilizer", "heisenberg")
SINGLE_QUBIT_GATES = ("SQRT_X", "SQRT_Y", "T")
ALPHA_REFERENCE = 0.468


@dataclass(frozen=True)
class RqcSpec:
    m: int
    n: int
    d: int
    p1: float = 0.0
    p2: float | None = None
    seed: int = 0

    def __post_init__(self):
        if min(self.m, self.n) < 1 or self.d < 0:
            raise ValueError("lattice dimensions must be positive and depth non-negative")
        if self.m * self.n < 2:
            raise ValueError("need at least two qubits")
        p2 = self.p1 if self.p2 is None else self.p2
        for name, v in (("p1", self.p1), ("p2", p2)):
            if not 0 <= v <= 1:
                raise ValueError(f"{name}={v} outside [0, 1]")
        object.__setattr__(self, "p2", p2)

    @property
    def qubits(self) -> int:
        return self.m * self.n


@dataclass(frozen=True)
class CostReport:
    method: str
    t: float
    cost_log2: float
    alpha: float
    per_cell: tuple[float, float]  # factors of unit cells 2 and 3

    @property
    def cost(self) -> float:
        return 2.0**self.cost_log2

    def to_dict(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, **asdict(self)}


# ---------------------------------------------------------------------------
# circuit layout


def _layer_pairs(m: int, n: int, layer: int) -> list[tuple[int, int]]:
    """Disjoint nearest-neighbour pairs; four alternating patterns."""
    idx = lambda r, c: r * n + c  # noqa: E731
    pattern = layer % 4
    pairs = []
    if pattern < 2:
        off = pattern
        for r in range(m):
            for c in range(off, n - 1, 2):
                pairs.append((idx(r, c), idx(r, c + 1)))
    else:
        off = pattern - 2
        for c in range(n):
            for r in range(off, m - 1, 2):
                pairs.append((idx(r, c), idx(r + 1, c)))
    if not pairs:  # a 1 x n or m x 1 lattice has only one orientation
        return _layer_pairs(m, n, layer + 2) if pattern >= 2 else _layer_pairs(m, n, layer + 1)
    return pairs


def layout(spec: RqcSpec) -> list[list[tuple[int, int]]]:
    return [_layer_pairs(spec.m, spec.n, k) for k in range(spec.d)]


def unit_cell_count_total(spec: RqcSpec) -> int:
    """``D``: the number of two-qubit gate slots, one per unit cell."""
    return sum(len(p) for p in layout(spec))


def unit_cell_counts(spec: RqcSpec) -> tuple[float, float, float]:
    """Expected numbers of unit cells 1, 2, 3: ``(4/9, 4/9, 1/9) D``."""
    total = unit_cell_count_total(spec)
    return 4 * total / 9, 4 * total / 9, total / 9


def generate_gates(spec: RqcSpec) -> list[tuple[list[str], list[tuple[int, int]]]]:
    """Seeded single-qubit gate choices per cycle, with that cycle's CZ pairs."""
    rng = np.random.default_rng(spec.seed)
    out = []
    for pairs in layout(spec):
        gates = [SINGLE_QUBIT_GATES[k] for k in rng.integers(0, 3, size=spec.qubits)]
        out.append((gates, pairs))
    return out


def empirical_unit_cell_counts(spec: RqcSpec) -> tuple[int, int, int]:
    counts = [0, 0, 0]
    for gates, pairs in generate_gates(spec):
        for a, b in pairs:
            counts[(gates[a] == "T") + (gates[b] == "T")] += 1
    return counts[0], counts[1], counts[2]


def to_noisy_circuit(spec: RqcSpec, observable: str | None = None) -> NoisyCircuit:
    """The generated circuit with depolarizing noise after every gate in a cell.

    Only qubits inside a cell get a single-qubit gate, so the circuit is an
    exact product of unit cells.
    """
    ins: list[Instruction] = []
    for gates, pairs in generate_gates(spec):
        for a, b in pairs:
            for q in (a, b):
                ins.append(Instruction(gates[q], (q,)))
                if spec.p1 > 0:
                    ins.append(Instruction("depo1", (q,), (spec.p1,)))
            ins.append(Instruction("CZ", (a, b)))
            if spec.p2 > 0:
                ins.append(Instruction("depo2", (a, b), (spec.p2,)))
    obs = observable or "Z" + "I" * (spec.qubits - 1)
    return NoisyCircuit(spec.qubits, tuple(ins), PauliString.from_str(obs), ("+",) * spec.qubits)


# ---------------------------------------------------------------------------
# per-cell factors


def heisenberg_factors(p1: float, p2: float) -> tuple[float, float]:
    d2, d3 = unit_cell_norms(p1, p2)
    return max(1.0, d2), max(1.0, d3)


@lru_cache(maxsize=1024)
def _stabilizer_factors(p1: float, p2: float, optimized: bool, cache_dir: str | None) -> tuple[float, float]:
    cache = DecompositionCache(cache_dir) if cache_dir is not None else None
    out = []
    for kind in (2, 3):
        r = unit_cell_resource(kind, p1, p2)
        if optimized:
            out.append(math.sqrt(r.copies(2).rom("reduced", cache).l1))
        else:
            out.append(r.rom("full", cache).l1)
    return out[0], out[1]


def stabilizer_factors(
    p1: float, p2: float, optimized: bool = False, cache: DecompositionCache | None = None
) -> tuple[float, float]:
    """Per-cell ROM factors; single copy on the full 4-qubit basis, two copies on
    the reduced 8-qubit basis when ``optimized``."""
    return _stabilizer_factors(float(p1), float(p2), bool(optimized), str(cache.directory) if cache else None)


def _report(method: str, spec: RqcSpec, factors: tuple[float, float]) -> CostReport:
    _, n2, n3 = unit_cell_counts(spec)
    t = n2 + 2 * n3
    cost_log2 = 2 * (n2 * math.log2(factors[0]) + n3 * math.log2(factors[1]))
    alpha = cost_log2 / t if t > 0 else 0.0
    return CostReport(method, t, cost_log2, alpha, factors)


def heisenberg_cost(spec: RqcSpec) -> CostReport:
    return _report("heisenberg", spec, heisenberg_factors(spec.p1, spec.p2))


def stabilizer_cost(
    spec: RqcSpec, optimized: bool = False, cache: DecompositionCache | None = None
) -> CostReport:
    method = "optimized_stabilizer" if optimized else "stabilizer"
    return _report(method, spec, stabilizer_factors(spec.p1, spec.p2, optimized, cache))


def alpha_per_t(factors: tuple[float, float]) -> float:
    """Scaling exponent from per-cell factors with the expected cell mix."""
    return (4 / 3) * math.log2(factors[0]) + (1 / 3) * math.log2(factors[1])


# ---------------------------------------------------------------------------
# sweeps


def grid(start: float, stop: float, step: float) -> list[float]:
    """Inclusive grid rounded to the step's decimals."""
    if step <= 0:
        raise ValueError("grid step must be positive")
    decimals = max(0, -math.floor(math.log10(step)) + 2)
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, decimals) for k in range(count)]


def _sweep_row(args) -> dict:
    p, cache_dir = args
    cache = DecompositionCache(cache_dir) if cache_dir else None
    stab = stabilizer_factors(p, p, False, cache)
    opt = stabilizer_factors(p, p, True, cache)
    heis = heisenberg_factors(p, p)
    return {
        "p": p,
        "alpha_stab": alpha_per_t(stab),
        "alpha_opt": alpha_per_t(opt),
        "alpha_heis": alpha_per_t(heis),
        "stab_unit2": stab[0],
        "stab_unit3": stab[1],
        "opt_unit2": opt[0],
        "opt_unit3": opt[1],
        "heis_unit2": heis[0],
        "heis_unit3": heis[1],
    }


def scaling_sweep(
    p_grid: Iterable[float], threads: int = 1, cache: DecompositionCache | None = None
) -> list[dict]:
    """Per-p scaling exponents of the three methods (with ``p1 = p2 = p``)."""
    jobs = [(float(p), str(cache.directory) if cache else None) for p in p_grid]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(threads) as pool:
            return list(pool.map(_sweep_row, jobs))
    return [_sweep_row(j) for j in jobs]


def crossover(
    kind: str,
    p_grid: Sequence[float] | None = None,
    a: str = "heisenberg",
    b: str = "optimized_stabilizer",
    cache: DecompositionCache | None = None,
) -> float | None:
    """Smallest grid ``p`` where method ``a``'s per-cell factor is at most ``b``'s.

    Returns ``None`` when ``a == b`` (no meaningful crossing) or when the
    factors never cross on the grid.
    """
    if kind not in ("unit2", "unit3"):
        raise ValueError("kind must be unit2 or unit3")
    if a == b:
        return None
    k = 0 if kind == "unit2" else 1
    p_grid = grid(0.0, 0.3, 0.01) if p_grid is None else p_grid

    def factor(method: str, p: float) -> float:
        if method == "heisenberg":
            return heisenberg_factors(p, p)[k]
        return stabilizer_factors(p, p, method == "optimized_stabilizer", cache)[k]

    for p in p_grid:
        if factor(a, p) <= factor(b, p):
            return p
    return None


def alpha_crossing(
    method: str,
    level: float = ALPHA_REFERENCE,
    p_grid: Sequence[float] | None = None,
    cache: DecompositionCache | None = None,
) -> float | None:
    """Smallest grid ``p`` with ``alpha(p) <= level``; the curves are monotone,
    so the grid is scanned by bisection."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    p_grid = list(grid(0.0, 0.5, 0.01) if p_grid is None else p_grid)

    def alpha(p: float) -> float:
        if method == "heisenberg":
            return alpha_per_t(heisenberg_factors(p, p))
        return alpha_per_t(stabilizer_factors(p, p, method == "optimized_stabilizer", cache))

    lo, hi = 0, len(p_grid) - 1
    if alpha(p_grid[hi]) > level:
        return None
    if alpha(p_grid[lo]) <= level:
        return p_grid[lo]
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if alpha(p_grid[mid]) <= level:
            hi = mid
        else:
            lo = mid
    return p_grid[hi]


def sample_budget(t: float, alpha: float, delta: float, epsilon: float) -> mpmath.mpf:
    """``2^(alpha t) (2/delta^2) ln(2/epsilon)`` in arbitrary precision."""
    if not delta > 0 or not 0 < epsilon < 1:
        raise ValueError("need delta > 0 and 0 < epsilon < 1")
    if t < 0 or alpha < 0:
        raise ValueError("t and alpha must be non-negative")
    with mpmath.workdps(30):
        return mpmath.power(2, mpmath.mpf(alpha) * t) * 2 / mpmath.mpf(delta) ** 2 * mpmath.log(2 / mpmath.mpf(epsilon))
