"""Robustness of magic as an L1-minimisation linear program.

The LP for a target ``b`` (a :class:`PauliVector`) and a basis matrix ``A``
whose columns are stabilizer-state PauliVectors is

    minimise  sum(u + v)   subject to  A (u - v) = b,  u, v >= 0.

Rows on which neither the basis nor the target has support are dropped
before solving, which keeps the 8-qubit reduced problems small.
"""

from __future__ import annotations

import itertools
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .pauli import PauliString, PauliVector
from .symmetry import reduce_problem
from .stabilizer import (
    StabilizerTableau,
    enumerate_stabilizer_states,
    stabilizer_basis_matrix,
    stabilizer_state_count,
)

SCHEMA_VERSION = 1
FEASIBILITY_TOL = 1e-7
OPTIMALITY_TOL = 1e-6
MAX_REDUCED_QUBITS = 8
CACHE_ENV = "NOISYMAGIC_CACHE_DIR"


class RomError(RuntimeError):
    """Base class for LP failures."""


class InfeasibleError(RomError):
    """The target is not in the span of the basis."""


class SolverError(RomError):
    """The LP solver did not converge to a certified optimum."""


# single-qubit states used by the reduced basis: (stabilizer letter, sign)
_SINGLE = {"+": ("X", 1), "-": ("X", -1), "+i": ("Y", 1), "-i": ("Y", -1)}
_T_SINGLES = ("+", "-", "+i", "-i")
_PLAIN_SINGLES = ("+", "-")
# two-qubit groups over X/Y pairs
PAIR_GROUPS = (("+XX", "+YY"), ("-XX", "-YY"), ("+XY", "+YX"), ("-XY", "-YX"))


@dataclass(frozen=True, eq=False)
class StabilizerBasis:
    """Columns of stabilizer-state PauliVectors plus enough metadata to
    rebuild each state's tableau.

    ``factors[i]`` (reduced bases only) lists ``(qubits, label)`` pairs: a
    single-qubit label from ``+ - +i -i`` or a pair-group index ``0..3``.
    """

    n: int
    matrix: sp.csc_matrix
    kind: str
    t_qubits: tuple[int, ...] = ()
    factors: tuple = field(default=(), repr=False)

    def __len__(self) -> int:
        return self.matrix.shape[1]

    @property
    def tag(self) -> str:
        if self.kind == "full":
            return f"full-n{self.n}"
        return f"reduced-n{self.n}-t" + ".".join(map(str, self.t_qubits))

    def column(self, i: int) -> PauliVector:
        return PauliVector(self.n, self.matrix[:, [i]].toarray().ravel())

    def tableau(self, i: int) -> StabilizerTableau:
        if self.kind == "full":
            return _full_states(self.n)[i]
        gens = []
        for qubits, label in self.factors[i]:
            if len(qubits) == 1:
                letter, sign = _SINGLE[label]
                p = PauliString.single(self.n, qubits[0], letter)
                gens.append(p if sign > 0 else -p)
            else:
                for g in PAIR_GROUPS[label]:
                    gens.append(_place(PauliString.from_str(g), qubits, self.n))
        return StabilizerTableau.from_stabilizers(gens)


def _place(p: PauliString, qubits: Sequence[int], n: int) -> PauliString:
    x = z = 0
    for k, q in enumerate(qubits):
        x |= ((p.x_mask >> k) & 1) << q
        z |= ((p.z_mask >> k) & 1) << q
    return PauliString(n, x, z, p.phase_exp)


@lru_cache(maxsize=None)
def _full_states(n: int) -> list[StabilizerTableau]:
    return enumerate_stabilizer_states(n)


@lru_cache(maxsize=None)
def full_basis(n: int) -> StabilizerBasis:
    """Every n-qubit stabilizer state (n <= 4)."""
    return StabilizerBasis(n, stabilizer_basis_matrix(n), "full")


def reduced_basis_count(n: int) -> int:
    """Size of the reduced basis when all ``n`` qubits carry T-type resources."""
    total = sum(
        math.factorial(n) // (2**k * math.factorial(k) * math.factorial(n - 2 * k)) * 4 ** (n - k)
        for k in range(n // 2 + 1)
    )
    return total


def _matchings(items: Sequence[int]) -> Iterable[list[tuple[int, int]]]:
    """All sets of disjoint pairs (including the empty set)."""
    items = list(items)
    if len(items) < 2:
        yield []
        return
    first, rest = items[0], items[1:]
    # first stays unpaired
    yield from _matchings(rest)
    for k, partner in enumerate(rest):
        for m in _matchings(rest[:k] + rest[k + 1 :]):
            yield [(first, partner)] + m


def _single_factor(label: str) -> tuple[np.ndarray, np.ndarray]:
    letter, sign = _SINGLE[label]
    return np.array([0, "IXYZ".index(letter)]), np.array([1.0, sign])


@lru_cache(maxsize=None)
def _pair_factor(group: int) -> tuple[np.ndarray, np.ndarray]:
    v = StabilizerTableau.from_stabilizers(list(PAIR_GROUPS[group])).pauli_vector()
    idx = v.support()
    return idx, np.asarray(v.coeffs)[idx]


def _place_factor(idx: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    out = np.zeros_like(idx)
    for k, q in enumerate(qubits):
        out += ((idx >> (2 * k)) & 3) << (2 * q)
    return out


def reduced_basis(t_qubits: Iterable[int], n: int) -> StabilizerBasis:
    """Reduced basis for resources whose non-stabilizer part sits on ``t_qubits``.

    T-carrying qubits take ``|+>, |->, |+i>, |-i>`` or join one of the four
    X/Y-pair entangled states with another T-carrying qubit (any matching of
    up to ``floor(k/2)`` pairs); other qubits take ``|+>`` or ``|->``.
    """
    t_qubits = tuple(sorted(set(int(q) for q in t_qubits)))
    if not 0 < n <= MAX_REDUCED_QUBITS:
        raise ValueError(f"reduced basis supports 1..{MAX_REDUCED_QUBITS} qubits, got {n}")
    if any(not 0 <= q < n for q in t_qubits):
        raise ValueError(f"T qubits {t_qubits} out of range for {n} qubits")
    return _reduced_basis(t_qubits, n)


@lru_cache(maxsize=None)
def _reduced_basis(t_qubits: tuple[int, ...], n: int) -> StabilizerBasis:
    plain = [q for q in range(n) if q not in t_qubits]
    singles = {lab: _single_factor(lab) for lab in _T_SINGLES}
    rows, vals, factors = [], [], []
    for matching in _matchings(t_qubits):
        paired = {q for pair in matching for q in pair}
        lone_t = [q for q in t_qubits if q not in paired]
        choices = (
            [[(pair, g) for g in range(4)] for pair in matching]
            + [[((q,), lab) for lab in _T_SINGLES] for q in lone_t]
            + [[((q,), lab) for lab in _PLAIN_SINGLES] for q in plain]
        )
        for combo in itertools.product(*choices):
            idx = np.zeros(1, dtype=np.int64)
            val = np.ones(1)
            for qubits, label in combo:
                fi, fv = _pair_factor(label) if len(qubits) == 2 else singles[label]
                fi = _place_factor(fi, qubits)
                idx = (idx[:, None] + fi[None, :]).ravel()
                val = (val[:, None] * fv[None, :]).ravel()
            rows.append(idx)
            vals.append(val)
            factors.append(tuple(sorted(combo)))
    cols = np.repeat(np.arange(len(rows)), [r.size for r in rows])
    mat = sp.csc_matrix(
        (np.concatenate(vals), (np.concatenate(rows), cols)), shape=(4**n, len(rows))
    )
    mat.sort_indices()
    return StabilizerBasis(n, mat, "reduced", t_qubits, tuple(factors))


def basis_from_tag(tag: str) -> StabilizerBasis:
    """Inverse of :attr:`StabilizerBasis.tag`."""
    parts = tag.split("-")
    try:
        kind, n = parts[0], int(parts[1].lstrip("n"))
        if kind == "full" and len(parts) == 2:
            return full_basis(n)
        if kind == "reduced" and len(parts) == 3 and parts[2].startswith("t"):
            body = parts[2][1:]
            qs = [int(q) for q in body.split(".")] if body else []
            return reduced_basis(qs, n)
    except ValueError as exc:
        raise ValueError(f"bad basis tag {tag!r}") from exc
    raise ValueError(f"bad basis tag {tag!r}")


# ---------------------------------------------------------------------------
# decompositions


@dataclass(frozen=True, eq=False)
class QuasiDecomposition:
    """Sparse quasiprobability decomposition ``target = sum_i x_i sigma_i``."""

    basis: StabilizerBasis
    indices: np.ndarray
    coefficients: np.ndarray
    l1: float
    residual: float
    dual_objective: float | None = None

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def negativity(self) -> float:
        return float(-self.coefficients[self.coefficients < 0].sum())

    def tableau(self, k: int) -> StabilizerTableau:
        """Tableau of the ``k``-th state with a nonzero coefficient."""
        return self.basis.tableau(int(self.indices[k]))

    def reconstruct(self) -> PauliVector:
        c = self.basis.matrix[:, self.indices] @ self.coefficients
        return PauliVector(self.n, np.asarray(c).ravel())

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "n": self.n,
            "basis_tag": self.basis.tag,
            "state_indices": [int(i) for i in self.indices],
            "coefficients": [float(x) for x in self.coefficients],
            "l1": float(self.l1),
            "residual": float(self.residual),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> QuasiDecomposition:
        basis = basis_from_tag(data["basis_tag"])
        if basis.n != data["n"]:
            raise ValueError("qubit count does not match basis tag")
        idx = np.asarray(data["state_indices"], dtype=np.int64)
        coef = np.asarray(data["coefficients"], dtype=float)
        if idx.shape != coef.shape:
            raise ValueError("state_indices and coefficients differ in length")
        if idx.size and (idx.min() < 0 or idx.max() >= len(basis)):
            raise ValueError("state index out of range for basis")
        return cls(basis, idx, coef, float(data["l1"]), float(data["residual"]))

    @classmethod
    def from_json(cls, text: str) -> QuasiDecomposition:
        return cls.from_dict(json.loads(text))


def _solve_lp(
    a: sp.csc_matrix, b: np.ndarray, weight: np.ndarray | None = None
) -> tuple[np.ndarray, float, float]:
    ncol = a.shape[1]
    w = np.ones(ncol) if weight is None else weight
    a_eq = sp.hstack([a, -a], format="csc")
    res = linprog(
        np.concatenate([w, w]),
        A_eq=a_eq,
        b_eq=b,
        bounds=(0, None),
        method="highs-ds",
        options={"primal_feasibility_tolerance": 1e-9, "dual_feasibility_tolerance": 1e-9},
    )
    if res.status == 2:
        raise InfeasibleError(res.message)
    if res.status != 0:
        raise SolverError(res.message)
    x = res.x[:ncol] - res.x[ncol:]
    dual = float(b @ res.eqlin.marginals)
    return x, float(res.fun), dual


SYMMETRIZE_MIN_COLUMNS = 4096


def rom(target: PauliVector, basis: StabilizerBasis, symmetrize: bool | None = None) -> QuasiDecomposition:
    """Minimal-L1 decomposition of ``target`` over ``basis`` (global LP optimum).

    ``symmetrize`` solves the orbit-reduced LP (see :mod:`noisymagic.symmetry`);
    the default turns it on for bases with at least 4096 columns.  Both give
    the same optimum; the reduced one returns a group-averaged decomposition.
    """
    if target.n != basis.n:
        raise ValueError(f"target has {target.n} qubits, basis {basis.n}")
    b = np.asarray(target.coeffs)
    if abs(b[0] - 1) > FEASIBILITY_TOL:
        raise ValueError(f"target identity coefficient is {b[0]}, expected 1")
    a = basis.matrix
    target_rows = np.flatnonzero(np.abs(b) > 1e-12)
    covered = np.zeros(b.size, dtype=bool)
    covered[a.indices] = True
    if not covered[target_rows].all():
        raise InfeasibleError(
            f"target has support outside the span of basis {basis.tag}"
        )
    if symmetrize is None:
        symmetrize = len(basis) >= SYMMETRIZE_MIN_COLUMNS
    reduced = None
    if symmetrize:
        t_qubits = basis.t_qubits if basis.kind == "reduced" else None
        reduced = reduce_problem(a, b, basis.n, t_qubits)
    if reduced is not None:
        y, fun, dual = _solve_lp(reduced.a, reduced.b, reduced.weight)
        x = reduced.expand(y)
    else:
        rows = np.flatnonzero(covered)
        x, fun, dual = _solve_lp(a[rows], b[rows])
    keep = np.flatnonzero(np.abs(x) > 1e-12)
    coef = x[keep]
    recon = np.asarray(a[:, keep] @ coef).ravel()
    residual = float(np.max(np.abs(recon - b)))
    if residual > FEASIBILITY_TOL:
        raise SolverError(f"reconstruction residual {residual:.2e} exceeds {FEASIBILITY_TOL}")
    l1 = float(np.abs(coef).sum())
    if abs(l1 - dual) > OPTIMALITY_TOL:
        raise SolverError(f"duality gap {abs(l1 - dual):.2e} exceeds {OPTIMALITY_TOL}")
    return QuasiDecomposition(basis, keep.astype(np.int64), coef, l1, residual, dual)


def rom_upper_bound(target: PauliVector, basis: StabilizerBasis) -> float:
    """ROM over a reduced basis; an upper bound on the true robustness."""
    return rom(target, basis).l1


def rom_dephased_rotation(theta: float, p: float) -> float:
    """ROM of ``(1-p)|U><U| + p Z|U><U|Z`` with ``|U> = diag(1, e^{i theta})|+>``."""
    if not 0 <= p <= 0.5:
        raise ValueError(f"dephasing rate {p} outside [0, 1/2]")
    s = 1 - 2 * p
    target = PauliVector(1, [1.0, s * math.cos(theta), s * math.sin(theta), 0.0])
    return rom(target, full_basis(1)).l1


def submultiplicative_bound(rom_values: Iterable[tuple[float, float]]) -> float:
    """Product of block robustnesses, ``prod value**copies``."""
    out = 1.0
    for value, copies in rom_values:
        if value <= 0:
            raise ValueError(f"robustness must be positive, got {value}")
        out *= value**copies
    return out


# ---------------------------------------------------------------------------
# caching


class DecompositionCache:
    """Directory of decomposition JSON files keyed by (target digest, basis tag).

    Writes go to a temporary file that is atomically renamed into place, so
    concurrent readers never see partial files.
    """

    def __init__(self, directory: str | os.PathLike | None = None):
        if directory is None:
            directory = os.environ.get(CACHE_ENV) or Path.home() / ".cache" / "noisymagic"
        self.directory = Path(directory)

    def path(self, target: PauliVector, basis: StabilizerBasis) -> Path:
        return self.directory / f"{basis.tag}__{target.digest()}.json"

    def get(self, target: PauliVector, basis: StabilizerBasis) -> QuasiDecomposition | None:
        path = self.path(target, basis)
        try:
            return QuasiDecomposition.from_json(path.read_text())
        except (OSError, ValueError, KeyError):
            return None

    def put(self, target: PauliVector, decomposition: QuasiDecomposition) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.path(target, decomposition.basis)
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            fh.write(decomposition.to_json())
        os.replace(tmp, path)

    def rom(self, target: PauliVector, basis: StabilizerBasis) -> QuasiDecomposition:
        hit = self.get(target, basis)
        if hit is not None:
            return hit
        dec = rom(target, basis)
        self.put(target, dec)
        return dec


def rom_cached(
    target: PauliVector, basis: StabilizerBasis, cache: DecompositionCache | None = None
) -> QuasiDecomposition:
    return (cache or DecompositionCache()).rom(target, basis)


def full_count(n: int) -> int:
    return stabilizer_state_count(n)
