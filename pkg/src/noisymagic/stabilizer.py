"""Aaronson-Gottesman stabilizer tableaus and stabilizer-state enumeration."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .pauli import PauliString, PauliVector, commutes, pauli_mul

_ALIASES = {
    "H": "H",
    "S": "S",
    "SDG": "SDG",
    "S_DAG": "SDG",
    "S†": "SDG",
    "SQRT_X": "SQRT_X",
    "√X": "SQRT_X",
    "SX": "SQRT_X",
    "SQRT_Y": "SQRT_Y",
    "√Y": "SQRT_Y",
    "SY": "SQRT_Y",
    "CNOT": "CNOT",
    "CX": "CNOT",
    "CZ": "CZ",
    "SWAP": "SWAP",
    "X": "X",
    "Y": "Y",
    "Z": "Z",
    "I": "I",
}

GATE_ARITY = {
    "I": 1,
    "H": 1,
    "S": 1,
    "SDG": 1,
    "SQRT_X": 1,
    "SQRT_Y": 1,
    "X": 1,
    "Y": 1,
    "Z": 1,
    "CNOT": 2,
    "CZ": 2,
    "SWAP": 2,
}


@dataclass(frozen=True)
class CliffordOp:
    """A named Clifford gate on explicit qubits (control first for CNOT)."""

    name: str
    qubits: tuple[int, ...]

    def __post_init__(self):
        key = self.name.upper() if self.name not in _ALIASES else self.name
        if key not in _ALIASES:
            raise ValueError(f"unknown Clifford gate {self.name!r}")
        name = _ALIASES[key]
        qubits = tuple(int(q) for q in self.qubits)
        if len(qubits) != GATE_ARITY[name]:
            raise ValueError(f"{name} acts on {GATE_ARITY[name]} qubit(s), got {qubits}")
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"repeated qubit in {qubits}")
        if any(q < 0 for q in qubits):
            raise ValueError(f"negative qubit index in {qubits}")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "qubits", qubits)

    @classmethod
    def parse(cls, spec) -> CliffordOp:
        """Accept a CliffordOp, ``("CNOT", [0, 1])`` or ``"CNOT 0 1"``."""
        if isinstance(spec, CliffordOp):
            return spec
        if isinstance(spec, str):
            name, *qs = spec.split()
            return cls(name, tuple(int(q) for q in qs))
        name, qubits = spec
        if isinstance(qubits, int):
            qubits = (qubits,)
        return cls(name, tuple(qubits))

    def __str__(self) -> str:
        return " ".join([self.name, *map(str, self.qubits)])


def _g_vec(x1, z1, x2, z2):
    x1 = x1.astype(np.int64)
    z1 = z1.astype(np.int64)
    x2 = x2.astype(np.int64)
    z2 = z2.astype(np.int64)
    return np.where(
        x1 & z1,
        z2 - x2,
        np.where(x1, z2 * (2 * x2 - 1), np.where(z1, x2 * (1 - 2 * z2), 0)),
    )


class StabilizerTableau:
    """Pure n-qubit stabilizer state with destabilizers.

    Rows ``0..n-1`` are destabilizers, rows ``n..2n-1`` stabilizers.  Row ``i``
    is ``(-1)**r[i]`` times the Pauli letters encoded by ``x[i]``, ``z[i]``.
    Methods return new tableaus; the instance itself is never mutated.
    """

    __slots__ = ("n", "x", "z", "r")

    def __init__(self, n: int, x: np.ndarray, z: np.ndarray, r: np.ndarray):
        self.n = n
        self.x = np.asarray(x, dtype=np.uint8).reshape(2 * n, n)
        self.z = np.asarray(z, dtype=np.uint8).reshape(2 * n, n)
        self.r = np.asarray(r, dtype=np.uint8).reshape(2 * n)

    # -- construction -----------------------------------------------------

    @classmethod
    def zero_state(cls, n: int) -> StabilizerTableau:
        eye = np.eye(n, dtype=np.uint8)
        zero = np.zeros((n, n), dtype=np.uint8)
        return cls(n, np.vstack([eye, zero]), np.vstack([zero, eye]), np.zeros(2 * n))

    @classmethod
    def from_stabilizers(cls, generators: Sequence[PauliString | str]) -> StabilizerTableau:
        """Tableau of the state stabilized by ``n`` independent commuting generators."""
        gens = [PauliString.from_str(g) if isinstance(g, str) else g for g in generators]
        if not gens:
            return cls(0, np.zeros((0, 0)), np.zeros((0, 0)), np.zeros(0))
        n = gens[0].n
        if len(gens) != n:
            raise ValueError(f"need {n} generators, got {len(gens)}")
        for i, g in enumerate(gens):
            if g.n != n or not g.is_hermitian:
                raise ValueError(f"generator {g} is not a Hermitian {n}-qubit Pauli")
            for h in gens[i + 1 :]:
                if not commutes(g, h):
                    raise ValueError(f"generators {g} and {h} anticommute")
        sx = np.array([[(g.x_mask >> q) & 1 for q in range(n)] for g in gens], dtype=np.uint8)
        sz = np.array([[(g.z_mask >> q) & 1 for q in range(n)] for g in gens], dtype=np.uint8)
        # destabilizer d_j must satisfy <d_j, s_k> = delta_jk, with
        # <a, b> = a_x . b_z + a_z . b_x  (mod 2)
        system = np.hstack([sz, sx])
        d = _solve_gf2(system, np.eye(n, dtype=np.uint8))
        # make destabilizers mutually commute by adding stabilizers
        for j in range(n):
            for i in range(j):
                if _symp(d[i], d[j], n):
                    d[j] ^= np.concatenate([sx[i], sz[i]])
        x = np.vstack([d[:, :n], sx])
        z = np.vstack([d[:, n:], sz])
        r = np.concatenate([np.zeros(n, dtype=np.uint8), [0 if g.sign > 0 else 1 for g in gens]])
        return cls(n, x, z, r)

    @classmethod
    def from_label(cls, labels: str) -> StabilizerTableau:
        """Product state from single-qubit labels, e.g. ``"0+-"`` or ``["+i", "1"]``."""
        if isinstance(labels, str):
            labels = _split_labels(labels)
        gens = []
        n = len(labels)
        for q, lab in enumerate(labels):
            sign, letter = _PRODUCT_LABELS[lab]
            p = PauliString.single(n, q, letter)
            gens.append(p if sign > 0 else -p)
        return cls.from_stabilizers(gens)

    def copy(self) -> StabilizerTableau:
        return StabilizerTableau(self.n, self.x.copy(), self.z.copy(), self.r.copy())

    # -- views ------------------------------------------------------------

    def _row(self, i: int) -> PauliString:
        xm = int(np.dot(self.x[i].astype(np.int64), 1 << np.arange(self.n, dtype=np.int64)))
        zm = int(np.dot(self.z[i].astype(np.int64), 1 << np.arange(self.n, dtype=np.int64)))
        return PauliString(self.n, xm, zm, 2 * int(self.r[i]))

    def stabilizers(self) -> list[PauliString]:
        return [self._row(self.n + i) for i in range(self.n)]

    def destabilizers(self) -> list[PauliString]:
        return [self._row(i) for i in range(self.n)]

    def group_elements(self) -> list[PauliString]:
        """All ``2**n`` signed elements of the stabilizer group (binary subset order)."""
        gens = self.stabilizers()
        out = [PauliString(self.n)]
        for g in gens:
            out += [pauli_mul(e, g) for e in out]
        return out

    def pauli_vector(self) -> PauliVector:
        c = np.zeros(4**self.n)
        for e in self.group_elements():
            c[e.index] = e.sign
        return PauliVector(self.n, c)

    def to_density(self) -> np.ndarray:
        return self.pauli_vector().to_density()

    def canonical_key(self) -> tuple:
        return tuple(sorted((e.index, e.sign) for e in self.group_elements()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, StabilizerTableau) or other.n != self.n:
            return NotImplemented if not isinstance(other, StabilizerTableau) else False
        return self.canonical_key() == other.canonical_key()

    def __hash__(self) -> int:
        return hash(self.canonical_key())

    def __repr__(self) -> str:
        return "StabilizerTableau(" + ", ".join(map(str, self.stabilizers())) + ")"

    def tensor(self, other: StabilizerTableau) -> StabilizerTableau:
        """``self`` on the low qubits, ``other`` after them."""
        n, m = self.n, other.n

        def block(a, b):
            out = np.zeros((2 * (n + m), n + m), dtype=np.uint8)
            out[:n, :n] = a[:n]
            out[n : n + m, n:] = b[:m]
            out[n + m : 2 * n + m, :n] = a[n:]
            out[2 * n + m :, n:] = b[m:]
            return out

        r = np.concatenate([self.r[:n], other.r[:m], self.r[n:], other.r[m:]])
        return StabilizerTableau(n + m, block(self.x, other.x), block(self.z, other.z), r)

    def check(self) -> None:
        """Raise if the symplectic structure of the tableau is broken."""
        rows = np.hstack([self.x, self.z]).astype(np.int64)
        n = self.n
        omega = (rows[:, :n] @ rows[:, n:].T + rows[:, n:] @ rows[:, :n].T) % 2
        expected = np.zeros((2 * n, 2 * n), dtype=np.int64)
        expected[:n, n:] = np.eye(n, dtype=np.int64)
        expected[n:, :n] = np.eye(n, dtype=np.int64)
        if not np.array_equal(omega, expected):
            raise AssertionError("tableau rows violate the symplectic pairing")

    # -- in-place primitives (used on private copies only) ------------------

    def _h(self, a):
        x, z = self.x, self.z
        self.r ^= x[:, a] & z[:, a]
        x[:, a], z[:, a] = z[:, a].copy(), x[:, a].copy()

    def _s(self, a):
        self.r ^= self.x[:, a] & self.z[:, a]
        self.z[:, a] ^= self.x[:, a]

    def _cnot(self, a, b):
        x, z = self.x, self.z
        self.r ^= x[:, a] & z[:, b] & (x[:, b] ^ z[:, a] ^ 1)
        x[:, b] ^= x[:, a]
        z[:, a] ^= z[:, b]

    def _apply_inplace(self, g: CliffordOp) -> None:
        qs = g.qubits
        if any(q >= self.n for q in qs):
            raise IndexError(f"{g} out of range for {self.n} qubits")
        name = g.name
        if name == "I":
            return
        a = qs[0]
        if name == "H":
            self._h(a)
        elif name == "S":
            self._s(a)
        elif name == "SDG":
            self._s(a)
            self.r ^= self.x[:, a]
        elif name == "X":
            self.r ^= self.z[:, a]
        elif name == "Z":
            self.r ^= self.x[:, a]
        elif name == "Y":
            self.r ^= self.x[:, a] ^ self.z[:, a]
        elif name == "SQRT_X":
            self._h(a)
            self._s(a)
            self._h(a)
        elif name == "SQRT_Y":
            # sqrt(Y) = H Z up to global phase
            self.r ^= self.x[:, a]
            self._h(a)
        elif name == "CNOT":
            self._cnot(a, qs[1])
        elif name == "CZ":
            self._h(qs[1])
            self._cnot(a, qs[1])
            self._h(qs[1])
        elif name == "SWAP":
            b = qs[1]
            for arr in (self.x, self.z):
                arr[:, [a, b]] = arr[:, [b, a]]
        else:  # pragma: no cover - guarded by CliffordOp
            raise ValueError(name)

    def apply(self, gates: CliffordOp | Iterable[CliffordOp]) -> StabilizerTableau:
        out = self.copy()
        if isinstance(gates, CliffordOp):
            gates = [gates]
        for g in gates:
            out._apply_inplace(CliffordOp.parse(g))
        return out

    def _rowsum_many(self, hs: np.ndarray, i: int) -> None:
        """``_rowsum(h, i)`` for every ``h`` in ``hs`` (row ``i`` is not among them)."""
        if hs.size == 0:
            return
        g = _g_vec(self.x[i][None, :], self.z[i][None, :], self.x[hs], self.z[hs]).sum(axis=1)
        total = (2 * self.r[hs].astype(np.int64) + 2 * int(self.r[i]) + g) % 4
        self.r[hs] = (total == 2).astype(np.uint8)
        self.x[hs] ^= self.x[i]
        self.z[hs] ^= self.z[i]

    def _rowsum(self, h: int, i: int) -> None:
        g = _g_vec(self.x[i], self.z[i], self.x[h], self.z[h]).sum()
        total = (2 * int(self.r[h]) + 2 * int(self.r[i]) + int(g)) % 4
        self.r[h] = 1 if total == 2 else 0
        self.x[h] ^= self.x[i]
        self.z[h] ^= self.z[i]


_PRODUCT_LABELS = {
    "0": (1, "Z"),
    "1": (-1, "Z"),
    "+": (1, "X"),
    "-": (-1, "X"),
    "+i": (1, "Y"),
    "-i": (-1, "Y"),
}


def _split_labels(text: str) -> list[str]:
    out = []
    i = 0
    while i < len(text):
        if text[i] in "+-" and i + 1 < len(text) and text[i + 1] == "i":
            out.append(text[i : i + 2])
            i += 2
        else:
            out.append(text[i])
            i += 1
    return out


def _symp(a: np.ndarray, b: np.ndarray, n: int) -> int:
    return int((np.dot(a[:n], b[n:]) + np.dot(a[n:], b[:n])) % 2)


def _solve_gf2(a: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Particular solutions ``X`` (one row per rhs column) of ``a X^T = rhs`` over GF(2)."""
    a = a.copy() % 2
    rhs = rhs.copy() % 2
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        hit = np.flatnonzero(a[r:, c])
        if hit.size == 0:
            continue
        p = r + hit[0]
        a[[r, p]] = a[[p, r]]
        rhs[[r, p]] = rhs[[p, r]]
        for k in range(rows):
            if k != r and a[k, c]:
                a[k] ^= a[r]
                rhs[k] ^= rhs[r]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    if r < rows:
        raise ValueError("stabilizer generators are not independent")
    sol = np.zeros((rhs.shape[1], cols), dtype=np.uint8)
    for k, c in enumerate(pivots):
        sol[:, c] = rhs[k]
    return sol


# ---------------------------------------------------------------------------
# operations


def apply_clifford(t: StabilizerTableau, g: CliffordOp) -> StabilizerTableau:
    return t.apply(CliffordOp.parse(g))


def postselect_zero(t: StabilizerTableau, qubit: int) -> tuple[StabilizerTableau | None, float]:
    """Project ``qubit`` onto ``|0>``; return the new state and Born probability."""
    n = t.n
    if not 0 <= qubit < n:
        raise IndexError(f"qubit {qubit} out of range for {n} qubits")
    hits = np.flatnonzero(t.x[n:, qubit])
    if hits.size:
        out = t.copy()
        p = n + int(hits[0])
        rows = np.flatnonzero(out.x[:, qubit])
        out._rowsum_many(rows[rows != p], p)
        out.x[p - n], out.z[p - n], out.r[p - n] = out.x[p], out.z[p], out.r[p]
        out.x[p] = 0
        out.z[p] = 0
        out.z[p, qubit] = 1
        out.r[p] = 0
        return out, 0.5
    # deterministic outcome: accumulate the stabilizers that multiply to +-Z
    x = np.zeros(n, dtype=np.uint8)
    z = np.zeros(n, dtype=np.uint8)
    phase = 0
    for i in np.flatnonzero(t.x[:n, qubit]):
        s = n + int(i)
        phase += 2 * int(t.r[s]) + int(_g_vec(t.x[s], t.z[s], x, z).sum())
        x ^= t.x[s]
        z ^= t.z[s]
    if phase % 4 == 0:
        return t, 1.0
    return None, 0.0


def expectation(t: StabilizerTableau, a: PauliString | str) -> int:
    """``Tr(sigma a)`` for a Hermitian Pauli ``a``: +-1 if +-a is stabilized, else 0."""
    if isinstance(a, str):
        a = PauliString.from_str(a)
    if a.n != t.n:
        raise ValueError(f"size mismatch: {a.n} vs {t.n} qubits")
    if not a.is_hermitian:
        raise ValueError(f"{a} is not Hermitian")
    stabs = t.stabilizers()
    if not all(commutes(a, s) for s in stabs):
        return 0
    prod = PauliString(t.n)
    for d, s in zip(t.destabilizers(), stabs):
        if not commutes(a, d):
            prod = pauli_mul(prod, s)
    if (prod.x_mask, prod.z_mask) != (a.x_mask, a.z_mask):
        raise AssertionError("tableau is inconsistent")
    return 1 if prod.phase_exp == a.phase_exp else -1


def evaluate_gadget_expectation(
    u_cl: Sequence[CliffordOp],
    sigma: StabilizerTableau,
    n_data: int,
    t_ancilla: int,
    a: PauliString | str,
) -> float:
    """``2**t Tr[(A x |0><0|^t) U (|0><0|^n x sigma) U^dag]`` by tableau simulation.

    Data qubits come first, the ``t_ancilla`` resource qubits after them.  The
    observable may be given on the data qubits only or on all qubits.
    """
    if sigma.n != t_ancilla:
        raise ValueError(f"resource has {sigma.n} qubits, expected {t_ancilla}")
    if isinstance(a, str):
        a = PauliString.from_str(a)
    total = n_data + t_ancilla
    if a.n == n_data:
        a = a.tensor(PauliString(t_ancilla))
    elif a.n != total:
        raise ValueError(f"observable acts on {a.n} qubits, expected {n_data} or {total}")
    state = StabilizerTableau.zero_state(n_data).tensor(sigma).apply(
        [CliffordOp.parse(g) for g in u_cl]
    )
    prob = 1.0
    for q in range(n_data, total):
        state, p = postselect_zero(state, q)
        if state is None:
            return 0.0
        prob *= p
    return 2**t_ancilla * prob * expectation(state, a)


# ---------------------------------------------------------------------------
# enumeration


def stabilizer_state_count(n: int) -> int:
    out = 2**n
    for k in range(1, n + 1):
        out *= 2**k + 1
    return out


def _rref(rows: Iterable[int], width: int) -> tuple[int, ...]:
    """Reduced row echelon form of GF(2) row vectors stored as ints."""
    basis: list[int] = []
    for v in rows:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis = [min(b, b ^ v) for b in basis]
            basis.append(v)
    return tuple(sorted(basis, reverse=True))


def _bit_gate(rows: tuple[int, ...], name: str, qs: tuple[int, ...], n: int) -> tuple[int, ...]:
    # row layout: x bits 0..n-1, z bits n..2n-1
    out = []
    for v in rows:
        if name == "H":
            a = qs[0]
            xb, zb = (v >> a) & 1, (v >> (n + a)) & 1
            v &= ~((1 << a) | (1 << (n + a)))
            v |= (zb << a) | (xb << (n + a))
        elif name == "S":
            a = qs[0]
            v ^= ((v >> a) & 1) << (n + a)
        else:  # CNOT
            a, b = qs
            v ^= ((v >> a) & 1) << b
            v ^= ((v >> (n + b)) & 1) << (n + a)
        out.append(v)
    return _rref(out, 2 * n)


@lru_cache(maxsize=None)
def lagrangian_subspaces(n: int) -> tuple[tuple[int, ...], ...]:
    """All maximal isotropic subspaces of the n-qubit Pauli group, sorted.

    Found as the orbit of the Z-type subspace under H, S and CNOT.
    """
    start = _rref([1 << (n + q) for q in range(n)], 2 * n)
    gens = [("H", (q,)) for q in range(n)] + [("S", (q,)) for q in range(n)]
    gens += [("CNOT", (a, b)) for a in range(n) for b in range(n) if a != b]
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for s in frontier:
            for name, qs in gens:
                t = _bit_gate(s, name, qs, n)
                if t not in seen:
                    seen.add(t)
                    nxt.append(t)
        frontier = nxt
    return tuple(sorted(seen))


def _row_to_pauli(v: int, n: int) -> PauliString:
    mask = (1 << n) - 1
    return PauliString(n, v & mask, (v >> n) & mask)


MAX_ENUMERATION_QUBITS = 4


def _check_enum(n: int) -> None:
    if not 0 < n <= MAX_ENUMERATION_QUBITS:
        raise ValueError(f"stabilizer enumeration supports 1..{MAX_ENUMERATION_QUBITS} qubits, got {n}")


def enumerate_stabilizer_states(n: int) -> list[StabilizerTableau]:
    """Every pure n-qubit stabilizer state in a fixed canonical order.

    State ``k * 2**n + b`` has the ``k``-th sorted subspace's RREF generators
    with sign bit ``j`` of ``b`` applied to generator ``j``.
    """
    _check_enum(n)
    out = []
    for sub in lagrangian_subspaces(n):
        base = StabilizerTableau.from_stabilizers([_row_to_pauli(v, n) for v in sub])
        for b in range(2**n):
            t = base.copy()
            t.r[n:] = [(b >> j) & 1 for j in range(n)]
            out.append(t)
    return out


@lru_cache(maxsize=None)
def stabilizer_basis_matrix(n: int) -> sp.csc_matrix:
    """Sparse ``4**n x N`` matrix whose columns are the PauliVectors of
    :func:`enumerate_stabilizer_states`, in the same order."""
    _check_enum(n)
    subs = lagrangian_subspaces(n)
    m = 2**n
    walsh = np.array([[(-1) ** bin(a & b).count("1") for a in range(m)] for b in range(m)])
    rows, data = [], []
    for sub in subs:
        gens = [_row_to_pauli(v, n) for v in sub]
        elems = [(0, PauliString(n))]
        for j, g in enumerate(gens):
            elems += [(mask | (1 << j), pauli_mul(e, g)) for mask, e in elems]
        elems.sort()
        idx = np.array([e.index for _, e in elems])
        sign = np.array([e.sign for _, e in elems])
        for b in range(m):
            rows.append(idx)
            data.append(sign * walsh[b])
    rows = np.concatenate(rows)
    data = np.concatenate(data).astype(float)
    cols = np.repeat(np.arange(len(subs) * m), m)
    mat = sp.csc_matrix((data, (rows, cols)), shape=(4**n, len(subs) * m))
    mat.sort_indices()
    return mat
