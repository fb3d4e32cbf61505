"""Resource states for gate teleportation, noise teleportation and noise fusion.

Qubit layout of the two-qubit gadget resource: qubit 0 carries ``|U>``
(the "T-carrying" ancilla), qubit 1 carries the ``|+>`` of the teleported
Hadamard.  Teleported noise maps a Z error to ``Z`` on qubit 0 (``Z1``),
an X error to ``Z`` on qubit 1 (``Z2``) and a Y error to ``Z1 Z2``.

Unit-cell resources are two such pairs side by side: qubits (0, 1) for the
first single-qubit gate, (2, 3) for the second.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channels import PTM, PauliChannel, ptm_from_kraus, replacement_rate
from .dense import DenseState, apply_kraus, apply_unitary, gate_matrix, partial_trace
from .dense import postselect_zero as dense_postselect
from .pauli import PauliString, PauliVector, commutation_signs, pauli_vector_of_pure_state
from .rom import (
    DecompositionCache,
    QuasiDecomposition,
    StabilizerBasis,
    full_basis,
    reduced_basis,
    rom,
)

_PLUS = np.array([1, 1], dtype=complex) / math.sqrt(2)


@dataclass(frozen=True, eq=False)
class ResourceState:
    """A (possibly mixed) resource state with its T-carrying qubits."""

    vector: PauliVector
    t_qubits: tuple[int, ...] = ()
    description: str = ""

    @property
    def n(self) -> int:
        return self.vector.n

    def tensor(self, other: ResourceState) -> ResourceState:
        shifted = tuple(q + self.n for q in other.t_qubits)
        desc = f"({self.description}) x ({other.description})"
        return ResourceState(self.vector.tensor(other.vector), self.t_qubits + shifted, desc)

    def copies(self, k: int) -> ResourceState:
        out = self
        for _ in range(k - 1):
            out = out.tensor(self)
        return out

    def density(self) -> np.ndarray:
        return self.vector.to_density()

    def check(self, atol: float = 1e-9) -> None:
        if abs(self.vector.coeffs[0] - 1) > 1e-12:
            raise AssertionError("identity coefficient is not 1")
        if self.n <= 4 and np.linalg.eigvalsh(self.density()).min() < -atol:
            raise AssertionError("resource state is not positive semidefinite")

    def basis(self, kind: str = "auto") -> StabilizerBasis:
        """``full`` (n <= 4), ``reduced`` or ``auto`` (full when n <= 4)."""
        if kind == "auto":
            kind = "full" if self.n <= 4 else "reduced"
        if kind == "full":
            return full_basis(self.n)
        if kind == "reduced":
            return reduced_basis(self.t_qubits, self.n)
        raise ValueError(f"unknown basis kind {kind!r}")

    def rom(self, basis: str = "auto", cache: DecompositionCache | None = None) -> QuasiDecomposition:
        b = self.basis(basis)
        if cache is not None:
            return cache.rom(self.vector, b)
        return rom(self.vector, b)


@dataclass(frozen=True)
class DiagonalNoise:
    """Correlated Z-type noise ``sum_k p_k [Z^{a_k}]``."""

    n: int
    terms: tuple[tuple[float, PauliString], ...] = field(default=())

    def __post_init__(self):
        terms = tuple(
            (float(p), PauliString.from_str(e) if isinstance(e, str) else e) for p, e in self.terms
        )
        for p, e in terms:
            if e.n != self.n:
                raise ValueError(f"{e} does not act on {self.n} qubits")
            if e.x_mask:
                raise ValueError(f"{e} is not diagonal")
            if not -1e-12 <= p <= 1 + 1e-12:
                raise ValueError(f"probability {p} outside [0, 1]")
        total = sum(p for p, _ in terms)
        if abs(total - 1) > 1e-12:
            raise ValueError(f"probabilities sum to {total}, not 1")
        object.__setattr__(self, "terms", terms)

    def weights(self) -> dict[str, float]:
        out: dict[str, float] = {}
        for p, e in self.terms:
            out[e.letters] = out.get(e.letters, 0.0) + p
        return out

    def factor(self) -> np.ndarray:
        """Per-Pauli multiplier of the channel's (diagonal) PTM."""
        out = np.zeros(4**self.n)
        for p, e in self.terms:
            out += p * commutation_signs(e)
        return out

    def apply(self, v: PauliVector | ResourceState):
        if isinstance(v, ResourceState):
            return ResourceState(self.apply(v.vector), v.t_qubits, v.description)
        if v.n != self.n:
            raise ValueError(f"noise acts on {self.n} qubits, state has {v.n}")
        return PauliVector(v.n, np.asarray(v.coeffs) * self.factor())

    def compose(self, other: DiagonalNoise) -> DiagonalNoise:
        """Apply ``other`` then ``self``."""
        acc: dict[int, float] = {}
        for (p, a), (q, b) in itertools.product(self.terms, other.terms):
            z = a.z_mask ^ b.z_mask
            acc[z] = acc.get(z, 0.0) + p * q
        return DiagonalNoise(self.n, tuple((w, PauliString(self.n, 0, z)) for z, w in sorted(acc.items())))

    def tensor(self, other: DiagonalNoise) -> DiagonalNoise:
        terms = tuple(
            (p * q, a.tensor(b).unsigned()) for (p, a), (q, b) in itertools.product(self.terms, other.terms)
        )
        return DiagonalNoise(self.n + other.n, terms)

    def embed(self, qubits: Sequence[int], n: int) -> DiagonalNoise:
        """The same noise acting on ``qubits`` of an ``n``-qubit register."""
        terms = []
        for p, e in self.terms:
            z = 0
            for k, q in enumerate(qubits):
                z |= ((e.z_mask >> k) & 1) << q
            terms.append((p, PauliString(n, 0, z)))
        return DiagonalNoise(n, tuple(terms))

    def ptm(self) -> PTM:
        return PTM(self.n, np.diag(self.factor()))

    def kraus(self) -> list[np.ndarray]:
        return [math.sqrt(p) * e.to_matrix() for p, e in self.terms if p > 0]


# ---------------------------------------------------------------------------
# gate teleportation


def _angle(u) -> float:
    """Angle of a diagonal single-qubit gate given as name, angle or matrix."""
    if isinstance(u, (int, float)):
        return float(u)
    if isinstance(u, tuple) and u[0] == "U":
        return float(u[1])
    m = gate_matrix(u)
    if m.shape != (2, 2) or abs(m[0, 1]) > 1e-12 or abs(m[1, 0]) > 1e-12:
        raise ValueError(f"gate {u!r} is not a diagonal single-qubit gate")
    return float(np.angle(m[1, 1] / m[0, 0]))


def rotation_resource_vector(theta: float) -> np.ndarray:
    """``U(theta)|+>`` as a state vector."""
    return np.array([1, np.exp(1j * theta)]) / math.sqrt(2)


def teleport_diagonal_gate(theta: float) -> ResourceState:
    """``|U(theta)><U(theta)|`` with Bloch vector ``(cos, sin, 0)``."""
    v = PauliVector(1, [1.0, math.cos(theta), math.sin(theta), 0.0])
    return ResourceState(v, (0,), f"U({theta:.6g})")


def push_dephasing(theta: float, p: float) -> ResourceState:
    """Resource of ``U(theta)`` followed by dephasing: the Z error moves onto the resource."""
    if not 0 <= p <= 1:
        raise ValueError(f"dephasing rate {p} outside [0, 1]")
    s = 1 - 2 * p
    v = PauliVector(1, [1.0, s * math.cos(theta), s * math.sin(theta), 0.0])
    return ResourceState(v, (0,), f"dephased U({theta:.6g}), p={p:.6g}")


def teleport_dense(s: DenseState, theta: float, qubit: int) -> tuple[DenseState, float]:
    """Apply ``U(theta)`` to ``qubit`` through the one-ancilla gadget on the dense oracle.

    The ancilla ``U|+>`` is appended, ``CNOT(qubit, ancilla)`` applied and the
    ancilla postselected on ``|0>``; returns the renormalised data state and
    the postselection probability (1/2).
    """
    anc = DenseState.from_vector(rotation_resource_vector(theta))
    full = apply_unitary(s.tensor(anc), "CNOT", (qubit, s.n))
    post, prob = dense_postselect(full, s.n)
    if post is None:
        raise ArithmeticError("postselection has zero probability")
    return partial_trace(post, range(s.n)), prob


TELEPORTED_LABEL = {"I": "II", "Z": "ZI", "X": "IZ", "Y": "ZZ"}


def teleported_noise(noise: PauliChannel) -> DiagonalNoise:
    """Single-qubit Pauli noise rewritten as diagonal noise on the gadget pair."""
    if not isinstance(noise, PauliChannel) or noise.n != 1:
        raise ValueError("noise teleportation needs a single-qubit Pauli channel")
    acc: dict[str, float] = {}
    for p, e in noise.terms:
        lab = TELEPORTED_LABEL[e.letters]
        acc[lab] = acc.get(lab, 0.0) + p
    return DiagonalNoise(2, tuple((w, PauliString.from_str(k)) for k, w in sorted(acc.items())))


def e1_noise(p: float, convention: str = "replacement") -> DiagonalNoise:
    """Teleported single-qubit depolarizing noise on a gadget pair."""
    p = replacement_rate(p, 1, convention)
    return DiagonalNoise(
        2,
        (
            (1 - 0.75 * p, PauliString.from_str("II")),
            (p / 4, PauliString.from_str("ZI")),
            (p / 4, PauliString.from_str("IZ")),
            (p / 4, PauliString.from_str("ZZ")),
        ),
    )


def e2_noise(p: float, convention: str = "replacement") -> DiagonalNoise:
    """Teleported two-qubit depolarizing noise on two gadget pairs (4 qubits)."""
    p = replacement_rate(p, 2, convention)
    pair = ["II", "ZI", "IZ", "ZZ"]
    terms = [(1 - 15 * p / 16, PauliString.from_str("IIII"))]
    for a, b in itertools.product(pair, pair):
        if a == b == "II":
            continue
        terms.append((p / 16, PauliString.from_str(a + b)))
    return DiagonalNoise(4, tuple(terms))


def gadget_pair_resource(u) -> ResourceState:
    """``CZ (|U> x |+>)`` for a diagonal gate ``U``."""
    theta = _angle(u)
    psi = np.kron(rotation_resource_vector(theta), _PLUS)
    psi = gate_matrix("CZ") @ psi
    return ResourceState(pauli_vector_of_pure_state(psi), (0,), f"CZ|U({theta:.6g})>|+>")


def noise_teleport(u, noise: PauliChannel) -> tuple[ResourceState, DiagonalNoise]:
    """Noiseless two-qubit gadget resource and the diagonal noise it inherits."""
    return gadget_pair_resource(u), teleported_noise(noise)


# frozen local Clifford (per qubit) taking the Choi state of noise o U to the
# noisy gadget resource; see find_choi_correction
CHOI_CORRECTION = ("I", "H")


def choi_state(u, noise: PauliChannel | None = None, post: str | None = None) -> DenseState:
    """``[I] x ([post] o noise o [U]) (|Psi+><Psi+|)`` by dense simulation."""
    theta = _angle(u)
    bell = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
    s = apply_unitary(DenseState.from_vector(bell), "U", 1, theta=theta)
    if noise is not None:
        s = apply_kraus(s, noise.kraus(), 1)
    if post is not None:
        s = apply_unitary(s, post, 1)
    return s


def _local_cliffords() -> dict[str, np.ndarray]:
    """The 24 single-qubit Cliffords modulo phase, as words in H and S."""
    found: dict[bytes, tuple[str, np.ndarray]] = {}
    frontier = [("I", np.eye(2, dtype=complex))]
    while frontier:
        nxt = []
        for word, m in frontier:
            ptm = np.round(ptm_from_kraus([m], 1), 8) + 0.0
            key = ptm.tobytes()
            if key in found:
                continue
            found[key] = (word, m)
            for g in ("H", "S"):
                nxt.append((g if word == "I" else f"{word}.{g}", gate_matrix(g) @ m))
        frontier = nxt
    return {w: m for w, m in found.values()}


def _apply_word(s: DenseState, word: str, qubit: int) -> DenseState:
    for g in word.split("."):
        if g != "I":
            s = apply_unitary(s, g, qubit)
    return s


def find_choi_correction(u="T", noise: PauliChannel | None = None) -> list[tuple[str, str]]:
    """Search all local Cliffords ``C0 x C1`` mapping the Choi state of
    ``noise o U`` onto the noisy gadget resource (words in H and S,
    applied left to right)."""
    from .channels import depolarizing1

    noise = noise if noise is not None else depolarizing1(0.1)
    res, diag = noise_teleport(u, noise)
    target = diag.apply(res.vector).to_density()
    choi = choi_state(u, noise)
    hits = []
    cliffs = _local_cliffords()
    for w0, w1 in itertools.product(cliffs, cliffs):
        s = _apply_word(_apply_word(choi, w0, 0), w1, 1)
        if np.allclose(s.rho, target, atol=1e-10):
            hits.append((w0, w1))
    return hits


# ---------------------------------------------------------------------------
# noise fusion


@dataclass(frozen=True, eq=False)
class StochasticUnitaryChannel:
    """``sum_k p_k [V_k]`` for unitaries ``V_k`` (e.g. Clifford operators)."""

    n: int
    terms: tuple[tuple[float, np.ndarray], ...]

    def kraus(self) -> list[np.ndarray]:
        return [math.sqrt(p) * v for p, v in self.terms if p > 0]

    def ptm(self) -> PTM:
        return PTM(self.n, ptm_from_kraus(self.kraus(), self.n))

    @property
    def is_clifford(self) -> bool:
        return all(PTM(self.n, ptm_from_kraus([v], self.n)).is_signed_permutation for _, v in self.terms)


def _as_pauli(m: np.ndarray, n: int) -> PauliString | None:
    for i in range(4**n):
        p = PauliString.from_index(n, i).to_matrix()
        c = np.trace(p @ m) / 2**n
        if abs(abs(c) - 1) < 1e-10:
            return PauliString.from_index(n, i)
    return None


def noise_fuse(noise: PauliChannel, u, theta: float | None = None) -> PauliChannel | StochasticUnitaryChannel:
    """Pull ``noise`` back through ``U``: ``noise o [U] = [U] o noise'``.

    ``noise'`` has Kraus labels ``U^dag E_k U`` with unchanged probabilities;
    it is returned as a PauliChannel when every label is a Pauli.
    """
    m = gate_matrix(u, theta)
    n = int(round(np.log2(m.shape[0])))
    if n != noise.n:
        raise ValueError(f"gate acts on {n} qubits, noise on {noise.n}")
    is_clifford = PTM(n, ptm_from_kraus([m], n)).is_signed_permutation
    is_diagonal = n == 1 and abs(m[0, 1]) < 1e-12 and abs(m[1, 0]) < 1e-12
    if not (is_clifford or is_diagonal):
        raise ValueError("noise fusion supports Clifford gates and diagonal rotations")
    pulled = []
    for p, e in noise.terms:
        pulled.append((p, m.conj().T @ e.unsigned().to_matrix() @ m))
    labels = [_as_pauli(v, n) for _, v in pulled]
    if all(lab is not None for lab in labels):
        if noise.params and all(a.unsigned() == b.unsigned() for (_, a), b in zip(noise.terms, labels)):
            return noise
        return PauliChannel(n, tuple((p, lab) for (p, _), lab in zip(pulled, labels)))
    return StochasticUnitaryChannel(n, tuple(pulled))


# ---------------------------------------------------------------------------
# resources used in the cost comparisons


def t_plus_state() -> PauliVector:
    """``|T+>`` with the T-state on qubit 0."""
    return pauli_vector_of_pure_state(np.kron(rotation_resource_vector(math.pi / 4), _PLUS))


def fused_t_resource(p: float, fold: int = 1, convention: str = "replacement") -> ResourceState:
    """``E1(|T+><T+|)`` (fold 1) or ``E1 o E1(|T+><T+|)`` (fold 2).

    The ROM of these reaches 1 at p = 0.34 (fold 1) and 0.20 (fold 2) only
    with ``convention="error"``; the replacement form gives 0.46 and 0.27.
    """
    if fold not in (1, 2):
        raise ValueError("fold must be 1 or 2")
    v = t_plus_state()
    noise = e1_noise(p, convention)
    for _ in range(fold):
        v = noise.apply(v)
    return ResourceState(v, (0,), f"E1^{fold}(T+), p={p:.6g}")


def unit_cell_resource(
    kind: int, p: float, p2: float | None = None, convention: str = "replacement"
) -> ResourceState:
    """Noisy 4-qubit resource of unit cell 2 (``|T+++>``) or 3 (``|T+T+>``).

    ``p`` is the single-qubit depolarizing rate, ``p2`` the two-qubit one
    (defaults to ``p``).  Qubits (0, 1) and (2, 3) are the two gadget pairs.
    """
    p2 = p if p2 is None else p2
    t = rotation_resource_vector(math.pi / 4)
    if kind == 2:
        psi, tq = np.kron(np.kron(t, _PLUS), np.kron(_PLUS, _PLUS)), (0,)
    elif kind == 3:
        psi, tq = np.kron(np.kron(t, _PLUS), np.kron(t, _PLUS)), (0, 2)
    else:
        raise ValueError("unit cell kind must be 2 or 3")
    v = pauli_vector_of_pure_state(psi)
    e1 = e1_noise(p, convention)
    v = e1.embed((2, 3), 4).apply(v)
    v = e1.embed((0, 1), 4).apply(v)
    v = e2_noise(p2, convention).apply(v)
    return ResourceState(v, tq, f"unit{kind}, p1={p:.6g}, p2={p2:.6g}")
