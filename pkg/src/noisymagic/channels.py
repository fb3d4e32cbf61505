"""Pauli transfer matrices, Pauli channels and stabilizer norms.

PTM entries are ``R[i, j] = 2**-n Tr[P_i L(P_j)]`` with the little-endian
Pauli index of :mod:`noisymagic.pauli`.  The adjoint channel has PTM
``R.T``, so row ``i`` of ``R`` is the Pauli expansion of ``L^dag(P_i)``.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .dense import gate_matrix
from .pauli import PauliString, PauliVector, commutation_signs, stabilizer_norm

__all__ = [
    "PTM",
    "PauliChannel",
    "ptm_from_kraus",
    "ptm_of_gate",
    "ptm_of_noise",
    "dephasing",
    "depolarizing1",
    "depolarizing2",
    "pauli_noise",
    "pauli_error",
    "channel_from_dict",
    "stabilizer_norm",
    "channel_stabilizer_norm",
    "unit_cell_ptms",
    "unit_cell_norms",
    "unit_cell_norms_closed_form",
    "pauli_channel_t_norm",
    "pauli_channel_t_norm_closed_form",
]


@lru_cache(maxsize=None)
def _pauli_mats(n: int) -> list[np.ndarray]:
    return [PauliString.from_index(n, i).to_matrix() for i in range(4**n)]


def ptm_from_kraus(kraus: Sequence[np.ndarray], n: int) -> np.ndarray:
    """Dense PTM of ``rho -> sum_k K rho K^dag``."""
    paulis = _pauli_mats(n)
    out = np.empty((4**n, 4**n))
    for j, pj in enumerate(paulis):
        img = sum(k @ pj @ k.conj().T for k in kraus)
        for i, pi in enumerate(paulis):
            out[i, j] = np.real(np.trace(pi @ img)) / 2**n
    return out


def _ptm_to_kraus(matrix: np.ndarray, n: int) -> list[np.ndarray]:
    """Kraus operators of a completely positive map given by its PTM."""
    d = 2**n
    paulis = _pauli_mats(n)
    choi = np.zeros((d * d, d * d), dtype=complex)
    for a in range(d):
        for b in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[a, b] = 1
            coeffs = np.array([np.trace(p @ e) for p in paulis]) / d
            img = sum(v * paulis[i] for i, v in enumerate(matrix @ coeffs))
            choi += np.kron(e, img)
    w, v = np.linalg.eigh(choi)
    if w.min() < -1e-9:
        raise ValueError("PTM is not completely positive")
    kraus = []
    for lam, vec in zip(w, v.T):
        if lam > 1e-12:
            # choi = sum |a><b| x K|a><b|K^dag  =>  vec[a*d + i] = K[i, a]
            kraus.append(np.sqrt(lam) * vec.reshape(d, d).T)
    return kraus


@dataclass(frozen=True, eq=False)
class PTM:
    n: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (4**self.n, 4**self.n):
            raise ValueError(f"PTM for {self.n} qubits must be {4**self.n}x{4**self.n}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, n: int) -> PTM:
        return cls(n, np.eye(4**n))

    def __matmul__(self, other: PTM) -> PTM:
        """Composition: ``(self @ other)`` applies ``other`` first."""
        if self.n != other.n:
            raise ValueError("PTM sizes differ")
        return PTM(self.n, self.matrix @ other.matrix)

    def then(self, other: PTM) -> PTM:
        return other @ self

    def tensor(self, other: PTM) -> PTM:
        """``self`` on the low qubits, ``other`` on the following ones."""
        return PTM(self.n + other.n, np.kron(other.matrix, self.matrix))

    def adjoint(self) -> PTM:
        return PTM(self.n, self.matrix.T)

    @property
    def is_trace_preserving(self) -> bool:
        row = np.zeros(4**self.n)
        row[0] = 1
        return bool(np.allclose(self.matrix[0], row, atol=1e-12))

    @property
    def is_diagonal(self) -> bool:
        m = self.matrix
        return bool(np.allclose(m, np.diag(np.diag(m)), atol=1e-12))

    @property
    def is_signed_permutation(self) -> bool:
        m = np.round(self.matrix, 12)
        ok_vals = np.isin(m, (-1.0, 0.0, 1.0)).all()
        return bool(ok_vals and (np.abs(m).sum(0) == 1).all() and (np.abs(m).sum(1) == 1).all())

    def apply(self, v: PauliVector) -> PauliVector:
        return PauliVector(v.n, self.matrix @ v.coeffs)

    def kraus(self) -> list[np.ndarray]:
        return _ptm_to_kraus(self.matrix, self.n)

    def to_csv(self) -> str:
        buf = io.StringIO()
        labels = [PauliString.from_index(self.n, i).letters for i in range(4**self.n)]
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["row"] + labels)
        for lab, row in zip(labels, self.matrix):
            w.writerow([lab] + [repr(float(x)) for x in row])
        return buf.getvalue()


@dataclass(frozen=True)
class PauliChannel:
    """Stochastic Pauli channel ``rho -> sum_k p_k P_k rho P_k``."""

    n: int
    terms: tuple[tuple[float, PauliString], ...]
    kind: str = "pauli_channel"
    params: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        terms = tuple(
            (float(p), PauliString.from_str(e) if isinstance(e, str) else e) for p, e in self.terms
        )
        total = 0.0
        for p, e in terms:
            if e.n != self.n:
                raise ValueError(f"Kraus label {e} does not act on {self.n} qubits")
            if not -1e-12 <= p <= 1 + 1e-12:
                raise ValueError(f"probability {p} outside [0, 1]")
            total += p
        if abs(total - 1) > 1e-12:
            raise ValueError(f"probabilities sum to {total}, not 1")
        object.__setattr__(self, "terms", terms)

    def ptm(self) -> PTM:
        diag = np.zeros(4**self.n)
        for p, e in self.terms:
            diag += p * commutation_signs(e)
        return PTM(self.n, np.diag(diag))

    def kraus(self) -> list[np.ndarray]:
        return [math.sqrt(p) * e.unsigned().to_matrix() for p, e in self.terms if p > 0]

    def compose(self, other: PauliChannel) -> PauliChannel:
        """Channel applying ``other`` then ``self`` (labels multiply, phases dropped)."""
        weights: dict[tuple[int, int], float] = {}
        for (p, a), (q, b) in itertools.product(self.terms, other.terms):
            key = (a.x_mask ^ b.x_mask, a.z_mask ^ b.z_mask)
            weights[key] = weights.get(key, 0.0) + p * q
        terms = tuple((w, PauliString(self.n, x, z)) for (x, z), w in sorted(weights.items()))
        return PauliChannel(self.n, terms)

    def to_dict(self) -> dict:
        if self.params:
            return {"kind": self.kind, "params": dict(self.params)}
        return {
            "kind": "pauli_channel",
            "params": {"n": self.n, "terms": [[p, str(e)] for p, e in self.terms]},
        }


def _check_rate(name: str, p: float, hi: float = 1.0) -> None:
    if not 0 <= p <= hi:
        raise ValueError(f"{name}={p} outside [0, {hi}]")


DEPOLARIZING_CONVENTIONS = ("replacement", "error")


def replacement_rate(p: float, n: int = 1, convention: str = "replacement") -> float:
    """Translate a depolarizing rate to the replacement form ``(1-p) rho + p I/2^n``.

    ``"replacement"`` is the identity map.  ``"error"`` reads ``p`` as the total
    probability of a non-identity Pauli, ``(1-p)[I] + p/(4^n-1) sum [P]``.
    """
    if convention == "replacement":
        _check_rate("p", p)
        return p
    if convention == "error":
        _check_rate("p", p)
        return p * 4**n / (4**n - 1)
    raise ValueError(f"unknown depolarizing convention {convention!r}")


def pauli_error(letter: str, p: float) -> PauliChannel:
    """``(1-p)[I] + p[A]`` for ``A`` in X, Y, Z."""
    _check_rate("p", p)
    return PauliChannel(
        1,
        ((1 - p, PauliString.from_str("I")), (p, PauliString.from_str(letter))),
        f"{letter.lower()}_error",
        (("p", p),),
    )


def dephasing(p: float) -> PauliChannel:
    """``(1-p) rho + p Z rho Z``."""
    ch = pauli_error("Z", p)
    return PauliChannel(1, ch.terms, "dephasing", (("p", p),))


def depolarizing1(p: float) -> PauliChannel:
    """``(1 - 3p/4)[I] + p/4 ([X] + [Y] + [Z])``, i.e. ``(1-p) rho + p I/2``."""
    _check_rate("p", p)
    terms = [(1 - 0.75 * p, PauliString.from_str("I"))]
    terms += [(p / 4, PauliString.from_str(a)) for a in "XYZ"]
    return PauliChannel(1, tuple(terms), "depo1", (("p", p),))


def depolarizing2(p: float) -> PauliChannel:
    """``(1 - 15p/16)[II] + p/16 sum_{AB != II} [A x B]``."""
    _check_rate("p", p)
    terms = [(1 - 15 * p / 16, PauliString(2))]
    terms += [(p / 16, PauliString.from_index(2, i)) for i in range(1, 16)]
    return PauliChannel(2, tuple(terms), "depo2", (("p", p),))


def pauli_noise(p_x: float, p_y: float, p_z: float) -> PauliChannel:
    """``(1 - (p_x+p_y+p_z)/4)[I] + sum_P p_P/4 [P]``."""
    for name, v in (("p_x", p_x), ("p_y", p_y), ("p_z", p_z)):
        _check_rate(name, v)
    terms = [(1 - (p_x + p_y + p_z) / 4, PauliString.from_str("I"))]
    terms += [(v / 4, PauliString.from_str(a)) for a, v in zip("XYZ", (p_x, p_y, p_z))]
    return PauliChannel(1, tuple(terms), "pauli", (("p_x", p_x), ("p_y", p_y), ("p_z", p_z)))


_NOISE_KINDS = {
    "dephasing": dephasing,
    "depo1": depolarizing1,
    "depo2": depolarizing2,
    "pauli": pauli_noise,
    "x_error": lambda p: pauli_error("X", p),
    "y_error": lambda p: pauli_error("Y", p),
    "z_error": lambda p: pauli_error("Z", p),
}


def channel_from_dict(data: dict) -> PauliChannel:
    """Inverse of :meth:`PauliChannel.to_dict` (JSON ``{kind, params}``)."""
    kind = data["kind"]
    params = dict(data.get("params", {}))
    if kind == "pauli_channel":
        return PauliChannel(params["n"], tuple((p, e) for p, e in params["terms"]))
    if kind not in _NOISE_KINDS:
        raise ValueError(f"unknown noise kind {kind!r}")
    return _NOISE_KINDS[kind](**params)


def ptm_of_noise(kind: str, **params: float) -> PTM:
    return channel_from_dict({"kind": kind, "params": params}).ptm()


def ptm_of_gate(gate, theta: float | None = None) -> PTM:
    """Exact PTM of a unitary gate (Clifford names, ``T``, ``TDG`` or ``U`` with angle)."""
    u = gate_matrix(gate, theta)
    n = int(round(np.log2(u.shape[0])))
    return PTM(n, _snap(ptm_from_kraus([u], n)))


_EXACT = np.array([0.0, 0.5, 1.0, math.sqrt(0.5)])


def _snap(m: np.ndarray, atol: float = 1e-12) -> np.ndarray:
    """Replace entries within ``atol`` of 0, +-1/2, +-1, +-1/sqrt(2) by the exact value."""
    mag = np.abs(m)
    k = np.abs(mag[..., None] - _EXACT).argmin(axis=-1)
    near = np.abs(mag - _EXACT[k]) < atol
    return np.where(near, np.sign(m) * _EXACT[k], m)


def channel_stabilizer_norm(r: PTM | np.ndarray) -> float:
    """``D(L^dag)``: the largest row L1 norm of the PTM ``R_L``."""
    m = r.matrix if isinstance(r, PTM) else np.asarray(r)
    return float(np.abs(m).sum(axis=1).max())


def unit_cell_ptms(p1: float, p2: float) -> tuple[PTM, PTM]:
    """PTMs of the noisy unit cells with one and with two T gates.

    Each cell is two single-qubit gates with depolarizing noise ``p1``
    followed by a two-qubit Clifford with depolarizing noise ``p2``; the
    Clifford parts have signed-permutation PTMs and are dropped.
    """
    r_t = ptm_of_gate("T")
    eye = PTM.identity(1)
    d1 = ptm_of_noise("depo1", p=p1)
    d2 = ptm_of_noise("depo2", p=p2)
    # factors listed left-to-right as in R_T x I, R_depo1 x I, I x R_depo1, R_depo2
    unit2 = r_t.tensor(eye) @ d1.tensor(eye) @ eye.tensor(d1) @ d2
    unit3 = r_t.tensor(eye) @ eye.tensor(r_t) @ d1.tensor(eye) @ eye.tensor(d1) @ d2
    return unit2, unit3


def unit_cell_norms(p1: float, p2: float) -> tuple[float, float]:
    """Channel stabilizer norms of unit cells 2 and 3 from the PTM products."""
    _check_rate("p1", p1)
    _check_rate("p2", p2)
    unit2, unit3 = unit_cell_ptms(p1, p2)
    return channel_stabilizer_norm(unit2), channel_stabilizer_norm(unit3)


def unit_cell_norms_closed_form(p1: float, p2: float) -> tuple[float, float]:
    a = math.sqrt(2) * (p1 - 1) * (p2 - 1)
    return max(1.0, a), max(1.0, a, -2 * (p1 - 1) ** 2 * (p2 - 1))


def pauli_channel_t_norm(p_x: float, p_y: float, p_z: float) -> float:
    """``D`` of the Pauli channel composed after a T gate, from its PTM."""
    r = pauli_noise(p_x, p_y, p_z).ptm() @ ptm_of_gate("T")
    return channel_stabilizer_norm(r)


def pauli_channel_t_norm_closed_form(p_x: float, p_y: float, p_z: float) -> float:
    s = math.sqrt(2)
    return max(1.0, s * (1 - (p_x + p_z) / 2), s * (1 - (p_y + p_z) / 2))
