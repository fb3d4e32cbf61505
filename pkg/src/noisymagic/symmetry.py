"""Exact symmetry reduction of the ROM linear program.

A Clifford symmetry acts on Pauli vectors as a signed permutation of the
``4**n`` coordinates.  If it fixes the target and maps the basis onto
itself, averaging any optimal solution over the group it generates gives
another optimal solution that is constant on column orbits.  The LP can
therefore be solved with one variable per column orbit and one constraint
per row orbit, then expanded back.

Candidate symmetries are qubit transpositions and the single-qubit
Clifford ``(X + Y)/sqrt(2)`` (swaps X and Y, negates Z).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
import scipy.sparse as sp

# digit order is I, X, Y, Z
_XY_SWAP = (np.array([0, 2, 1, 3]), np.array([1.0, 1.0, 1.0, -1.0]))


@dataclass(frozen=True, eq=False)
class SignedPermutation:
    """``v'[perm[i]] = sign[i] * v[i]``."""

    perm: np.ndarray
    sign: np.ndarray
    name: str = ""

    def apply(self, v: np.ndarray) -> np.ndarray:
        out = np.empty_like(v)
        out[self.perm] = self.sign * v
        return out

    def apply_columns(self, a: sp.csc_matrix) -> sp.csc_matrix:
        out = sp.csc_matrix(
            (a.data * self.sign[a.indices], self.perm[a.indices], a.indptr), shape=a.shape
        )
        out.sort_indices()
        return out


@lru_cache(maxsize=8)
def _digits(n: int) -> np.ndarray:
    idx = np.arange(4**n)
    return np.stack([(idx >> (2 * q)) & 3 for q in range(n)], axis=1)


def _from_digits(d: np.ndarray) -> np.ndarray:
    return (d << (2 * np.arange(d.shape[1]))).sum(axis=1)


def qubit_swap(n: int, a: int, b: int) -> SignedPermutation:
    d = _digits(n).copy()
    d[:, [a, b]] = d[:, [b, a]]
    return SignedPermutation(_from_digits(d), np.ones(4**n), f"swap{a}{b}")


def local_xy_swap(n: int, q: int) -> SignedPermutation:
    d = _digits(n).copy()
    col = d[:, q]
    sign = _XY_SWAP[1][col]
    d[:, q] = _XY_SWAP[0][col]
    return SignedPermutation(_from_digits(d), sign, f"xy{q}")


def _column_keys(a: sp.csc_matrix, decimals: int = 9) -> list[bytes]:
    keys = []
    data = np.round(a.data, decimals) + 0.0
    for j in range(a.shape[1]):
        s, e = a.indptr[j], a.indptr[j + 1]
        keys.append(a.indices[s:e].tobytes() + data[s:e].tobytes())
    return keys


def _column_map(g: SignedPermutation, a: sp.csc_matrix, index: dict[bytes, int]) -> np.ndarray | None:
    keys = _column_keys(g.apply_columns(a))
    out = np.empty(len(keys), dtype=np.int64)
    for j, k in enumerate(keys):
        hit = index.get(k)
        if hit is None:
            return None
        out[j] = hit
    return out


def candidate_symmetries(n: int, t_qubits: Sequence[int] | None = None) -> list[SignedPermutation]:
    t = set(range(n)) if t_qubits is None else set(t_qubits)
    out = [local_xy_swap(n, q) for q in sorted(t)]
    for a, b in itertools.combinations(range(n), 2):
        if (a in t) == (b in t):
            out.append(qubit_swap(n, a, b))
    return out


class _UnionFind:
    def __init__(self, size: int):
        self.parent = np.arange(size)

    def find(self, i: int) -> int:
        p = self.parent
        root = i
        while p[root] != root:
            root = p[root]
        while p[i] != root:
            p[i], i = root, p[i]
        return root

    def union_map(self, mapping: np.ndarray) -> None:
        for i, j in enumerate(mapping):
            ri, rj = self.find(i), self.find(int(j))
            if ri != rj:
                self.parent[max(ri, rj)] = min(ri, rj)

    def labels(self) -> np.ndarray:
        roots = np.array([self.find(i) for i in range(len(self.parent))])
        _, lab = np.unique(roots, return_inverse=True)
        return lab


@dataclass(frozen=True, eq=False)
class ReducedProblem:
    """Orbit-reduced LP data: ``min sum(weight |y|)  s.t.  a y = b``."""

    a: sp.csc_matrix
    b: np.ndarray
    weight: np.ndarray
    column_orbit: np.ndarray  # orbit label of every original column
    generators: tuple[str, ...]

    def expand(self, y: np.ndarray) -> np.ndarray:
        return y[self.column_orbit]


def reduce_problem(
    a: sp.csc_matrix,
    b: np.ndarray,
    n: int,
    t_qubits: Sequence[int] | None = None,
    atol: float = 1e-12,
) -> ReducedProblem | None:
    """Orbit-reduce ``min |x|_1, a x = b`` over full ``4**n`` rows; ``None`` if no symmetry."""
    index = {k: j for j, k in enumerate(_column_keys(a))}
    gens, maps = [], []
    for g in candidate_symmetries(n, t_qubits):
        if not np.allclose(g.apply(b), b, atol=atol):
            continue
        m = _column_map(g, a, index)
        if m is None:
            continue
        gens.append(g)
        maps.append(m)
    if not gens:
        return None
    uf = _UnionFind(a.shape[1])
    for m in maps:
        uf.union_map(m)
    col_orbit = uf.labels()
    n_orb = int(col_orbit.max()) + 1
    s = sp.csc_matrix(
        (np.ones(a.shape[1]), (np.arange(a.shape[1]), col_orbit)), shape=(a.shape[1], n_orb)
    )
    a_red = (a @ s).tocsr()
    # one constraint per row orbit
    covered = np.flatnonzero(np.diff(a_red.indptr) > 0)
    seen = np.zeros(a.shape[0], dtype=bool)
    reps = []
    for r in covered:
        if seen[r]:
            continue
        orbit = {int(r)}
        frontier = [int(r)]
        while frontier:
            i = frontier.pop()
            for g in gens:
                j = int(g.perm[i])
                if j not in orbit:
                    orbit.add(j)
                    frontier.append(j)
        seen[list(orbit)] = True
        reps.append(r)
    reps = np.asarray(reps, dtype=np.int64)
    weight = np.bincount(col_orbit, minlength=n_orb).astype(float)
    return ReducedProblem(a_red[reps].tocsc(), b[reps], weight, col_orbit, tuple(g.name for g in gens))
