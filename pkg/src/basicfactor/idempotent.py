"""Symmetric idempotents (orthogonal projectors).

Rank is always the rounded trace. :func:`decompose_pure` splits a projector
into rank-1 pieces ordered by their count of leading zeros, which makes the
split unique; :func:`column_space_decomposition` is an independent,
non-unique split used to cross-check it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    MaxIterations,
    NotIdempotent,
    NotOrthogonal,
    NotUnit,
    RankOverflow,
    TraceNotInteger,
    ZeroVector,
)
from .numkit import DEFAULT_TOL, ToleranceModel, as_matrix, fro, frozen, orthonormalize


def _check_projector(M: np.ndarray, tol: ToleranceModel, slack: float = 1.0) -> None:
    n = M.shape[0]
    nrm = fro(M)
    if fro(M - M.conj().T) > slack * tol.eps_struct * max(1.0, nrm):
        raise NotIdempotent("matrix is not Hermitian")
    if fro(M @ M - M) > slack * tol.eps_struct * max(1.0, nrm):
        raise NotIdempotent("matrix does not satisfy E^2 = E")
    tr = np.trace(M).real
    if abs(tr - round(tr)) > tol.eps_cluster * n:
        raise TraceNotInteger(f"trace {tr!r} is not within {tol.eps_cluster * n:g} of an integer")


@dataclass(frozen=True, eq=False)
class SymmetricIdempotent:
    """A validated Hermitian idempotent ``E``.

    Construction checks ``E* = E``, ``E^2 = E`` and that the trace is an
    integer, so downstream code may rely on all three.
    """

    matrix: np.ndarray
    tol: ToleranceModel = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        M = as_matrix(self.matrix, square=True)
        _check_projector(M, self.tol)
        object.__setattr__(self, "matrix", frozen(M))

    @classmethod
    def zero(cls, n: int) -> "SymmetricIdempotent":
        return cls(np.zeros((n, n), dtype=complex))

    @classmethod
    def identity(cls, n: int) -> "SymmetricIdempotent":
        return cls(np.eye(n, dtype=complex))

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def rank(self) -> int:
        return rank_of(self)

    def is_zero(self) -> bool:
        return self.rank == 0

    def __array__(self, dtype=None, copy=None):
        return np.array(self.matrix, dtype=dtype)


@dataclass(frozen=True)
class PureDecomposition:
    parts: tuple[SymmetricIdempotent, ...]
    st_indices: tuple[int, ...]

    def total(self, n: int | None = None) -> np.ndarray:
        if not self.parts:
            if n is None:
                raise ValueError("size needed to sum an empty decomposition")
            return np.zeros((n, n), dtype=complex)
        return sum(p.matrix for p in self.parts)

    def __len__(self):
        return len(self.parts)


@dataclass(frozen=True)
class OrthogonalFamily:
    members: tuple[SymmetricIdempotent, ...]
    residual: SymmetricIdempotent
    complete: bool

    @property
    def size(self) -> int:
        return self.residual.size


def pure_from_vector(u, tol: ToleranceModel = DEFAULT_TOL) -> SymmetricIdempotent:
    """``u u*`` for a unit column vector ``u``."""
    u = np.asarray(u, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(u) - 1.0) > tol.eps_struct:
        raise NotUnit(f"vector norm {np.linalg.norm(u)!r} is not 1")
    return SymmetricIdempotent(np.outer(u, u.conj()), tol)


def rank_of(E: SymmetricIdempotent) -> int:
    M = E.matrix if isinstance(E, SymmetricIdempotent) else as_matrix(E, square=True)
    tol = E.tol if isinstance(E, SymmetricIdempotent) else DEFAULT_TOL
    tr = float(np.trace(M).real)
    r = round(tr)
    if abs(tr - r) > tol.eps_cluster * M.shape[0]:
        raise TraceNotInteger(f"trace {tr!r} is not close to an integer")
    return int(r)


def st_index(v, tol: ToleranceModel = DEFAULT_TOL) -> int:
    """Number of leading (numerically) zero entries of ``v``."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    nz = np.flatnonzero(np.abs(v) > tol.eps_struct)
    if nz.size == 0:
        raise ZeroVector("st index of a zero vector is undefined")
    return int(nz[0])


def _first_nonzero_column(M: np.ndarray, cutoff: float) -> int | None:
    norms = np.linalg.norm(M, axis=0)
    idx = np.flatnonzero(norms > cutoff)
    return int(idx[0]) if idx.size else None


def decompose_pure(E: SymmetricIdempotent) -> PureDecomposition:
    """Unique split of ``E`` into rank-1 projectors with increasing st index.

    Repeatedly take the first nonzero column ``v`` of the remainder, emit
    ``u u*`` with ``u = v / |v|`` and subtract it. The column index is the
    st index of the emitted part. The zero projector yields no parts.
    """
    tol = E.tol
    M = np.array(E.matrix)
    n = M.shape[0]
    cutoff = tol.eps_cluster * max(1.0, fro(M))
    parts, sts = [], []
    iterations = 0
    while True:
        col = _first_nonzero_column(M, cutoff)
        if col is None:
            break
        iterations += 1
        if iterations > n:
            raise MaxIterations(f"more than {n} rank-1 parts extracted")
        v = M[:, col]
        u = v / np.linalg.norm(v)
        u[:col] = 0.0
        P = np.outer(u, u.conj())
        parts.append(SymmetricIdempotent(P, tol))
        sts.append(col)
        M = M - P
        M[: col + 1, :] = 0.0
        M[:, : col + 1] = 0.0
        try:
            _check_projector(M, tol, slack=10.0)
        except NotIdempotent as exc:
            raise NotIdempotent(f"remainder after st={col} is not idempotent: {exc}") from None
    if len(parts) != rank_of(E):
        raise NotIdempotent(f"extracted {len(parts)} parts but trace rank is {rank_of(E)}")
    return PureDecomposition(tuple(parts), tuple(sts))


def column_space_decomposition(E: SymmetricIdempotent) -> list[SymmetricIdempotent]:
    M = E.matrix
    basis = orthonormalize([M[:, j] for j in range(M.shape[1])], E.tol) if fro(M) > 0 else []
    return [SymmetricIdempotent(np.outer(b, b.conj()), E.tol) for b in basis]


def make_family(
    members: Sequence[SymmetricIdempotent], size: int | None = None, tol: ToleranceModel = DEFAULT_TOL
) -> OrthogonalFamily:
    """Check mutual orthogonality and attach the complementary projector.

    ``size`` is only needed when ``members`` is empty.
    """
    members = tuple(members)
    sizes = {m.size for m in members}
    if size is not None:
        sizes.add(size)
    if len(sizes) != 1:
        raise ValueError(f"members have inconsistent sizes {sorted(sizes)}")
    n = sizes.pop()
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            if fro(members[i].matrix @ members[j].matrix) > tol.eps_struct:
                raise NotOrthogonal(i, j)
    total_rank = sum(rank_of(m) for m in members)
    if total_rank > n:
        raise RankOverflow(f"ranks sum to {total_rank} > {n}")
    if total_rank == n:
        return OrthogonalFamily(members, SymmetricIdempotent.zero(n), True)
    acc = np.eye(n, dtype=complex)
    for m in members:
        acc -= m.matrix
    residual = SymmetricIdempotent(acc, tol)
    return OrthogonalFamily(members, residual, False)
