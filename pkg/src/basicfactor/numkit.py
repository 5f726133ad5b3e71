"""Dense complex matrix substrate: structure tests and eigensolvers.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.
Eigensystems of Hermitian matrices come from a cyclic Jacobi iteration
(parallel round-robin ordering, so each round is one batched update).
Normal matrices are split into commuting Hermitian parts and diagonalized
cluster by cluster.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import NoConvergence, NonFinite, NonSquare, NotHermitian, NotNormal

MAX_SWEEPS = 30
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class ToleranceModel:
    """Absolute/relative thresholds used throughout the package.

    ``eps_struct`` bounds structural residuals (``AA* - A*A``, ``E^2 - E``...),
    ``eps_cluster`` decides when two eigenvalues are the same.
    """

    eps_struct: float = 1e-10
    eps_cluster: float = 1e-7

    def __post_init__(self):
        if not 0 < self.eps_struct < self.eps_cluster < 1:
            raise ValueError(
                "tolerances must satisfy 0 < eps_struct < eps_cluster < 1, "
                f"got {self.eps_struct}, {self.eps_cluster}"
            )


DEFAULT_TOL = ToleranceModel()


@dataclass(frozen=True)
class StructureReport:
    normal: bool
    hermitian: bool
    unitary: bool
    symmetric_unitary: bool
    idempotent: bool

    def as_dict(self) -> dict[str, bool]:
        return {
            "normal": self.normal,
            "hermitian": self.hermitian,
            "unitary": self.unitary,
            "symmetric_unitary": self.symmetric_unitary,
            "idempotent": self.idempotent,
        }


@dataclass(frozen=True)
class EigenSystem:
    values: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        self.values.flags.writeable = False
        self.vectors.flags.writeable = False


def as_matrix(A, *, square: bool = False) -> np.ndarray:
    """Coerce ``A`` to a finite 2-D complex128 array (a fresh copy)."""
    M = np.array(A, dtype=complex)
    if M.ndim == 1:
        M = M.reshape(-1, 1)
    if M.ndim != 2 or M.shape[0] == 0 or M.shape[1] == 0:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NonFinite("matrix has NaN or infinite entries")
    if square and M.shape[0] != M.shape[1]:
        raise NonSquare(f"matrix is {M.shape[0]}x{M.shape[1]}, not square")
    return M


def frozen(M: np.ndarray) -> np.ndarray:
    M = np.array(M, dtype=complex)
    M.flags.writeable = False
    return M


def adjoint(A) -> np.ndarray:
    """Conjugate transpose."""
    return as_matrix(A).conj().T.copy()


def fro(A) -> float:
    return float(np.linalg.norm(A))


def classify(A, tol: ToleranceModel = DEFAULT_TOL) -> StructureReport:
    A = as_matrix(A, square=True)
    n = A.shape[0]
    eps = tol.eps_struct
    nrm = fro(A)
    Ah = A.conj().T
    AAh = A @ Ah
    hermitian = fro(A - Ah) <= eps * max(1.0, nrm)
    unitary = fro(AAh - np.eye(n)) <= eps * np.sqrt(n)
    idempotent = fro(A @ A - A) <= eps * max(1.0, nrm)
    normal = fro(AAh - Ah @ A) <= eps * max(1.0, nrm**2)
    # downward consistency: the separate residual tests can disagree at the margin
    normal = normal or hermitian or unitary
    return StructureReport(
        normal=normal,
        hermitian=hermitian,
        unitary=unitary,
        symmetric_unitary=hermitian and unitary,
        idempotent=idempotent,
    )


@lru_cache(maxsize=None)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Disjoint (p, q) pairings covering every pair once per sweep."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a < n and b < n:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps, dtype=int), np.array(qs, dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _off_norm(A: np.ndarray) -> float:
    off = A.copy()
    np.fill_diagonal(off, 0.0)
    return fro(off)


def _jacobi(H: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = H.shape[0]
    A = H.copy()
    V = np.eye(n, dtype=complex)
    if n == 1:
        return A.real.diagonal().copy(), V
    scale = fro(A)
    target = 2.0 * n * _EPS * scale
    rounds = _round_robin(n)
    eye = np.eye(n, dtype=complex)
    for _ in range(MAX_SWEEPS):
        if _off_norm(A) <= target:
            break
        for P, Q in rounds:
            apq = A[P, Q]
            r = np.abs(apq)
            if not r.any():
                continue
            idle = r == 0.0
            rs = r + idle
            phase = apq / rs + idle  # exactly 1 where the pair is already decoupled
            diag = A.diagonal().real
            theta = (diag[Q] - diag[P]) / (2.0 * rs)
            # smaller root of t^2 + 2 theta t - 1 = 0; hypot keeps huge theta finite
            t = np.copysign(1.0 / (np.abs(theta) + np.hypot(theta, 1.0)), theta) * ~idle
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            cph = np.conj(phase)
            # all rotations of the round act on disjoint index pairs, so they
            # assemble into one unitary J and apply as A <- J* A J, V <- V J
            J = eye.copy()
            J[P, P] = c
            J[P, Q] = s
            J[Q, P] = -s * cph
            J[Q, Q] = c * cph
            A = J.conj().T @ A @ J
            A[P, Q] = 0.0
            A[Q, P] = 0.0
            V = V @ J
    else:
        if _off_norm(A) > target:
            raise NoConvergence(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")
    return A.diagonal().real.copy(), V


def hermitian_eigen(H, tol: ToleranceModel = DEFAULT_TOL) -> EigenSystem:
    """Eigensystem of a Hermitian matrix; eigenvalues ascending.

    Raises NotHermitian if ``H`` fails the Hermitian test, NoConvergence if
    the Jacobi sweep cap is hit.
    """
    H = as_matrix(H, square=True)
    if not classify(H, tol).hermitian:
        raise NotHermitian("matrix is not Hermitian within tolerance")
    H = 0.5 * (H + H.conj().T)
    values, vectors = _jacobi(H)
    order = np.argsort(values, kind="stable")
    return EigenSystem(values[order], vectors[:, order])


def _clusters_1d(values: np.ndarray, radius: float) -> list[list[int]]:
    """Groups of indices of a sorted real sequence, split at gaps > radius."""
    groups: list[list[int]] = []
    for i, v in enumerate(values):
        if groups and v - values[groups[-1][-1]] <= radius:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def normal_eigen(B, tol: ToleranceModel = DEFAULT_TOL) -> EigenSystem:
    """Unitary eigenbasis of a normal matrix.

    ``B = H1 + i H2`` with commuting Hermitian parts. ``H1`` is diagonalized
    first; each of its eigenvalue clusters is then refined by diagonalizing
    the compression of ``H2``. Eigenvalues are Rayleigh quotients, sorted by
    (real, imaginary).
    """
    B = as_matrix(B, square=True)
    report = classify(B, tol)
    if not report.normal:
        raise NotNormal("matrix is not normal within tolerance")
    if report.hermitian:
        es = hermitian_eigen(B, tol)
        return EigenSystem(es.values.astype(complex), np.array(es.vectors))

    n = B.shape[0]
    H1 = 0.5 * (B + B.conj().T)
    H2 = (B - B.conj().T) / 2j
    H2 = 0.5 * (H2 + H2.conj().T)
    l1, V1 = _jacobi(H1)
    order = np.argsort(l1, kind="stable")
    l1, V1 = l1[order], V1[:, order]
    radius = tol.eps_cluster * max(1.0, float(np.max(np.abs(l1))), fro(B) / np.sqrt(n))
    cols = []
    for group in _clusters_1d(l1, radius):
        W = V1[:, group]
        if len(group) == 1:
            cols.append(W)
            continue
        C = W.conj().T @ H2 @ W
        _, Y = _jacobi(0.5 * (C + C.conj().T))
        cols.append(W @ Y)
    V = np.hstack(cols)
    values = np.einsum("ij,ik,kj->j", V.conj(), B, V)
    order = np.lexsort((values.imag, values.real))
    return EigenSystem(values[order], V[:, order])


def orthonormalize(vs: Sequence, tol: ToleranceModel = DEFAULT_TOL) -> list[np.ndarray]:
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    Vectors whose residual after projection falls below
    ``eps_cluster * max input norm`` are treated as dependent and dropped.
    """
    vecs = [np.asarray(v, dtype=complex).reshape(-1) for v in vs]
    if not vecs:
        return []
    dims = {v.shape[0] for v in vecs}
    if len(dims) != 1:
        raise ValueError(f"vectors have mixed dimensions {sorted(dims)}")
    cutoff = tol.eps_cluster * max(np.linalg.norm(v) for v in vecs)
    basis: list[np.ndarray] = []
    for v in vecs:
        w = v.copy()
        for _ in range(2):
            for b in basis:
                w = w - (b.conj() @ w) * b
        nrm = np.linalg.norm(w)
        if nrm < cutoff or nrm == 0.0:
            continue
        basis.append(w / nrm)
    return basis
