"""Mixed density matrices and their unique canonical form.

A density matrix is grouped by distinct eigenvalue (weight) into
eigenprojectors; each eigenprojector is then split into its unique
st-ordered rank-1 parts. Two ensembles that produce the same matrix
therefore give the same canonical form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import NotDensity, NotUnit, WeightsInvalid
from .factorization import CanonicalFactorization, assemble, factor_normal, pseudo_inverse
from .idempotent import PureDecomposition, SymmetricIdempotent, decompose_pure
from .numkit import DEFAULT_TOL, ToleranceModel, as_matrix, classify, fro, frozen, hermitian_eigen


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray
    tol: ToleranceModel = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        M = as_matrix(self.matrix, square=True)
        tol = self.tol
        if not classify(M, tol).hermitian:
            raise NotDensity("density matrix must be Hermitian")
        tr = np.trace(M)
        if abs(tr - 1.0) > tol.eps_struct * max(1.0, M.shape[0] ** 0.5):
            raise NotDensity(f"trace {tr.real!r} is not 1")
        low = hermitian_eigen(M, tol).values[0]
        if low < -tol.eps_cluster:
            raise NotDensity(f"negative eigenvalue {low!r}")
        object.__setattr__(self, "matrix", frozen(0.5 * (M + M.conj().T)))

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class DensityCanonicalForm:
    weights: tuple[float, ...]
    blocks: tuple[PureDecomposition, ...]
    residual: SymmetricIdempotent

    @property
    def size(self) -> int:
        return self.residual.size

    def projector(self, j: int) -> np.ndarray:
        return self.blocks[j].total(self.size)

    def reconstruct(self) -> np.ndarray:
        M = np.zeros((self.size, self.size), dtype=complex)
        for w, b in zip(self.weights, self.blocks):
            M += w * b.total(self.size)
        return M


def density_from_ensemble(pairs: Sequence[tuple[float, Sequence[complex]]], tol: ToleranceModel = DEFAULT_TOL) -> DensityMatrix:
    """``sum p_i u_i u_i*``; the ``u_i`` need not be orthogonal."""
    if not pairs:
        raise WeightsInvalid("empty ensemble")
    ps = [float(p) for p, _ in pairs]
    if any(p <= 0 for p in ps) or abs(sum(ps) - 1.0) > tol.eps_cluster:
        raise WeightsInvalid(f"weights must be positive and sum to 1, got {ps}")
    vecs = [np.asarray(u, dtype=complex).reshape(-1) for _, u in pairs]
    if len({v.shape[0] for v in vecs}) != 1:
        raise ValueError("ensemble vectors have different dimensions")
    for v in vecs:
        if abs(np.linalg.norm(v) - 1.0) > tol.eps_struct:
            raise NotUnit(f"ensemble vector norm {np.linalg.norm(v)!r} is not 1")
    M = sum(p * np.outer(v, v.conj()) for p, v in zip(ps, vecs))
    return DensityMatrix(M, tol)


def _factor_density(rho: DensityMatrix) -> CanonicalFactorization:
    F = factor_normal(rho.matrix, rho.tol)
    # clamp small negative drift onto the kernel
    pairs = [(0.0 if f.eigenvalue.real < 0 else f.eigenvalue.real, f.idempotent.matrix) for f in F.factors]
    return assemble(pairs, rho.size, rho.tol, F.class_hint)


def canonical_density(rho: DensityMatrix) -> DensityCanonicalForm:
    """Distinct weights (descending), each with its st-ordered pure split."""
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(rho)
    F = _factor_density(rho)
    groups = [(f.eigenvalue.real, f.idempotent) for f in F.factors if f.eigenvalue != 0]
    if F.residual_rank:
        groups.append((1.0, F.residual))
    groups.sort(key=lambda g: -g[0])
    kernel = next((f.idempotent for f in F.factors if f.eigenvalue == 0), SymmetricIdempotent.zero(rho.size))
    return DensityCanonicalForm(
        weights=tuple(w for w, _ in groups),
        blocks=tuple(decompose_pure(E) for _, E in groups),
        residual=kernel,
    )


def forms_equal(a: DensityCanonicalForm, b: DensityCanonicalForm, weight_tol: float = 1e-10, block_tol: float = 1e-9) -> bool:
    if a.size != b.size or len(a.weights) != len(b.weights):
        return False
    if any(abs(x - y) > weight_tol for x, y in zip(a.weights, b.weights)):
        return False
    for ba, bb in zip(a.blocks, b.blocks):
        if ba.st_indices != bb.st_indices:
            return False
        if any(fro(p.matrix - q.matrix) > block_tol for p, q in zip(ba.parts, bb.parts)):
            return False
    return fro(a.residual.matrix - b.residual.matrix) <= block_tol


def weight_rank_sum(form: DensityCanonicalForm) -> float:
    return float(sum(w * len(b) for w, b in zip(form.weights, form.blocks)))


def density_pseudo_inverse(rho: DensityMatrix) -> np.ndarray:
    """``prod_j (I - F_j + F_j / p_j) (I - E_0)`` over the distinct weights."""
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(rho)
    return pseudo_inverse(_factor_density(rho))

