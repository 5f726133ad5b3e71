"""Canonical basic-matrix factorization of normal matrices.

A normal ``A`` is written as the commuting product of basic matrices
``I - E_j + a_j E_j`` with pairwise distinct eigenvalues ``a_j != 1`` and
mutually orthogonal projectors ``E_j``. Whatever is left over,
``I - sum E_j``, is the eigenvalue-1 projector and is kept separately as the
residual. Up to the order of the factors this form is unique, which is what
makes powers, roots and the pseudo-inverse simple eigenvalue maps.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    NotInvolution,
    NotNormal,
    NotScaledInvolution,
    SelectorMismatch,
    TooManyRoots,
    ZeroBranch,
)
from .idempotent import SymmetricIdempotent, rank_of
from .numkit import (
    DEFAULT_TOL,
    EigenSystem,
    StructureReport,
    ToleranceModel,
    as_matrix,
    classify,
    fro,
    hermitian_eigen,
    normal_eigen,
)

TWO_PI = 2.0 * math.pi
DEFAULT_MAX_ROOTS = 4096


@dataclass(frozen=True)
class BasicFactor:
    """The basic matrix ``I - E + eigenvalue * E``."""

    idempotent: SymmetricIdempotent
    eigenvalue: complex

    def matrix(self) -> np.ndarray:
        E = self.idempotent.matrix
        return np.eye(E.shape[0]) - E + self.eigenvalue * E

    @property
    def rank(self) -> int:
        return rank_of(self.idempotent)

    def inverse(self) -> "BasicFactor":
        return BasicFactor(self.idempotent, 1.0 / self.eigenvalue)


@dataclass(frozen=True)
class CanonicalFactorization:
    size: int
    factors: tuple[BasicFactor, ...]
    residual: SymmetricIdempotent
    class_hint: StructureReport | None = None
    tol: ToleranceModel = field(default=DEFAULT_TOL, repr=False, compare=False)

    @property
    def eigenvalues(self) -> list[complex]:
        return [f.eigenvalue for f in self.factors]

    @property
    def ranks(self) -> list[int]:
        return [f.rank for f in self.factors]

    @property
    def residual_rank(self) -> int:
        return rank_of(self.residual)

    def __len__(self):
        return len(self.factors)


@dataclass(frozen=True)
class RootSelector:
    branch_indices: tuple[int, ...]
    residual_index: int = 0


def principal_arg(z: complex) -> float:
    """Argument of ``z`` in ``[0, 2*pi)``."""
    theta = math.atan2(z.imag, z.real) % TWO_PI
    return 0.0 if theta >= TWO_PI else theta


def _order_key(alpha: complex, eps: float) -> tuple[float, float]:
    theta = principal_arg(alpha) if alpha != 0 else 0.0
    return (round(theta / eps) * eps, abs(alpha))


def _snap(alpha: complex, hint: StructureReport | None, radius: float) -> complex:
    alpha = complex(alpha)
    if hint is not None and hint.hermitian:
        alpha = complex(alpha.real, 0.0)
    if hint is not None and hint.unitary and alpha != 0:
        alpha = alpha / abs(alpha)
    if abs(alpha - 1.0) <= radius:
        return 1.0 + 0j
    if abs(alpha) <= radius:
        return 0j
    return alpha


def _hint_from_values(values: Sequence[complex], tol: ToleranceModel) -> StructureReport:
    eps = tol.eps_cluster
    herm = all(abs(a.imag) <= eps * max(1.0, abs(a)) for a in values)
    unit = all(abs(abs(a) - 1.0) <= eps for a in values)
    idem = all(abs(a) <= eps for a in values)
    return StructureReport(True, herm, unit, herm and unit, idem)


def cluster_values(values: Sequence[complex], radius: float) -> list[list[int]]:
    """Single-linkage groups of indices whose values lie within ``radius``.

    Groups are returned in lexicographic (real, imag) order of their first
    member, members in ascending index order.
    """
    vals = [complex(v) for v in values]
    order = sorted(range(len(vals)), key=lambda i: (vals[i].real, vals[i].imag))
    parent = list(range(len(vals)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in itertools.combinations(range(len(vals)), 2):
        if abs(vals[a] - vals[b]) <= radius:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for i in order:
        groups.setdefault(find(i), []).append(i)
    return [sorted(g) for g in groups.values()]


def assemble(
    pairs: Iterable[tuple[complex, np.ndarray]],
    size: int,
    tol: ToleranceModel = DEFAULT_TOL,
    hint: StructureReport | None = None,
) -> CanonicalFactorization:
    """Canonical factorization from (eigenvalue, projector) pairs.

    The pairs must be mutually orthogonal. Pairs whose eigenvalues agree are
    joined by summing their projectors, eigenvalue-1 pairs are dropped (their
    mass lands in the residual), and the factors are put in canonical order.
    The residual is the complement ``I - sum E_j`` of the remaining factors.
    """
    pairs = [(complex(a), np.asarray(E, dtype=complex)) for a, E in pairs]
    pairs = [(a, E) for a, E in pairs if fro(E) > 0]
    scale = max([1.0] + [abs(a) for a, _ in pairs])
    radius = tol.eps_cluster * scale
    snapped = [_snap(a, hint, radius) for a, _ in pairs]
    factors = []
    for group in cluster_values(snapped, radius):
        alpha = _snap(complex(np.mean([snapped[i] for i in group])), hint, radius)
        if alpha == 1.0:
            continue
        E = sum(pairs[i][1] for i in group)
        factors.append(BasicFactor(SymmetricIdempotent(0.5 * (E + E.conj().T), tol), alpha))
    factors.sort(key=lambda f: _order_key(f.eigenvalue, tol.eps_cluster))
    if sum(f.rank for f in factors) == size:
        res = np.zeros((size, size), dtype=complex)
    else:
        res = np.eye(size, dtype=complex) - sum(f.idempotent.matrix for f in factors)
    if hint is None:
        hint = _hint_from_values([f.eigenvalue for f in factors], tol)
    return CanonicalFactorization(size, tuple(factors), SymmetricIdempotent(res, tol), hint, tol)


def factor_from_eigen(
    A, eig: EigenSystem, tol: ToleranceModel = DEFAULT_TOL, hint: StructureReport | None = None
) -> CanonicalFactorization:
    """Cluster a precomputed unitary eigenbasis of ``A`` into the canonical form."""
    A = as_matrix(A, square=True)
    n = A.shape[0]
    values = np.asarray(eig.values, dtype=complex)
    V = np.asarray(eig.vectors, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(values))))
    radius = tol.eps_cluster * scale
    pairs = []
    for group in cluster_values(values, radius):
        W = V[:, group]
        pairs.append((complex(np.mean(values[group])), W @ W.conj().T))
    return assemble(pairs, n, tol, hint)


def factor_normal(A, tol: ToleranceModel = DEFAULT_TOL) -> CanonicalFactorization:
    """Canonical factorization of a normal matrix.

    Raises NotNormal when ``A`` fails the normality test and NoConvergence
    if the eigensolver stalls.
    """
    A = as_matrix(A, square=True)
    hint = classify(A, tol)
    if not hint.normal:
        raise NotNormal("matrix is not normal within tolerance")
    if hint.hermitian:
        es = hermitian_eigen(A, tol)
        eig = EigenSystem(es.values.astype(complex), np.array(es.vectors))
    else:
        eig = normal_eigen(A, tol)
    return factor_from_eigen(A, eig, tol, hint)


def reconstruct(F: CanonicalFactorization) -> np.ndarray:
    """``sum a_j E_j + residual``; equals the product of the basic factors."""
    M = np.array(F.residual.matrix)
    for f in F.factors:
        M = M + f.eigenvalue * f.idempotent.matrix
    return M


def product_form(F: CanonicalFactorization) -> np.ndarray:
    """The literal product of the basic matrices, in stored order."""
    M = np.eye(F.size, dtype=complex)
    for f in F.factors:
        M = M @ f.matrix()
    return M


def _match(F1: CanonicalFactorization, F2: CanonicalFactorization, radius: float) -> list[int] | None:
    remaining = list(range(len(F2.factors)))
    pairing = []
    for f in F1.factors:
        best = min(remaining, key=lambda j: abs(F2.factors[j].eigenvalue - f.eigenvalue), default=None)
        if best is None or abs(F2.factors[best].eigenvalue - f.eigenvalue) > radius:
            return None
        pairing.append(best)
        remaining.remove(best)
    return pairing


def canonical_equal(
    F1: CanonicalFactorization,
    F2: CanonicalFactorization,
    tol: ToleranceModel = DEFAULT_TOL,
    idem_tol: float | None = None,
) -> bool:
    """Uniqueness made executable: same eigenvalues, same projectors.

    Factor order is irrelevant; factors are matched by eigenvalue within
    ``eps_cluster`` and their projectors compared in Frobenius norm within
    ``idem_tol`` (default ``10 * eps_struct``).
    """
    if F1.size != F2.size or len(F1.factors) != len(F2.factors):
        return False
    idem_tol = 10 * tol.eps_struct if idem_tol is None else idem_tol
    scale = max([1.0] + [abs(a) for a in F1.eigenvalues + F2.eigenvalues])
    pairing = _match(F1, F2, tol.eps_cluster * scale)
    if pairing is None:
        return False
    for f, j in zip(F1.factors, pairing):
        if fro(f.idempotent.matrix - F2.factors[j].idempotent.matrix) > idem_tol:
            return False
    return fro(F1.residual.matrix - F2.residual.matrix) <= idem_tol


def power(F: CanonicalFactorization, m: int) -> CanonicalFactorization:
    """``A^m``: every eigenvalue raised to ``m``, then re-joined."""
    if int(m) != m or m < 1:
        raise ValueError(f"power must be a positive integer, got {m!r}")
    m = int(m)
    pairs = [(f.eigenvalue**m, f.idempotent.matrix) for f in F.factors]
    hint = None
    if F.class_hint is not None:
        hint = StructureReport(True, F.class_hint.hermitian, F.class_hint.unitary,
                               F.class_hint.symmetric_unitary, F.class_hint.idempotent)
    return assemble(pairs, F.size, F.tol, hint)


def _root_value(alpha: complex, n: int, r: int) -> complex:
    if alpha == 0:
        return 0j
    theta = principal_arg(alpha)
    return abs(alpha) ** (1.0 / n) * complex(math.cos((theta + TWO_PI * r) / n), math.sin((theta + TWO_PI * r) / n))


def nth_root(F: CanonicalFactorization, n: int, sel: RootSelector | None = None) -> CanonicalFactorization:
    """One ``n``-th root, chosen branch by branch.

    Factor ``(E, a)`` with ``a = |a| e^{i t}``, ``t`` in ``[0, 2 pi)``, becomes
    ``(E, |a|^{1/n} e^{i (t + 2 pi r)/n})``; a nonzero residual becomes the
    factor ``(F0, e^{2 pi i r / n})``. Zero eigenvalues only have branch 0.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"root order must be a positive integer, got {n!r}")
    n = int(n)
    if sel is None:
        sel = RootSelector(tuple(0 for _ in F.factors), 0)
    if len(sel.branch_indices) != len(F.factors):
        raise SelectorMismatch(f"{len(sel.branch_indices)} branch indices for {len(F.factors)} factors")
    indices = list(sel.branch_indices) + [sel.residual_index]
    if any(not 0 <= r < n for r in indices):
        raise SelectorMismatch(f"branch indices must lie in [0, {n - 1}]")
    residual_zero = F.residual_rank == 0
    if residual_zero and sel.residual_index != 0:
        raise SelectorMismatch("residual is zero, so its branch index must be 0")
    pairs = []
    for f, r in zip(F.factors, sel.branch_indices):
        if f.eigenvalue == 0 and r != 0:
            raise ZeroBranch("zero eigenvalue has only the zero root")
        pairs.append((_root_value(f.eigenvalue, n, r), f.idempotent.matrix))
    if not residual_zero and sel.residual_index != 0:
        pairs.append((_root_value(1.0 + 0j, n, sel.residual_index), F.residual.matrix))
    return assemble(pairs, F.size, F.tol)


def root_selectors(F: CanonicalFactorization, n: int) -> Iterator[RootSelector]:
    """Every valid selector, lexicographic in (branch indices..., residual index)."""
    ranges = [range(1) if f.eigenvalue == 0 else range(n) for f in F.factors]
    ranges.append(range(1) if F.residual_rank == 0 else range(n))
    for combo in itertools.product(*ranges):
        yield RootSelector(tuple(combo[:-1]), combo[-1])


def count_roots(F: CanonicalFactorization, n: int) -> int:
    count = 1
    for f in F.factors:
        if f.eigenvalue != 0:
            count *= n
    if F.residual_rank:
        count *= n
    return count


def all_nth_roots(
    F: CanonicalFactorization, n: int, max_roots: int = DEFAULT_MAX_ROOTS
) -> list[tuple[RootSelector, CanonicalFactorization]]:
    """All ``n``-th roots as (selector, factorization) pairs.

    Raises TooManyRoots (carrying the count) instead of materializing more
    than ``max_roots`` results.
    """
    count = count_roots(F, n)
    if count > max_roots:
        raise TooManyRoots(count, max_roots)
    return [(sel, nth_root(F, n, sel)) for sel in root_selectors(F, n)]


def zero_projector(F: CanonicalFactorization) -> np.ndarray:
    for f in F.factors:
        if f.eigenvalue == 0:
            return np.array(f.idempotent.matrix)
    return np.zeros((F.size, F.size), dtype=complex)


def pseudo_inverse(F: CanonicalFactorization) -> np.ndarray:
    """Moore-Penrose inverse: invert each nonzero eigenvalue, kill the kernel.

    Computed as ``prod_j (I - E_j + a_j^{-1} E_j) (I - E_0)`` where ``E_0`` is
    the zero-eigenvalue projector.
    """
    n = F.size
    M = np.eye(n, dtype=complex)
    for f in F.factors:
        if f.eigenvalue != 0:
            M = M @ f.inverse().matrix()
    return M @ (np.eye(n) - zero_projector(F))


def involution_idempotent(A, tol: ToleranceModel = DEFAULT_TOL) -> SymmetricIdempotent:
    """``E = (I - A)/2`` for a normal ``A`` with ``A^2 = I``, so ``A = I - 2E``."""
    A = as_matrix(A, square=True)
    n = A.shape[0]
    if not classify(A, tol).normal or fro(A @ A - np.eye(n)) > tol.eps_struct * math.sqrt(n):
        raise NotInvolution("matrix is not a normal involution (A^2 != I)")
    try:
        return SymmetricIdempotent(0.5 * (np.eye(n) - A), tol)
    except ValueError as exc:
        raise NotInvolution(str(exc)) from None


def scaled_involution_idempotent(H, tol: ToleranceModel = DEFAULT_TOL) -> tuple[float, SymmetricIdempotent]:
    """Split a Hermitian ``H`` with ``H^2 = c I`` as ``sqrt(c) (I - 2E)``."""
    H = as_matrix(H, square=True)
    n = H.shape[0]
    if not classify(H, tol).hermitian:
        raise NotScaledInvolution("matrix is not Hermitian")
    H2 = H @ H
    c = float(np.trace(H2).real) / n
    if c <= 0 or fro(H2 - c * np.eye(n)) > tol.eps_struct * max(1.0, fro(H2)):
        raise NotScaledInvolution("H^2 is not a positive multiple of I")
    scale = math.sqrt(c)
    try:
        return scale, SymmetricIdempotent(0.5 * (np.eye(n) - H / scale), tol)
    except ValueError as exc:
        raise NotScaledInvolution(str(exc)) from None
