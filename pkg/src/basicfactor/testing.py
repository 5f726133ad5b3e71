"""Random generators for property tests.

Everything takes a ``numpy.random.Generator`` so results are reproducible.
"""

from __future__ import annotations

import numpy as np


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed unitary via QR with phase correction."""
    Z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return X + X.conj().T


def random_spectrum(rng: np.random.Generator, n: int, *, repeats: bool = True, zero: bool = False, one: bool = False):
    """Complex eigenvalues, optionally with multiplicities, a 0 and a 1."""
    k = rng.integers(1, n + 1) if repeats else n
    distinct = rng.normal(size=k) * 2 + 1j * rng.normal(size=k) * 2
    values = distinct[rng.integers(0, k, size=n)] if repeats else distinct
    values = values.astype(complex)
    if zero:
        values[rng.integers(0, n)] = 0
    if one and n > 1:
        values[rng.integers(0, n)] = 1
    return values


def normal_from(U: np.ndarray, values) -> np.ndarray:
    return (U * np.asarray(values)) @ U.conj().T


def random_normal(rng: np.random.Generator, n: int, **kw) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(A, U, values) with ``A = U diag(values) U*``."""
    U = random_unitary(rng, n)
    values = random_spectrum(rng, n, **kw)
    return normal_from(U, values), U, values


def random_idempotent(rng: np.random.Generator, n: int, rank: int | None = None) -> np.ndarray:
    if rank is None:
        rank = int(rng.integers(0, n + 1))
    U = random_unitary(rng, n)[:, :rank]
    return U @ U.conj().T


def random_density(rng: np.random.Generator, n: int, rank: int | None = None, degenerate: bool = False) -> np.ndarray:
    if rank is None:
        rank = int(rng.integers(1, n + 1))
    U = random_unitary(rng, n)[:, :rank]
    if degenerate:
        k = int(rng.integers(1, rank + 1))
        p = rng.uniform(0.1, 1.0, size=k)[rng.integers(0, k, size=rank)]
    else:
        p = rng.uniform(0.1, 1.0, size=rank)
    p = p / p.sum()
    return (U * p) @ U.conj().T
