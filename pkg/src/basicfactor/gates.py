"""Quantum gate catalog with hand-derived basic factorizations, and builders.

Each catalog entry pairs the gate matrix with its factorization written
down from closed-form projectors, independently of the eigensolver. The
builders assemble normal matrices from orthonormal frames or from roots of
unity on an orthogonal family.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import ExponentOutOfRange, LengthMismatch, MissingParameter, NotOrthonormal, UnknownGate
from .factorization import CanonicalFactorization, assemble
from .idempotent import OrthogonalFamily
from .numkit import DEFAULT_TOL, ToleranceModel, fro, frozen

R2 = 1.0 / math.sqrt(2.0)

GATE_NAMES = (
    "hadamard",
    "pauli_x",
    "pauli_y",
    "pauli_z",
    "phase",
    "not",
    "sqrt_not",
    "swap",
    "sqrt_swap",
    "cnot",
    "bell",
    "rotation",
)
PARAMETRIZED = {"phase": ("theta",), "rotation": ("theta",)}


@dataclass(frozen=True)
class GateSpec:
    name: str
    parameters: Mapping[str, float]
    matrix: np.ndarray
    published_factorization: CanonicalFactorization


@dataclass(frozen=True)
class Frame:
    vectors: tuple[np.ndarray, ...]
    alphas: tuple[complex, ...]
    size: int | None = field(default=None)

    @property
    def dim(self) -> int:
        if self.vectors:
            return len(self.vectors[0])
        if self.size is None:
            raise ValueError("empty frame needs an explicit size")
        return self.size


def _m(rows) -> np.ndarray:
    return np.array(rows, dtype=complex)


# Closed-form eigenprojectors of the catalog gates.
_E_X = 0.5 * _m([[1, -1], [-1, 1]])
_F_X = 0.5 * _m([[1, 1], [1, 1]])
_E_Y = 0.5 * _m([[1, 1j], [-1j, 1]])
_E_Z = _m([[0, 0], [0, 1]])
_E_H = 0.5 * _m([[1 - R2, -R2], [-R2, 1 + R2]])
_E_SWAP = _m([[0, 0, 0, 0], [0, 0.5, -0.5, 0], [0, -0.5, 0.5, 0], [0, 0, 0, 0]])
_E_CNOT = _m([[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0.5, -0.5], [0, 0, -0.5, 0.5]])
# eigenvalue exp(i t) of the rotation [[cos t, sin t], [-sin t, cos t]]
_E_ROT_PLUS = 0.5 * _m([[1, -1j], [1j, 1]])
_E_ROT_MINUS = 0.5 * _m([[1, 1j], [-1j, 1]])


def _catalog_entry(name: str, params: Mapping[str, float]):
    if name == "hadamard":
        return R2 * _m([[1, 1], [1, -1]]), [(-1, _E_H)]
    if name in ("pauli_x", "not"):
        return _m([[0, 1], [1, 0]]), [(-1, _E_X)]
    if name == "pauli_y":
        return _m([[0, -1j], [1j, 0]]), [(-1, _E_Y)]
    if name == "pauli_z":
        return _m([[1, 0], [0, -1]]), [(-1, _E_Z)]
    if name == "phase":
        t = params["theta"]
        return _m([[1, 0], [0, cmath.exp(1j * t)]]), [(cmath.exp(1j * t), _E_Z)]
    if name == "sqrt_not":
        return 0.5 * _m([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]]), [(1j, _E_X)]
    if name == "swap":
        return _m([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]), [(-1, _E_SWAP)]
    if name == "sqrt_swap":
        a, b = 0.5 * (1 + 1j), 0.5 * (1 - 1j)
        return _m([[1, 0, 0, 0], [0, a, b, 0], [0, b, a, 0], [0, 0, 0, 1]]), [(1j, _E_SWAP)]
    if name == "cnot":
        return _m([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]), [(-1, _E_CNOT)]
    if name == "bell":
        # B = (I - E - iE)(I - F + iF) with E = (1/2)[[1, i], [-i, 1]], F = I - E
        return _m([[0, 1], [-1, 0]]), [(-1j, _E_ROT_MINUS), (1j, _E_ROT_PLUS)]
    if name == "rotation":
        t = params["theta"]
        U = _m([[math.cos(t), math.sin(t)], [-math.sin(t), math.cos(t)]])
        return U, [(cmath.exp(1j * t), _E_ROT_PLUS), (cmath.exp(-1j * t), _E_ROT_MINUS)]
    raise UnknownGate(f"unknown gate {name!r}; known gates: {', '.join(GATE_NAMES)}")


def gate(name: str, params: Mapping[str, float] | None = None, tol: ToleranceModel = DEFAULT_TOL) -> GateSpec:
    """Look up a catalog gate.

    ``phase`` and ``rotation`` need a ``theta`` parameter (radians).
    """
    params = dict(params or {})
    name = name.lower().replace("-", "_")
    if name not in GATE_NAMES:
        raise UnknownGate(f"unknown gate {name!r}; known gates: {', '.join(GATE_NAMES)}")
    for key in PARAMETRIZED.get(name, ()):
        if params.get(key) is None:
            raise MissingParameter(f"gate {name!r} needs parameter {key!r}")
    used = {k: float(params[k]) for k in PARAMETRIZED.get(name, ())}
    U, pairs = _catalog_entry(name, used)
    F = assemble(pairs, U.shape[0], tol)
    return GateSpec(name, used, frozen(U), F)


def _validate_frame(f: Frame, tol: ToleranceModel) -> np.ndarray:
    if len(f.vectors) != len(f.alphas):
        raise LengthMismatch(f"{len(f.vectors)} vectors but {len(f.alphas)} eigenvalues")
    n = f.dim
    if not f.vectors:
        return np.zeros((n, 0), dtype=complex)
    if any(len(v) != n for v in f.vectors):
        raise LengthMismatch("frame vectors have different dimensions")
    if len(f.vectors) > n:
        raise NotOrthonormal(f"{len(f.vectors)} vectors cannot be orthonormal in dimension {n}")
    V = np.column_stack([np.asarray(v, dtype=complex) for v in f.vectors])
    k = V.shape[1]
    if fro(V.conj().T @ V - np.eye(k)) > tol.eps_struct * math.sqrt(k):
        raise NotOrthonormal("frame vectors are not orthonormal")
    return V


def build_from_frame(f: Frame, tol: ToleranceModel = DEFAULT_TOL) -> CanonicalFactorization:
    """Factorization of ``prod (I - u_i u_i* + a_i u_i u_i*)``.

    Equal eigenvalues are joined into one factor and eigenvalue 1 is folded
    into the residual.
    """
    V = _validate_frame(f, tol)
    pairs = [(complex(a), np.outer(V[:, i], V[:, i].conj())) for i, a in enumerate(f.alphas)]
    return assemble(pairs, f.dim, tol)


def build_identity_root(
    members: OrthogonalFamily, exponents: Sequence[int], n: int, tol: ToleranceModel = DEFAULT_TOL
) -> CanonicalFactorization:
    """An ``n``-th root of the identity: ``prod (I - E_j + e^{2 pi i r_j / n} E_j)``.

    Each exponent must lie in ``[1, n - 1]``.
    """
    if len(exponents) != len(members.members):
        raise LengthMismatch(f"{len(exponents)} exponents for {len(members.members)} members")
    for r in exponents:
        if int(r) != r or not 1 <= r <= n - 1:
            raise ExponentOutOfRange(f"exponent {r!r} outside [1, {n - 1}]")
    pairs = [
        (cmath.exp(2j * math.pi * r / n), E.matrix) for r, E in zip(exponents, members.members)
    ]
    return assemble(pairs, members.size, tol)
