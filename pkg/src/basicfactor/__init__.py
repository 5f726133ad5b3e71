"""Unique basic-matrix factorizations of normal matrices.

Quick tour::

    >>> import numpy as np
    >>> from basicfactor import factor_normal, reconstruct
    >>> F = factor_normal(np.array([[0, 1], [1, 0]]))
    >>> [complex(a) for a in F.eigenvalues], F.residual_rank
    ([(-1+0j)], 1)
    >>> np.allclose(reconstruct(F), [[0, 1], [1, 0]])
    True
"""

from .density import (
    DensityCanonicalForm,
    DensityMatrix,
    canonical_density,
    density_from_ensemble,
    density_pseudo_inverse,
)
from .factorization import (
    BasicFactor,
    CanonicalFactorization,
    RootSelector,
    all_nth_roots,
    canonical_equal,
    factor_normal,
    involution_idempotent,
    nth_root,
    power,
    pseudo_inverse,
    reconstruct,
    scaled_involution_idempotent,
)
from .gates import Frame, GateSpec, build_from_frame, build_identity_root, gate
from .idempotent import (
    OrthogonalFamily,
    PureDecomposition,
    SymmetricIdempotent,
    column_space_decomposition,
    decompose_pure,
    make_family,
    pure_from_vector,
    rank_of,
    st_index,
)
from .matfile import parse_matrix
from .numkit import (
    DEFAULT_TOL,
    EigenSystem,
    StructureReport,
    ToleranceModel,
    adjoint,
    classify,
    hermitian_eigen,
    normal_eigen,
    orthonormalize,
)

__version__ = "0.1.0"
