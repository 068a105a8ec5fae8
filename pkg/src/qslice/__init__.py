"""Numerical toolkit for slice hyperholomorphic functions on the quaternionic right half-space.

Subpackages by topic: ``quat`` (quaternion scalars), ``qlinalg`` (quaternionic
matrices, chi embedding, Jacobi eigensolver, signatures), ``slicefn`` (power
series, star products, slice extension), ``kernels`` (Hardy and Schur-type
kernels, Gram matrices, negative squares, Potapov-Ginzburg transform),
``blaschke``, ``realization`` and ``hardy``.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .quat import Quaternion, UnitImaginary, slice_decompose  # noqa: E402
from .qlinalg import QMatrix, chi_embed, jacobi_eigh, qmat_inverse, signature  # noqa: E402
from .slicefn import PowerSeries, SliceFunction, cauchy_eval, ps_star_mul, star_fold  # noqa: E402
from .kernels import KernelSpec, GramSpec, estimate_negative_squares, k_eval, pg_transform  # noqa: E402
from .blaschke import BlaschkeFactor, SphereFactor, ZeroSet, prescribe_zeros  # noqa: E402
from .realization import COFData, GPBackwardShift, PairModel, SchurRealization, schur_eval  # noqa: E402
from .hardy import HardyFunction, QuadratureSpec, hardy_inner, onb_eval  # noqa: E402

__all__ = [
    "__version__",
    "Quaternion",
    "UnitImaginary",
    "slice_decompose",
    "QMatrix",
    "chi_embed",
    "jacobi_eigh",
    "qmat_inverse",
    "signature",
    "PowerSeries",
    "SliceFunction",
    "cauchy_eval",
    "ps_star_mul",
    "star_fold",
    "KernelSpec",
    "GramSpec",
    "estimate_negative_squares",
    "k_eval",
    "pg_transform",
    "BlaschkeFactor",
    "SphereFactor",
    "ZeroSet",
    "prescribe_zeros",
    "COFData",
    "GPBackwardShift",
    "PairModel",
    "SchurRealization",
    "schur_eval",
    "HardyFunction",
    "QuadratureSpec",
    "hardy_inner",
    "onb_eval",
]
