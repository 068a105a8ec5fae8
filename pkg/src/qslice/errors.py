"""Exception hierarchy shared by all qslice modules."""


class QSliceError(Exception):
    """Base class for every error raised by qslice."""


class DomainError(QSliceError, ValueError):
    """An argument lies outside the domain of the operation."""


class StructureViolation(QSliceError):
    """A complex matrix does not have the block symmetry of a quaternionic embedding."""


class DegenerateSpectrum(QSliceError):
    """Eigenvalues of an embedded matrix fail to pair up after thresholding."""


class SolverError(QSliceError):
    """An iterative solver did not converge."""


class SingularMatrix(QSliceError):
    """A matrix that must be inverted is singular within tolerance."""


class NotPSD(QSliceError):
    """A matrix expected to be positive semidefinite has a negative eigenvalue."""


class SingularLeadingCoefficient(SingularMatrix):
    pass


class SingularKernelPoint(DomainError):
    """The kernel denominator vanishes: p lies on the sphere [-conj(q)]."""


class SingularPoint(DomainError):
    """Evaluation point lies on a pole sphere."""


class UnsupportedEvaluation(QSliceError):
    """The requested evaluation is not available for this function representation."""


class SingularBlock(SingularMatrix):
    pass


class ConstructionFailure(QSliceError):
    pass


class ResolventSingular(SingularMatrix):
    """The second-order resolvent pencil is not invertible at the requested point."""


class EvaluationSingular(ResolventSingular):
    pass


class EvaluationError(QSliceError):
    """A function returned a non-finite value during quadrature."""
