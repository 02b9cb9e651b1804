"""Exception and warning types raised across the package."""


class NLKernelError(Exception):
    """Base class for all errors raised by nlkernel."""


class InvalidSpec(NLKernelError, ValueError):
    pass


class InvalidRange(NLKernelError, ValueError):
    pass


class EmptySupport(NLKernelError):
    """No node of a sampled function exceeds the support threshold."""


class DegenerateData(NLKernelError):
    """The data carry no information (e.g. every u_i is constant)."""


class DegenerateSupport(NLKernelError):
    """The estimated kernel support radius is zero."""


class SingularBasis(NLKernelError):
    """The basis Gram matrix fails the rank check."""


class AllSpacesSingular(NLKernelError):
    pass


class FactorizationFailure(NLKernelError):
    pass


class NoPositiveSpectrum(NLKernelError):
    pass


class QuadratureNoConvergence(NLKernelError):
    pass


class StabilityViolation(NLKernelError):
    pass


class LengthMismatch(NLKernelError, ValueError):
    pass


class ZeroTruth(NLKernelError, ZeroDivisionError):
    pass


class IllConditionedWarning(UserWarning):
    pass


class DegenerateCurveWarning(UserWarning):
    pass
