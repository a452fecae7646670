"""Exception types shared across the kernel."""


class KernelError(Exception):
    """Base class for all kernel-specific failures."""


class PrecisionExhausted(KernelError):
    """A valuation-aware division left no certified pi-adic digits."""


class NotAUnit(KernelError):
    """Inversion was requested for an element whose leading slice is not unit * monomial."""


class SingularJacobian(KernelError):
    """The linear part of a change of variables is not invertible mod p."""


class BandOverflow(KernelError):
    """A product term exceeded the cross-exponent band; recompute with a larger band."""


class WindowTooSmall(KernelError):
    """An iteration needed terms beyond the degree window of its inputs."""


class DepthExhausted(KernelError):
    """A p-th root would push exponents below the configured denominator depth."""


class StabilizationFailure(KernelError):
    """A fixpoint step failed its stabilization congruence (window or depth too small)."""


class ZeroDeterminant(KernelError):
    """A determinant vanished at the working precision."""


class Uncertified(KernelError):
    """A comparison was requested between values whose norms are not certified."""
