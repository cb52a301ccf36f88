"""Exception types shared across the package."""


class PolarqError(Exception):
    """Base class for every error raised by polarq."""


class NotPrimePower(PolarqError):
    """q is not of the form p^m with p prime."""


class DivisionByZero(PolarqError):
    """Multiplicative inverse of zero requested."""


class InvalidDistribution(PolarqError):
    """Transition table row is not a probability distribution."""


class InvalidBudget(PolarqError):
    """Quantization budget smaller than the input alphabet."""


class NotBijective(PolarqError):
    """Kernel lookup table is not a bijection."""


class SingularMatrix(PolarqError):
    """Matrix has no inverse over the field."""


class GammaZero(PolarqError):
    """Reed-Solomon kernel corner entry must be nonzero."""


class NoField(PolarqError):
    """Operation needs field structure but the kernel has none attached."""


class NotLinear(PolarqError):
    """Operation needs a matrix-backed linear kernel."""


class SuffixSpaceTooLarge(PolarqError):
    """Brute-force suffix enumeration exceeds its budget."""


class AlphabetBudgetExceeded(PolarqError):
    """Raw transform output alphabet exceeds its budget."""


class PathBudgetExceeded(PolarqError):
    """Exhaustive tree enumeration exceeds its path budget."""


class RequiresExhaustive(PolarqError):
    """Operation is only defined on exhaustive polarization reports."""


class LengthMismatch(PolarqError):
    """Sequence length does not match the block length."""


class LabelUnknown(PolarqError):
    """Received symbol is not an output label of the channel."""


class InvariantViolation(PolarqError):
    """Internal consistency check failed (indicates a numerical problem)."""
