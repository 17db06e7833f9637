"""Exception hierarchy shared by all opcouple modules."""


class OpcoupleError(ValueError):
    """Base class for every error raised by the library."""


class DimensionMismatch(OpcoupleError):
    pass


class NotSquare(OpcoupleError):
    pass


class SingularMatrix(OpcoupleError):
    pass


class RankDeficient(OpcoupleError):
    """A set of vectors that should be independent is not."""


class MatrixFormatError(OpcoupleError):
    """Malformed matrix JSON payload."""


class NotEae(OpcoupleError):
    """Kernel or cokernel dimensions of the two operators differ."""


class NotInForm(OpcoupleError):
    """Witness blocks do not have the required structural shape."""


class SingularBlock(OpcoupleError):
    """A diagonal block of a coupling matrix is not invertible."""


class SingularCore(OpcoupleError):
    pass


class BanPropsViolated(OpcoupleError):
    """Extension spaces have different dimensions."""


class NotSurjective(OpcoupleError):
    pass


class NotInvertible(OpcoupleError):
    pass


class CorrectionTooLarge(OpcoupleError):
    pass
