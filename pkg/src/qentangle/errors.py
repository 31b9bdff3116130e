"""Exception hierarchy shared by every module of the package."""


class EntanglementError(ValueError):
    """Base class for precondition violations raised by qentangle."""


class NotHermitian(EntanglementError):
    pass


class NotPSD(EntanglementError):
    pass


class InvalidState(EntanglementError):
    """A matrix or vector fails the density-operator / pure-state invariants."""


class LayoutMismatch(EntanglementError):
    pass


class BadLayout(EntanglementError):
    pass


class BadIndex(EntanglementError):
    pass


class BadCut(EntanglementError):
    pass


class UnknownName(EntanglementError):
    pass


class DimensionMismatch(EntanglementError):
    pass


class NotUnitary(EntanglementError):
    pass


class CountMismatch(EntanglementError):
    pass


class OutOfRange(EntanglementError):
    pass


class ThetaOutOfRange(OutOfRange):
    pass
