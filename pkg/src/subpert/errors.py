"""Exception hierarchy.  Every error raised deliberately by the package
derives from :class:`SubpertError`."""


class SubpertError(Exception):
    pass


class InputError(SubpertError, ValueError):
    """Malformed input: bad shapes, non-finite entries, bad files."""


class DimensionMismatch(InputError):
    pass


class NonHermitianInput(InputError):
    pass


class NotUnitary(InputError):
    pass


class NotAProjection(InputError):
    pass


class NotAnInvolution(InputError):
    pass


class NotInSubspace(InputError):
    pass


class NonPositiveDiagonal(InputError):
    pass


class NonPositiveD(InputError):
    pass


class NegativeKappa(InputError):
    pass


class GridViolatesCutoff(InputError):
    pass


class InfeasibleSpec(InputError):
    pass


class EigenvalueOnBoundary(SubpertError):
    pass


class UnclassifiedEigenvalue(SubpertError):
    pass


class KernelNotTrivial(SubpertError):
    pass


class NotOffDiagonal(SubpertError):
    pass


class NotAccretive(SubpertError):
    pass


class NotAcute(SubpertError):
    pass


class WrongDisposition(SubpertError):
    pass


class MuOutOfWindow(SubpertError):
    pass


class ConditionViolated(SubpertError):
    """A required condition on the perturbation size does not hold."""


class EnclosureViolated(SubpertError):
    pass


class ConstructionFailed(SubpertError):
    pass
