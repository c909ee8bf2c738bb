"""Exception hierarchy.

Every error names the invariant it guards so the CLI can report it verbatim.
"""


class AffpermError(ValueError):
    """Base class for domain and validation errors."""

    invariant = "affperm"

    def __init__(self, message: str, *, indices: tuple[int, ...] = ()):
        super().__init__(message)
        self.indices = indices

    def __str__(self) -> str:
        return f"{self.invariant}: {self.args[0]}"


class DuplicateResidue(AffpermError):
    invariant = "residues"


class BadSum(AffpermError):
    invariant = "centering"


class UnboundedInput(AffpermError):
    invariant = "bounded"


class TooManyRanks(AffpermError):
    invariant = "rank"


class SizeTooSmall(AffpermError):
    invariant = "size"


class CapExceeded(AffpermError):
    invariant = "cap"


class InvalidTuple(AffpermError):
    invariant = "tuple"


class EmptyDomain(AffpermError):
    invariant = "domain"


class SampleOutsideUniverse(AffpermError):
    invariant = "universe"


class InvalidMeasure(AffpermError):
    invariant = "measure"


class InvalidPattern(AffpermError):
    invariant = "pattern"


class MalformedInput(AffpermError):
    invariant = "format"


class TransportFailure(AffpermError):
    invariant = "transport"
