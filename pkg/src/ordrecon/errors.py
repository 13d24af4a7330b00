"""Exception types shared across the package."""


class OrderError(Exception):
    """Base class for all package-specific errors."""


class CycleError(OrderError):
    """Transitive closure of the input relation would force x < x."""


class EmptySetError(OrderError):
    """An operation that needs a nonempty element set received an empty one."""


class SizeError(OrderError):
    """Size precondition violated (e.g. counting copies of a larger poset)."""


class NotConnectedError(OrderError):
    """Operation requires a connected poset."""


class NotCoconnectedError(OrderError):
    """Operation requires a coconnected poset (one not a linear sum)."""


class NotDecomposableError(OrderError):
    """Operation requires a poset with a nontrivial order-autonomous subset."""


class NotMaximalError(OrderError):
    """Operation requires a maximal element."""


class InvalidPairError(OrderError):
    """The supplied (l, h, phi) triple is not a valid pseudo-similar pair."""


class OrbitError(OrderError):
    """Iterating phi left its domain or revisited a point prematurely."""


class StructureError(OrderError):
    """A structural guarantee failed to materialize; carries diagnostics."""


class InconsistentDeckError(OrderError):
    """No poset has the given deck."""


class AmbiguousParameterError(OrderError):
    """Deck witnesses disagree on the extracted parameter."""


class ProcedureFailure(OrderError):
    """A deck-only procedure could not complete; carries a diagnostic trace."""


class CacheCorruptError(OrderError):
    """A cache file failed its checksum or format check."""


class CapExceededError(OrderError):
    """Requested enumeration size exceeds the configured cap."""


class UnknownPropertyError(OrderError):
    """No registered property has the requested id."""
