"""Exception types shared across the package."""


class GeometryError(Exception):
    """Base class for geometric failures."""


class DegenerateTriangleError(GeometryError):
    """Three collinear (or coincident) points where a proper triangle is required."""


class ChordOutsideDiskError(GeometryError):
    """A cap chord line that does not meet the closure of its disk."""


class FamilyMismatchError(GeometryError):
    """Query range does not belong to the family a structure was built for."""


class CuttingSizeExceededError(GeometryError):
    """Shallow cutting could not meet the caller's cell budget within max_rounds."""


class CuttingQualityError(GeometryError):
    """Shallow cutting still has overweight cells after max_rounds of refinement."""


class PartitionStalledError(GeometryError):
    """Half-partition found no cell with enough unassigned points after retries."""


class NotNEmptyError(GeometryError):
    """Canonization in emptiness mode received a range that is not openly net-empty."""


class MalformedInputError(Exception):
    """Unparseable points/queries input; carries a line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
