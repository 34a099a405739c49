"""Shallow range searching over planar point sets.

Linear-size partition trees answering emptiness, reporting, nearest-neighbor
above a line, and approximate counting queries for fat triangles and circular
caps.
"""

from .errors import (
    ChordOutsideDiskError,
    CuttingQualityError,
    CuttingSizeExceededError,
    DegenerateTriangleError,
    FamilyMismatchError,
    GeometryError,
    MalformedInputError,
    NotNEmptyError,
    PartitionStalledError,
)
from .geom import Circle2, Line2, Point2, Tolerance, DEFAULT_TOL
from .points import PointSet
from .ranges import CircularCap, FatTriangle, FAMILY_CAP, FAMILY_TRIANGLE

__version__ = "0.1.0"

__all__ = [
    "Circle2",
    "Line2",
    "Point2",
    "Tolerance",
    "DEFAULT_TOL",
    "GeometryError",
    "DegenerateTriangleError",
    "ChordOutsideDiskError",
    "FamilyMismatchError",
    "CuttingSizeExceededError",
    "CuttingQualityError",
    "PartitionStalledError",
    "NotNEmptyError",
    "MalformedInputError",
    "PointSet",
    "FatTriangle",
    "CircularCap",
    "FAMILY_TRIANGLE",
    "FAMILY_CAP",
    "__version__",
]
