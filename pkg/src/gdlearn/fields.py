"""Per-point vector fields and scalar distance fields."""

from dataclasses import dataclass, field

import numpy as np

from .errors import StructuralError


@dataclass(frozen=True)
class VectorField:
    """Tangent-coordinate vectors stacked into one length ``d*n`` array.

    Segment ``i`` (``coords[d*i:d*(i+1)]``) holds the coordinates of the
    vector at point ``i`` in the basis given by that point's tangent frame.
    ``zero_vertices`` lists points whose vector was forced to zero because
    it could not be normalized.
    """

    coords: np.ndarray
    d: int
    zero_vertices: tuple = field(default=())

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float)
        if coords.ndim != 1 or self.d < 1 or coords.size % self.d:
            raise StructuralError(
                f"vector field of length {coords.size} is not a multiple of d={self.d}")
        if not np.all(np.isfinite(coords)):
            raise StructuralError("vector field has non-finite entries")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @property
    def n(self):
        return self.coords.size // self.d

    def blocks(self):
        """Return the vectors as an ``(n, d)`` array."""
        return self.coords.reshape(self.n, self.d)

    def norms(self):
        return np.linalg.norm(self.blocks(), axis=1)

    def lift(self, frames):
        """Ambient vectors ``T_i v_i`` as an ``(n, m)`` array."""
        return np.einsum("imd,id->im", frames.frames, self.blocks())


@dataclass(frozen=True)
class DistanceField:
    """Scalar value per point, measured from the base point ``query``.

    ``query`` may be ``None`` for fields read from files where the base
    point is unknown.
    """

    values: np.ndarray
    query: int | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise StructuralError("distance field must be one-dimensional")
        if not np.all(np.isfinite(values)):
            raise StructuralError("distance field has non-finite entries")
        if self.query is not None:
            if not 0 <= self.query < values.size:
                raise StructuralError(f"query {self.query} out of range")
            if values[self.query] != 0.0:
                raise StructuralError("distance field must vanish at its query point")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self):
        return self.values.size
