"""Explicit bijections between positive indices and the lattices Z^d.

The planar map walks expanding square rings counterclockwise, starting at the
origin and stepping first to ``(1, 0)``. Ring ``r`` occupies the indices
``(2r-1)^2 + 1 .. (2r+1)^2`` and is traced in four sides of ``2r`` points:
up the right edge, left along the top, down the left edge, right along the
bottom.

Higher dimensions split a point into two halves, fold each half to a single
integer (a one-coordinate half is used as is, a longer half is enumerated
recursively and its index folded onto Z by :func:`index_to_integer`), and
pair the two integers with the planar map.
"""

from __future__ import annotations

import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np
from django.core.exceptions import ValidationError

from .rabbits import as_integer, require_step

SUPPORTED_DIMENSIONS: tuple[int, ...] = (2, 3, 4)

Point = tuple[int, ...]


def snake_forward(k: int) -> tuple[int, int]:
    """Return the ``k``-th lattice point of the square spiral."""

    k = require_step(k, "k")
    if k == 1:
        return (0, 0)
    r = (math.isqrt(k - 1) + 1) // 2
    offset = k - (2 * r - 1) ** 2 - 1
    side, u = divmod(offset, 2 * r)
    if side == 0:
        return (r, -r + 1 + u)
    if side == 1:
        return (r - 1 - u, r)
    if side == 2:
        return (-r, r - 1 - u)
    return (-r + 1 + u, -r)


def snake_inverse(x: int, y: int) -> int:
    """Return the spiral index of the lattice point ``(x, y)``."""

    x = as_integer(x, "x")
    y = as_integer(y, "y")
    r = max(abs(x), abs(y))
    if r == 0:
        return 1
    base = (2 * r - 1) ** 2 + 1
    if x == r and y > -r:
        return base + y + r - 1
    if y == r and x < r:
        return base + 2 * r + (r - 1 - x)
    if x == -r and y < r:
        return base + 4 * r + (r - 1 - y)
    return base + 6 * r + (x + r - 1)


def snake_forward_many(indices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`snake_forward` over an int64 index array."""

    k = np.asarray(indices, dtype=np.int64)
    if k.size and k.min() < 1:
        raise ValidationError({"k": "Time steps start at 1."})
    m = np.floor(np.sqrt((k - 1).astype(np.float64))).astype(np.int64)
    m -= (m * m > k - 1).astype(np.int64)
    m += ((m + 1) * (m + 1) <= k - 1).astype(np.int64)
    r = (m + 1) // 2
    safe_r = np.maximum(r, 1)
    offset = k - (2 * r - 1) ** 2 - 1
    side, u = np.divmod(offset, 2 * safe_r)
    x = np.select(
        [r == 0, side == 0, side == 1, side == 2],
        [0, r, r - 1 - u, -r],
        default=-r + 1 + u,
    )
    y = np.select(
        [r == 0, side == 0, side == 1, side == 2],
        [0, -r + 1 + u, r, r - 1 - u],
        default=-r,
    )
    return x.astype(np.int64), y.astype(np.int64)


def snake_inverse_many(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Vectorized :func:`snake_inverse`."""

    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    r = np.maximum(np.abs(x), np.abs(y))
    base = (2 * r - 1) ** 2 + 1
    index = np.select(
        [
            r == 0,
            (x == r) & (y > -r),
            (y == r) & (x < r),
            (x == -r) & (y < r),
        ],
        [
            1,
            base + y + r - 1,
            base + 2 * r + (r - 1 - x),
            base + 4 * r + (r - 1 - y),
        ],
        default=base + 6 * r + (x + r - 1),
    )
    return index.astype(np.int64)


def index_to_integer(j: int) -> int:
    """Fold a positive index onto Z: 1, 2, 3, 4, 5 -> 0, 1, -1, 2, -2."""

    j = require_step(j, "j")
    half = j // 2
    return half if j % 2 == 0 else -half


def integer_to_index(z: int) -> int:
    """Inverse of :func:`index_to_integer`."""

    z = as_integer(z, "z")
    if z > 0:
        return 2 * z
    return -2 * z + 1


def _require_dimension(d: object) -> int:
    dimension = as_integer(d, "d")
    if dimension not in SUPPORTED_DIMENSIONS:
        supported = ", ".join(str(s) for s in SUPPORTED_DIMENSIONS)
        raise ValidationError(
            {"d": f"Unsupported dimension {dimension}; expected one of {supported}."}
        )
    return dimension


def _split(d: int) -> tuple[int, int]:
    return d // 2, d - d // 2


def _fold(part: Sequence[int]) -> int:
    if len(part) == 1:
        return part[0]
    return index_to_integer(_inverse(len(part), part))


def _unfold(z: int, length: int) -> Point:
    if length == 1:
        return (z,)
    return _forward(length, integer_to_index(z))


def _forward(d: int, k: int) -> Point:
    left, right = _split(d)
    x, y = snake_forward(k)
    return _unfold(x, left) + _unfold(y, right)


def _inverse(d: int, point: Sequence[int]) -> int:
    left, _ = _split(d)
    return snake_inverse(_fold(point[:left]), _fold(point[left:]))


def _radius(length: int, radius: int) -> int:
    if length == 1:
        return radius
    # Folding indices 1..N onto Z stays within [-N//2, N//2].
    return _covering_bound(length, radius) // 2


def _covering_bound(d: int, radius: int) -> int:
    left, right = _split(d)
    r = max(_radius(left, radius), _radius(right, radius))
    return (2 * r + 1) ** 2


def zd_forward(d: int, k: int) -> Point:
    """Return the ``k``-th point of Z^d; the planar case is the spiral."""

    return _forward(_require_dimension(d), require_step(k, "k"))


def zd_inverse(d: int, point: Sequence[int]) -> int:
    """Return the index of ``point`` in the Z^d enumeration."""

    dimension = _require_dimension(d)
    if len(point) != dimension:
        raise ValidationError(
            {"point": f"Expected {dimension} coordinates, got {len(point)}."}
        )
    coords = tuple(as_integer(c, "point") for c in point)
    return _inverse(dimension, coords)


def covering_bound(d: int, radius: int) -> int:
    """Index bound covering every point of the box ``[-radius, radius]^d``."""

    radius = as_integer(radius, "radius")
    if radius < 0:
        raise ValidationError({"radius": "Box radius must be non-negative."})
    return _covering_bound(_require_dimension(d), radius)


@dataclass(frozen=True)
class Enumeration:
    """A bijection between positive indices and Z^d."""

    dimension: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "dimension", _require_dimension(self.dimension))

    def forward(self, k: int) -> Point:
        return zd_forward(self.dimension, k)

    def inverse(self, point: Sequence[int]) -> int:
        return zd_inverse(self.dimension, point)

    def covering_bound(self, radius: int) -> int:
        return covering_bound(self.dimension, radius)

    def prefix(self, count: int) -> Iterator[tuple[int, Point]]:
        """Yield ``(index, point)`` for the first ``count`` indices."""

        count = as_integer(count, "count")
        if count < 0:
            raise ValidationError({"count": "Count must be non-negative."})
        for k in range(1, count + 1):
            yield k, self.forward(k)

    def box(self, radius: int) -> list[tuple[int, Point]]:
        """Every point of ``[-radius, radius]^d`` with its index, by index."""

        radius = as_integer(radius, "radius")
        if radius < 0:
            raise ValidationError({"radius": "Box radius must be non-negative."})
        grid = np.stack(
            np.meshgrid(*([np.arange(-radius, radius + 1)] * self.dimension)),
            axis=-1,
        ).reshape(-1, self.dimension)
        if self.dimension == 2:
            indices = snake_inverse_many(grid[:, 0], grid[:, 1])
            rows = [
                (int(k), (int(p[0]), int(p[1])))
                for k, p in zip(indices, grid, strict=True)
            ]
        else:
            rows = [
                (self.inverse(point), point)
                for point in (tuple(int(c) for c in p) for p in grid)
            ]
        return sorted(rows)
