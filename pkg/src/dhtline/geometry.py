"""Line representations and the mapping between segments and (theta, r) parameters.

Conventions used throughout:

* Raster coordinates: x grows rightward in [0, W], y grows downward in [0, H].
* A line is parameterized by ``theta`` in [0, pi) (angle against the x-axis)
  and a signed distance ``r`` from the image center, computed in centered
  coordinates (x - W/2, y - H/2) as ``r = -x*sin(theta) + y*cos(theta)``.
  With this sign choice, a horizontal line (theta = 0) with r > 0 lies
  below the image center.
* Quantization bins are half-open: index = floor(value / interval), with the
  r axis shifted by +D/2 so indices stay non-negative (D = image diagonal).
* The image boundary, when walked, is a closed curve of length 2*(W+H),
  oriented clockwise in raster coordinates:
  (0,0) -> (W,0) -> (W,H) -> (0,H) -> (0,0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ImageDims",
    "LineSegment",
    "ParametricLine",
    "QuantizationGrid",
    "BinIndex",
    "NoIntersectionError",
    "DEFAULT_DTHETA",
    "DEFAULT_DR",
    "params_from_segment",
    "segment_from_params",
    "quantize",
    "bin_center",
    "grid_from_intervals",
    "fold_parametric",
    "boundary_walk",
    "clip_segment",
]

# Defaults for the quantization intervals.
DEFAULT_DTHETA = math.pi / 100.0
DEFAULT_DR = math.sqrt(2.0)

# Slack absorbing float rounding at bin boundaries and range checks.
_EPS = 1e-9


class NoIntersectionError(ValueError):
    """Raised when a parametric line does not intersect the image rectangle."""


@dataclass(frozen=True)
class ImageDims:
    """Image width/height in pixels."""

    width: int
    height: int

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError(f"image dims must be >= 1, got {self.width}x{self.height}")

    @property
    def diagonal(self) -> float:
        return math.hypot(self.width, self.height)


@dataclass(frozen=True)
class LineSegment:
    """A segment given by two (x, y) endpoints in raster pixel coordinates."""

    p0: tuple[float, float]
    p1: tuple[float, float]

    def __post_init__(self) -> None:
        if self.p0 == self.p1:
            raise ValueError(f"degenerate segment: both endpoints are {self.p0}")

    @property
    def midpoint(self) -> tuple[float, float]:
        return ((self.p0[0] + self.p1[0]) / 2.0, (self.p0[1] + self.p1[1]) / 2.0)

    def ordered(self) -> "LineSegment":
        """Endpoints sorted lexicographically (smaller x first, then smaller y)."""
        if self.p1 < self.p0:
            return LineSegment(self.p1, self.p0)
        return self


@dataclass(frozen=True)
class ParametricLine:
    """(theta, r) line parameters relative to the image center."""

    theta: float
    r: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.theta < math.pi):
            raise ValueError(f"theta must lie in [0, pi), got {self.theta}")


@dataclass(frozen=True)
class BinIndex:
    """Integer (theta-bin, r-bin) cell of a quantization grid."""

    t: int
    s: int


@dataclass(frozen=True)
class QuantizationGrid:
    """Discretization of the (theta, r) parameter space for one image size."""

    dims: ImageDims
    dtheta: float
    dr: float
    n_theta: int
    n_r: int

    def check_bin(self, b: BinIndex) -> None:
        if not (0 <= b.t < self.n_theta and 0 <= b.s < self.n_r):
            raise ValueError(
                f"bin {b} out of range for grid {self.n_theta}x{self.n_r}"
            )


def grid_from_intervals(dims: ImageDims, dtheta: float, dr: float) -> QuantizationGrid:
    """Build the grid with n_theta = ceil(pi/dtheta) and n_r = ceil(D/dr).

    The ceilings are taken with a small slack so exact divisions
    (pi / (pi/100), D / sqrt(2) on square images) do not round up.
    """
    if dtheta <= 0.0 or dr <= 0.0:
        raise ValueError(f"quantization intervals must be positive, got {dtheta}, {dr}")
    n_theta = math.ceil(math.pi / dtheta - _EPS)
    n_r = math.ceil(dims.diagonal / dr - _EPS)
    return QuantizationGrid(dims=dims, dtheta=dtheta, dr=dr, n_theta=n_theta, n_r=n_r)


def _fold_angle(angle: float) -> float:
    """Fold an arbitrary direction angle into [0, pi); pi itself maps to 0."""
    theta = math.fmod(angle, math.pi)
    if theta < 0.0:
        theta += math.pi
    if theta >= math.pi:  # fmod rounding can land exactly on pi
        theta -= math.pi
    return theta


def params_from_segment(seg: LineSegment, dims: ImageDims) -> ParametricLine:
    """Map a segment to its (theta, r) line parameters.

    r is the signed perpendicular distance from the image center,
    r = -x*sin(theta) + y*cos(theta) in centered coordinates.
    """
    dx = seg.p1[0] - seg.p0[0]
    dy = seg.p1[1] - seg.p0[1]
    if math.hypot(dx, dy) < _EPS:
        raise ValueError("degenerate segment: endpoints coincide")
    theta = _fold_angle(math.atan2(dy, dx))
    mx = (seg.p0[0] + seg.p1[0]) / 2.0 - dims.width / 2.0
    my = (seg.p0[1] + seg.p1[1]) / 2.0 - dims.height / 2.0
    r = -mx * math.sin(theta) + my * math.cos(theta)
    return ParametricLine(theta=theta, r=r)


def segment_from_params(pl: ParametricLine, dims: ImageDims) -> LineSegment:
    """Clip the infinite line (theta, r) to the image rectangle.

    Returns the chord with endpoints ordered lexicographically; raises
    NoIntersectionError when the line misses the rectangle (or only
    touches a corner).
    """
    sin_t = math.sin(pl.theta)
    cos_t = math.cos(pl.theta)
    # Base point r*n on the line, direction d along it (centered coordinates).
    bx, by = -pl.r * sin_t, pl.r * cos_t
    dx, dy = cos_t, sin_t
    half_w, half_h = dims.width / 2.0, dims.height / 2.0

    t_lo, t_hi = -math.inf, math.inf
    for base, d, lo, hi in ((bx, dx, -half_w, half_w), (by, dy, -half_h, half_h)):
        if abs(d) < _EPS:
            if base < lo - _EPS or base > hi + _EPS:
                raise NoIntersectionError(
                    f"line (theta={pl.theta}, r={pl.r}) misses the image rectangle"
                )
            continue
        t0, t1 = (lo - base) / d, (hi - base) / d
        if t0 > t1:
            t0, t1 = t1, t0
        t_lo, t_hi = max(t_lo, t0), min(t_hi, t1)

    if t_hi - t_lo < _EPS:
        raise NoIntersectionError(
            f"line (theta={pl.theta}, r={pl.r}) misses the image rectangle"
        )
    p0 = (bx + t_lo * dx + half_w, by + t_lo * dy + half_h)
    p1 = (bx + t_hi * dx + half_w, by + t_hi * dy + half_h)
    return LineSegment(p0, p1).ordered()


def quantize(pl: ParametricLine, grid: QuantizationGrid) -> BinIndex:
    """Map (theta, r) to its half-open grid cell.

    r must fall inside the grid's covered range [-D/2, -D/2 + n_r*dr];
    ceil-built grids can overhang D/2 slightly in the last bin.
    """
    half_d = grid.dims.diagonal / 2.0
    if pl.r < -half_d - _EPS or pl.r + half_d > grid.n_r * grid.dr + _EPS:
        raise ValueError(
            f"r = {pl.r} outside the grid range [{-half_d}, "
            f"{grid.n_r * grid.dr - half_d}]"
        )
    t = int(math.floor(pl.theta / grid.dtheta + _EPS))
    s = int(math.floor((pl.r + half_d) / grid.dr + _EPS))
    t = min(max(t, 0), grid.n_theta - 1)
    s = min(max(s, 0), grid.n_r - 1)
    return BinIndex(t=t, s=s)


def bin_center(b: BinIndex, grid: QuantizationGrid) -> ParametricLine:
    """The (theta, r) midpoint of a grid cell; inverse of quantize at centers."""
    grid.check_bin(b)
    theta = (b.t + 0.5) * grid.dtheta
    r = (b.s + 0.5) * grid.dr - grid.dims.diagonal / 2.0
    # ceil-built grids can overhang [0, pi) in the last theta bin
    if theta >= math.pi:
        theta, r = theta - math.pi, -r
    return ParametricLine(theta=theta, r=r)


def fold_parametric(theta: float, r: float) -> ParametricLine:
    """Fold an arbitrary (theta, r) pair into the canonical theta range.

    Shifting theta by pi flips the line normal, so r changes sign with
    each fold.
    """
    while theta >= math.pi:
        theta, r = theta - math.pi, -r
    while theta < 0.0:
        theta, r = theta + math.pi, -r
    return ParametricLine(theta=theta, r=r)


# --- boundary walking -------------------------------------------------------


def _arc_position(p: tuple[float, float], dims: ImageDims, tol: float = 1e-6) -> float:
    """Arc-length position of a boundary point along the clockwise perimeter."""
    x, y = p
    w, h = float(dims.width), float(dims.height)
    if abs(y) <= tol and 0.0 <= x <= w:
        return x
    if abs(x - w) <= tol and 0.0 <= y <= h:
        return w + y
    if abs(y - h) <= tol and 0.0 <= x <= w:
        return w + h + (w - x)
    if abs(x) <= tol and 0.0 <= y <= h:
        return 2.0 * w + h + (h - y)
    raise ValueError(f"point {p} does not lie on the image boundary")


def _arc_point(s: float, dims: ImageDims) -> tuple[float, float]:
    """Inverse of _arc_position: perimeter arc length back to a boundary point."""
    w, h = float(dims.width), float(dims.height)
    perimeter = 2.0 * (w + h)
    s = math.fmod(s, perimeter)
    if s < 0.0:
        s += perimeter
    if s < w:
        return (s, 0.0)
    if s < w + h:
        return (w, s - w)
    if s < 2.0 * w + h:
        return (w - (s - w - h), h)
    return (0.0, h - (s - 2.0 * w - h))


def boundary_walk(
    seg: LineSegment, dims: ImageDims, offset0: float, offset1: float
) -> LineSegment:
    """Slide the segment endpoints along the image boundary.

    Each endpoint moves by the given arc length (positive = clockwise)
    along the closed perimeter curve; the input endpoints must already lie
    on the boundary. Raises ValueError when the walked endpoints collide.
    """
    s0 = _arc_position(seg.p0, dims) + offset0
    s1 = _arc_position(seg.p1, dims) + offset1
    q0 = _arc_point(s0, dims)
    q1 = _arc_point(s1, dims)
    if math.hypot(q1[0] - q0[0], q1[1] - q0[1]) < _EPS:
        raise ValueError("boundary walk collapsed the segment to a point")
    return LineSegment(q0, q1)


def clip_segment(seg: LineSegment, dims: ImageDims) -> LineSegment:
    """Clip a segment (not its infinite line) to the image rectangle.

    Raises NoIntersectionError when the segment lies entirely outside.
    """
    x0, y0 = seg.p0
    dx, dy = seg.p1[0] - x0, seg.p1[1] - y0
    t_lo, t_hi = 0.0, 1.0
    for base, d, lo, hi in (
        (x0, dx, 0.0, float(dims.width)),
        (y0, dy, 0.0, float(dims.height)),
    ):
        if abs(d) < _EPS:
            if base < lo - _EPS or base > hi + _EPS:
                raise NoIntersectionError("segment lies outside the image rectangle")
            continue
        t0, t1 = (lo - base) / d, (hi - base) / d
        if t0 > t1:
            t0, t1 = t1, t0
        t_lo, t_hi = max(t_lo, t0), min(t_hi, t1)
    if t_hi - t_lo < _EPS:
        raise NoIntersectionError("segment lies outside the image rectangle")
    p0 = (x0 + t_lo * dx, y0 + t_lo * dy)
    p1 = (x0 + t_hi * dx, y0 + t_hi * dy)
    return LineSegment(p0, p1).ordered()
