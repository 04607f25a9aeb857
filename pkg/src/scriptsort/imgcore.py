"""Pixel-level primitives on binary rasters.

Images are 2-D ``numpy.uint8`` arrays holding 0 (background) and 1 (ink).
Every function here is pure: inputs are never modified.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import ndimage

__all__ = [
    "StructuringElement",
    "hline",
    "square",
    "as_binary",
    "erode",
    "dilate",
    "open_",
    "ConnectedComponent",
    "label",
    "connected_components",
    "Axis",
    "ProjectionProfile",
    "projection",
    "ContourKind",
    "Contour",
    "trace_contours",
]


def as_binary(img) -> np.ndarray:
    """Validate and coerce ``img`` to a 2-D uint8 array of 0/1 values."""
    arr = np.asarray(img)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"binary image must be a non-empty 2-D array, got shape {arr.shape}")
    if arr.dtype == bool:
        return arr.astype(np.uint8)
    if not np.isin(arr, (0, 1)).all():
        raise ValueError("binary image pixels must be 0 or 1")
    return arr.astype(np.uint8, copy=False)


# --------------------------------------------------------------------------
# morphology
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class StructuringElement:
    """A flat structuring element: a horizontal line or a square.

    The origin is the center cell; for even sizes it is the cell just
    left of (and above) the geometric center.
    """

    shape: str  # "hline" or "square"
    size: int

    def __post_init__(self):
        if self.shape not in ("hline", "square"):
            raise ValueError(f"unknown structuring element shape {self.shape!r}")
        if int(self.size) < 1:
            raise ValueError("structuring element size must be >= 1")

    @property
    def offsets(self) -> list[tuple[int, int]]:
        """(drow, dcol) of every cell relative to the origin."""
        lo, hi = -((self.size - 1) // 2), self.size // 2
        span = range(lo, hi + 1)
        if self.shape == "hline":
            return [(0, dc) for dc in span]
        return [(dr, dc) for dr in span for dc in span]


def hline(length: int) -> StructuringElement:
    return StructuringElement("hline", length)


def square(side: int) -> StructuringElement:
    return StructuringElement("square", side)


def _shifted(img: np.ndarray, dr: int, dc: int) -> np.ndarray:
    """out[r, c] = img[r + dr, c + dc], zero outside the image."""
    h, w = img.shape
    out = np.zeros_like(img)
    if abs(dr) >= h or abs(dc) >= w:
        return out
    out[max(0, -dr):h - max(0, dr), max(0, -dc):w - max(0, dc)] = \
        img[max(0, dr):h - max(0, -dr), max(0, dc):w - max(0, -dc)]
    return out


def _axis_split(se: StructuringElement):
    # a square is the product of a horizontal and a vertical line, so it
    # can be applied as two 1-D passes (zero padding composes correctly)
    lo, hi = -((se.size - 1) // 2), se.size // 2
    cols = [(0, d) for d in range(lo, hi + 1)]
    if se.shape == "hline":
        return [cols]
    return [cols, [(d, 0) for d in range(lo, hi + 1)]]


def erode(img, se: StructuringElement) -> np.ndarray:
    """Binary erosion; structuring-element cells falling outside count as background."""
    out = as_binary(img)
    for offsets in _axis_split(se):
        acc = np.ones_like(out)
        for dr, dc in offsets:
            acc &= _shifted(out, dr, dc)
        out = acc
    return out


def dilate(img, se: StructuringElement) -> np.ndarray:
    """Binary dilation by the reflected element, clipped to the image frame."""
    out = as_binary(img)
    for offsets in _axis_split(se):
        acc = np.zeros_like(out)
        for dr, dc in offsets:
            acc |= _shifted(out, -dr, -dc)
        out = acc
    return out


def open_(img, se: StructuringElement) -> np.ndarray:
    """Morphological opening: erosion followed by dilation with the same element."""
    return dilate(erode(img, se), se)


# --------------------------------------------------------------------------
# connected components
# --------------------------------------------------------------------------

_STRUCTURE = {
    4: ndimage.generate_binary_structure(2, 1),
    8: ndimage.generate_binary_structure(2, 2),
}


@dataclass(frozen=True)
class ConnectedComponent:
    label: int
    pixel_count: int
    bbox: tuple[int, int, int, int]  # top, left, bottom, right (inclusive)

    @property
    def height(self) -> int:
        return self.bbox[2] - self.bbox[0] + 1

    @property
    def width(self) -> int:
        return self.bbox[3] - self.bbox[1] + 1


def label(img, connectivity: int = 8) -> tuple[np.ndarray, list[ConnectedComponent]]:
    """Label ink pixels; labels are numbered 1.. in row-major order of first pixel."""
    if connectivity not in _STRUCTURE:
        raise ValueError("connectivity must be 4 or 8")
    arr = as_binary(img)
    labels, n = ndimage.label(arr, structure=_STRUCTURE[connectivity])
    if n == 0:
        return labels, []
    counts = np.bincount(labels.ravel(), minlength=n + 1)
    comps = []
    for idx, sl in enumerate(ndimage.find_objects(labels), start=1):
        rs, cs = sl
        comps.append(ConnectedComponent(
            idx, int(counts[idx]), (rs.start, cs.start, rs.stop - 1, cs.stop - 1)))
    return labels, comps


def connected_components(img, connectivity: int = 8) -> list[ConnectedComponent]:
    return label(img, connectivity)[1]


# --------------------------------------------------------------------------
# projections
# --------------------------------------------------------------------------


class Axis(str, Enum):
    HORIZONTAL = "horizontal"  # one count per row
    VERTICAL = "vertical"      # one count per column


@dataclass(frozen=True)
class ProjectionProfile:
    axis: Axis
    counts: np.ndarray


def projection(img, axis: Axis | str) -> ProjectionProfile:
    axis = Axis(axis)
    arr = as_binary(img)
    counts = arr.sum(axis=1 if axis is Axis.HORIZONTAL else 0, dtype=np.int64)
    return ProjectionProfile(axis, counts)


# --------------------------------------------------------------------------
# contour tracing
# --------------------------------------------------------------------------


class ContourKind(str, Enum):
    OUTER = "outer"
    INNER = "inner"


@dataclass
class Contour:
    points: list[tuple[int, int]]
    kind: ContourKind
    closed: bool = True
    # for inner contours: one background pixel of the enclosed hole
    hole_seed: tuple[int, int] | None = field(default=None, repr=False)

    def __len__(self):
        return len(self.points)

    @property
    def bbox(self) -> tuple[int, int, int, int]:
        rows = [p[0] for p in self.points]
        cols = [p[1] for p in self.points]
        return min(rows), min(cols), max(rows), max(cols)


# neighbour offsets, clockwise on screen (rows grow downward), starting east
_DR = (0, 1, 1, 1, 0, -1, -1, -1)
_DC = (1, 1, 0, -1, -1, -1, 0, 1)
_DIR = {(dr, dc): k for k, (dr, dc) in enumerate(zip(_DR, _DC))}


def _follow(f, i, j, i2, j2, nbd):
    """Border following from (i, j), whose background neighbour is (i2, j2).

    Marks visited border pixels in ``f`` in place and returns the traversal.
    """
    d0 = _DIR[(i2 - i, j2 - j)]
    for k in range(8):
        d = (d0 + k) & 7
        if f[i + _DR[d]][j + _DC[d]] != 0:
            i1, j1 = i + _DR[d], j + _DC[d]
            break
    else:
        f[i][j] = -nbd
        return [(i, j)]

    pts = []
    i2, j2 = i1, j1
    i3, j3 = i, j
    while True:
        pts.append((i3, j3))
        ds = _DIR[(i2 - i3, j2 - j3)]
        east_zero = False
        for k in range(1, 9):
            d = (ds - k) & 7
            r, c = i3 + _DR[d], j3 + _DC[d]
            if f[r][c] != 0:
                i4, j4 = r, c
                break
            if d == 0:
                east_zero = True
        if east_zero:
            f[i3][j3] = -nbd
        elif f[i3][j3] == 1:
            f[i3][j3] = nbd
        if i4 == i and j4 == j and i3 == i1 and j3 == j1:
            return pts
        i2, j2 = i3, j3
        i3, j3 = i4, j4


def trace_contours(img) -> list[Contour]:
    """Trace every outer border and hole border of the ink.

    Ink is 8-connected and background 4-connected, so each 8-connected
    component yields one outer contour and each enclosed 4-connected
    background region one inner contour.  Outer contours run clockwise on
    screen, inner ones counter-clockwise.  Contours are returned in the
    row-major order of their starting pixel.
    """
    arr = as_binary(img)
    h, w = arr.shape
    padded = np.zeros((h + 2, w + 2), dtype=np.int64)
    padded[1:-1, 1:-1] = arr
    # only pixels with a background west or east neighbour can start a border
    starts = (padded[1:-1, 1:-1] == 1) & (
        (padded[1:-1, :-2] == 0) | (padded[1:-1, 2:] == 0))
    f = padded.tolist()
    nbd = 1
    out = []
    for i, j in zip(*np.nonzero(starts)):
        i, j = int(i) + 1, int(j) + 1
        v = f[i][j]
        if v == 1 and f[i][j - 1] == 0:
            nbd += 1
            pts = _follow(f, i, j, i, j - 1, nbd)
            kind, seed = ContourKind.OUTER, None
        elif v >= 1 and f[i][j + 1] == 0:
            nbd += 1
            pts = _follow(f, i, j, i, j + 1, nbd)
            kind, seed = ContourKind.INNER, (i - 1, j)
        else:
            continue
        # the follower walks outer borders counter-clockwise; flip to keep
        # the start pixel first but reverse the direction
        pts = pts[:1] + pts[:0:-1]
        out.append(Contour([(r - 1, c - 1) for r, c in pts], kind, True, seed))
    return out
