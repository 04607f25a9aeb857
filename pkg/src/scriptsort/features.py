"""Structural features of a word crop and the 30-slot occurrence vector.

Slots, in order::

    NbPAW NBL | H J B P Q R D M F I |
    HD HM HF HI JF JI PD PM PF PI QD QM QF QI BD BM BF BI

``R`` has no detector and is always 0.  ``D/M/F/I`` count zones by
position label; the positional slots count events by the label of the
zone they fall in.  Only final and isolated jambs enter the vector, so
``J == JF + JI`` holds like the other marginals.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import EmptyCropError
from .imgcore import Axis, ContourKind, as_binary, label, projection, trace_contours

SLOTS = (
    "NbPAW", "NBL",
    "H", "J", "B", "P", "Q", "R", "D", "M", "F", "I",
    "HD", "HM", "HF", "HI", "JF", "JI",
    "PD", "PM", "PF", "PI", "QD", "QM", "QF", "QI",
    "BD", "BM", "BF", "BI",
)
SLOT_INDEX = {name: i for i, name in enumerate(SLOTS)}
POSITIONS = ("D", "M", "F", "I")


@dataclass(frozen=True)
class FeatureParams:
    alpha: float = 0.5
    marge_h: int | None = None        # default 2 * band height
    marge_j: int | None = None        # default band height
    max_dot_contour: int = 40         # dots have strictly fewer outer contour points
    max_loop_contour: int = 60
    boundary_width: int = 2
    thin_ratio: float = 0.3           # band columns at or below this share of the peak are valleys


@dataclass(frozen=True)
class BaselinePair:
    upper_row: int
    lower_row: int

    @property
    def height(self) -> int:
        return self.lower_row - self.upper_row


@dataclass(frozen=True)
class Zone:
    left: int
    right: int
    position: str

    @property
    def center(self) -> float:
        return (self.left + self.right) / 2


@dataclass(frozen=True)
class StructuralEvent:
    kind: str       # H, J, P, Q or B
    position: str   # D, M, F or I
    anchor: tuple[int, int, int, int]


def _require_ink(crop) -> np.ndarray:
    arr = as_binary(crop)
    if not arr.any():
        raise EmptyCropError("crop has no ink")
    return arr


def estimate_baselines(crop, alpha: float = 0.5) -> BaselinePair:
    """Run of rows around the peak row whose ink count reaches ``alpha`` times the peak.

    Only the contiguous run holding the peak counts, so detached marks that
    happen to be dense (a dot over a thin stem) stay outside the band.
    """
    arr = _require_ink(crop)
    p = projection(arr, Axis.HORIZONTAL).counts
    dense = p >= alpha * p.max()
    upper = lower = int(np.argmax(p))
    while upper > 0 and dense[upper - 1]:
        upper -= 1
    while lower + 1 < len(p) and dense[lower + 1]:
        lower += 1
    if upper == lower:
        if lower + 1 < arr.shape[0]:
            lower += 1
        elif upper > 0:
            upper -= 1
    return BaselinePair(upper, lower)


def detect_positions(crop, baselines: BaselinePair, boundary_width: int = 2,
                     thin_ratio: float = 0.3) -> list[Zone]:
    """Split the body band into zones at projection valleys and label each.

    Valleys are columns whose in-band ink count is at most ``thin_ratio``
    of the band's peak column (empty columns included), so a thin joining
    stroke separates letters as well as white space does.  A zone's label
    comes from the band ink just outside its left and right edges:
    left only -> D, both -> M, right only -> F, neither -> I.
    """
    arr = as_binary(crop)
    band = arr[baselines.upper_row:baselines.lower_row + 1]
    cols = band.sum(axis=0)
    if not cols.any():
        return []
    strong = cols > thin_ratio * cols.max()
    padded = np.concatenate(([0], strong.astype(np.int8), [0]))
    edges = np.diff(padded)
    starts = np.flatnonzero(edges == 1)
    stops = np.flatnonzero(edges == -1) - 1
    w = arr.shape[1]
    zones = []
    for c0, c1 in zip(starts, stops):
        left = band[:, max(0, c0 - boundary_width):c0].sum()
        right = band[:, c1 + 1:min(w, c1 + 1 + boundary_width)].sum()
        if left > 0 and right == 0:
            pos = "D"
        elif left > 0:
            pos = "M"
        elif right > 0:
            pos = "F"
        else:
            pos = "I"
        zones.append(Zone(int(c0), int(c1), pos))
    return zones


def _zone_for(zones: list[Zone], col_center: float) -> Zone | None:
    if not zones:
        return None
    for z in zones:
        if z.left <= col_center <= z.right:
            return z
    return min(zones, key=lambda z: max(z.left - col_center, col_center - z.right))


@dataclass
class _Analysis:
    """Per-crop intermediate results shared by the detectors."""
    crop: np.ndarray
    baselines: BaselinePair
    labels: np.ndarray
    band_labels: set
    contours: list
    outer_len: dict = field(default_factory=dict)


def _analyze(crop, baselines: BaselinePair) -> _Analysis:
    labels, _ = label(crop, 8)
    band = labels[baselines.upper_row:baselines.lower_row + 1]
    band_labels = set(np.unique(band[band > 0]).tolist())
    contours = trace_contours(crop)
    a = _Analysis(crop, baselines, labels, band_labels, contours)
    for c in contours:
        if c.kind is ContourKind.OUTER:
            r, col = c.points[0]
            a.outer_len[int(labels[r, col])] = len(c)
    return a


def _dot_components(a: _Analysis, max_contour: int) -> list[tuple[int, str, tuple]]:
    out = []
    for idx, sl in enumerate(ndimage.find_objects(a.labels), start=1):
        if sl is None or idx in a.band_labels:
            continue
        if a.outer_len.get(idx, 0) >= max_contour:
            continue
        top, bottom = sl[0].start, sl[0].stop - 1
        bbox = (top, sl[1].start, bottom, sl[1].stop - 1)
        if bottom < a.baselines.upper_row:
            out.append((idx, "P", bbox))
        elif top > a.baselines.lower_row:
            out.append((idx, "Q", bbox))
    return out


def _body(a: _Analysis, dot_labels) -> np.ndarray:
    body = a.crop.copy()
    if dot_labels:
        body[np.isin(a.labels, list(dot_labels))] = 0
    return body


def detect_diacritic_dots(crop, baselines: BaselinePair, max_contour_points: int = 40,
                          zones: list[Zone] | None = None) -> list[StructuralEvent]:
    """Small components clear of the body band: above it P, below it Q."""
    arr = as_binary(crop)
    a = _analyze(arr, baselines)
    zones = detect_positions(arr, baselines) if zones is None else zones
    return [_event(kind, bbox, zones) for _, kind, bbox in _dot_components(a, max_contour_points)]


def _event(kind, bbox, zones) -> StructuralEvent:
    z = _zone_for(zones, (bbox[1] + bbox[3]) / 2)
    return StructuralEvent(kind, z.position if z else "I", bbox)


def _extremes(body, zones, baselines, kind, margin):
    events = []
    for z in zones:
        rows = np.flatnonzero(body[:, z.left:z.right + 1].any(axis=1))
        if rows.size == 0:
            continue
        if kind == "H":
            top = int(rows[0])
            if baselines.upper_row - top >= margin:
                events.append(StructuralEvent("H", z.position, (top, z.left, baselines.upper_row, z.right)))
        else:
            bottom = int(rows[-1])
            if bottom - baselines.lower_row >= margin:
                events.append(StructuralEvent("J", z.position, (baselines.lower_row, z.left, bottom, z.right)))
    return events


def detect_poles(crop, baselines: BaselinePair, marge_h: int | None = None,
                 zones: list[Zone] | None = None) -> list[StructuralEvent]:
    """At most one ascender per zone, reaching ``marge_h`` rows above the upper baseline."""
    arr = as_binary(crop)
    if marge_h is None:
        marge_h = 2 * baselines.height
    zones = detect_positions(arr, baselines) if zones is None else zones
    return _extremes(arr, zones, baselines, "H", marge_h)


def detect_jambs(crop, baselines: BaselinePair, marge_j: int | None = None,
                 zones: list[Zone] | None = None) -> list[StructuralEvent]:
    arr = as_binary(crop)
    if marge_j is None:
        marge_j = baselines.height
    zones = detect_positions(arr, baselines) if zones is None else zones
    return _extremes(arr, zones, baselines, "J", marge_j)


def _hole_mask(img: np.ndarray, seed: tuple[int, int]) -> np.ndarray:
    holes, _ = ndimage.label(img == 0, structure=ndimage.generate_binary_structure(2, 1))
    return holes == holes[seed]


def _loops(a: _Analysis, max_contour: int, dot_labels) -> list[tuple[int, int, int, int]]:
    up, lo = a.baselines.upper_row, a.baselines.lower_row
    found = []
    for c in a.contours:
        if c.kind is not ContourKind.INNER or len(c) > max_contour:
            continue
        top, left, bottom, right = c.bbox
        if bottom < up or top > lo:
            continue  # could be a ring-shaped dot; loops must touch the band
        r, col = c.points[0]
        owner = int(a.labels[r, col])
        if owner in dot_labels:
            continue
        # stain test: fill the hole and check the contour is gone on re-trace
        part = a.labels == owner
        rows, cols = np.flatnonzero(part.any(axis=1)), np.flatnonzero(part.any(axis=0))
        r0, c0 = rows[0], cols[0]
        sub = part[r0:rows[-1] + 1, c0:cols[-1] + 1].astype(np.uint8)
        seed = (c.hole_seed[0] - r0, c.hole_seed[1] - c0)
        stained = sub | _hole_mask(sub, seed)
        local = {(p[0] - r0, p[1] - c0) for p in c.points}
        if not any(k.kind is ContourKind.INNER and set(k.points) == local
                   for k in trace_contours(stained)):
            found.append(c.bbox)
    return found


def detect_loops(crop, baselines: BaselinePair, max_loop_contour: int = 60,
                 zones: list[Zone] | None = None) -> list[StructuralEvent]:
    arr = as_binary(crop)
    a = _analyze(arr, baselines)
    zones = detect_positions(arr, baselines) if zones is None else zones
    dots = {idx for idx, _, _ in _dot_components(a, FeatureParams.max_dot_contour)}
    return [_event("B", bbox, zones) for bbox in _loops(a, max_loop_contour, dots)]


def detect_paws(crop, max_dot_contour: int = 40, alpha: float = 0.5) -> int:
    """Connected components left once diacritic dots are set aside."""
    arr = _require_ink(crop)
    base = estimate_baselines(arr, alpha)
    a = _analyze(arr, base)
    dots = _dot_components(a, max_dot_contour)
    return int(a.labels.max()) - len(dots)


def estimate_char_count(crop, baselines: BaselinePair, boundary_width: int = 2,
                        thin_ratio: float = 0.3) -> int:
    arr = _require_ink(crop)
    return max(1, len(detect_positions(arr, baselines, boundary_width, thin_ratio)))


@dataclass
class WordFeatures:
    baselines: BaselinePair
    zones: list[Zone]
    events: list[StructuralEvent]
    nbpaw: int
    vector: np.ndarray


def extract(crop, params: FeatureParams = FeatureParams()) -> WordFeatures:
    """Run every detector once on a word crop."""
    arr = _require_ink(crop)
    base = estimate_baselines(arr, params.alpha)
    zones = detect_positions(arr, base, params.boundary_width, params.thin_ratio)
    a = _analyze(arr, base)
    dots = _dot_components(a, params.max_dot_contour)
    dot_labels = {idx for idx, _, _ in dots}
    body = _body(a, dot_labels)

    marge_h = 2 * base.height if params.marge_h is None else params.marge_h
    marge_j = base.height if params.marge_j is None else params.marge_j
    events = _extremes(body, zones, base, "H", marge_h)
    events += [e for e in _extremes(body, zones, base, "J", marge_j) if e.position in "FI"]
    events += [_event(kind, bbox, zones) for _, kind, bbox in dots]
    events += [_event("B", bbox, zones) for bbox in _loops(a, params.max_loop_contour, dot_labels)]
    nbpaw = int(a.labels.max()) - len(dots)

    v = np.zeros(len(SLOTS), dtype=np.int64)
    v[SLOT_INDEX["NbPAW"]] = nbpaw
    v[SLOT_INDEX["NBL"]] = max(1, len(zones))
    for z in zones:
        v[SLOT_INDEX[z.position]] += 1
    for e in events:
        v[SLOT_INDEX[e.kind]] += 1
        slot = e.kind + e.position
        if slot in SLOT_INDEX:
            v[SLOT_INDEX[slot]] += 1
    return WordFeatures(base, zones, events, nbpaw, v)


def assemble_vector(crop, params: FeatureParams = FeatureParams()) -> np.ndarray:
    return extract(crop, params).vector
