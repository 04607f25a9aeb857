"""Page -> line bands -> word boxes.

Diacritics are suppressed by an opening, lines are cut from the horizontal
projection of the filtered page, and each line is dilated with the
horizontal line whose length sits on the first flat stretch of the
"components vs. dilation order" curve.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyLineError
from .imgcore import (
    Axis,
    StructuringElement,
    as_binary,
    connected_components,
    dilate,
    hline,
    label,
    open_,
    projection,
    square,
)


@dataclass(frozen=True)
class SegmentParams:
    diacritic_se: int = 3
    max_order: int = 20
    window: int = 3
    min_band_height: int = 3


@dataclass(frozen=True)
class LineBand:
    top_row: int
    bottom_row: int
    index: int

    @property
    def height(self) -> int:
        return self.bottom_row - self.top_row + 1


@dataclass
class WordBox:
    line_index: int
    bbox: tuple[int, int, int, int]  # top, left, bottom, right (inclusive)
    crop: np.ndarray
    reading_order: int


@dataclass
class SpacingHistogram:
    counts: Counter = field(default_factory=Counter)

    def modes(self, n: int = 2) -> list[int]:
        """The ``n`` most frequent gap values, sorted by gap length."""
        return sorted(g for g, _ in self.counts.most_common(n))

    def __add__(self, other: "SpacingHistogram") -> "SpacingHistogram":
        return SpacingHistogram(self.counts + other.counts)


@dataclass
class DilationCurve:
    orders: list[int]
    counts: list[int]
    selected_order: int
    window: int

    @property
    def deltas(self) -> list[int]:
        """N(k) - N(k+1) for k = 1..K-1."""
        return [a - b for a, b in zip(self.counts, self.counts[1:])]

    @property
    def stddevs(self) -> list[float]:
        """Std-dev of the deltas over the window starting at each order that fits."""
        d = self.deltas
        return [float(np.std(d[k:k + self.window])) for k in range(len(d) - self.window + 1)]


def remove_diacritics(page, se: StructuringElement | None = None) -> np.ndarray:
    return open_(page, se or square(3))


def detect_lines(filtered, min_band_height: int = 3) -> list[LineBand]:
    """Maximal runs of inked rows, dropping runs shorter than ``min_band_height``."""
    counts = projection(filtered, Axis.HORIZONTAL).counts
    inked = np.concatenate(([0], (counts > 0).astype(np.int8), [0]))
    edges = np.diff(inked)
    starts = np.flatnonzero(edges == 1)
    stops = np.flatnonzero(edges == -1) - 1
    bands = []
    for top, bottom in zip(starts, stops):
        if bottom - top + 1 >= min_band_height:
            bands.append(LineBand(int(top), int(bottom), len(bands)))
    return bands


def spacing_histogram(line) -> SpacingHistogram:
    """Histogram of horizontal gaps between components adjacent in left-edge order."""
    comps = sorted(connected_components(line, 8), key=lambda c: (c.bbox[1], c.bbox[3]))
    hist = Counter()
    for a, b in zip(comps, comps[1:]):
        gap = b.bbox[1] - a.bbox[3] - 1
        if gap > 0:
            hist[gap] += 1
    return SpacingHistogram(hist)


def select_order(counts: list[int], window: int) -> int:
    """First order whose window of deltas is flat and zero; else start of the longest plateau."""
    deltas = np.diff(-np.asarray(counts))  # N(k) - N(k+1)
    for k in range(len(deltas) - window + 1):
        win = deltas[k:k + window]
        if deltas[k] == 0 and np.std(win) == 0:
            return k + 1
    # no flat window: start of the longest run of equal counts
    best_k, best_len = 1, 0
    k = 0
    while k < len(counts):
        j = k
        while j + 1 < len(counts) and counts[j + 1] == counts[k]:
            j += 1
        if j - k + 1 > best_len:
            best_k, best_len = k + 1, j - k + 1
        k = j + 1
    return best_k


def dilation_counts(line, max_order: int) -> list[int]:
    arr = as_binary(line)
    return [len(connected_components(dilate(arr, hline(k)), 8)) for k in range(1, max_order + 1)]


def select_dilation_order(line, max_order: int = 20, window: int = 3) -> DilationCurve:
    if not 2 <= window <= max_order:
        raise ValueError("need 2 <= window <= max_order")
    arr = as_binary(line)
    if not arr.any():
        raise EmptyLineError("line has no ink")
    counts = dilation_counts(arr, max_order)
    return DilationCurve(list(range(1, max_order + 1)), counts, select_order(counts, window), window)


@dataclass
class PageSegmentation:
    lines: list[LineBand]
    curves: list[DilationCurve]
    histograms: list[SpacingHistogram]
    words: list[WordBox]

    @property
    def histogram(self) -> SpacingHistogram:
        total = SpacingHistogram()
        for h in self.histograms:
            total = total + h
        return total

    def page_curve(self) -> list[int]:
        """Component counts summed over all lines, per dilation order."""
        if not self.curves:
            return []
        return [int(v) for v in np.sum([c.counts for c in self.curves], axis=0)]


def _expanded_ranges(bands: list[LineBand], height: int) -> list[tuple[int, int]]:
    # every row belongs to the band whose midpoint-split territory holds it
    out = []
    for i, b in enumerate(bands):
        lo = 0 if i == 0 else (bands[i - 1].bottom_row + b.top_row) // 2 + 1
        hi = height - 1 if i == len(bands) - 1 else (b.bottom_row + bands[i + 1].top_row) // 2
        out.append((lo, hi))
    return out


def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def _words_for_line(band, k, filtered, comps):
    line = filtered[band.top_row:band.bottom_row + 1]
    masks = sorted(
        (c.bbox[1], c.bbox[3]) for c in connected_components(dilate(line, hline(k)), 8))
    if not masks:
        return []
    lefts = np.array([m[0] for m in masks])
    rights = np.array([m[1] for m in masks])
    parent = list(range(len(masks)))
    members: dict[int, list] = {}
    for comp in comps:
        _, left, _, right = comp.bbox
        hit = np.flatnonzero((lefts <= right) & (rights >= left))
        if hit.size == 0:
            dist = np.maximum(lefts - right, left - rights)
            hit = [int(np.argmin(dist))]
        root = _find(parent, int(hit[0]))
        for h in hit[1:]:
            other = _find(parent, int(h))
            if other != root:
                parent[other] = root
        members.setdefault(int(hit[0]), []).append(comp)

    groups: dict[int, list] = {}
    for idx, cs in members.items():
        groups.setdefault(_find(parent, idx), []).extend(cs)
    boxes = []
    for cs in groups.values():
        boxes.append([min(c.bbox[0] for c in cs), min(c.bbox[1] for c in cs),
                      max(c.bbox[2] for c in cs), max(c.bbox[3] for c in cs)])
    # attached marks can widen a box into its neighbour; fuse any overlap
    boxes.sort(key=lambda b: b[1])
    fused = []
    for b in boxes:
        if fused and b[1] <= fused[-1][3]:
            f = fused[-1]
            fused[-1] = [min(f[0], b[0]), f[1], max(f[2], b[2]), max(f[3], b[3])]
        else:
            fused.append(b)
    return [tuple(b) for b in fused]


def segment_page(page, params: SegmentParams = SegmentParams()) -> PageSegmentation:
    """Full segmentation with the intermediate curves and histograms kept."""
    page = as_binary(page)
    filtered = remove_diacritics(page, square(params.diacritic_se))
    bands = detect_lines(filtered, params.min_band_height)
    if not bands:
        return PageSegmentation([], [], [], [])

    # assign each original component to the band territory it overlaps most
    _, comps = label(page, 8)
    ranges = _expanded_ranges(bands, page.shape[0])
    per_band: list[list] = [[] for _ in bands]
    for comp in comps:
        top, _, bottom, _ = comp.bbox
        overlaps = [min(bottom, hi) - max(top, lo) for lo, hi in ranges]
        per_band[int(np.argmax(overlaps))].append(comp)

    curves, hists, words = [], [], []
    for band, members in zip(bands, per_band):
        line = filtered[band.top_row:band.bottom_row + 1]
        curve = select_dilation_order(line, params.max_order, params.window)
        curves.append(curve)
        hists.append(spacing_histogram(line))
        for order, (t, l, b, r) in enumerate(
                _words_for_line(band, curve.selected_order, filtered, members)):
            words.append(WordBox(band.index, (t, l, b, r), page[t:b + 1, l:r + 1].copy(), order))
    return PageSegmentation(bands, curves, hists, words)


def segment_words(page, params: SegmentParams = SegmentParams()) -> list[WordBox]:
    return segment_page(page, params).words
