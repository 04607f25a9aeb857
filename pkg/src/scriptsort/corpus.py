"""Synthetic bilingual pages with exact ground truth, plus ingestion of labelled images."""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .errors import BoxOutOfBoundsError, MissingLabelError, PageOverflowError
from .glyphs import ARABIC, ASCENT, ATLASES, BAND, HEIGHT, LATIN

LABELS = (ARABIC, LATIN)
IMAGE_SUFFIXES = (".png", ".pbm")


@dataclass(frozen=True)
class WordSpec:
    script: str
    glyphs: tuple[str, ...]  # logical order (right-to-left for arabic)


@dataclass(frozen=True)
class LineSpec:
    words: tuple[WordSpec, ...]
    intra_gap: int = 2
    inter_gap: int = 8
    leading: int = 6  # blank rows above this line's frame


@dataclass(frozen=True)
class PageSpec:
    lines: tuple[LineSpec, ...]
    width: int = 800
    height: int = 600
    margin: int = 20
    seed: int | None = None


@dataclass
class WordTruth:
    line: int
    order: int
    bbox: tuple[int, int, int, int]
    label: str
    nbpaw: int
    dots: int
    glyphs: tuple[str, ...]


@dataclass
class GroundTruth:
    width: int
    height: int
    lines: list[tuple[int, int]]
    words: list[WordTruth]
    seed: int | None = None

    def to_json(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "seed": self.seed,
            "lines": [{"top": t, "bottom": b} for t, b in self.lines],
            "words": [{**asdict(w), "bbox": list(w.bbox), "glyphs": list(w.glyphs)}
                      for w in self.words],
        }

    @classmethod
    def from_json(cls, d: dict) -> "GroundTruth":
        words = [WordTruth(w["line"], w["order"], tuple(w["bbox"]), w["label"],
                           w.get("nbpaw", 0), w.get("dots", 0), tuple(w.get("glyphs", ())))
                 for w in d.get("words", [])]
        lines = [(ln["top"], ln["bottom"]) for ln in d.get("lines", [])]
        return cls(d["width"], d["height"], lines, words, d.get("seed"))


def _render_word(word: WordSpec, gap: int):
    """Bitmap of one word in the glyph frame, plus its non-dot row extent."""
    atlas = ATLASES[word.script]
    glyphs = [atlas[name] for name in word.glyphs]
    if not glyphs:
        raise ValueError("empty word")
    visual = glyphs[::-1] if word.script == ARABIC else glyphs
    width = sum(g.width for g in visual) + gap * (len(visual) - 1)
    img = np.zeros((HEIGHT, width), dtype=np.uint8)
    body = np.zeros_like(img)
    x = 0
    xs = []
    for g in visual:
        img[:, x:x + g.width] |= g.bitmap()
        body[:, x:x + g.width] |= g.bitmap(with_dots=False)
        xs.append(x)
        x += g.width + gap
    nbpaw = len(glyphs)
    if word.script == ARABIC:
        nbpaw = 1
        # logical letter k joins the one visually to its left
        for k, g in enumerate(glyphs[:-1]):
            left = len(glyphs) - 2 - k
            if g.joins:
                c0 = xs[left] + visual[left].width
                img[ASCENT + BAND - 2:ASCENT + BAND, c0:c0 + gap] = 1
                body[ASCENT + BAND - 2:ASCENT + BAND, c0:c0 + gap] = 1
            else:
                nbpaw += 1
    dots = sum(g.dot_count for g in glyphs)
    return img, body, nbpaw, dots


def line_width(line: LineSpec) -> int:
    total = 0
    for word in line.words:
        atlas = ATLASES[word.script]
        total += sum(atlas[n].width for n in word.glyphs) + line.intra_gap * (len(word.glyphs) - 1)
    return total + line.inter_gap * (len(line.words) - 1)


def render_page(spec: PageSpec) -> tuple[np.ndarray, GroundTruth]:
    """Draw a page; words run left to right with exact gaps, lines top to bottom."""
    page = np.zeros((spec.height, spec.width), dtype=np.uint8)
    usable = spec.width - 2 * spec.margin
    lines, words = [], []
    y = spec.margin
    for li, line in enumerate(spec.lines):
        if not line.inter_gap > line.intra_gap >= 0:
            raise ValueError("need inter_gap > intra_gap >= 0")
        y += line.leading
        if y + HEIGHT > spec.height - spec.margin:
            raise PageOverflowError(f"line {li} does not fit the page height")
        if line_width(line) > usable:
            raise PageOverflowError(f"line {li} is {line_width(line)} px wide, page allows {usable}")
        x = spec.margin
        line_rows = []
        for order, word in enumerate(line.words):
            img, body, nbpaw, dots = _render_word(word, line.intra_gap)
            h, w = img.shape
            page[y:y + h, x:x + w] |= img
            rows = np.flatnonzero(img.any(axis=1))
            cols = np.flatnonzero(img.any(axis=0))
            words.append(WordTruth(
                li, order,
                (y + int(rows[0]), x + int(cols[0]), y + int(rows[-1]), x + int(cols[-1])),
                word.script, nbpaw, dots, word.glyphs))
            body_rows = np.flatnonzero(body.any(axis=1))
            line_rows += [y + int(body_rows[0]), y + int(body_rows[-1])]
            x += w + line.inter_gap
        if line_rows:
            lines.append((min(line_rows), max(line_rows)))
        y += HEIGHT
    return page, GroundTruth(spec.width, spec.height, lines, words, spec.seed)


# --------------------------------------------------------------------------
# random page specs
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CorpusParams:
    width: int = 800
    height: int = 600
    margin: int = 20
    min_lines: int = 4
    max_lines: int = 6
    intra_gap: int = 2
    inter_gap: int = 8
    latin_len: tuple[int, int] = (1, 9)
    arabic_len: tuple[int, int] = (1, 8)


def random_word(rng: np.random.Generator, script: str, params: CorpusParams) -> WordSpec:
    lo, hi = params.latin_len if script == LATIN else params.arabic_len
    names = sorted(ATLASES[script])
    n = int(rng.integers(lo, hi + 1))
    return WordSpec(script, tuple(names[i] for i in rng.integers(0, len(names), n)))


def random_page_spec(seed: int, mix: float, params: CorpusParams = CorpusParams()) -> PageSpec:
    """A page filled line by line; ``mix`` is the probability a word is Arabic."""
    rng = np.random.default_rng(seed)
    n_lines = int(rng.integers(params.min_lines, params.max_lines + 1))
    free = params.height - 2 * params.margin - n_lines * HEIGHT
    leading = max(6, free // n_lines)
    usable = params.width - 2 * params.margin
    lines = []
    for _ in range(n_lines):
        words: list[WordSpec] = []
        while True:
            script = ARABIC if rng.random() < mix else LATIN
            cand = random_word(rng, script, params)
            trial = LineSpec(tuple(words + [cand]), params.intra_gap, params.inter_gap, leading)
            if line_width(trial) > usable:
                break
            words.append(cand)
        lines.append(LineSpec(tuple(words), params.intra_gap, params.inter_gap, leading))
    return PageSpec(tuple(lines), params.width, params.height, params.margin, seed)


@dataclass
class CorpusPage:
    page_id: str
    image: np.ndarray
    truth: GroundTruth


def page_seeds(n_pages: int, seed: int) -> list[int]:
    ss = np.random.SeedSequence(seed)
    return [int(s.generate_state(1)[0]) for s in ss.spawn(n_pages)]


def build_dataset(n_pages: int = 60, mix: float = 0.5, seed: int = 0,
                  params: CorpusParams = CorpusParams()) -> list[CorpusPage]:
    if n_pages < 1:
        raise ValueError("n_pages must be >= 1")
    if not 0.0 <= mix <= 1.0:
        raise ValueError("mix must lie in [0, 1]")
    out = []
    for i, s in enumerate(page_seeds(n_pages, seed)):
        img, truth = render_page(random_page_spec(s, mix, params))
        out.append(CorpusPage(f"page_{i:04d}", img, truth))
    return out


# --------------------------------------------------------------------------
# ingestion of external labelled images
# --------------------------------------------------------------------------

def _sidecar(image: Path) -> Path | None:
    for cand in (image.with_name(image.stem + ".truth.json"), image.with_suffix(".json")):
        if cand.exists():
            return cand
    return None


def ingest(directory) -> dict:
    """Build a manifest of images with their sidecar labels.

    A sidecar is ``<stem>.truth.json`` or ``<stem>.json`` holding either
    ``words`` (each with ``bbox`` [top, left, bottom, right] and ``label``)
    or a page-level ``label``.
    """
    from .imageio import read_image

    directory = Path(directory)
    entries = []
    for image in sorted(p for p in directory.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES):
        side = _sidecar(image)
        if side is None:
            raise MissingLabelError(f"no label sidecar for {image.name}")
        meta = json.loads(side.read_text())
        arr = read_image(image)
        h, w = arr.shape
        entry = {
            "image": image.name,
            "sha256": hashlib.sha256(image.read_bytes()).hexdigest(),
            "width": w,
            "height": h,
        }
        if meta.get("words"):
            words = []
            for wd in meta["words"]:
                t, l, b, r = wd["bbox"]
                if not (0 <= t <= b < h and 0 <= l <= r < w):
                    raise BoxOutOfBoundsError(f"{image.name}: box {wd['bbox']} outside {w}x{h}")
                if wd.get("label") not in LABELS:
                    raise MissingLabelError(f"{image.name}: word without a valid label")
                words.append({"bbox": [t, l, b, r], "label": wd["label"]})
            entry["words"] = words
        elif meta.get("label") in LABELS:
            entry["label"] = meta["label"]
        else:
            raise MissingLabelError(f"{side.name} has neither word labels nor a page label")
        entries.append(entry)
    return {"version": 1, "root": str(directory), "entries": entries}
