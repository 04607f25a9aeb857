"""Hand-drawn glyph atlases for the synthetic corpus.

Every glyph is drawn in a fixed vertical frame: ``ASCENT`` rows above the
body band, ``BAND`` body rows, ``DESCENT`` rows below.  Strokes are three
pixels thick so they survive the 3x3 diacritic opening; dots are 2x2 so
they do not.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ASCENT = 17
BAND = 9
DESCENT = 9
HEIGHT = ASCENT + BAND + DESCENT

STROKE = 3
DOT = 2
UPPER_DOT_ROW = ASCENT - 5   # dot rows relative to frame top
LOWER_DOT_ROW = ASCENT + BAND + 2

LATIN, ARABIC = "latin", "arabic"


@dataclass(frozen=True)
class Glyph:
    name: str
    body: tuple[str, ...]                   # BAND rows of '#'/'.'
    ascender: tuple[int, int] | None = None  # inclusive column range
    ascender_rows: int = ASCENT
    descender: tuple[int, int] | None = None
    dots_above: tuple[int, ...] = ()         # left column of each 2x2 dot
    dots_below: tuple[int, ...] = ()
    joins: bool = True                       # arabic: connects to the following letter

    @property
    def width(self) -> int:
        return len(self.body[0])

    @property
    def has_loop(self) -> bool:
        from .imgcore import trace_contours
        return any(c.kind.value == "inner" for c in trace_contours(self.bitmap()))

    @property
    def dot_count(self) -> int:
        return len(self.dots_above) + len(self.dots_below)

    def bitmap(self, with_dots: bool = True) -> np.ndarray:
        img = np.zeros((HEIGHT, self.width), dtype=np.uint8)
        img[ASCENT:ASCENT + BAND] = [[ch == "#" for ch in row] for row in self.body]
        if self.ascender:
            c0, c1 = self.ascender
            img[ASCENT - self.ascender_rows:ASCENT, c0:c1 + 1] = 1
        if self.descender:
            c0, c1 = self.descender
            img[ASCENT + BAND:, c0:c1 + 1] = 1
        if with_dots:
            for c in self.dots_above:
                img[UPPER_DOT_ROW:UPPER_DOT_ROW + DOT, c:c + DOT] = 1
            for c in self.dots_below:
                img[LOWER_DOT_ROW:LOWER_DOT_ROW + DOT, c:c + DOT] = 1
        return img


def _rows(art: str) -> tuple[str, ...]:
    rows = tuple(art.split())
    assert len(rows) == BAND and len({len(r) for r in rows}) == 1, art
    return rows


_O = _rows("""
#########
#########
#########
###...###
###...###
###...###
#########
#########
#########
""")
_N = _rows("""
#########
#########
#########
###...###
###...###
###...###
###...###
###...###
###...###
""")
_U = _rows("""
###...###
###...###
###...###
###...###
###...###
###...###
#########
#########
#########
""")
_STEM = _rows("### " * BAND)

LATIN_GLYPHS = {g.name: g for g in [
    Glyph("o", _O),
    Glyph("c", _rows("""
        ########
        ########
        ########
        ###.....
        ###.....
        ###.....
        ########
        ########
        ########
    """)),
    Glyph("n", _N),
    Glyph("u", _U),
    Glyph("m", _rows("""
        ###############
        ###############
        ###############
        ###...###...###
        ###...###...###
        ###...###...###
        ###...###...###
        ###...###...###
        ###...###...###
    """)),
    Glyph("r", _rows("""
        ########
        ########
        ########
        ###.....
        ###.....
        ###.....
        ###.....
        ###.....
        ###.....
    """)),
    Glyph("l", _STEM, ascender=(0, 2)),
    Glyph("h", _N, ascender=(0, 2)),
    Glyph("b", _O, ascender=(0, 2)),
    Glyph("d", _O, ascender=(6, 8)),
    Glyph("p", _O, descender=(0, 2)),
    Glyph("q", _O, descender=(6, 8)),
    Glyph("y", _U, descender=(6, 8)),
    Glyph("i", _STEM, dots_above=(0,)),
    Glyph("j", _STEM, descender=(0, 2), dots_above=(0,)),
    Glyph("t", _rows("""
        ########
        ########
        ########
        ###.....
        ###.....
        ###.....
        #######.
        #######.
        #######.
    """), ascender=(0, 2), ascender_rows=6),
]}

_BOWL = _rows("""
###...###
###...###
###...###
###...###
###...###
###...###
#########
#########
#########
""")

ARABIC_GLYPHS = {g.name: g for g in [
    Glyph("beh", _BOWL, dots_below=(3,)),
    Glyph("teh", _BOWL, dots_above=(1, 6)),
    Glyph("noon", _rows("""
        ###.###
        ###.###
        ###.###
        ###.###
        ###.###
        ###.###
        #######
        #######
        #######
    """), dots_above=(2,)),
    Glyph("seen", _rows("""
        ###...###...###
        ###...###...###
        ###...###...###
        ###...###...###
        ###...###...###
        ###...###...###
        ###############
        ###############
        ###############
    """)),
    Glyph("sheen", _rows("""
        ###...###...###
        ###...###...###
        ###...###...###
        ###...###...###
        ###...###...###
        ###...###...###
        ###############
        ###############
        ###############
    """), dots_above=(3, 10)),
    Glyph("alef", _STEM, ascender=(0, 2), joins=False),
    Glyph("lam", _rows("""
        ...###
        ...###
        ...###
        ...###
        ...###
        ...###
        ######
        ######
        ######
    """), ascender=(3, 5)),
    Glyph("kaf", _rows("""
        #########
        #########
        #########
        ......###
        ......###
        ......###
        #########
        #########
        #########
    """), ascender=(6, 8)),
    Glyph("dal", _rows("""
        #######
        #######
        #######
        ....###
        ....###
        ....###
        #######
        #######
        #######
    """), joins=False),
    Glyph("reh", _rows("""
        ...###
        ...###
        ...###
        ...###
        ...###
        ...###
        ######
        ######
        ######
    """), descender=(0, 2), joins=False),
    Glyph("zain", _rows("""
        ...###
        ...###
        ...###
        ...###
        ...###
        ...###
        ######
        ######
        ######
    """), descender=(0, 2), dots_above=(3,), joins=False),
    Glyph("waw", _rows("""
        #######
        #######
        #######
        ###.###
        ###.###
        ###.###
        #######
        #######
        #######
    """), descender=(0, 2), joins=False),
    Glyph("meem", _rows("""
        #######
        #######
        #######
        ###.###
        ###.###
        ###.###
        #######
        #######
        #######
    """)),
    Glyph("sad", _rows("""
        #############
        #############
        #############
        ###.......###
        ###.......###
        ###.......###
        #############
        #############
        #############
    """)),
    Glyph("jeem", _rows("""
        #########
        #########
        #########
        ......###
        ......###
        ......###
        #########
        #########
        #########
    """), dots_below=(3,)),
    Glyph("yeh", _BOWL, descender=(0, 2), dots_below=(4, 7)),
    Glyph("feh", _rows("""
        ...########
        ...########
        ...########
        ...###..###
        ...###..###
        ...###..###
        ###########
        ###########
        ###########
    """), dots_above=(6,)),
]}

ATLASES = {LATIN: LATIN_GLYPHS, ARABIC: ARABIC_GLYPHS}
