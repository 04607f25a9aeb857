import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import render_word, word_specs
from scriptsort.corpus import WordSpec
from scriptsort.errors import EmptyCropError
from scriptsort.features import (
    SLOTS,
    BaselinePair,
    FeatureParams,
    assemble_vector,
    detect_diacritic_dots,
    detect_jambs,
    detect_loops,
    detect_paws,
    detect_poles,
    detect_positions,
    estimate_baselines,
    estimate_char_count,
    extract,
)
from scriptsort.glyphs import ASCENT, BAND

S = {name: i for i, name in enumerate(SLOTS)}


def canvas(h, w):
    return np.zeros((h, w), dtype=np.uint8)


def ring(h, w, wall=2):
    a = np.ones((h, w), dtype=np.uint8)
    a[wall:h - wall, wall:w - wall] = 0
    return a


def marginals_hold(v):
    return (v[S["H"]] == sum(v[S["H" + p]] for p in "DMFI")
            and v[S["J"]] == v[S["JF"]] + v[S["JI"]]
            and v[S["P"]] == sum(v[S["P" + p]] for p in "DMFI")
            and v[S["Q"]] == sum(v[S["Q" + p]] for p in "DMFI")
            and v[S["B"]] == sum(v[S["B" + p]] for p in "DMFI"))


# -- baselines ---------------------------------------------------------------

def test_single_row_band_is_widened():
    crop = canvas(5, 6)
    crop[2] = 1
    assert estimate_baselines(crop) == BaselinePair(2, 3)
    crop = canvas(5, 6)
    crop[4] = 1
    b = estimate_baselines(crop)
    assert b.lower_row == 4 and b.height == 1


def test_bar_with_thin_ascender():
    crop = canvas(12, 10)
    crop[5:11] = 1
    crop[0:6, 4] = 1
    assert estimate_baselines(crop, 0.5) == BaselinePair(5, 10)


@pytest.mark.parametrize("glyphs,top_in_frame", [("nou", ASCENT), ("hnu", 0)])
def test_rendered_latin_band(glyphs, top_in_frame):
    crop, _ = render_word(WordSpec("latin", tuple(glyphs)))
    b = estimate_baselines(crop)
    band_top = ASCENT - top_in_frame
    assert abs(b.upper_row - band_top) <= 1
    assert abs(b.lower_row - (band_top + BAND - 1)) <= 1


def test_empty_crop_rejected():
    with pytest.raises(EmptyCropError):
        estimate_baselines(canvas(3, 3))
    with pytest.raises(EmptyCropError):
        assemble_vector(canvas(3, 3))


# -- poles and jambs -----------------------------------------------------------

def band_crop(ascender_top=None, descender_bottom=None):
    crop = canvas(24, 12)
    crop[10:15, 1:11] = 1  # band rows 10..14, height 4
    if ascender_top is not None:
        crop[ascender_top:10, 2] = 1
    if descender_bottom is not None:
        crop[15:descender_bottom + 1, 9] = 1
    return crop, BaselinePair(10, 14)


def test_no_pole_without_ascender():
    crop, base = band_crop()
    assert detect_poles(crop, base) == []


def test_pole_at_twice_band_height():
    crop, base = band_crop(ascender_top=2)
    (ev,) = detect_poles(crop, base)
    assert ev.kind == "H" and ev.position == "I"


def test_pole_margin_boundary():
    crop, base = band_crop(ascender_top=5)
    assert detect_poles(crop, base) == []
    assert len(detect_poles(crop, base, marge_h=base.height)) == 1


def test_jamb_boundary():
    crop, base = band_crop()
    assert detect_jambs(crop, base) == []
    crop, base = band_crop(descender_bottom=18)
    assert [e.kind for e in detect_jambs(crop, base)] == ["J"]
    crop, base = band_crop(descender_bottom=17)
    assert detect_jambs(crop, base) == []


# -- dots ----------------------------------------------------------------------

def test_dot_free_word():
    crop, base = band_crop()
    assert detect_diacritic_dots(crop, base) == []


def test_dot_above_and_below():
    crop, base = band_crop()
    crop[4:6, 5:7] = 1     # 5 rows above the upper baseline
    crop[19:21, 5:7] = 1
    kinds = sorted(e.kind for e in detect_diacritic_dots(crop, base))
    assert kinds == ["P", "Q"]


def test_long_detached_stroke_is_not_a_dot():
    crop = canvas(20, 50)
    crop[12:17, 2:48] = 1
    crop[2:4, 3:44] = 1  # 82-point outer contour
    base = BaselinePair(12, 16)
    assert detect_diacritic_dots(crop, base) == []


# -- loops ---------------------------------------------------------------------

def test_loop_free_word():
    crop, base = band_crop()
    assert detect_loops(crop, base) == []


def test_small_ring_is_a_loop():
    crop = canvas(12, 12)
    crop[2:10, 2:10] = ring(8, 8)
    (ev,) = detect_loops(crop, BaselinePair(2, 9))
    assert ev.kind == "B"


def test_long_inner_contour_is_not_a_loop():
    from scriptsort.imgcore import ContourKind, trace_contours

    crop = canvas(26, 26)
    crop[2:23, 2:24] = ring(21, 22)
    inner = [c for c in trace_contours(crop) if c.kind is ContourKind.INNER]
    assert [len(c) for c in inner] == [70]
    base = BaselinePair(2, 22)
    assert detect_loops(crop, base) == []
    assert len(detect_loops(crop, base, max_loop_contour=70)) == 1


def test_ring_dot_above_band_is_not_a_loop():
    crop = canvas(30, 12)
    crop[18:23, 0:12] = 1
    crop[2:7, 3:8] = ring(5, 5, wall=1)
    base = BaselinePair(18, 22)
    assert detect_loops(crop, base) == []
    v = assemble_vector(crop)
    assert v[S["B"]] == 0


# -- PAWs and positions ----------------------------------------------------------

def joined_blobs(n, blob=5, link=3, rows=9):
    w = n * blob + (n - 1) * link
    crop = canvas(rows, w)
    for k in range(n):
        x = k * (blob + link)
        crop[:, x:x + blob] = 1
        if k < n - 1:
            crop[rows - 2:, x + blob:x + blob + link] = 1
    return crop


def test_paws():
    assert detect_paws(np.ones((6, 6), dtype=np.uint8)) == 1
    crop, _ = render_word(WordSpec("arabic", ("teh", "seen", "meem", "kaf")))
    assert detect_paws(crop) == 1
    crop, _ = render_word(WordSpec("latin", tuple("nomcr")))
    assert detect_paws(crop) == 5


def test_isolated_blob_zone():
    crop = canvas(9, 11)
    crop[:, 3:8] = 1
    zones = detect_positions(crop, BaselinePair(0, 8))
    assert [(z.left, z.right, z.position) for z in zones] == [(3, 7, "I")]


def test_joined_zones():
    crop = joined_blobs(3)
    zones = detect_positions(crop, BaselinePair(0, 8))
    # the join on the right of the leftmost letter makes it final, as in right-to-left script
    assert [z.position for z in zones] == ["F", "M", "D"]
    pair = detect_positions(joined_blobs(2), BaselinePair(0, 8))
    assert [z.position for z in pair] == ["F", "D"]


def test_char_count():
    base = BaselinePair(0, 8)
    assert estimate_char_count(np.ones((9, 4), dtype=np.uint8), base) == 1
    crop, _ = render_word(WordSpec("latin", tuple("nomcr")))
    assert estimate_char_count(crop, estimate_baselines(crop)) == 5
    assert estimate_char_count(joined_blobs(4), base) == 4
    crop, _ = render_word(WordSpec("arabic", ("beh", "noon", "meem", "kaf")))
    assert estimate_char_count(crop, estimate_baselines(crop)) == 4


# -- vector ----------------------------------------------------------------------

def test_single_blob_vector():
    v = assemble_vector(np.ones((5, 5), dtype=np.uint8))
    expected = np.zeros(30, dtype=np.int64)
    expected[S["NbPAW"]] = expected[S["NBL"]] = expected[S["I"]] = 1
    assert v.tolist() == expected.tolist()


def test_il_like_word():
    crop = canvas(21, 12)
    crop[0:21, 0:3] = 1     # tall stem
    crop[14:21, 6:12] = 1   # short wide body
    v = assemble_vector(crop)
    assert v[S["NbPAW"]] == 2 and v[S["NBL"]] == 2
    assert v[S["H"]] == 1 and v[S["HI"]] == 1 and v[S["I"]] == 2


def test_arabic_like_word_with_final_jamb():
    crop = canvas(24, 15)
    crop[10:17, 0:6] = 1
    crop[10:17, 9:15] = 1
    crop[15:17, 6:9] = 1    # thin join
    crop[17:24, 0:3] = 1    # descender on the leftmost (final) letter
    crop[3:5, 10:12] = 1
    crop[3:5, 13:15] = 1
    v = assemble_vector(crop)
    assert v[S["NbPAW"]] == 1
    assert v[S["P"]] == 2
    assert v[S["J"]] == 1 == v[S["JF"]]
    assert (v[S["F"]], v[S["D"]]) == (1, 1)


def test_r_slot_is_zero_and_vector_shape():
    crop, _ = render_word(WordSpec("arabic", ("sheen", "yeh")))
    v = assemble_vector(crop)
    assert v.shape == (30,) and v[S["R"]] == 0 and (v >= 0).all()


def test_params_reach_detectors():
    crop, base = band_crop(ascender_top=5)
    strict = assemble_vector(crop)
    loose = assemble_vector(crop, FeatureParams(marge_h=4))
    assert strict[S["H"]] == 0 and loose[S["H"]] == 1


@given(word_specs(), st.integers(0, 6), st.integers(0, 6), st.integers(0, 6), st.integers(0, 6))
@settings(max_examples=80, deadline=None)
def test_invariants_on_rendered_words(word, top, left, bottom, right):
    crop, truth = render_word(word)
    f = extract(crop)
    v = f.vector
    assert marginals_hold(v)
    assert v[S["R"]] == 0 and v[S["NbPAW"]] >= 1 and v[S["NBL"]] >= 1
    assert v[S["D"]] + v[S["M"]] + v[S["F"]] + v[S["I"]] == len(f.zones)
    assert np.array_equal(assemble_vector(crop.copy()), v)
    padded = np.pad(crop, ((top, bottom), (left, right)))
    assert np.array_equal(assemble_vector(padded), v)
