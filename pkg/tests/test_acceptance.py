"""End-to-end acceptance checks, one PASS/FAIL line each.

Run under pytest, or directly with ``python tests/test_acceptance.py``.
"""
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402
from scriptsort import classifier as clf  # noqa: E402
from scriptsort.errors import ModelFileError  # noqa: E402
from scriptsort.corpus import LineSpec, PageSpec, WordSpec, build_dataset, render_page  # noqa: E402
from scriptsort.features import SLOT_INDEX, extract  # noqa: E402
from scriptsort.imgcore import StructuringElement, dilate, erode, label, open_  # noqa: E402
from scriptsort.pipeline import iou, match_labels  # noqa: E402
from scriptsort.segmentation import (  # noqa: E402
    detect_lines,
    remove_diacritics,
    segment_words,
    select_dilation_order,
    spacing_histogram,
)


def _protocol():
    t0 = time.perf_counter()
    pages = build_dataset(60, 0.5, seed=0)
    samples = []
    for p in pages:
        words = segment_words(p.image)
        truth = [{"bbox": w.bbox, "label": w.label} for w in p.truth.words]
        for w, lab in zip(words, match_labels(words, truth)):
            if lab:
                samples.append(clf.Sample(extract(w.crop).vector, lab,
                                          f"{p.page_id}:{w.line_index}:{w.reading_order}"))
    train_set, test_set = clf.split(samples, 0.8, seed=0)
    model = clf.train(train_set, clf.TrainConfig())
    cm = clf.evaluate(model, test_set)
    elapsed = time.perf_counter() - t0
    ok = cm.accuracy >= 90.0 and elapsed < 300
    return ok, (f"{len(samples)} words, accuracy {cm.accuracy:.2f}%, runtime {elapsed:.0f}s\n"
                + cm.report())


def _reporting_formula():
    cm = clf.ConfusionMatrix.from_cells(403, 37, 11, 395)
    acc, err = f"{cm.accuracy:.2f}", f"{cm.error_rate:.2f}"
    ok = cm.total == 846 and cm.correct == 798 and acc == "94.32" and err == "5.68"
    return ok, f"846 total, 798 correct -> {acc}% accuracy, {err}% error"


def _images():
    return oracles.random_images(200, (32, 32), densities=(0.1, 0.3, 0.5), seed=2024)


def _morphology():
    bad = 0
    elements = [("hline", 1), ("hline", 3), ("hline", 4), ("square", 2), ("square", 3)]
    for i, img in enumerate(_images()):
        shape, size = elements[i % len(elements)]
        se = StructuringElement(shape, size)
        want_e = oracles.erode(img, shape, size)
        want_d = oracles.dilate(img, shape, size)
        want_o = oracles.dilate(want_e, shape, size)
        bad += not (np.array_equal(erode(img, se), want_e)
                    and np.array_equal(dilate(img, se), want_d)
                    and np.array_equal(open_(img, se), want_o))
    return bad == 0, f"{bad} mismatches over 200 images"


def _components():
    bad = 0
    for i, img in enumerate(_images()):
        conn = 8 if i % 2 == 0 else 4
        labels, comps = label(img, conn)
        got = {frozenset((int(r), int(c)) for r, c in zip(*np.nonzero(labels == k.label)))
               for k in comps}
        want = set(oracles.flood_components(img, conn))
        bad += got != want or len(comps) != len(want)
    return bad == 0, f"{bad} mismatches over 200 images"


def _dilation_order():
    rng = np.random.default_rng(8)
    names = sorted("nouhbdcmr")
    orders, between = [], True
    for _ in range(10):
        words = tuple(WordSpec("latin", tuple(rng.choice(names, rng.integers(2, 6))))
                      for _ in range(6))
        page, _ = render_page(PageSpec((LineSpec(words),), width=800, height=100))
        filtered = remove_diacritics(page)
        (band,) = detect_lines(filtered)
        line = filtered[band.top_row:band.bottom_row + 1]
        k = select_dilation_order(line, 20, 3).selected_order
        lo, hi = spacing_histogram(line).modes(2)
        orders.append(k)
        # dilation with k bridges every gap shorter than k
        between &= lo < k < hi and lo < 6 < hi
    hits = total = 0
    for p in build_dataset(10, 0.5, seed=99):
        boxes = [w.bbox for w in segment_words(p.image)]
        for t in p.truth.words:
            total += 1
            hits += any(iou(b, t.bbox) >= 0.9 for b in boxes)
    recall = hits / total
    ok = all(3 <= k <= 7 for k in orders) and between and recall >= 0.95
    return ok, (f"k* values {sorted(set(orders))}, threshold between modes: {between}, "
                f"recall {recall:.4f} over {total} words")


def _marginals(v):
    s = SLOT_INDEX
    return (v[s["H"]] == sum(v[s["H" + p]] for p in "DMFI")
            and v[s["J"]] == v[s["JF"]] + v[s["JI"]]
            and v[s["P"]] == sum(v[s["P" + p]] for p in "DMFI")
            and v[s["Q"]] == sum(v[s["Q" + p]] for p in "DMFI")
            and v[s["B"]] == sum(v[s["B" + p]] for p in "DMFI")
            and v[s["R"]] == 0)


def _feature_invariants():
    rng = np.random.default_rng(6)
    crops = []
    for p in build_dataset(10, 0.5, seed=31):
        for w in p.truth.words:
            t, l, b, r = w.bbox
            crops.append(p.image[t:b + 1, l:r + 1])
    violations = 0
    for crop in crops:
        v = extract(crop).vector
        pads = tuple(tuple(int(x) for x in rng.integers(0, 8, 2)) for _ in range(2))
        violations += not _marginals(v)
        violations += not np.array_equal(extract(np.pad(crop, pads)).vector, v)
        violations += not np.array_equal(extract(crop.copy()).vector, v)
    ok = len(crops) >= 500 and violations == 0
    return ok, f"{violations} violations over {len(crops)} crops"


def _mlp():
    from test_classifier import max_relative_gradient_error, xor_model

    err = max_relative_gradient_error()
    x, t, m = xor_model()
    xor_acc = float(np.mean(np.argmax(m.scores(x), axis=1) == np.argmax(t, axis=1)))
    return err < 1e-5 and xor_acc == 1.0, f"max relative error {err:.2e}, XOR train accuracy {xor_acc:.0%}"


def _persistence():
    rng = np.random.default_rng(12)
    model = clf.MlpModel(rng.normal(size=(16, 30)), rng.normal(size=16), rng.normal(size=(2, 16)),
                         rng.normal(size=2), rng.normal(size=30), rng.uniform(0.5, 2, 30))
    data = clf.dumps(model)
    back = clf.loads(data)
    xs = rng.normal(0, 3, (100, 30))
    same = all(clf.predict(model, x)[0] == clf.predict(back, x)[0]
               and np.array_equal(clf.predict(model, x)[1], clf.predict(back, x)[1]) for x in xs)
    rejected = 0
    corrupt = [data[:len(data) // 2], b"XX" + data[2:], data[:6] + b"\x07\x00" + data[8:]]
    for blob in corrupt:
        try:
            clf.loads(blob)
        except ModelFileError:
            rejected += 1
    return same and rejected == len(corrupt), f"identical on 100 vectors: {same}, rejected {rejected}/3 corrupt files"


CRITERIA = [
    (1, "protocol accuracy >= 90% within 5 minutes", _protocol),
    (2, "reporting formula 798/846", _reporting_formula),
    (3, "morphology vs per-pixel oracle", _morphology),
    (4, "labeling vs flood-fill oracle", _components),
    (5, "dilation order and word recall", _dilation_order),
    (6, "feature invariants", _feature_invariants),
    (7, "gradient check and XOR", _mlp),
    (8, "model persistence", _persistence),
]


def _line(num, name, ok, detail):
    head, *rest = detail.splitlines()
    text = f"{'PASS' if ok else 'FAIL'} [{num}] {name}: {head}"
    return "\n".join([text] + ["    " + r for r in rest])


@pytest.mark.parametrize("num,name,check", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(num, name, check, capsys):
    ok, detail = check()
    with capsys.disabled():
        print("\n" + _line(num, name, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = []
    for num, name, check in CRITERIA:
        ok, detail = check()
        print(_line(num, name, ok, detail), flush=True)
        results.append(ok)
    sys.exit(0 if all(results) else 1)
