"""Page-level glue between segmentation, features and ground truth."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .classifier import Sample
from .corpus import IMAGE_SUFFIXES
from .features import SLOTS, FeatureParams, assemble_vector
from .imageio import read_image
from .segmentation import SegmentParams, WordBox, segment_words

CSV_HEADER = ("page", "line", "order", "label") + SLOTS


def iou(a, b) -> float:
    """Intersection over union of inclusive (top, left, bottom, right) boxes."""
    t, l = max(a[0], b[0]), max(a[1], b[1])
    bo, r = min(a[2], b[2]), min(a[3], b[3])
    if bo < t or r < l:
        return 0.0
    inter = (bo - t + 1) * (r - l + 1)
    area = lambda x: (x[2] - x[0] + 1) * (x[3] - x[1] + 1)  # noqa: E731
    return inter / (area(a) + area(b) - inter)


def match_labels(words: list[WordBox], truth_words, min_iou: float = 0.5) -> list[str]:
    """Label of the best-overlapping truth box per word ('' below ``min_iou``)."""
    out = []
    for w in words:
        best, best_iou = "", 0.0
        for t in truth_words:
            v = iou(w.bbox, t["bbox"])
            if v > best_iou:
                best, best_iou = t["label"], v
        out.append(best if best_iou >= min_iou else "")
    return out


def sidecar_for(image: Path) -> dict | None:
    for cand in (image.with_name(image.stem + ".truth.json"), image.with_suffix(".json")):
        if cand.exists():
            return json.loads(cand.read_text())
    return None


def list_images(path) -> list[Path]:
    path = Path(path)
    if path.is_dir():
        return sorted(p for p in path.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    return [path]


def page_rows(image_path, seg: SegmentParams = SegmentParams(),
              feat: FeatureParams = FeatureParams()) -> list[tuple]:
    """Feature rows (page, line, order, label, *slots) for every word of one page."""
    image_path = Path(image_path)
    page = read_image(image_path)
    words = segment_words(page, seg)
    meta = sidecar_for(image_path)
    if meta and meta.get("words"):
        labels = match_labels(words, meta["words"])
    else:
        page_label = (meta or {}).get("label", "")
        labels = [page_label] * len(words)
    return [(image_path.stem, w.line_index, w.reading_order, lab,
             *assemble_vector(w.crop, feat).tolist())
            for w, lab in zip(words, labels)]


def write_feature_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(CSV_HEADER)
        out.writerows(rows)


def read_feature_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in CSV_HEADER if c not in (reader.fieldnames or ())]
        if missing:
            raise ValueError(f"{path}: missing columns {missing}")
        return list(reader)


def rows_to_samples(rows: list[dict]) -> list[Sample]:
    """Labelled rows as samples; unlabelled rows are dropped."""
    out = []
    for r in rows:
        if not r["label"]:
            continue
        vec = np.array([int(r[s]) for s in SLOTS], dtype=np.int64)
        out.append(Sample(vec, r["label"], f"{r['page']}:{r['line']}:{r['order']}"))
    return out


def samples_to_rows(samples: list[Sample]) -> list[tuple]:
    rows = []
    for s in samples:
        page, line, order = s.source_id.split(":")
        rows.append((page, int(line), int(order), s.label, *np.asarray(s.vector).tolist()))
    return rows

