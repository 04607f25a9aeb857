#!/usr/bin/env python3
"""Corpus -> segmentation -> features -> 80/20 split -> MLP -> confusion matrix.

    python scripts/run_protocol.py --pages 60 --seed 0 --out runs/default
"""
import argparse
import json
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from scriptsort import classifier as clf
from scriptsort.corpus import build_dataset
from scriptsort.features import SLOTS, extract
from scriptsort.pipeline import match_labels
from scriptsort.segmentation import segment_words


def page_samples(page):
    words = segment_words(page.image)
    truth = [{"bbox": w.bbox, "label": w.label} for w in page.truth.words]
    return [clf.Sample(extract(w.crop).vector, lab, f"{page.page_id}:{w.line_index}:{w.reading_order}")
            for w, lab in zip(words, match_labels(words, truth)) if lab]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pages", type=int, default=60)
    ap.add_argument("--mix", type=float, default=0.5)
    ap.add_argument("--seed", type=int, default=0, help="corpus, split and training seed")
    ap.add_argument("--epochs", type=int, default=500)
    ap.add_argument("--hidden", type=int, default=16)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=None, help="directory for report.json and model.bin")
    a = ap.parse_args()

    t0 = time.perf_counter()
    pages = build_dataset(a.pages, a.mix, a.seed)
    if a.jobs > 1:
        with ProcessPoolExecutor(a.jobs) as pool:
            per_page = list(pool.map(page_samples, pages))
    else:
        per_page = [page_samples(p) for p in pages]
    samples = [s for ss in per_page for s in ss]
    t_feat = time.perf_counter() - t0

    cfg = clf.TrainConfig(hidden_dim=a.hidden, epochs=a.epochs, seed=a.seed)
    train_set, test_set = clf.split(samples, cfg.train_fraction, cfg.seed)
    model = clf.train(train_set, cfg)
    cm = clf.evaluate(model, test_set)
    total = time.perf_counter() - t0

    print(f"{len(pages)} pages, {len(samples)} labelled words "
          f"({len(train_set)} train / {len(test_set)} test)")
    print(f"features {t_feat:.1f}s, total {total:.1f}s")
    print(cm.report())
    means = {lab: np.mean([s.vector for s in samples if s.label == lab], axis=0)
             for lab in clf.CLASSES}
    print("class means (NbPAW, NBL, P, Q):")
    for lab, m in means.items():
        print(f"  {lab:>7}: " + ", ".join(f"{m[SLOTS.index(k)]:.2f}" for k in ("NbPAW", "NBL", "P", "Q")))

    if a.out:
        a.out.mkdir(parents=True, exist_ok=True)
        clf.save_model(model, a.out / "model.bin")
        report = {**cm.to_json(), "words": len(samples), "train": len(train_set),
                  "test": len(test_set), "seconds": round(total, 1),
                  "loss_history": model.loss_history,
                  "class_means": {k: dict(zip(SLOTS, v.round(4).tolist())) for k, v in means.items()}}
        (a.out / "report.json").write_text(json.dumps(report, indent=2) + "\n")


if __name__ == "__main__":
    main()
