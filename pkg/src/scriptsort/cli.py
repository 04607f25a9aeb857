"""``scriptsort`` command line.

Exit status: 0 on success, 1 on usage errors, 2 on processing errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path

from . import classifier as clf
from .corpus import CorpusParams, build_dataset, ingest
from .errors import ScriptSortError
from .features import FeatureParams, assemble_vector
from .imageio import read_image, write_image
from .pipeline import (
    list_images,
    page_rows,
    read_feature_csv,
    rows_to_samples,
    samples_to_rows,
    write_feature_csv,
)
from .segmentation import DilationCurve, SegmentParams, segment_page, select_order


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _segment_args(p):
    g = p.add_argument_group("segmentation")
    g.add_argument("--se-size", type=int, default=3, help="side of the diacritic-removal square")
    g.add_argument("--max-order", type=int, default=20, help="largest dilation order tried (K)")
    g.add_argument("--window", type=int, default=3, help="std-dev window over component deltas (w)")
    g.add_argument("--min-band-height", type=int, default=3)


def _feature_args(p):
    g = p.add_argument_group("features")
    g.add_argument("--alpha", type=float, default=0.5, help="baseline row threshold vs. peak")
    g.add_argument("--dot-threshold", type=int, default=40, help="max outer contour points of a dot (exclusive)")
    g.add_argument("--loop-threshold", type=int, default=60, help="max inner contour points of a loop")
    g.add_argument("--marge-h", type=int, default=None, help="pole margin (default 2 x band height)")
    g.add_argument("--marge-j", type=int, default=None, help="jamb margin (default band height)")
    g.add_argument("--boundary-width", type=int, default=2)
    g.add_argument("--thin-ratio", type=float, default=0.3)


def _train_args(p):
    g = p.add_argument_group("training")
    g.add_argument("--hidden", type=int, default=16)
    g.add_argument("--lr", type=float, default=0.3)
    g.add_argument("--momentum", type=float, default=0.2)
    g.add_argument("--epochs", type=int, default=500)
    g.add_argument("--train-fraction", type=float, default=0.8)
    g.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="scriptsort", description="Arabic/Latin word script identification.")
    parser.add_argument("--config", help="JSON file of option defaults (flags win)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("corpus", help="render a synthetic bilingual corpus")
    p.add_argument("--pages", type=int, default=60)
    p.add_argument("--mix", type=float, default=0.5, help="fraction of Arabic words")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("png", "pbm"), default="png")
    p.add_argument("--out", required=True)
    p.add_argument("--manifest", action="store_true", help="also write manifest.json")

    p = sub.add_parser("segment", help="find word boxes on a page")
    p.add_argument("image")
    p.add_argument("--out", required=True)
    p.add_argument("--emit-histogram", help="CSV of gap length vs. occurrences")
    p.add_argument("--emit-curve", help="CSV of dilation order vs. component count")
    _segment_args(p)

    p = sub.add_parser("features", help="30-slot feature rows for every word")
    p.add_argument("input", help="page image or directory of pages")
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    _segment_args(p)
    _feature_args(p)

    p = sub.add_parser("train", help="train the perceptron on a feature CSV")
    p.add_argument("features")
    p.add_argument("--model", required=True)
    p.add_argument("--test-out", help="write the held-out rows here")
    _train_args(p)

    p = sub.add_parser("classify", help="label each word box of a page with its script")
    p.add_argument("image")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    _segment_args(p)
    _feature_args(p)

    p = sub.add_parser("eval", help="confusion matrix and accuracy on labelled rows")
    p.add_argument("features")
    p.add_argument("--model", required=True)
    p.add_argument("--out", help="JSON report")

    p = sub.add_parser("stats", help="spacing histogram and dilation curve as CSV")
    p.add_argument("image")
    p.add_argument("--histogram", required=True)
    p.add_argument("--curve", required=True)
    p.add_argument("--line", type=int, default=None, help="one line's curve instead of the page sum")
    _segment_args(p)
    return parser


def _seg_params(a) -> SegmentParams:
    return SegmentParams(a.se_size, a.max_order, a.window, a.min_band_height)


def _feat_params(a) -> FeatureParams:
    return FeatureParams(a.alpha, a.marge_h, a.marge_j, a.dot_threshold,
                         a.loop_threshold, a.boundary_width, a.thin_ratio)


def _write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def cmd_corpus(a) -> int:
    out = Path(a.out)
    out.mkdir(parents=True, exist_ok=True)
    pages = build_dataset(a.pages, a.mix, a.seed, CorpusParams())
    for p in pages:
        write_image(out / f"{p.page_id}.{a.format}", p.image)
        _write_json(out / f"{p.page_id}.truth.json", p.truth.to_json())
    if a.manifest:
        _write_json(out / "manifest.json", ingest(out))
    n_words = sum(len(p.truth.words) for p in pages)
    print(f"wrote {len(pages)} pages, {n_words} words to {out}")
    return 0


def cmd_segment(a) -> int:
    seg = segment_page(read_image(a.image), _seg_params(a))
    words = [{"line": w.line_index, "order": w.reading_order, "bbox": list(w.bbox)}
             for w in seg.words]
    _write_json(a.out, {"image": Path(a.image).name, "words": words})
    if a.emit_histogram:
        _write_csv(a.emit_histogram, ("value", "count"), sorted(seg.histogram.counts.items()))
    if a.emit_curve:
        _write_csv(a.emit_curve, ("order", "components"),
                   zip(range(1, a.max_order + 1), seg.page_curve()))
    print(f"{len(seg.lines)} lines, {len(words)} words")
    return 0


def cmd_features(a) -> int:
    images = list_images(a.input)
    if not images:
        raise ScriptSortError(f"no images found in {a.input}")
    work = partial(page_rows, seg=_seg_params(a), feat=_feat_params(a))
    if a.jobs > 1:
        with ProcessPoolExecutor(a.jobs) as pool:
            per_page = list(pool.map(work, images))
    else:
        per_page = [work(p) for p in images]
    rows = [r for page in per_page for r in page]
    write_feature_csv(a.out, rows)
    print(f"{len(rows)} words from {len(images)} page(s)")
    return 0


def cmd_train(a) -> int:
    samples = rows_to_samples(read_feature_csv(a.features))
    cfg = clf.TrainConfig(a.hidden, a.lr, a.momentum, a.epochs, a.seed, a.train_fraction)
    train_set, test_set = clf.split(samples, cfg.train_fraction, cfg.seed)
    model = clf.train(train_set, cfg)
    clf.save_model(model, a.model)
    if a.test_out:
        write_feature_csv(a.test_out, samples_to_rows(test_set))
    print(f"trained on {len(train_set)} words, held out {len(test_set)}; "
          f"loss {model.loss_history[0]:.5f} -> {model.loss_history[-1]:.5f}")
    return 0


def cmd_classify(a) -> int:
    model = clf.load_model(a.model)
    seg = segment_page(read_image(a.image), _seg_params(a))
    feat = _feat_params(a)
    out = []
    for w in seg.words:
        script, scores = clf.predict(model, assemble_vector(w.crop, feat))
        out.append({"line": w.line_index, "order": w.reading_order, "bbox": list(w.bbox),
                    "script": script, "scores": [float(s) for s in scores]})
    _write_json(a.out, {"image": Path(a.image).name, "words": out})
    counts = {c: sum(w["script"] == c for w in out) for c in clf.CLASSES}
    print(", ".join(f"{n} {c}" for c, n in counts.items()))
    return 0


def cmd_eval(a) -> int:
    samples = rows_to_samples(read_feature_csv(a.features))
    if not samples:
        raise ScriptSortError("no labelled rows to evaluate")
    cm = clf.evaluate(clf.load_model(a.model), samples)
    print(cm.report())
    if a.out:
        _write_json(a.out, cm.to_json())
    return 0


def cmd_stats(a) -> int:
    seg = segment_page(read_image(a.image), _seg_params(a))
    _write_csv(a.histogram, ("value", "count"), sorted(seg.histogram.counts.items()))
    if a.line is None:
        counts = seg.page_curve()
    else:
        if not 0 <= a.line < len(seg.curves):
            raise ScriptSortError(f"page has {len(seg.curves)} lines, no line {a.line}")
        counts = seg.curves[a.line].counts
    rows = []
    if counts:
        curve = DilationCurve(list(range(1, len(counts) + 1)), counts,
                              select_order(counts, a.window), a.window)
        deltas, stds = curve.deltas, curve.stddevs
        for k, n in enumerate(counts):
            rows.append((k + 1, n,
                         deltas[k] if k < len(deltas) else "",
                         f"{stds[k]:.6f}" if k < len(stds) else ""))
    _write_csv(a.curve, ("order", "components", "delta", "stddev"), rows)
    return 0


COMMANDS = {
    "corpus": cmd_corpus,
    "segment": cmd_segment,
    "features": cmd_features,
    "train": cmd_train,
    "classify": cmd_classify,
    "eval": cmd_eval,
    "stats": cmd_stats,
}


def _config_defaults(parser, argv) -> None:
    """Install ``--config`` values as defaults of the chosen subcommand."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    if not known.config:
        return
    choices = parser._subparsers._group_actions[0].choices
    command = next((t for t in rest if t in choices), None)
    if command is None:
        return
    try:
        conf = json.loads(Path(known.config).read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read config {known.config}: {exc}") from exc
    if not isinstance(conf, dict):
        raise UsageError("config file must hold a JSON object")
    conf = {k.replace("-", "_"): v for k, v in conf.items()}
    sub = choices[command]
    known_dests = {act.dest for act in sub._actions}
    unknown = sorted(set(conf) - known_dests)
    if unknown:
        raise UsageError(f"unknown config keys for {command}: {', '.join(unknown)}")
    for act in sub._actions:
        if act.dest in conf:
            act.required = False
    sub.set_defaults(**conf)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _config_defaults(parser, argv)
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return 0 if not exc.code else 1
    try:
        return COMMANDS[args.command](args)
    except (ScriptSortError, OSError, ValueError) as exc:
        print(f"scriptsort {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
