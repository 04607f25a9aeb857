"""One-hidden-layer perceptron for Arabic/Latin word classification.

Sigmoid hidden and output units, squared error on one-hot targets,
per-sample gradient descent with momentum.  Inputs are z-scored with
statistics fitted on the training set.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    BadMagicError,
    DimensionMismatchError,
    SingleClassError,
    TooFewSamplesError,
    VersionError,
)
from .features import SLOTS

CLASSES = ("arabic", "latin")  # output unit order; ties resolve to the first
INPUT_DIM = len(SLOTS)

MAGIC = b"SSMLP\0"
VERSION = 1
_HEADER = struct.Struct("<6sHIII")


@dataclass(frozen=True)
class TrainConfig:
    hidden_dim: int = 16
    learning_rate: float = 0.3
    momentum: float = 0.2
    epochs: int = 500
    seed: int = 0
    train_fraction: float = 0.8

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise ValueError("train_fraction must lie strictly between 0 and 1")
        if self.epochs < 1 or self.hidden_dim < 1:
            raise ValueError("epochs and hidden_dim must be >= 1")


@dataclass
class Sample:
    vector: np.ndarray
    label: str
    source_id: str = ""


@dataclass
class MlpModel:
    w1: np.ndarray     # (hidden, input)
    b1: np.ndarray     # (hidden,)
    w2: np.ndarray     # (output, hidden)
    b2: np.ndarray     # (output,)
    means: np.ndarray  # (input,)
    stds: np.ndarray   # (input,)
    loss_history: list = field(default_factory=list, compare=False, repr=False)

    @property
    def input_dim(self) -> int:
        return self.w1.shape[1]

    @property
    def hidden_dim(self) -> int:
        return self.w1.shape[0]

    def normalize(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.input_dim:
            raise DimensionMismatchError(
                f"expected {self.input_dim} features, got {x.shape[-1]}")
        return (x - self.means) / self.stds

    def scores(self, x) -> np.ndarray:
        """Output activations for one raw vector or a batch of them."""
        _, out = forward(self.params, self.normalize(x))
        return out

    @property
    def params(self):
        return self.w1, self.b1, self.w2, self.b2


def sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def forward(params, x):
    w1, b1, w2, b2 = params
    hidden = sigmoid(x @ w1.T + b1)
    return hidden, sigmoid(hidden @ w2.T + b2)


def loss(params, x, target) -> float:
    """Half the summed squared error of the outputs (one sample)."""
    _, out = forward(params, x)
    return 0.5 * float(np.sum((out - target) ** 2))


def gradients(params, x, target):
    """Backpropagated gradient of :func:`loss` w.r.t. (w1, b1, w2, b2)."""
    w1, b1, w2, b2 = params
    hidden, out = forward(params, x)
    d_out = (out - target) * out * (1.0 - out)
    d_hidden = (w2.T @ d_out) * hidden * (1.0 - hidden)
    return np.outer(d_hidden, x), d_hidden, np.outer(d_out, hidden), d_out


def _one_hot(labels) -> np.ndarray:
    idx = np.array([CLASSES.index(lab) for lab in labels])
    return np.eye(len(CLASSES))[idx]


def split(samples, train_fraction: float = 0.8, seed: int = 0):
    """Stratified random split; each class keeps ``train_fraction`` of its samples (rounded)."""
    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    for cls in CLASSES:
        idx = [i for i, s in enumerate(samples) if s.label == cls]
        if not idx:
            continue
        if len(idx) < 2:
            raise TooFewSamplesError(f"class {cls!r} has {len(idx)} sample(s), need 2")
        idx = rng.permutation(idx)
        n_train = min(max(int(np.floor(len(idx) * train_fraction + 0.5)), 1), len(idx) - 1)
        train_idx += idx[:n_train].tolist()
        test_idx += idx[n_train:].tolist()
    return ([samples[i] for i in sorted(train_idx)],
            [samples[i] for i in sorted(test_idx)])


def init_params(input_dim: int, hidden_dim: int, rng: np.random.Generator):
    out = len(CLASSES)
    return (rng.uniform(-0.5, 0.5, (hidden_dim, input_dim)),
            rng.uniform(-0.5, 0.5, hidden_dim),
            rng.uniform(-0.5, 0.5, (out, hidden_dim)),
            rng.uniform(-0.5, 0.5, out))


def fit(x, targets, config: TrainConfig) -> MlpModel:
    """Train on raw feature rows ``x`` (n, d) and one-hot ``targets`` (n, 2)."""
    x = np.asarray(x, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if len(x) == 0:
        raise SingleClassError("empty training set")
    if (targets.sum(axis=0) == 0).any():
        raise SingleClassError("training set must contain both classes")
    means = x.mean(axis=0)
    stds = x.std(axis=0)
    stds[stds == 0] = 1.0
    xn = (x - means) / stds

    rng = np.random.default_rng(config.seed)
    w1, b1, w2, b2 = init_params(x.shape[1], config.hidden_dim, rng)
    vw1, vb1, vw2, vb2 = (np.zeros_like(a) for a in (w1, b1, w2, b2))
    lr, mom = config.learning_rate, config.momentum
    history = []
    for _ in range(config.epochs):
        total = 0.0
        for i in rng.permutation(len(xn)):
            xi, ti = xn[i], targets[i]
            h = 1.0 / (1.0 + np.exp(-(w1 @ xi + b1)))
            o = 1.0 / (1.0 + np.exp(-(w2 @ h + b2)))
            err = o - ti
            total += 0.5 * (err @ err)
            d_o = err * o * (1.0 - o)
            d_h = (d_o @ w2) * h * (1.0 - h)
            vw2 *= mom
            vw2 -= lr * np.outer(d_o, h)
            vb2 *= mom
            vb2 -= lr * d_o
            vw1 *= mom
            vw1 -= lr * np.outer(d_h, xi)
            vb1 *= mom
            vb1 -= lr * d_h
            w2 += vw2
            b2 += vb2
            w1 += vw1
            b1 += vb1
        history.append(total / len(xn))
    return MlpModel(w1, b1, w2, b2, means, stds, history)


def train(samples, config: TrainConfig = TrainConfig()) -> MlpModel:
    if not samples:
        raise SingleClassError("empty training set")
    x = np.array([s.vector for s in samples], dtype=np.float64)
    return fit(x, _one_hot([s.label for s in samples]), config)


def predict(model: MlpModel, vector) -> tuple[str, np.ndarray]:
    vector = np.asarray(vector, dtype=np.float64)
    if vector.shape != (model.input_dim,):
        raise DimensionMismatchError(
            f"expected a vector of length {model.input_dim}, got shape {vector.shape}")
    scores = model.scores(vector)
    return CLASSES[int(np.argmax(scores))], scores


# --------------------------------------------------------------------------
# evaluation
# --------------------------------------------------------------------------


@dataclass
class ConfusionMatrix:
    """``counts[true][predicted]`` with index 0 = Arabic, 1 = Latin."""

    counts: np.ndarray = field(default_factory=lambda: np.zeros((2, 2), dtype=np.int64))

    @classmethod
    def from_cells(cls, aa: int, al: int, la: int, ll: int) -> "ConfusionMatrix":
        return cls(np.array([[aa, al], [la, ll]], dtype=np.int64))

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def correct(self) -> int:
        return int(np.trace(self.counts))

    @property
    def accuracy_bp(self) -> int:
        """Accuracy in hundredths of a percent, truncated."""
        return self.correct * 10000 // self.total if self.total else 0

    @property
    def accuracy(self) -> float:
        return self.accuracy_bp / 100

    @property
    def error_rate(self) -> float:
        # complement of the reported accuracy so the two always sum to 100.00
        return (10000 - self.accuracy_bp) / 100

    def to_json(self) -> dict:
        (aa, al), (la, ll) = self.counts.tolist()
        return {
            "accuracy": self.accuracy,
            "error_rate": self.error_rate,
            "confusion": {"AA": aa, "AL": al, "LA": la, "LL": ll},
        }

    def report(self) -> str:
        (aa, al), (la, ll) = self.counts.tolist()
        return "\n".join([
            f"Test words: {self.total} ({aa + al} Arabic, {la + ll} Latin)",
            f"Correctly classified: {self.correct}",
            f"Incorrectly classified: {self.total - self.correct}",
            f"Accuracy: {self.accuracy:.2f}%",
            f"Error rate: {self.error_rate:.2f}%",
            "Confusion matrix (rows: true, columns: predicted):",
            f"{'':>10}{'Arabic':>10}{'Latin':>10}",
            f"{'Arabic':>10}{aa:>10}{al:>10}",
            f"{'Latin':>10}{la:>10}{ll:>10}",
            f"Misclassified: {al} Arabic, {la} Latin",
        ])


def evaluate(model: MlpModel, samples) -> ConfusionMatrix:
    if not samples:
        raise ValueError("empty test set")
    x = np.array([s.vector for s in samples], dtype=np.float64)
    pred = np.argmax(model.scores(x), axis=1)
    cm = ConfusionMatrix()
    for s, p in zip(samples, pred):
        cm.counts[CLASSES.index(s.label), p] += 1
    return cm


# --------------------------------------------------------------------------
# persistence
# --------------------------------------------------------------------------


def dumps(model: MlpModel) -> bytes:
    out_dim = model.w2.shape[0]
    head = _HEADER.pack(MAGIC, VERSION, model.input_dim, model.hidden_dim, out_dim)
    arrays = (model.means, model.stds, model.w1, model.b1, model.w2, model.b2)
    return head + b"".join(np.ascontiguousarray(a, dtype="<f8").tobytes() for a in arrays)


def loads(data: bytes) -> MlpModel:
    if len(data) < _HEADER.size or data[:len(MAGIC)] != MAGIC:
        raise BadMagicError("not a model file")
    _, version, d, h, o = _HEADER.unpack_from(data)
    if version != VERSION:
        raise VersionError(f"model file version {version}, expected {VERSION}")
    shapes = [(d,), (d,), (h, d), (h,), (o, h), (o,)]
    need = _HEADER.size + 8 * sum(int(np.prod(s)) for s in shapes)
    if len(data) != need:
        raise BadMagicError(f"model file has {len(data)} bytes, expected {need}")
    arrays, pos = [], _HEADER.size
    for shape in shapes:
        n = int(np.prod(shape))
        arrays.append(np.frombuffer(data, dtype="<f8", count=n, offset=pos).astype(np.float64).reshape(shape))
        pos += 8 * n
    means, stds, w1, b1, w2, b2 = arrays
    return MlpModel(w1, b1, w2, b2, means, stds)


def save_model(model: MlpModel, path) -> None:
    Path(path).write_bytes(dumps(model))


def load_model(path) -> MlpModel:
    return loads(Path(path).read_bytes())
