"""Differentiable test problems with analytic gradients, plus dataset
generation and loading.

Every problem exposes the same surface: a mean loss over a batch of
training rows, its analytic gradient, per-sample gradients (for the dense
Fisher oracle), and held-out test metrics.  Losses are means of per-sample
losses, so the gradient of a batch equals the mean of the per-sample
gradients.

Parameters are always a single flat float64 vector; problems with several
weight arrays (the MLP) define a fixed, documented flattening order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from sofim.exceptions import ConfigError, DimensionMismatchError

__all__ = [
    "Dataset",
    "Problem",
    "QuadraticProblem",
    "LogisticRegressionProblem",
    "SoftmaxRegressionProblem",
    "MlpSpec",
    "MlpProblem",
    "make_quadratic",
    "logistic_regression_problem",
    "softmax_regression_problem",
    "mlp_problem",
    "make_blobs",
    "load_csv_dataset",
    "minibatch_epochs",
    "finite_difference_gradient",
    "problem_from_spec",
]


# ---------------------------------------------------------------------------
# datasets


@dataclass
class Dataset:
    """Feature matrix + integer labels with a fixed train/test split."""

    features: np.ndarray
    labels: np.ndarray
    train_idx: np.ndarray
    test_idx: np.ndarray
    num_classes: int

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self.train_idx = np.asarray(self.train_idx, dtype=np.int64)
        self.test_idx = np.asarray(self.test_idx, dtype=np.int64)
        n = self.features.shape[0]
        if self.labels.shape != (n,):
            raise DimensionMismatchError(
                f"labels shape {self.labels.shape} does not match {n} feature rows"
            )
        if not np.isfinite(self.features).all():
            raise ConfigError("features contain NaN or Inf")
        if self.labels.min(initial=0) < 0 or self.labels.max(initial=0) >= self.num_classes:
            raise ConfigError(
                f"labels must lie in [0, {self.num_classes}), "
                f"got range [{self.labels.min()}, {self.labels.max()}]"
            )
        if np.intersect1d(self.train_idx, self.test_idx).size:
            raise ConfigError("train and test splits overlap")

    @property
    def n_train(self) -> int:
        return self.train_idx.shape[0]

    @property
    def n_test(self) -> int:
        return self.test_idx.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


def make_blobs(n: int, p: int, c: int, spread: float, seed: int) -> Dataset:
    """Gaussian blob classification data with an 80/20 split.

    ``c`` cluster centers are random unit vectors scaled by ``spread``;
    samples add unit-variance Gaussian noise.  Class counts are balanced to
    within one sample.  Deterministic in ``seed``.
    """
    if not (n >= c >= 2):
        raise ConfigError(f"need n >= c >= 2, got n={n}, c={c}")
    rng = np.random.default_rng(seed)
    centers = rng.standard_normal((c, p))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    centers *= spread

    base, rem = divmod(n, c)
    counts = np.full(c, base)
    counts[:rem] += 1
    labels = np.repeat(np.arange(c), counts)
    features = centers[labels] + rng.standard_normal((n, p))

    perm = rng.permutation(n)
    n_train = int(round(0.8 * n))
    return Dataset(
        features=features,
        labels=labels,
        train_idx=perm[:n_train],
        test_idx=perm[n_train:],
        num_classes=c,
    )


def load_csv_dataset(path, label_column: str, split_fraction: float, seed: int) -> Dataset:
    """Load a numeric CSV (header row, comma separators, '.' decimals).

    ``label_column`` names the integer class column.  Features are
    standardized per column to mean 0 / variance 1 using train-split
    statistics only; constant columns standardize to 0.  The train split
    holds ``round(split_fraction * N)`` rows chosen by a seeded shuffle.
    """
    if not (0.0 < split_fraction < 1.0):
        raise ConfigError(f"split_fraction must lie in (0, 1), got {split_fraction}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        if label_column not in header:
            raise ConfigError(f"{path}: label column {label_column!r} not in header {header}")
        label_pos = header.index(label_column)
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ConfigError(
                    f"{path}: line {lineno}: expected {len(header)} cells, got {len(row)}"
                )
            try:
                rows.append([float(cell) for cell in row])
            except ValueError as exc:
                raise ConfigError(f"{path}: line {lineno}: {exc}") from None
    if not rows:
        raise ConfigError(f"{path}: no data rows")

    data = np.asarray(rows, dtype=np.float64)
    raw_labels = data[:, label_pos]
    if np.any(raw_labels != np.round(raw_labels)):
        raise ConfigError(f"{path}: label column {label_column!r} has non-integral values")
    features = np.delete(data, label_pos, axis=1)
    # Remap arbitrary integer labels onto 0..C-1, preserving order.
    _, labels = np.unique(raw_labels.astype(np.int64), return_inverse=True)
    num_classes = int(labels.max()) + 1

    n = features.shape[0]
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    n_train = int(round(split_fraction * n))
    train_idx, test_idx = perm[:n_train], perm[n_train:]

    mean = features[train_idx].mean(axis=0)
    std = features[train_idx].std(axis=0)
    std[std == 0.0] = 1.0
    features = (features - mean) / std

    return Dataset(
        features=features,
        labels=labels,
        train_idx=train_idx,
        test_idx=test_idx,
        num_classes=num_classes,
    )


def minibatch_epochs(n_train: int, batch_size: int, rng: np.random.Generator):
    """Yield index arrays into the train split, forever.

    Each epoch draws a fresh permutation of ``range(n_train)`` and consumes
    it in contiguous chunks of ``batch_size``; a short final chunk is kept,
    so every index is visited exactly once per epoch.
    """
    batch_size = min(batch_size, n_train)
    while True:
        perm = rng.permutation(n_train)
        for start in range(0, n_train, batch_size):
            yield perm[start : start + batch_size]


# ---------------------------------------------------------------------------
# problems


class Problem:
    """Loss over (flat parameter vector, batch of train rows).

    ``batch`` arguments are integer indices into the train split;
    ``None`` means the full train split.
    """

    dim: int
    name: str

    @property
    def n_train(self) -> int:
        raise NotImplementedError

    def loss(self, w, batch=None) -> float:
        raise NotImplementedError

    def grad(self, w, batch=None) -> np.ndarray:
        raise NotImplementedError

    def per_sample_losses(self, w, batch=None) -> np.ndarray:
        raise NotImplementedError

    def per_sample_grads(self, w, batch=None) -> np.ndarray:
        raise NotImplementedError

    def test_loss(self, w) -> float:
        raise NotImplementedError

    def test_accuracy(self, w):
        """Fraction of correct test predictions, or None when the problem
        has no classification semantics."""
        return None

    def initial_point(self, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def exact_hessian(self, w) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__} has no cheap exact Hessian")


class QuadraticProblem(Problem):
    """``loss(w) = 0.5 (w - w*)^T A (w - w*)`` with symmetric PD ``A``.

    Behaves as a single-sample problem: batches are ignored and the test
    metrics mirror the train loss.  The minimizer is ``w_star`` by
    construction.
    """

    def __init__(self, a_matrix, w_star):
        a = np.asarray(a_matrix, dtype=np.float64)
        w_star = np.asarray(w_star, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] != w_star.shape[0]:
            raise DimensionMismatchError(
                f"A has shape {a.shape}, w_star has length {w_star.shape[0]}"
            )
        if np.max(np.abs(a - a.T)) > 1e-10:
            raise ConfigError("A must be symmetric")
        eigs = np.linalg.eigvalsh(a)
        if eigs.min() <= 0:
            raise ConfigError(f"A must be positive definite, min eigenvalue {eigs.min():.3e}")
        self.a_matrix = a
        self.w_star = w_star
        self.dim = w_star.shape[0]
        self.name = f"quadratic{self.dim}"

    @property
    def n_train(self) -> int:
        return 1

    def loss(self, w, batch=None) -> float:
        r = np.asarray(w, dtype=np.float64) - self.w_star
        return 0.5 * float(r @ self.a_matrix @ r)

    def grad(self, w, batch=None) -> np.ndarray:
        r = np.asarray(w, dtype=np.float64) - self.w_star
        return self.a_matrix @ r

    def per_sample_losses(self, w, batch=None) -> np.ndarray:
        return np.array([self.loss(w)])

    def per_sample_grads(self, w, batch=None) -> np.ndarray:
        return self.grad(w)[None, :]

    def test_loss(self, w) -> float:
        return self.loss(w)

    def initial_point(self, rng: np.random.Generator) -> np.ndarray:
        return self.w_star + rng.standard_normal(self.dim)

    def exact_hessian(self, w) -> np.ndarray:
        return self.a_matrix


def make_quadratic(d: int, condition_number: float, seed: int) -> QuadraticProblem:
    """Random-rotation quadratic with eigenvalues spread log-uniformly over
    ``[1, condition_number]`` and a random minimizer.  Deterministic in
    ``seed``."""
    if d < 1:
        raise ConfigError(f"d must be >= 1, got {d}")
    if condition_number < 1:
        raise ConfigError(f"condition_number must be >= 1, got {condition_number}")
    rng = np.random.default_rng(seed)
    eigs = np.geomspace(1.0, condition_number, d)
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    q *= np.sign(np.diag(r))
    a = (q * eigs) @ q.T
    a = 0.5 * (a + a.T)
    return QuadraticProblem(a_matrix=a, w_star=rng.standard_normal(d))


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise log-softmax with max subtraction (no overflow)."""
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


class _DatasetProblem(Problem):
    """Shared machinery for problems backed by a Dataset."""

    def __init__(self, dataset: Dataset):
        self.dataset = dataset
        self._x_train = dataset.features[dataset.train_idx]
        self._y_train = dataset.labels[dataset.train_idx]
        self._x_test = dataset.features[dataset.test_idx]
        self._y_test = dataset.labels[dataset.test_idx]

    @property
    def n_train(self) -> int:
        return self._x_train.shape[0]

    def _select(self, batch):
        if batch is None:
            return self._x_train, self._y_train
        batch = np.asarray(batch, dtype=np.int64)
        return self._x_train[batch], self._y_train[batch]

    def _check_w(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=np.float64)
        if w.shape != (self.dim,):
            raise DimensionMismatchError(f"w must have shape ({self.dim},), got {w.shape}")
        return w

    def loss(self, w, batch=None) -> float:
        x, y = self._select(batch)
        return float(self._losses(self._check_w(w), x, y).mean())

    def grad(self, w, batch=None) -> np.ndarray:
        x, y = self._select(batch)
        return self._mean_grad(self._check_w(w), x, y)

    def per_sample_losses(self, w, batch=None) -> np.ndarray:
        x, y = self._select(batch)
        return self._losses(self._check_w(w), x, y)

    def per_sample_grads(self, w, batch=None) -> np.ndarray:
        x, y = self._select(batch)
        return self._grads(self._check_w(w), x, y)

    def test_loss(self, w) -> float:
        return float(self._losses(self._check_w(w), self._x_test, self._y_test).mean())

    def test_accuracy(self, w) -> float:
        pred = self._predict(self._check_w(w), self._x_test)
        return float(np.mean(pred == self._y_test))

    def initial_point(self, rng: np.random.Generator) -> np.ndarray:
        return np.zeros(self.dim)

    # subclasses implement the vectorized per-batch math
    def _losses(self, w, x, y) -> np.ndarray:
        raise NotImplementedError

    def _mean_grad(self, w, x, y) -> np.ndarray:
        raise NotImplementedError

    def _grads(self, w, x, y) -> np.ndarray:
        raise NotImplementedError

    def _predict(self, w, x) -> np.ndarray:
        raise NotImplementedError


class LogisticRegressionProblem(_DatasetProblem):
    """Binary logistic regression with the bias folded in as a constant-1
    feature, so ``dim = n_features + 1``.

    Per-sample loss is the negative log likelihood
    ``-(y log s + (1 - y) log(1 - s))`` with ``s = sigmoid(w . x)``,
    computed as ``log(1 + exp(z)) - y z`` for stability.
    """

    def __init__(self, dataset: Dataset):
        if dataset.num_classes != 2:
            raise ConfigError(
                f"logistic regression needs binary labels, got {dataset.num_classes} classes"
            )
        super().__init__(dataset)
        ones = np.ones((dataset.features.shape[0], 1))
        augmented = np.hstack([dataset.features, ones])
        self._x_train = augmented[dataset.train_idx]
        self._x_test = augmented[dataset.test_idx]
        self.dim = augmented.shape[1]
        self.name = f"logistic{self.dim}"

    def _losses(self, w, x, y):
        z = x @ w
        return np.logaddexp(0.0, z) - y * z

    def _mean_grad(self, w, x, y):
        z = x @ w
        residual = _sigmoid(z) - y
        return x.T @ residual / x.shape[0]

    def _grads(self, w, x, y):
        z = x @ w
        residual = _sigmoid(z) - y
        return residual[:, None] * x

    def _predict(self, w, x):
        # z == 0 ties go to class 0 (lowest index).
        return (x @ w > 0).astype(np.int64)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class SoftmaxRegressionProblem(_DatasetProblem):
    """Multinomial logistic regression: cross-entropy over softmax logits.

    Parameters are the weight matrix ``W`` of shape (C, p) flattened
    row-major, class-by-class: ``dim = p * C``.  Per-sample gradient is
    ``(softmax(W x) - onehot(y)) outer x`` in the same layout.
    """

    def __init__(self, dataset: Dataset):
        super().__init__(dataset)
        self.num_classes = dataset.num_classes
        self.n_features = dataset.n_features
        self.dim = self.n_features * self.num_classes
        self.name = f"softmax{self.num_classes}x{self.n_features}"

    def _weights(self, w):
        return w.reshape(self.num_classes, self.n_features)

    def _losses(self, w, x, y):
        log_probs = _log_softmax(x @ self._weights(w).T)
        return -log_probs[np.arange(x.shape[0]), y]

    def _residual(self, w, x, y):
        probs = np.exp(_log_softmax(x @ self._weights(w).T))
        probs[np.arange(x.shape[0]), y] -= 1.0
        return probs

    def _mean_grad(self, w, x, y):
        r = self._residual(w, x, y)
        return (r.T @ x).ravel() / x.shape[0]

    def _grads(self, w, x, y):
        r = self._residual(w, x, y)
        return np.einsum("bc,bp->bcp", r, x).reshape(x.shape[0], self.dim)

    def _predict(self, w, x):
        # np.argmax returns the first maximum: ties go to the lowest class.
        return np.argmax(x @ self._weights(w).T, axis=1)


@dataclass(frozen=True)
class MlpSpec:
    """One-hidden-layer network shape: ``widths = (inputs, hidden, classes)``."""

    widths: tuple
    activation: str = "tanh"

    def __post_init__(self):
        if len(self.widths) != 3 or any(wd < 1 for wd in self.widths):
            raise ConfigError(f"widths must be three integers >= 1, got {self.widths}")
        if self.activation not in ("tanh", "relu"):
            raise ConfigError(f"activation must be 'tanh' or 'relu', got {self.activation!r}")


class MlpProblem(_DatasetProblem):
    """One-hidden-layer classifier with manual backprop and cross-entropy.

    Flat parameter layout, in order: W1 (hidden, inputs) row-major, b1
    (hidden,), W2 (classes, hidden) row-major, b2 (classes,).  Initial
    weights are uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per layer,
    drawn in that same order.  The ReLU subgradient at 0 is taken as 0.
    """

    def __init__(self, dataset: Dataset, spec: MlpSpec, init_seed: int = 0):
        super().__init__(dataset)
        p, h, c = spec.widths
        if p != dataset.n_features:
            raise ConfigError(
                f"spec expects {p} input features but dataset has {dataset.n_features}"
            )
        if c != dataset.num_classes:
            raise ConfigError(
                f"spec expects {c} classes but dataset has {dataset.num_classes}"
            )
        self.spec = spec
        self.init_seed = init_seed
        self._sizes = (h * p, h, c * h, c)
        self._shapes = ((h, p), (h,), (c, h), (c,))
        self.dim = sum(self._sizes)
        self.name = f"mlp{p}x{h}x{c}{spec.activation}"

    def unflatten(self, w):
        """Split a flat vector into (W1, b1, W2, b2) views."""
        parts = []
        offset = 0
        for size, shape in zip(self._sizes, self._shapes):
            parts.append(w[offset : offset + size].reshape(shape))
            offset += size
        return tuple(parts)

    def flatten(self, w1, b1, w2, b2) -> np.ndarray:
        return np.concatenate([w1.ravel(), b1.ravel(), w2.ravel(), b2.ravel()])

    def initial_point(self, rng: np.random.Generator = None) -> np.ndarray:
        if rng is None:
            rng = np.random.default_rng(self.init_seed)
        p, h, c = self.spec.widths
        bound1 = 1.0 / np.sqrt(p)
        bound2 = 1.0 / np.sqrt(h)
        w1 = rng.uniform(-bound1, bound1, size=(h, p))
        b1 = rng.uniform(-bound1, bound1, size=h)
        w2 = rng.uniform(-bound2, bound2, size=(c, h))
        b2 = rng.uniform(-bound2, bound2, size=c)
        return self.flatten(w1, b1, w2, b2)

    def _forward(self, w, x):
        w1, b1, w2, b2 = self.unflatten(w)
        z1 = x @ w1.T + b1
        a1 = np.tanh(z1) if self.spec.activation == "tanh" else np.maximum(z1, 0.0)
        logits = a1 @ w2.T + b2
        return z1, a1, logits

    def _act_deriv(self, z1, a1):
        if self.spec.activation == "tanh":
            return 1.0 - a1 * a1
        return (z1 > 0.0).astype(np.float64)

    def _losses(self, w, x, y):
        _, _, logits = self._forward(w, x)
        return -_log_softmax(logits)[np.arange(x.shape[0]), y]

    def _backward_pieces(self, w, x, y):
        """Per-sample backprop intermediates: residual (B,C), hidden error
        (B,H), activations (B,H)."""
        z1, a1, logits = self._forward(w, x)
        r = np.exp(_log_softmax(logits))
        r[np.arange(x.shape[0]), y] -= 1.0
        _, _, w2, _ = self.unflatten(w)
        dz1 = (r @ w2) * self._act_deriv(z1, a1)
        return r, dz1, a1

    def _mean_grad(self, w, x, y):
        b = x.shape[0]
        r, dz1, a1 = self._backward_pieces(w, x, y)
        gw1 = dz1.T @ x / b
        gb1 = dz1.mean(axis=0)
        gw2 = r.T @ a1 / b
        gb2 = r.mean(axis=0)
        return self.flatten(gw1, gb1, gw2, gb2)

    def _grads(self, w, x, y):
        r, dz1, a1 = self._backward_pieces(w, x, y)
        gw1 = np.einsum("bh,bp->bhp", dz1, x).reshape(x.shape[0], -1)
        gw2 = np.einsum("bc,bh->bch", r, a1).reshape(x.shape[0], -1)
        return np.hstack([gw1, dz1, gw2, r])

    def _predict(self, w, x):
        _, _, logits = self._forward(w, x)
        return np.argmax(logits, axis=1)


def logistic_regression_problem(dataset: Dataset) -> LogisticRegressionProblem:
    return LogisticRegressionProblem(dataset)


def softmax_regression_problem(dataset: Dataset) -> SoftmaxRegressionProblem:
    return SoftmaxRegressionProblem(dataset)


def mlp_problem(dataset: Dataset, spec: MlpSpec, init_seed: int = 0) -> MlpProblem:
    return MlpProblem(dataset, spec, init_seed)


# ---------------------------------------------------------------------------
# verification helpers


def finite_difference_gradient(f, w, h: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of a scalar function of a flat vector."""
    w = np.asarray(w, dtype=np.float64)
    grad = np.empty_like(w)
    for j in range(w.shape[0]):
        step = np.zeros_like(w)
        step[j] = h
        grad[j] = (f(w + step) - f(w - step)) / (2.0 * h)
    return grad


def gradient_check(problem: Problem, rng: np.random.Generator, n_points: int = 5,
                   batch_size: int = 8, h: float = 1e-5) -> float:
    """Max relative error between analytic and central-difference gradients
    over random (point, batch) pairs.

    Relative error is ``max|fd - g| / max(max|g|, 1e-8)``.
    """
    worst = 0.0
    for _ in range(n_points):
        w = problem.initial_point(rng) + 0.1 * rng.standard_normal(problem.dim)
        if problem.n_train > 1:
            batch = rng.integers(0, problem.n_train, size=min(batch_size, problem.n_train))
        else:
            batch = None
        analytic = problem.grad(w, batch)
        fd = finite_difference_gradient(lambda wv: problem.loss(wv, batch), w, h=h)
        err = np.max(np.abs(fd - analytic)) / max(np.max(np.abs(analytic)), 1e-8)
        worst = max(worst, float(err))
    return worst


# ---------------------------------------------------------------------------
# declarative construction (used by the harness and CLI)

_SPEC_KEYS = {
    "quadratic": {"kind", "dim", "condition_number", "seed"},
    "blobs": {"kind", "n", "p", "classes", "spread", "seed", "model",
              "hidden", "activation", "init_seed"},
    "csv": {"kind", "path", "label_column", "split_fraction", "seed", "model",
            "hidden", "activation", "init_seed"},
}

_MODELS = ("logistic", "softmax", "mlp")


def problem_from_spec(spec: dict) -> Problem:
    """Build a problem from a declarative dict (as found in config files).

    ``kind`` selects quadratic / blobs / csv; dataset kinds also need a
    ``model`` (logistic, softmax or mlp).  Unknown keys are rejected by
    name.
    """
    if "kind" not in spec:
        raise ConfigError("problem spec is missing 'kind'")
    kind = spec["kind"]
    if kind not in _SPEC_KEYS:
        raise ConfigError(f"unknown problem kind {kind!r}; expected one of {sorted(_SPEC_KEYS)}")
    unknown = set(spec) - _SPEC_KEYS[kind]
    if unknown:
        raise ConfigError(f"unknown problem key(s) {sorted(unknown)} for kind {kind!r}")

    if kind == "quadratic":
        return make_quadratic(
            d=int(spec.get("dim", 20)),
            condition_number=float(spec.get("condition_number", 10.0)),
            seed=int(spec.get("seed", 0)),
        )

    if kind == "blobs":
        dataset = make_blobs(
            n=int(spec.get("n", 2000)),
            p=int(spec.get("p", 20)),
            c=int(spec.get("classes", 2)),
            spread=float(spec.get("spread", 3.0)),
            seed=int(spec.get("seed", 0)),
        )
    else:
        if "path" not in spec:
            raise ConfigError("csv problem spec is missing 'path'")
        dataset = load_csv_dataset(
            path=spec["path"],
            label_column=spec.get("label_column", "label"),
            split_fraction=float(spec.get("split_fraction", 0.8)),
            seed=int(spec.get("seed", 0)),
        )

    model = spec.get("model", "logistic")
    if model not in _MODELS:
        raise ConfigError(f"unknown model {model!r}; expected one of {_MODELS}")
    if model == "logistic":
        return logistic_regression_problem(dataset)
    if model == "softmax":
        return softmax_regression_problem(dataset)
    mlp_spec = MlpSpec(
        widths=(dataset.n_features, int(spec.get("hidden", 32)), dataset.num_classes),
        activation=spec.get("activation", "tanh"),
    )
    return mlp_problem(dataset, mlp_spec, init_seed=int(spec.get("init_seed", 0)))
