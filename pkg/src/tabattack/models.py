"""White-box classifiers: logistic regression, linear SVM, small MLP.

All three expose the same query surface over encoded inputs:

- scores(X): per-class real values. Linear models report the signed margin
  replicated as (-s, +s); the MLP reports raw logits. Predicted label is
  argmax of scores, ties resolve to label 0.
- probabilities(X): sigmoid/softmax class probabilities, or None for the
  SVM, whose deployed output is a hard label.
- input_gradient(X, y): gradient of the training loss at each row. The
  hinge loss is flat at margin >= 1, where the subgradient 0 is returned.
- margin_gradient(X, y): exact gradient of scores[y] - scores[1-y].
- served_margin / served_margin_gradient: value and gradient of
  F_y - F_{1-y} where F is what the model serves for prediction
  (probabilities when it has them, else the hard one-hot label, whose
  gradient is zero almost everywhere).

Training is deterministic given (dataset, seed); checkpoints restore
predictions bit-exactly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, asdict

import numpy as np

from .data import EncodedDataset

MLP_HIDDEN = (24, 12, 12, 12, 12)
CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    l2: float = 1e-3
    max_iter: int = 2000
    tol: float = 1e-8
    mlp_learning_rate: float = 1e-3
    mlp_weight_decay: float = 1e-3
    svm_pos_weight: float = 1.0
    batch_size: int = 64
    epochs: int = 60


# Calibrated default L2 strength for the hinge model. Small values let the
# optimizer push most margins past the hinge kink into the flat region,
# where input gradients vanish and gradient-sign attacks degenerate; this
# keeps trained margins inside the active band without hurting accuracy.
SVM_L2_DEFAULT = 0.05


def default_config(kind: str) -> TrainConfig:
    if kind == "LinearSVM":
        return TrainConfig(l2=SVM_L2_DEFAULT)
    return TrainConfig()


@dataclass(frozen=True)
class ModelOutput:
    scores: np.ndarray
    probabilities: np.ndarray | None
    predicted_label: int


@dataclass(frozen=True)
class TrainingMetrics:
    accuracy: float
    precision: float
    recall: float
    converged: bool
    iterations: int
    final_loss: float


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


class Classifier:
    """Common query surface; subclasses implement the raw computations."""

    kind: str = ""

    def __init__(self, dim: int, seed: int, config: TrainConfig):
        self.dim = int(dim)
        self.seed = int(seed)
        self.config = config
        self.metrics: TrainingMetrics | None = None

    # -- queries -----------------------------------------------------------
    def scores(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def probabilities(self, X: np.ndarray) -> np.ndarray | None:
        raise NotImplementedError

    def predict_labels(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.scores(X), axis=1)

    def input_gradient(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def margin_gradient(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def served_margin(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        probs = self.probabilities(X)
        if probs is None:
            labels = self.predict_labels(X)
            return np.where(labels == y, 1.0, -1.0)
        rows = np.arange(len(X))
        return probs[rows, y] - probs[rows, 1 - y]

    def served_margin_gradient(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, dataset: EncodedDataset) -> dict[str, float]:
        preds = self.predict_labels(dataset.X_test)
        y = dataset.y_test
        tp = int(((preds == 1) & (y == 1)).sum())
        fp = int(((preds == 1) & (y == 0)).sum())
        fn = int(((preds == 0) & (y == 1)).sum())
        accuracy = float((preds == y).mean())
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        return {"accuracy": accuracy, "precision": precision, "recall": recall}

    # -- persistence -------------------------------------------------------
    def _arrays(self) -> dict[str, np.ndarray]:
        raise NotImplementedError

    def save(self, path: str) -> None:
        meta = {
            "version": CHECKPOINT_VERSION,
            "kind": self.kind,
            "dim": self.dim,
            "seed": self.seed,
            "config": asdict(self.config),
        }
        np.savez(path, meta=np.frombuffer(json.dumps(meta).encode(), dtype=np.uint8),
                 **self._arrays())


def load_classifier(path: str) -> "Classifier":
    with np.load(path) as blob:
        meta = json.loads(bytes(blob["meta"].tobytes()).decode())
        if meta.get("version") != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version in {path}")
        config = TrainConfig(**meta["config"])
        kind = meta["kind"]
        if kind == "LR":
            model = LogisticRegressionModel(meta["dim"], meta["seed"], config)
            model.w = blob["w"].copy()
            model.b = float(blob["b"])
        elif kind == "LinearSVM":
            model = LinearSVMModel(meta["dim"], meta["seed"], config)
            model.w = blob["w"].copy()
            model.b = float(blob["b"])
        elif kind == "MLP":
            model = MLPModel(meta["dim"], meta["seed"], config)
            n_layers = int(blob["n_layers"])
            model.weights = [blob[f"W{i}"].copy() for i in range(n_layers)]
            model.biases = [blob[f"b{i}"].copy() for i in range(n_layers)]
        else:
            raise ValueError(f"unknown classifier kind {kind!r}")
        return model


class _LinearBase(Classifier):
    def __init__(self, dim: int, seed: int, config: TrainConfig):
        super().__init__(dim, seed, config)
        self.w = np.zeros(dim, dtype=np.float64)
        self.b = 0.0

    def raw_margin(self, X: np.ndarray) -> np.ndarray:
        return X @ self.w + self.b

    def scores(self, X: np.ndarray) -> np.ndarray:
        s = self.raw_margin(X)
        return np.column_stack([-s, s])

    def margin_gradient(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        sign = np.where(np.asarray(y) == 1, 2.0, -2.0)
        return sign[:, None] * self.w[None, :]

    def _arrays(self) -> dict[str, np.ndarray]:
        return {"w": self.w, "b": np.float64(self.b)}


class LogisticRegressionModel(_LinearBase):
    kind = "LR"

    def probabilities(self, X: np.ndarray) -> np.ndarray:
        p = _sigmoid(self.raw_margin(X))
        return np.column_stack([1.0 - p, p])

    def input_gradient(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        p = _sigmoid(self.raw_margin(X))
        return (p - y)[:, None] * self.w[None, :]

    def served_margin_gradient(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        p = _sigmoid(self.raw_margin(X))
        # d(p_y - p_{1-y})/dx = +-2 p(1-p) w
        sign = np.where(np.asarray(y) == 1, 2.0, -2.0)
        return (sign * p * (1.0 - p))[:, None] * self.w[None, :]


class LinearSVMModel(_LinearBase):
    kind = "LinearSVM"

    def probabilities(self, X: np.ndarray) -> None:
        return None

    def input_gradient(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        ytilde = 2.0 * np.asarray(y) - 1.0
        margin = ytilde * self.raw_margin(X)
        coeff = np.where(margin < 1.0, -ytilde, 0.0)
        return coeff[:, None] * self.w[None, :]

    def served_margin_gradient(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        # the served output is a hard label: a step surface with zero
        # gradient almost everywhere
        return np.zeros((len(X), self.dim), dtype=np.float64)


class MLPModel(Classifier):
    kind = "MLP"

    def __init__(self, dim: int, seed: int, config: TrainConfig):
        super().__init__(dim, seed, config)
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []

    def _init_parameters(self, rng: np.random.Generator) -> None:
        sizes = (self.dim, *MLP_HIDDEN, 2)
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            self.weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out, dtype=np.float64))

    def _forward(self, X: np.ndarray) -> list[np.ndarray]:
        acts = [X]
        h = X
        last = len(self.weights) - 1
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            z = h @ W + b
            h = z if i == last else np.maximum(z, 0.0)
            acts.append(h)
        return acts

    def scores(self, X: np.ndarray) -> np.ndarray:
        return self._forward(np.asarray(X, dtype=np.float64))[-1]

    def probabilities(self, X: np.ndarray) -> np.ndarray:
        return _softmax(self.scores(X))

    def _backprop_to_input(self, acts: list[np.ndarray], dlogits: np.ndarray) -> np.ndarray:
        grad = dlogits
        for i in range(len(self.weights) - 1, -1, -1):
            grad = grad @ self.weights[i].T
            if i > 0:
                grad = grad * (acts[i] > 0.0)
        return grad

    def input_gradient(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        acts = self._forward(X)
        p = _softmax(acts[-1])
        onehot = np.zeros_like(p)
        onehot[np.arange(len(X)), np.asarray(y)] = 1.0
        return self._backprop_to_input(acts, p - onehot)

    def margin_gradient(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        acts = self._forward(X)
        seed = np.zeros((len(X), 2), dtype=np.float64)
        rows = np.arange(len(X))
        seed[rows, np.asarray(y)] = 1.0
        seed[rows, 1 - np.asarray(y)] = -1.0
        return self._backprop_to_input(acts, seed)

    def served_margin_gradient(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        acts = self._forward(X)
        p = _softmax(acts[-1])
        rows = np.arange(len(X))
        v = np.zeros_like(p)
        v[rows, np.asarray(y)] = 1.0
        v[rows, 1 - np.asarray(y)] = -1.0
        # through softmax: dlogits_k = p_k (v_k - v . p)
        vdotp = (v * p).sum(axis=1, keepdims=True)
        return self._backprop_to_input(acts, p * (v - vdotp))

    def _arrays(self) -> dict[str, np.ndarray]:
        out: dict[str, np.ndarray] = {"n_layers": np.int64(len(self.weights))}
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            out[f"W{i}"] = W
            out[f"b{i}"] = b
        return out


def predict(model: Classifier, x: np.ndarray) -> ModelOutput:
    """Single-row prediction with the full output record."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.dim,):
        raise ValueError(f"expected input of length {model.dim}, got {x.shape}")
    X = x[None, :]
    scores = model.scores(X)[0]
    probs = model.probabilities(X)
    return ModelOutput(
        scores=scores,
        probabilities=None if probs is None else probs[0],
        predicted_label=int(np.argmax(scores)),
    )


def input_gradient(model: Classifier, x: np.ndarray, y: int) -> np.ndarray:
    """Single-row gradient of the training loss with respect to the input."""
    x = np.asarray(x, dtype=np.float64)
    return model.input_gradient(x[None, :], np.asarray([y]))[0]


def _train_linear(model: _LinearBase, X: np.ndarray, y: np.ndarray) -> tuple[bool, int, float]:
    cfg = model.config
    n = len(X)
    ytilde = 2.0 * y - 1.0
    prev = np.inf
    loss = np.inf
    it = 0
    for it in range(1, cfg.max_iter + 1):
        s = X @ model.w + model.b
        if model.kind == "LR":
            # mean log-loss via softplus(-yt * s)
            loss = float(np.mean(np.logaddexp(0.0, -ytilde * s))) + cfg.l2 * float(model.w @ model.w)
            resid = _sigmoid(s) - y
            grad_w = X.T @ resid / n + 2.0 * cfg.l2 * model.w
            grad_b = float(resid.mean())
        else:
            margin = ytilde * s
            hinge = np.maximum(0.0, 1.0 - margin)
            # weighted mean; pos_weight > 1 upweights the positive class
            wts = np.where(y == 1, cfg.svm_pos_weight, 1.0)
            wts = wts / wts.sum()
            loss = float(hinge @ wts) + cfg.l2 * float(model.w @ model.w)
            active = margin < 1.0
            coeff = np.where(active, -ytilde, 0.0) * wts
            grad_w = X.T @ coeff + 2.0 * cfg.l2 * model.w
            grad_b = float(coeff.sum())
        if abs(prev - loss) < cfg.tol:
            return True, it, loss
        model.w -= cfg.learning_rate * grad_w
        model.b -= cfg.learning_rate * grad_b
        prev = loss
    return False, it, loss


def _train_mlp(model: MLPModel, X: np.ndarray, y: np.ndarray) -> tuple[bool, int, float]:
    cfg = model.config
    rng = np.random.default_rng(model.seed)
    model._init_parameters(rng)
    m_state = [np.zeros_like(W) for W in model.weights] + [np.zeros_like(b) for b in model.biases]
    v_state = [np.zeros_like(p) for p in m_state]
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    step = 0
    loss = np.inf
    n = len(X)
    for _ in range(cfg.epochs):
        perm = rng.permutation(n)
        for lo in range(0, n, cfg.batch_size):
            batch = perm[lo:lo + cfg.batch_size]
            xb, yb = X[batch], y[batch]
            acts = model._forward(xb)
            p = _softmax(acts[-1])
            onehot = np.zeros_like(p)
            onehot[np.arange(len(xb)), yb] = 1.0
            logits = acts[-1]
            shifted = logits - logits.max(axis=1, keepdims=True)
            logprob = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
            loss = float(-(logprob[np.arange(len(xb)), yb]).mean())

            grads_W: list[np.ndarray] = [None] * len(model.weights)  # type: ignore[list-item]
            grads_b: list[np.ndarray] = [None] * len(model.biases)  # type: ignore[list-item]
            delta = (p - onehot) / len(xb)
            for i in range(len(model.weights) - 1, -1, -1):
                grads_W[i] = acts[i].T @ delta + 2.0 * cfg.mlp_weight_decay * model.weights[i]
                grads_b[i] = delta.sum(axis=0)
                if i > 0:
                    delta = (delta @ model.weights[i].T) * (acts[i] > 0.0)

            step += 1
            params = model.weights + model.biases
            grads = grads_W + grads_b
            for k, (param, grad) in enumerate(zip(params, grads)):
                m_state[k] = beta1 * m_state[k] + (1 - beta1) * grad
                v_state[k] = beta2 * v_state[k] + (1 - beta2) * grad * grad
                mhat = m_state[k] / (1 - beta1 ** step)
                vhat = v_state[k] / (1 - beta2 ** step)
                param -= cfg.mlp_learning_rate * mhat / (np.sqrt(vhat) + eps)
    return True, step, loss


def train(dataset: EncodedDataset, kind: str, hyper: TrainConfig | None = None,
          seed: int = 42) -> Classifier:
    """Fit a classifier of the given kind on the train split."""
    if len(dataset.X_train) == 0:
        raise ValueError("empty training set")
    cfg = hyper if hyper is not None else default_config(kind)
    X = np.asarray(dataset.X_train, dtype=np.float64)
    y = np.asarray(dataset.y_train, dtype=np.int64)
    model: Classifier
    if kind == "LR":
        model = LogisticRegressionModel(dataset.dim, seed, cfg)
        converged, iters, loss = _train_linear(model, X, y)
    elif kind == "LinearSVM":
        model = LinearSVMModel(dataset.dim, seed, cfg)
        converged, iters, loss = _train_linear(model, X, y)
    elif kind == "MLP":
        model = MLPModel(dataset.dim, seed, cfg)
        converged, iters, loss = _train_mlp(model, X, y)
    else:
        raise ValueError(f"unknown classifier kind {kind!r}")
    ev = model.evaluate(dataset)
    model.metrics = TrainingMetrics(
        accuracy=ev["accuracy"], precision=ev["precision"], recall=ev["recall"],
        converged=converged, iterations=iters, final_loss=loss,
    )
    return model


MODEL_KINDS = ("LR", "LinearSVM", "MLP")
