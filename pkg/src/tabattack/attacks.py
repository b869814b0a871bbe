"""Untargeted evasion attacks in encoded space.

Five attacks over [0,1]^D encoded rows: FGSM and PGD (bounded, sign of the
training-loss gradient), DeepFool (boundary linearization on the score
margin), Carlini-Wagner L2 (tanh change of variables against the served
prediction output), LowProFool (importance-weighted minimal perturbation,
numerical schemas only).

Conventions shared by all five:

- success means the prediction on the perturbed point differs from the
  TRUE label, so inputs the clean model already gets wrong count as
  successes whenever the attack leaves them misclassified.
- DeepFool targets the model's CURRENT prediction rather than the true
  label. On an already-misclassified input it therefore walks the point
  back across the boundary toward the correct class, usually producing a
  small unsuccessful perturbation instead of a free success.
- C&W never returns the input bit-for-bit: iterates live on the tanh
  parametrization, whose box smoothing shifts every coordinate by up to
  5e-7. Already-misclassified inputs return that roundtrip immediately.
- every output is clipped to [0,1]^D; bounded attacks additionally keep
  the l-inf budget.

All cores are batched over rows and fully deterministic; the seed argument
is recorded for provenance but no attack draws random numbers.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .data import EncodedDataset
from .models import Classifier

ATTACK_KINDS = ("FGSM", "PGD", "DeepFool", "CW", "LowProFool")
BOUNDED_KINDS = ("FGSM", "PGD")

# box smoothing for atanh: coordinates sit exactly on 0/1 where atanh
# diverges, so inputs are pulled toward 0.5 by this relative factor
CW_BOX_SMOOTH = 1e-6


class AttackError(ValueError):
    """Contract violation in attack configuration or applicability."""


@dataclass(frozen=True)
class AttackConfig:
    kind: str
    epsilon: float = 0.3
    step_size: float = 0.1
    max_iter: int = 100
    overshoot: float = 1e-6
    initial_constant: float = 0.01
    search_steps: int = 10
    confidence: float = 0.0
    tradeoff: float = 0.5
    norm: str = "l2"
    early_stop: bool = False

    def __post_init__(self):
        if self.kind not in ATTACK_KINDS:
            raise AttackError(f"unknown attack kind {self.kind!r}")
        if self.kind in BOUNDED_KINDS and not self.epsilon > 0:
            raise AttackError("epsilon must be positive for bounded attacks")
        if self.max_iter < 1:
            raise AttackError("max_iter must be at least 1")
        if self.tradeoff < 0:
            raise AttackError("tradeoff must be nonnegative")
        if self.confidence < 0:
            raise AttackError("confidence must be nonnegative")


_DEFAULTS = {
    "FGSM": dict(norm="linf", max_iter=1),
    "PGD": dict(norm="linf", step_size=0.1, max_iter=7),
    "DeepFool": dict(norm="l2", max_iter=100, overshoot=1e-6),
    "CW": dict(norm="l2", max_iter=10, search_steps=10, step_size=0.05),
    "LowProFool": dict(norm="l2", max_iter=100, step_size=0.05, tradeoff=0.5),
}


def default_attack_config(kind: str, **overrides) -> AttackConfig:
    if kind not in _DEFAULTS:
        raise AttackError(f"unknown attack kind {kind!r}")
    params = dict(_DEFAULTS[kind])
    params.update(overrides)
    return AttackConfig(kind=kind, **params)


@dataclass(frozen=True)
class AdversarialExample:
    original: np.ndarray
    perturbed: np.ndarray
    true_label: int
    original_pred: int
    adversarial_pred: int
    success: bool
    attack_kind: str
    iterations_used: int
    degenerate: bool = False


def _package(model: Classifier, X: np.ndarray, Xadv: np.ndarray, y: np.ndarray,
             orig_pred: np.ndarray, kind: str, iters: np.ndarray,
             degenerate: np.ndarray) -> list[AdversarialExample]:
    adv_pred = model.predict_labels(Xadv)
    out = []
    for i in range(len(X)):
        out.append(AdversarialExample(
            original=X[i].copy(),
            perturbed=Xadv[i].copy(),
            true_label=int(y[i]),
            original_pred=int(orig_pred[i]),
            adversarial_pred=int(adv_pred[i]),
            success=bool(adv_pred[i] != y[i]),
            attack_kind=kind,
            iterations_used=int(iters[i]),
            degenerate=bool(degenerate[i]),
        ))
    return out


def _as_batch(X, y):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2:
        raise AttackError("expected a 2-D batch of encoded rows")
    if len(X) != len(y):
        raise AttackError("X and y length mismatch")
    return X, y


# -- FGSM / PGD --------------------------------------------------------------

def fgsm_batch(model: Classifier, X, y, cfg: AttackConfig) -> list[AdversarialExample]:
    X, y = _as_batch(X, y)
    orig_pred = model.predict_labels(X)
    g = model.input_gradient(X, y)
    degenerate = ~np.any(g != 0.0, axis=1)
    Xadv = np.clip(X + cfg.epsilon * np.sign(g), 0.0, 1.0)
    iters = np.ones(len(X), dtype=np.int64)
    return _package(model, X, Xadv, y, orig_pred, cfg.kind, iters, degenerate)


def pgd_batch(model: Classifier, X, y, cfg: AttackConfig) -> list[AdversarialExample]:
    X, y = _as_batch(X, y)
    orig_pred = model.predict_labels(X)
    lo = X - cfg.epsilon
    hi = X + cfg.epsilon
    Xt = X.copy()
    degenerate = np.zeros(len(X), dtype=bool)
    iters = np.zeros(len(X), dtype=np.int64)
    active = np.ones(len(X), dtype=bool)
    for step in range(cfg.max_iter):
        if not active.any():
            break
        g = model.input_gradient(Xt[active], y[active])
        if step == 0:
            degenerate[active] = ~np.any(g != 0.0, axis=1)
        stepped = Xt[active] + cfg.step_size * np.sign(g)
        stepped = np.clip(stepped, lo[active], hi[active])
        Xt[active] = np.clip(stepped, 0.0, 1.0)
        iters[active] += 1
        if cfg.early_stop:
            still = model.predict_labels(Xt[active]) == y[active]
            idx = np.flatnonzero(active)
            active[idx[~still]] = False
    return _package(model, X, Xt, y, orig_pred, cfg.kind, iters, degenerate)


# -- DeepFool ----------------------------------------------------------------

def deepfool_batch(model: Classifier, X, y, cfg: AttackConfig) -> list[AdversarialExample]:
    X, y = _as_batch(X, y)
    orig_pred = model.predict_labels(X)
    n = len(X)
    r_tot = np.zeros_like(X)
    iters = np.zeros(n, dtype=np.int64)
    degenerate = np.zeros(n, dtype=bool)
    # every row is pushed off its current prediction; rows the model already
    # gets wrong are driven back across the boundary and stop counting as
    # adversarial once they land on the true side
    active = np.ones(n, dtype=bool)
    scale = 1.0 + cfg.overshoot
    for _ in range(cfg.max_iter):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        # the overshoot belongs to the returned point, so the flip test has
        # to look at the scaled candidate, not the raw iterate
        cand = np.clip(X[idx] + scale * r_tot[idx], 0.0, 1.0)
        crossed = model.predict_labels(cand) != orig_pred[idx]
        if crossed.any():
            active[idx[crossed]] = False
            idx = idx[~crossed]
            if len(idx) == 0:
                continue
        Xi = np.clip(X[idx] + r_tot[idx], 0.0, 1.0)
        s = model.scores(Xi)
        p0 = orig_pred[idx]
        rows = np.arange(len(idx))
        # f = score of the other class minus score of the current class;
        # negative while the prediction stands
        f = s[rows, 1 - p0] - s[rows, p0]
        w = -model.margin_gradient(Xi, p0)
        normsq = np.einsum("ij,ij->i", w, w)
        dead = normsq <= 1e-20
        if dead.any():
            degenerate[idx[dead]] = True
            active[idx[dead]] = False
            keep = ~dead
            idx, f, w, normsq = idx[keep], f[keep], w[keep], normsq[keep]
            if len(idx) == 0:
                continue
        r_tot[idx] += (np.abs(f) / normsq)[:, None] * w
        iters[idx] += 1
    Xadv = np.clip(X + scale * r_tot, 0.0, 1.0)
    return _package(model, X, Xadv, y, orig_pred, cfg.kind, iters, degenerate)


# -- Carlini-Wagner L2 -------------------------------------------------------

def _to_tanh_space(X: np.ndarray) -> np.ndarray:
    return np.arctanh((2.0 * X - 1.0) * (1.0 - CW_BOX_SMOOTH))


def _from_tanh_space(W: np.ndarray) -> np.ndarray:
    return (np.tanh(W) + 1.0) / 2.0


def cw_batch(model: Classifier, X, y, cfg: AttackConfig) -> list[AdversarialExample]:
    X, y = _as_batch(X, y)
    orig_pred = model.predict_labels(X)
    n, d = X.shape
    W0 = _to_tanh_space(X)
    roundtrip = _from_tanh_space(W0)

    best_adv = roundtrip.copy()
    best_l2 = np.full(n, np.inf)
    found = np.zeros(n, dtype=bool)
    fail_adv = roundtrip.copy()
    fail_margin = model.served_margin(roundtrip, y)
    fail_l2 = np.linalg.norm(roundtrip - X, axis=1)
    iters = np.zeros(n, dtype=np.int64)

    # inputs the model already misclassifies: the margin term is inactive
    # from the start, so the optimizer would only shrink the distance term;
    # return the roundtrip immediately
    optimize = orig_pred == y

    c = np.full(n, cfg.initial_constant)
    lo = np.zeros(n)
    hi = np.full(n, np.inf)

    idx = np.flatnonzero(optimize)
    if len(idx):
        Xo = X[idx]
        yo = y[idx]
        for _ in range(cfg.search_steps):
            Wv = W0[idx].copy()
            succeeded_now = np.zeros(len(idx), dtype=bool)
            for _ in range(cfg.max_iter):
                xp = _from_tanh_space(Wv)
                v = model.served_margin(xp, yo)
                gm = model.served_margin_gradient(xp, yo)
                gx = 2.0 * (xp - Xo) + (c[idx] * (v > 0.0))[:, None] * gm
                Wv -= cfg.step_size * gx * (1.0 - np.tanh(Wv) ** 2) / 2.0
                iters[idx] += 1

                cand = _from_tanh_space(Wv)
                pred = model.predict_labels(cand)
                l2 = np.linalg.norm(cand - Xo, axis=1)
                ok = pred != yo
                better = ok & (l2 < best_l2[idx])
                if better.any():
                    rows = idx[better]
                    best_adv[rows] = cand[better]
                    best_l2[rows] = l2[better]
                    found[rows] = True
                succeeded_now |= ok
                vc = model.served_margin(cand, yo)
                worse = ~ok & ((vc < fail_margin[idx] - 1e-15)
                               | (np.isclose(vc, fail_margin[idx]) & (l2 < fail_l2[idx])))
                if worse.any():
                    rows = idx[worse]
                    fail_adv[rows] = cand[worse]
                    fail_margin[rows] = vc[worse]
                    fail_l2[rows] = l2[worse]
            # binary search over the constant: tighten on success, grow on
            # failure until an upper bracket exists
            succ_rows = idx[succeeded_now]
            fail_rows = idx[~succeeded_now]
            hi[succ_rows] = np.minimum(hi[succ_rows], c[succ_rows])
            lo[fail_rows] = np.maximum(lo[fail_rows], c[fail_rows])
            bounded = hi[idx] < np.inf
            c[idx[bounded]] = (lo[idx[bounded]] + hi[idx[bounded]]) / 2.0
            c[idx[~bounded]] *= 2.0

    Xadv = np.where(found[:, None], best_adv, fail_adv)
    Xadv[~optimize] = roundtrip[~optimize]
    Xadv = np.clip(Xadv, 0.0, 1.0)
    return _package(model, X, Xadv, y, orig_pred, cfg.kind, iters,
                    np.zeros(n, dtype=bool))


# -- LowProFool --------------------------------------------------------------

def pearson_importance(dataset: EncodedDataset) -> np.ndarray:
    """Absolute Pearson correlation of each numerical coordinate with the
    train labels, zero on one-hot coordinates, normalized to unit l2."""
    enc = dataset.encoder
    v = np.zeros(enc.dim, dtype=np.float64)
    ytrain = dataset.y_train.astype(np.float64)
    if ytrain.std() == 0.0:
        return v
    for feat in dataset.schema.numerical_features:
        start, _ = enc.blocks[feat.name]
        col = dataset.X_train[:, start]
        if col.std() == 0.0:
            continue
        v[start] = abs(float(np.corrcoef(col, ytrain)[0, 1]))
    norm = np.linalg.norm(v)
    if norm > 0:
        v /= norm
    return v


def lowprofool_batch(model: Classifier, X, y, importance: np.ndarray,
                     cfg: AttackConfig) -> list[AdversarialExample]:
    X, y = _as_batch(X, y)
    v = np.asarray(importance, dtype=np.float64)
    if v.shape != (X.shape[1],):
        raise AttackError("importance vector length mismatch")
    orig_pred = model.predict_labels(X)
    n = len(X)
    delta = np.zeros_like(X)
    vsq = v * v

    best_adv = None
    best_wnorm = np.full(n, np.inf)
    found = np.zeros(n, dtype=bool)
    last = X.copy()

    for _ in range(cfg.max_iter):
        xp = np.clip(X + delta, 0.0, 1.0)
        g = model.input_gradient(xp, y)
        wnorm = np.linalg.norm(v[None, :] * delta, axis=1)
        safe = np.where(wnorm > 0.0, wnorm, 1.0)
        pen = vsq[None, :] * delta / safe[:, None]
        pen[wnorm == 0.0] = 0.0
        # descend on -loss + tradeoff * weighted norm: pushes the loss up
        # while shrinking unimportant-feature movement
        delta = delta + cfg.step_size * g - cfg.step_size * cfg.tradeoff * pen

        cand = np.clip(X + delta, 0.0, 1.0)
        eff = cand - X
        pred = model.predict_labels(cand)
        ok = pred != y
        cwnorm = np.linalg.norm(v[None, :] * eff, axis=1)
        better = ok & (cwnorm < best_wnorm)
        if better.any():
            if best_adv is None:
                best_adv = X.copy()
            best_adv[better] = cand[better]
            best_wnorm[better] = cwnorm[better]
            found[better] = True
        last = cand

    if best_adv is None:
        best_adv = last.copy()
    Xadv = np.where(found[:, None], best_adv, last)
    iters = np.full(n, cfg.max_iter, dtype=np.int64)
    return _package(model, X, Xadv, y, orig_pred, cfg.kind, iters,
                    np.zeros(n, dtype=bool))


# -- orchestration + per-row forms -------------------------------------------

def run_attack_batch(model: Classifier, X, y, cfg: AttackConfig,
                     importance: np.ndarray | None = None,
                     seed: int = 0) -> list[AdversarialExample]:
    """Run one attack over a batch. The seed is recorded by callers for
    provenance; no attack here consumes randomness."""
    if cfg.kind == "FGSM":
        return fgsm_batch(model, X, y, cfg)
    if cfg.kind == "PGD":
        return pgd_batch(model, X, y, cfg)
    if cfg.kind == "DeepFool":
        return deepfool_batch(model, X, y, cfg)
    if cfg.kind == "CW":
        return cw_batch(model, X, y, cfg)
    if cfg.kind == "LowProFool":
        if importance is None:
            raise AttackError("LowProFool requires an importance vector")
        return lowprofool_batch(model, X, y, importance, cfg)
    raise AttackError(f"unknown attack kind {cfg.kind!r}")


def _single(fn, model, x, y, cfg, *extra):
    x = np.asarray(x, dtype=np.float64)
    return fn(model, x[None, :], np.asarray([y]), *extra, cfg)[0]


def fgsm(model: Classifier, x, y: int, cfg: AttackConfig) -> AdversarialExample:
    if cfg.kind != "FGSM":
        raise AttackError("config kind must be FGSM")
    return _single(fgsm_batch, model, x, y, cfg)


def pgd(model: Classifier, x, y: int, cfg: AttackConfig) -> AdversarialExample:
    if cfg.kind != "PGD":
        raise AttackError("config kind must be PGD")
    return _single(pgd_batch, model, x, y, cfg)


def deepfool(model: Classifier, x, y: int, cfg: AttackConfig) -> AdversarialExample:
    if cfg.kind != "DeepFool":
        raise AttackError("config kind must be DeepFool")
    return _single(deepfool_batch, model, x, y, cfg)


def carlini_wagner_l2(model: Classifier, x, y: int, cfg: AttackConfig) -> AdversarialExample:
    if cfg.kind != "CW":
        raise AttackError("config kind must be CW")
    return _single(cw_batch, model, x, y, cfg)


def lowprofool(model: Classifier, x, y: int, importance: np.ndarray,
               cfg: AttackConfig) -> AdversarialExample:
    if cfg.kind != "LowProFool":
        raise AttackError("config kind must be LowProFool")
    x = np.asarray(x, dtype=np.float64)
    return lowprofool_batch(model, x[None, :], np.asarray([y]), importance, cfg)[0]
