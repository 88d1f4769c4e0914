"""Sampling augmented features from fitted curves, and downstream evaluation.

Classifiers here are deliberately small: a geodesic k-NN and a softmax
linear head. Both consume pre-shape vectors.
"""
from dataclasses import asdict, dataclass, field, replace
import math

import numpy as np

from .dataset import LabeledFeatureSet, class_rng
from .errors import EmptyTrainSet, LabelMismatch, MissingCurve, TooFewSamples
from .fitting import FitConfig, fit_all_classes
from .geodesic import interp_batch
from .preshape import NORM_EPS, pairwise_geodesic, project_rows

# generator streams per (seed, label)
_STREAM_AUGMENT = 1
_STREAM_BASELINE = 2


def sample_curve(curve, n, rng):
    """Draw ``n`` points at uniform positions along ``curve``; returns ``(n, 2d)``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    z = rng.uniform(0.0, 1.0, size=n)
    return interp_batch(curve, z).T.copy()


def augment_dataset(curves, n, seed=0, labels=None):
    """Pseudo-labelled samples, ``n`` per class, from a label -> FittedCurve map."""
    labels = sorted(curves, key=str) if labels is None else list(labels)
    rows, labs = [], []
    for lab in labels:
        if lab not in curves:
            raise MissingCurve(f"no fitted curve for class {lab!r}")
        fc = curves[lab]
        curve = getattr(fc, "curve", fc)
        rows.append(sample_curve(curve, n, class_rng(seed, lab, _STREAM_AUGMENT)))
        labs += [lab] * n
    dim = next(iter(curves.values())).curve.dim if curves else 0
    vectors = np.vstack(rows) if rows else np.empty((0, dim))
    return LabeledFeatureSet(vectors, np.array(labs), np.ones(len(labs), dtype=bool), kind="preshape")


def _reproject(P):
    # per-axis centering and normalization of interleaved pre-shape rows
    n = P.shape[0]
    pairs = P.reshape(n, -1, 2)
    C = (pairs - pairs.mean(axis=1, keepdims=True)).reshape(n, -1)
    norms = np.linalg.norm(C, axis=1, keepdims=True)
    return C / np.maximum(norms, NORM_EPS)


def mixup_baseline(class_features, n, rng, pairing="random", neighbors=5, return_parts=False):
    """Linear interpolation between pairs of class members, pushed back onto the sphere.

    ``pairing="random"`` mixes two distinct members chosen uniformly (mixup);
    ``pairing="nearest"`` mixes a member with one of its ``neighbors`` nearest
    members by geodesic distance (SMOTE-style).
    """
    P = np.asarray(class_features, dtype=np.float64)
    m = P.shape[0]
    if m < 2:
        raise TooFewSamples(f"interpolation needs at least 2 samples, got {m}")
    i = rng.integers(0, m, size=n)
    if pairing == "random":
        j = (i + rng.integers(1, m, size=n)) % m
    elif pairing == "nearest":
        D = pairwise_geodesic(P, P)
        np.fill_diagonal(D, np.inf)
        kk = min(neighbors, m - 1)
        nn = np.argsort(D, axis=1, kind="stable")[:, :kk]
        j = nn[i, rng.integers(0, kk, size=n)]
    else:
        raise ValueError(f"unknown pairing {pairing!r}")
    lam = rng.uniform(0.0, 1.0, size=(n, 1))
    chord = lam * P[i] + (1.0 - lam) * P[j]
    out = _reproject(chord) if n else np.empty((0, P.shape[1]))
    if return_parts:
        return out, chord, i, j, lam.ravel()
    return out


def interpolation_augment(train_ps, n, seed=0, pairing="random"):
    """Apply :func:`mixup_baseline` class by class."""
    rows, labs = [], []
    for lab in train_ps.classes():
        rows.append(mixup_baseline(train_ps.of_class(lab), n, class_rng(seed, lab, _STREAM_BASELINE), pairing))
        labs += [lab] * n
    return LabeledFeatureSet(np.vstack(rows), np.array(labs), np.ones(len(labs), dtype=bool), kind="preshape")


def knn_predict_batch(train, queries, k=5):
    """Majority vote among the ``k`` geodesically nearest training rows.

    Distance ties go to the smaller training index, vote ties to the
    smallest label.
    """
    if len(train) == 0:
        raise EmptyTrainSet("k-NN needs a nonempty training set")
    if k < 1:
        raise ValueError("k must be >= 1")
    Q = np.atleast_2d(np.asarray(queries, dtype=np.float64))
    classes = train.classes()
    code = {lab: c for c, lab in enumerate(classes)}
    y = np.array([code[lab] for lab in train.labels.tolist()])
    D = pairwise_geodesic(Q, train.vectors)
    kk = min(k, len(train))
    nearest = np.argsort(D, axis=1, kind="stable")[:, :kk]
    votes = np.zeros((Q.shape[0], len(classes)), dtype=np.int64)
    np.add.at(votes, (np.repeat(np.arange(Q.shape[0]), kk), y[nearest].ravel()), 1)
    # argmax returns the first maximum, i.e. the smallest label code
    winners = votes.argmax(axis=1)
    return np.array([classes[c] for c in winners])


def knn_predict(train, query, k=5):
    return knn_predict_batch(train, np.asarray(query)[None, :], k)[0]


def _euclidean_knn(train_X, train_y, Q, k):
    classes = sorted(set(train_y.tolist()), key=str)
    code = {lab: c for c, lab in enumerate(classes)}
    y = np.array([code[lab] for lab in train_y.tolist()])
    D = ((Q[:, None, :] - train_X[None, :, :]) ** 2).sum(axis=2)
    kk = min(k, len(y))
    nearest = np.argsort(D, axis=1, kind="stable")[:, :kk]
    votes = np.zeros((Q.shape[0], len(classes)), dtype=np.int64)
    np.add.at(votes, (np.repeat(np.arange(Q.shape[0]), kk), y[nearest].ravel()), 1)
    return np.array([classes[c] for c in votes.argmax(axis=1)])


@dataclass
class LinearHead:
    """Softmax regression over pre-shape vectors."""

    weights: np.ndarray
    bias: np.ndarray
    classes: list
    input_scale: float

    def logits(self, X):
        return (np.asarray(X) * self.input_scale) @ self.weights.T + self.bias

    def predict(self, X):
        return np.array([self.classes[c] for c in self.logits(X).argmax(axis=1)])


def _ce_grad(W, b, X, y, n_classes):
    logits = X @ W.T + b
    logits -= logits.max(axis=1, keepdims=True)
    P = np.exp(logits)
    P /= P.sum(axis=1, keepdims=True)
    n = X.shape[0]
    loss = -np.log(P[np.arange(n), y] + 1e-300).mean()
    P[np.arange(n), y] -= 1.0
    P /= n
    return loss, P.T @ X, P.sum(axis=0)


def train_linear_head(train_ps, train_aug=None, p_g=0.3, lam=0.5, epochs=300, lr=0.05, rng=None):
    """Train with the probabilistic mixed loss.

    Each epoch one Bernoulli draw decides the objective: with probability
    ``p_g`` it is cross-entropy on the projected originals alone, otherwise
    that plus ``lam`` times cross-entropy on the augmented set. Full-batch
    Adam from zero weights.
    """
    if not 0.0 <= p_g <= 1.0:
        raise ValueError("p_g must lie in [0, 1]")
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    if len(train_ps) == 0:
        raise EmptyTrainSet("linear head needs training data")
    rng = rng if rng is not None else np.random.default_rng(0)
    classes = train_ps.classes()
    if train_aug is not None and len(train_aug):
        extra = set(train_aug.classes()) - set(classes)
        if extra:
            raise LabelMismatch(f"augmented labels {sorted(extra, key=str)} absent from training set")
    code = {lab: c for c, lab in enumerate(classes)}
    D = train_ps.dim
    scale = math.sqrt(D)
    X = train_ps.vectors * scale
    y = np.array([code[lab] for lab in train_ps.labels.tolist()])
    has_aug = train_aug is not None and len(train_aug) > 0
    if has_aug:
        Xa = train_aug.vectors * scale
        ya = np.array([code[lab] for lab in train_aug.labels.tolist()])
    C = len(classes)
    params = [np.zeros((C, D)), np.zeros(C)]
    m1 = [np.zeros_like(p) for p in params]
    m2 = [np.zeros_like(p) for p in params]
    b1, b2, eps = 0.9, 0.999, 1e-8
    for step in range(1, epochs + 1):
        only_ps = rng.uniform() < p_g
        _, gW, gb = _ce_grad(params[0], params[1], X, y, C)
        if has_aug and not only_ps and lam > 0:
            _, gWa, gba = _ce_grad(params[0], params[1], Xa, ya, C)
            gW = gW + lam * gWa
            gb = gb + lam * gba
        for p, g, mm, vv in zip(params, (gW, gb), m1, m2):
            mm *= b1
            mm += (1 - b1) * g
            vv *= b2
            vv += (1 - b2) * g * g
            p -= lr * (mm / (1 - b1**step)) / (np.sqrt(vv / (1 - b2**step)) + eps)
    return LinearHead(params[0], params[1], classes, scale)


METHODS = ("none", "faagc", "mixup", "smote")
CLASSIFIERS = ("knn", "linear")


@dataclass(frozen=True)
class EvalConfig:
    method: str = "none"
    classifier: str = "knn"
    n: int = None  # augmented samples per class; None means n = m
    k: int = 5
    seeds: tuple = (0, 1, 2, 3, 4, 5)
    fit: FitConfig = field(default_factory=FitConfig)
    p_g: float = 0.3
    lam: float = 0.5
    head_epochs: int = 300
    head_lr: float = 0.05
    threads: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.classifier not in CLASSIFIERS:
            raise ValueError(f"classifier must be one of {CLASSIFIERS}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if len(self.seeds) < 1:
            raise ValueError("at least one seed is required")

    @property
    def use_faagc(self):
        return self.method == "faagc"

    def echo(self):
        d = asdict(self)
        d["seeds"] = list(self.seeds)
        return d


@dataclass
class EvalReport:
    accuracies: list
    seeds: list
    method: str
    classifier: str
    k: int
    n: int
    m: int
    config: dict
    raw_accuracies: list = None

    @property
    def mean(self):
        return float(np.mean(self.accuracies))

    @property
    def std(self):
        return float(np.std(self.accuracies))

    def as_dict(self):
        out = {
            "schema": "geocurve.eval/1",
            "method": self.method,
            "classifier": self.classifier,
            "k": self.k,
            "n": self.n,
            "m": self.m,
            "seeds": list(self.seeds),
            "accuracies": list(self.accuracies),
            "mean": self.mean,
            "std": self.std,
            "config": self.config,
        }
        if self.raw_accuracies is not None:
            out["raw_knn"] = {
                "accuracies": list(self.raw_accuracies),
                "mean": float(np.mean(self.raw_accuracies)),
                "std": float(np.std(self.raw_accuracies)),
            }
        return out

    def csv_rows(self):
        rows = [(s, self.method, self.classifier, a) for s, a in zip(self.seeds, self.accuracies)]
        if self.raw_accuracies is not None:
            rows += [(s, "none-raw", self.classifier, a) for s, a in zip(self.seeds, self.raw_accuracies)]
        return rows


def _per_class_m(train):
    counts = train.counts()
    return min(counts.values())


def evaluate(train_raw, test_raw, config=None, curve_cache=None):
    """Per-seed train/evaluate runs, aggregated.

    Training and test features are projected to pre-shape space. For
    ``method="faagc"`` one curve per class is fitted with the seed folded
    into the fit config; ``curve_cache`` (a dict, keyed by seed) lets
    several calls on the same training data share those fits.
    """
    config = config or EvalConfig()
    train_labels, test_labels = set(train_raw.classes()), set(test_raw.classes())
    if not test_labels <= train_labels:
        raise LabelMismatch(f"test labels {sorted(test_labels - train_labels, key=str)} not in training set")
    train_ps = LabeledFeatureSet(project_rows(train_raw.vectors), train_raw.labels, kind="preshape")
    test_ps = project_rows(test_raw.vectors)
    m = _per_class_m(train_raw)
    n = m if config.n is None else config.n

    accs, raw_accs = [], []
    for seed in config.seeds:
        if config.method == "none":
            aug = None
        elif config.method == "faagc":
            if curve_cache is not None and seed in curve_cache:
                curves = curve_cache[seed]
            else:
                curves = fit_all_classes(train_raw, replace(config.fit, seed=seed), threads=config.threads)
                if curve_cache is not None:
                    curve_cache[seed] = curves
            aug = augment_dataset(curves, n, seed=seed)
        else:
            pairing = "random" if config.method == "mixup" else "nearest"
            aug = interpolation_augment(train_ps, n, seed=seed, pairing=pairing)

        if config.classifier == "knn":
            train_set = train_ps if aug is None else train_ps.concat(aug)
            pred = knn_predict_batch(train_set, test_ps, config.k)
        else:
            head = train_linear_head(
                train_ps, aug, config.p_g, config.lam, config.head_epochs, config.head_lr,
                rng=np.random.default_rng(np.random.SeedSequence([seed, 3])),
            )
            pred = head.predict(test_ps)
        accs.append(float(np.mean(pred == test_raw.labels)))
        if config.method == "none" and config.classifier == "knn":
            raw_pred = _euclidean_knn(train_raw.vectors, train_raw.labels, test_raw.vectors, config.k)
            raw_accs.append(float(np.mean(raw_pred == test_raw.labels)))

    return EvalReport(
        accuracies=accs, seeds=list(config.seeds), method=config.method, classifier=config.classifier,
        k=config.k, n=n if config.method != "none" else 0, m=m, config=config.echo(),
        raw_accuracies=raw_accs or None,
    )
