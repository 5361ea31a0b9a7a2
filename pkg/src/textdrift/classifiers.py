"""Native classical text classifiers over tf-idf / count features.

Multinomial Naive Bayes has a closed form; the two linear models (logistic
regression on log-loss, linear SVM on hinge loss) share one SGD loop with L2
regularization. Binary labels only, matching the evaluation tasks. All
training is deterministic for a given seed, and models serialize to a
versioned JSON document with parameters as decimal strings.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import Document
from .errors import (
    DegenerateTrainingError,
    DivergenceError,
    EmptyVocabularyError,
    ShapeError,
    UnsupportedLabelError,
    ValidationError,
)
from .vocab import tokenize

MODEL_FORMAT = "textdrift.model"
MODEL_VERSION = 1


class ModelKind(enum.Enum):
    MULTINOMIAL_NB = "multinomial_nb"
    LOGISTIC_REGRESSION = "logistic_regression"
    LINEAR_SVM = "linear_svm"


@dataclass(frozen=True)
class TfidfVectorizer:
    """Vocabulary + idf weights fitted on one training year.

    idf(t) = ln((1 + D) / (1 + df(t))) + 1; transform applies tf x idf and
    L2-normalizes each document vector. Out-of-vocabulary terms are dropped.
    """

    vocabulary: dict[str, int]
    idf: np.ndarray
    fitted_on_year: int | None = None

    @property
    def n_terms(self) -> int:
        return len(self.vocabulary)

    def counts(self, docs: Sequence[Document | str]) -> np.ndarray:
        """Raw term-count matrix over the fitted vocabulary."""
        matrix = np.zeros((len(docs), self.n_terms), dtype=np.float64)
        for row, doc in enumerate(docs):
            text = doc.text if isinstance(doc, Document) else doc
            for token in tokenize(text):
                col = self.vocabulary.get(token)
                if col is not None:
                    matrix[row, col] += 1.0
        return matrix

    def transform(self, docs: Sequence[Document | str]) -> np.ndarray:
        """L2-normalized tf-idf matrix; all-OOV documents become zero rows."""
        matrix = self.counts(docs) * self.idf
        norms = np.linalg.norm(matrix, axis=1, keepdims=True)
        norms[norms == 0.0] = 1.0
        return matrix / norms


def fit_tfidf(train: Sequence[Document | str], year: int | None = None) -> TfidfVectorizer:
    """Build vocabulary and idf weights from training documents."""
    if not train:
        raise ValidationError("cannot fit a vectorizer on an empty training set")
    df: dict[str, int] = {}
    for doc in train:
        text = doc.text if isinstance(doc, Document) else doc
        for token in set(tokenize(text)):
            df[token] = df.get(token, 0) + 1
    if not df:
        raise EmptyVocabularyError("training documents contain no tokens")
    vocabulary = {term: i for i, term in enumerate(sorted(df))}
    n_docs = len(train)
    idf = np.empty(len(vocabulary), dtype=np.float64)
    for term, col in vocabulary.items():
        idf[col] = np.log((1 + n_docs) / (1 + df[term])) + 1.0
    return TfidfVectorizer(vocabulary=vocabulary, idf=idf, fitted_on_year=year)


@dataclass(frozen=True)
class LinearConfig:
    learning_rate: float = 0.01
    l2: float = 1e-4
    epochs: int = 100
    seed: int = 42


@dataclass(frozen=True)
class TrainedModel:
    """Parameters of one fitted classifier.

    NB carries class log-priors and per-class feature log-likelihoods; the
    linear models carry a weight vector and bias. ``label_order`` fixes the
    gold order for ties and sign mapping.
    """

    kind: ModelKind
    label_order: tuple[str, ...]
    train_year: int | None = None
    class_log_prior: np.ndarray | None = None
    feature_log_prob: np.ndarray | None = None
    weights: np.ndarray | None = None
    bias: float | None = None

    @property
    def n_features(self) -> int:
        if self.kind is ModelKind.MULTINOMIAL_NB:
            return self.feature_log_prob.shape[1]
        return self.weights.shape[0]


def _label_order(labels: Sequence[str]) -> tuple[str, ...]:
    return tuple(sorted(set(labels)))


def train_mnb(
    features: np.ndarray,
    labels: Sequence[str],
    alpha: float = 1.0,
    train_year: int | None = None,
) -> TrainedModel:
    """Multinomial Naive Bayes with add-alpha smoothing.

    Accepts fractional feature values (a generalized multinomial), so it
    works on raw counts and on tf-idf rows alike.
    """
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape[0] != len(labels):
        raise ShapeError("features must be (n_docs, n_terms) matching labels")
    if alpha <= 0:
        raise ValidationError("alpha must be positive")
    order = _label_order(labels)
    if len(order) < 2:
        raise DegenerateTrainingError("training set contains a single class")
    index = {label: i for i, label in enumerate(order)}
    y = np.array([index[l] for l in labels])
    n_classes, n_terms = len(order), features.shape[1]
    prior = np.empty(n_classes)
    log_prob = np.empty((n_classes, n_terms))
    for c in range(n_classes):
        rows = features[y == c]
        prior[c] = np.log(rows.shape[0] / features.shape[0])
        term_mass = rows.sum(axis=0)
        log_prob[c] = np.log(term_mass + alpha) - np.log(term_mass.sum() + alpha * n_terms)
    return TrainedModel(
        kind=ModelKind.MULTINOMIAL_NB,
        label_order=order,
        train_year=train_year,
        class_log_prior=prior,
        feature_log_prob=log_prob,
    )


def _sigmoid(z: np.ndarray | float) -> np.ndarray | float:
    return np.where(z >= 0, 1.0 / (1.0 + np.exp(-z)), np.exp(z) / (1.0 + np.exp(z)))


def log_loss_and_grad(
    weights: np.ndarray,
    bias: float,
    features: np.ndarray,
    targets: np.ndarray,
    l2: float,
) -> tuple[float, np.ndarray, float]:
    """Full-batch L2-regularized log-loss and its exact gradient.

    ``targets`` are 0/1. The SGD loop below follows the per-sample version
    of this same gradient; this batch form exists for verification.
    """
    z = features @ weights + bias
    loss = float(np.mean(np.logaddexp(0.0, z) - targets * z) + 0.5 * l2 * weights @ weights)
    residual = _sigmoid(z) - targets
    grad_w = features.T @ residual / len(targets) + l2 * weights
    grad_b = float(np.mean(residual))
    return loss, grad_w, grad_b


def train_linear(
    kind: ModelKind,
    features: np.ndarray,
    labels: Sequence[str],
    config: LinearConfig = LinearConfig(),
    train_year: int | None = None,
) -> TrainedModel:
    """SGD on log-loss (logistic regression) or hinge loss (linear SVM).

    Binary labels only. Per-epoch shuffling is deterministic for the seed;
    the L2 penalty applies on every update, never to the bias.
    """
    if kind not in (ModelKind.LOGISTIC_REGRESSION, ModelKind.LINEAR_SVM):
        raise ValidationError(f"not a linear model kind: {kind}")
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape[0] != len(labels):
        raise ShapeError("features must be (n_docs, n_terms) matching labels")
    order = _label_order(labels)
    if len(order) != 2:
        raise UnsupportedLabelError(f"linear models are binary; got labels {list(order)}")
    y01 = np.array([1.0 if l == order[1] else 0.0 for l in labels])
    y_sign = 2.0 * y01 - 1.0
    n_docs, n_terms = features.shape
    weights = np.zeros(n_terms)
    bias = 0.0
    lr, l2 = config.learning_rate, config.l2
    rng = np.random.RandomState(config.seed)
    for _ in range(config.epochs):
        for i in rng.permutation(n_docs):
            x = features[i]
            z = x @ weights + bias
            if kind is ModelKind.LOGISTIC_REGRESSION:
                residual = float(_sigmoid(z)) - y01[i]
                weights -= lr * (residual * x + l2 * weights)
                bias -= lr * residual
            else:
                if y_sign[i] * z < 1.0:
                    weights -= lr * (-y_sign[i] * x + l2 * weights)
                    bias -= lr * (-y_sign[i])
                else:
                    weights -= lr * l2 * weights
        if not (np.all(np.isfinite(weights)) and np.isfinite(bias)):
            raise DivergenceError("non-finite parameters during SGD")
    return TrainedModel(
        kind=kind,
        label_order=order,
        train_year=train_year,
        weights=weights,
        bias=bias,
    )


def _check_features(model: TrainedModel, features: np.ndarray) -> np.ndarray:
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape[1] != model.n_features:
        raise ShapeError(
            f"feature matrix has {features.shape[-1] if features.ndim else 0} columns, "
            f"model expects {model.n_features}"
        )
    return features


def decision_scores(model: TrainedModel, features: np.ndarray) -> np.ndarray:
    """Positive-class posterior (NB) or signed margin (linear models)."""
    features = _check_features(model, features)
    if model.kind is ModelKind.MULTINOMIAL_NB:
        return predict_proba(model, features)[:, -1]
    return features @ model.weights + model.bias


def predict_proba(model: TrainedModel, features: np.ndarray) -> np.ndarray:
    """NB class posteriors, rows summing to 1."""
    if model.kind is not ModelKind.MULTINOMIAL_NB:
        raise ValidationError("posteriors are defined for the NB model only")
    features = _check_features(model, features)
    joint = model.class_log_prior + features @ model.feature_log_prob.T
    joint -= joint.max(axis=1, keepdims=True)
    with np.errstate(under="ignore"):
        probs = np.exp(joint)
    return probs / probs.sum(axis=1, keepdims=True)


def predict(model: TrainedModel, features: np.ndarray) -> list[str]:
    """Labels for a feature matrix; ties go to the first label in order."""
    features = _check_features(model, features)
    if model.kind is ModelKind.MULTINOMIAL_NB:
        joint = model.class_log_prior + features @ model.feature_log_prob.T
        picks = np.argmax(joint, axis=1)  # first max wins ties
        return [model.label_order[i] for i in picks]
    scores = features @ model.weights + model.bias
    return [model.label_order[1] if s > 0 else model.label_order[0] for s in scores]


def _floats_to_strings(values: np.ndarray) -> list:
    if values.ndim == 1:
        return [repr(float(v)) for v in values]
    return [_floats_to_strings(row) for row in values]


def _strings_to_floats(values: list) -> np.ndarray:
    return np.array(values, dtype=np.float64)


def save_model(path: str | Path, model: TrainedModel, vectorizer: TfidfVectorizer) -> None:
    """Write model + vectorizer as a versioned JSON document."""
    doc: dict = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "kind": model.kind.value,
        "label_order": list(model.label_order),
        "train_year": model.train_year,
        "vocabulary": sorted(vectorizer.vocabulary, key=vectorizer.vocabulary.get),
        "idf": _floats_to_strings(vectorizer.idf),
    }
    if model.kind is ModelKind.MULTINOMIAL_NB:
        doc["class_log_prior"] = _floats_to_strings(model.class_log_prior)
        doc["feature_log_prob"] = _floats_to_strings(model.feature_log_prob)
    else:
        doc["weights"] = _floats_to_strings(model.weights)
        doc["bias"] = repr(float(model.bias))
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(doc, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path: str | Path) -> tuple[TrainedModel, TfidfVectorizer]:
    with Path(path).open("r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != MODEL_FORMAT:
        raise ValidationError(f"not a {MODEL_FORMAT} document")
    if doc.get("version") != MODEL_VERSION:
        raise ValidationError(f"unsupported model version {doc.get('version')}")
    vectorizer = TfidfVectorizer(
        vocabulary={term: i for i, term in enumerate(doc["vocabulary"])},
        idf=_strings_to_floats(doc["idf"]),
        fitted_on_year=doc.get("train_year"),
    )
    kind = ModelKind(doc["kind"])
    common = dict(
        kind=kind,
        label_order=tuple(doc["label_order"]),
        train_year=doc.get("train_year"),
    )
    if kind is ModelKind.MULTINOMIAL_NB:
        model = TrainedModel(
            **common,
            class_log_prior=_strings_to_floats(doc["class_log_prior"]),
            feature_log_prob=_strings_to_floats(doc["feature_log_prob"]),
        )
    else:
        model = TrainedModel(
            **common,
            weights=_strings_to_floats(doc["weights"]),
            bias=float(doc["bias"]),
        )
    return model, vectorizer
