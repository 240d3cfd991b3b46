"""Post-hoc analyses: per-question features, OLS regression of F1 on those
features, and question-type bucketing of F1 gains."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .annotate import SentenceSplitter, tokenize
from .dataset import jaccard

logger = logging.getLogger(__name__)

FEATURE_NAMES = (
    "overlap_q_answer_sentence",
    "overlap_q_passage",
    "answer_len",
    "question_len",
    "passage_len",
    "q_rarity",
    "p_rarity",
    "intercept",
)

WH_BUCKETS = ("what", "which", "where", "when", "who", "why", "how", "other")
COARSE_LABELS = ("ABBR", "ENTY", "DESC", "HUM", "LOC", "NUM")


class SingularityError(Exception):
    """Design matrix is rank deficient."""


@dataclass
class RegressionFit:
    target: str
    feature_names: tuple[str, ...]
    coefficients: np.ndarray
    std_errors: np.ndarray
    r2: float
    n: int
    feature_means: np.ndarray | None = None
    feature_sds: np.ndarray | None = None


def _content_types(text: str) -> set[str]:
    return {
        t.lower for t in tokenize(text) if not t.is_stopword and any(c.isalnum() for c in t.text)
    }


def _word_tokens(text: str) -> list[str]:
    return [t.lower for t in tokenize(text) if any(c.isalnum() for c in t.text)]


def _rarity(text: str, counts: dict[str, int]) -> float:
    toks = [t.lower for t in tokenize(text) if not t.is_stopword and any(c.isalnum() for c in t.text)]
    if not toks:
        return 1.0
    return sum(1.0 / (1 + counts.get(t, 0)) for t in toks) / len(toks)


def _answer_sentence(passage: str, answer: str, splitter: SentenceSplitter) -> str:
    """Sentence of the passage containing the answer; if the answer string is
    not locatable, the sentence with the largest answer-token overlap."""
    sentences = splitter.split(passage) or [passage]
    pos = passage.find(answer)
    if pos >= 0:
        offset = 0
        for s, e in splitter.split_spans(passage):
            if s <= pos < e:
                return passage[s:e]
    ans_types = set(_word_tokens(answer))
    return max(sentences, key=lambda s: len(ans_types & set(_word_tokens(s))))


def extract_features(
    question: str,
    passage: str,
    answer: str,
    train_counts: dict[str, int] | None = None,
    splitter: SentenceSplitter | None = None,
) -> np.ndarray:
    """Feature vector in FEATURE_NAMES order (raw, not standardized)."""
    splitter = splitter or SentenceSplitter()
    counts = train_counts if train_counts is not None else {}
    q_types = _content_types(question)
    ans_sent = _answer_sentence(passage, answer, splitter)
    return np.array(
        [
            jaccard(q_types, _content_types(ans_sent)),
            jaccard(q_types, _content_types(passage)),
            max(1, len(tokenize(answer))),
            max(1, len(tokenize(question))),
            max(1, len(tokenize(passage))),
            _rarity(question, counts),
            _rarity(passage, counts),
            1.0,
        ]
    )


def zscore(X: np.ndarray, skip: tuple[int, ...] = ()) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Standardize columns to zero mean / unit sd; constant columns and the
    listed indices pass through. Returns (Z, means, sds)."""
    means = X.mean(axis=0)
    sds = X.std(axis=0, ddof=0)
    keep = np.zeros(X.shape[1], dtype=bool)
    keep[list(skip)] = True
    keep |= sds == 0
    Z = X.copy().astype(float)
    cols = ~keep
    Z[:, cols] = (X[:, cols] - means[cols]) / sds[cols]
    means = np.where(keep, 0.0, means)
    sds = np.where(keep, 1.0, sds)
    return Z, means, sds


def ols_fit(
    X: np.ndarray,
    y: np.ndarray,
    feature_names: tuple[str, ...] | None = None,
    target: str = "y",
) -> RegressionFit:
    """Least-squares fit with classical standard errors
    sqrt(diag(sigma^2 (X'X)^-1)), sigma^2 = RSS/(n-k)."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, k = X.shape
    names = tuple(feature_names) if feature_names else tuple(f"x{i}" for i in range(k))
    if n <= k:
        raise ValueError(f"need n > k (got n={n}, k={k})")
    rank = np.linalg.matrix_rank(X)
    if rank < k:
        _, r = np.linalg.qr(X)
        bad = [names[i] for i in range(k) if abs(r[i, i]) < 1e-10 * max(1.0, abs(r[0, 0]))]
        raise SingularityError(f"design matrix rank {rank} < {k}; collinear columns: {bad}")
    beta, _, _, _ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    rss = float(resid @ resid)
    sigma2 = rss / (n - k)
    cov = sigma2 * np.linalg.inv(X.T @ X)
    se = np.sqrt(np.diag(cov))
    tss = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - rss / tss if tss > 0 else 1.0
    return RegressionFit(target, names, beta, se, r2, n)


def fit_standardized(
    X: np.ndarray, y: np.ndarray, feature_names: tuple[str, ...], target: str = "y"
) -> RegressionFit:
    """z-score features (intercept untouched), then OLS; records means/sds."""
    icept = tuple(i for i, nm in enumerate(feature_names) if nm == "intercept")
    Z, means, sds = zscore(np.asarray(X, dtype=float), skip=icept)
    fit = ols_fit(Z, y, feature_names, target)
    fit.feature_means = means
    fit.feature_sds = sds
    return fit


def wh_bucket(question: str) -> str:
    toks = tokenize(question)
    first = toks[0].lower if toks else ""
    return first if first in WH_BUCKETS else "other"


@dataclass
class BucketGain:
    bucket: str
    n: int
    mean_gain: float | None
    ci_low: float | None
    ci_high: float | None


def type_gains(
    f1_a: dict[str, float],
    f1_b: dict[str, float],
    labels: dict[str, str],
    buckets: tuple[str, ...],
    n_boot: int = 1000,
    seed: int = 0,
) -> list[BucketGain]:
    """Per-bucket mean F1 gain (system a minus system b) with a seeded
    bootstrap 95% interval; both systems must cover identical qids."""
    if set(f1_a) != set(f1_b):
        raise ValueError("the two systems were not evaluated on identical qids")
    rng = np.random.default_rng(seed)
    out = []
    for bucket in buckets:
        qids = sorted(q for q in f1_a if labels.get(q) == bucket)
        if not qids:
            out.append(BucketGain(bucket, 0, None, None, None))
            continue
        gains = np.array([f1_a[q] - f1_b[q] for q in qids])
        boot_means = np.array(
            [gains[rng.integers(0, len(gains), len(gains))].mean() for _ in range(n_boot)]
        )
        lo, hi = np.percentile(boot_means, [2.5, 97.5])
        out.append(BucketGain(bucket, len(qids), float(gains.mean()), float(lo), float(hi)))
    return out


# keyword cues for the rule-based coarse question classifier
_LOC_CUES = {"city", "country", "state", "place", "located", "capital", "continent", "river", "mountain", "location"}
_NUM_CUES = {"year", "date", "number", "percentage", "percent", "population", "many", "much", "long", "old", "far", "tall", "temperature", "cost"}
_HUM_CUES = {"person", "people", "name", "author", "president", "leader", "inventor", "founder", "scientist", "king", "queen"}
_DESC_CUES = {"mean", "meaning", "definition", "describe", "description", "reason", "cause", "purpose"}
_ABBR_CUES = {"abbreviation", "acronym", "stand", "stands", "short"}


def classify_coarse_rules(question: str) -> str:
    """Deterministic wh-word + keyword mapping to a coarse TREC-style label."""
    toks = [t.lower for t in tokenize(question)]
    if not toks:
        return "DESC"
    types = set(toks)
    first = toks[0]
    if types & _ABBR_CUES:
        return "ABBR"
    if first in ("who", "whom", "whose"):
        return "HUM"
    if first == "where":
        return "LOC"
    if first == "when":
        return "NUM"
    if first == "why":
        return "DESC"
    if first == "how":
        second = toks[1] if len(toks) > 1 else ""
        if second in _NUM_CUES:
            return "NUM"
        return "DESC"
    if first in ("what", "which", "name"):
        if types & _LOC_CUES:
            return "LOC"
        if types & _NUM_CUES:
            return "NUM"
        if types & _HUM_CUES:
            return "HUM"
        if types & _DESC_CUES:
            return "DESC"
        return "ENTY"
    if types & _LOC_CUES:
        return "LOC"
    if types & _NUM_CUES:
        return "NUM"
    if types & _HUM_CUES:
        return "HUM"
    return "ENTY"


def train_coarse_classifier(examples: list[tuple[str, str]], model_path: str):
    """Fit a bag-of-words logistic-regression classifier on (label, question)
    pairs and persist it with joblib."""
    import joblib
    from sklearn.feature_extraction.text import CountVectorizer
    from sklearn.linear_model import LogisticRegression
    from sklearn.pipeline import Pipeline

    labels = [lab for lab, _ in examples]
    texts = [q for _, q in examples]
    pipe = Pipeline(
        [
            ("bow", CountVectorizer(lowercase=True, ngram_range=(1, 2))),
            ("lr", LogisticRegression(max_iter=1000)),
        ]
    )
    pipe.fit(texts, labels)
    joblib.dump(pipe, model_path)
    return pipe


def load_trec(path: str) -> list[tuple[str, str]]:
    """TREC question-classification format: "COARSE:fine question text"."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            label, _, rest = line.partition(" ")
            coarse = label.split(":", 1)[0]
            if coarse in COARSE_LABELS and rest:
                out.append((coarse, rest))
    return out


def classify_coarse(question: str, model: str = "rules") -> str:
    """Coarse question type; ``model`` is "rules" or a path to a trained
    classifier produced by train_coarse_classifier."""
    if model == "rules":
        return classify_coarse_rules(question)
    import os

    if not os.path.exists(model):
        raise FileNotFoundError(
            f"question-type model not found: {model!r}; train one with "
            "scripts/train_question_classifier.py or use model='rules'"
        )
    import joblib

    pipe = joblib.load(model)
    return str(pipe.predict([question])[0])


def build_token_counts(texts: list[str]) -> dict[str, int]:
    """Token frequency table (for the rarity features) from raw texts."""
    counts: Counter[str] = Counter()
    for text in texts:
        counts.update(_word_tokens(text))
    return dict(counts)
