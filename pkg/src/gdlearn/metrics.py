"""Rescaled distance error and retrieval metrics (precision, recall, AP, MAP)."""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, StructuralError, UndefinedMetricError


@dataclass(frozen=True)
class ErrorReport:
    mean_abs_error: float
    per_point_abs_error: np.ndarray


@dataclass(frozen=True)
class RankingRelevance:
    """Binary relevance in rank order plus the number of relevant items overall."""

    relevance: np.ndarray
    total_relevant: int

    def __post_init__(self):
        rel = np.asarray(self.relevance).astype(np.int64)
        if rel.ndim != 1 or np.any((rel != 0) & (rel != 1)):
            raise ParameterError("relevance must be a binary vector")
        if rel.sum() > self.total_relevant:
            raise ParameterError("total_relevant is smaller than the relevant items listed")
        object.__setattr__(self, "relevance", rel)


def _values(x):
    return np.asarray(getattr(x, "values", x), dtype=float)


def rescale_unit(values):
    """Affine map of ``values`` onto ``[0, 1]`` (min to 0, max to 1)."""
    v = _values(values)
    lo, hi = v.min(), v.max()
    if not hi > lo:
        raise UndefinedMetricError("cannot rescale a constant vector")
    out = (v - lo) / (hi - lo)
    # pin the extremes; (hi - lo) / (hi - lo) is 1 but be explicit about it
    out[v == lo] = 0.0
    out[v == hi] = 1.0
    return out


def mean_abs_error(f, d):
    """Mean absolute difference after rescaling both fields to ``[0, 1]``."""
    f, d = _values(f), _values(d)
    if f.shape != d.shape:
        raise StructuralError(f"fields differ in length: {f.size} vs {d.size}")
    err = np.abs(rescale_unit(f) - rescale_unit(d))
    return ErrorReport(float(err.mean()), err)


def rank_relevance(distances, labels, q):
    """Relevance of every item except ``q``, ranked by ascending distance.

    Ties go to the lower index.
    """
    distances = _values(distances)
    labels = np.asarray(labels)
    order = np.argsort(distances, kind="stable")
    order = order[order != q]
    rel = (labels[order] == labels[q]).astype(np.int64)
    return RankingRelevance(rel, int(np.sum(labels == labels[q]) - 1))


def _check_scope(rel, scope):
    if int(scope) != scope or not 1 <= scope <= rel.relevance.size:
        raise ParameterError(f"scope must be in [1, {rel.relevance.size}], got {scope}")


def precision_at(rel, scope):
    _check_scope(rel, scope)
    return float(rel.relevance[:scope].sum() / scope)


def recall_at(rel, scope):
    _check_scope(rel, scope)
    if rel.total_relevant == 0:
        raise UndefinedMetricError("recall is undefined with no relevant items")
    return float(rel.relevance[:scope].sum() / rel.total_relevant)


def precision_curve(rel):
    """Precision at every scope ``1..len``."""
    return np.cumsum(rel.relevance) / np.arange(1, rel.relevance.size + 1)


def average_precision(rel):
    if rel.total_relevant == 0:
        raise UndefinedMetricError("average precision is undefined with no relevant items")
    return float(np.sum(rel.relevance * precision_curve(rel)) / rel.total_relevant)


def mean_average_precision(rels):
    """Mean of the APs; queries without relevant items are skipped with a warning."""
    aps = []
    skipped = 0
    for rel in rels:
        if rel.total_relevant == 0:
            skipped += 1
            continue
        aps.append(average_precision(rel))
    if skipped:
        warnings.warn(f"skipped {skipped} queries with no relevant items", stacklevel=2)
    if not aps:
        raise UndefinedMetricError("no query has a relevant item")
    return float(np.mean(aps))
