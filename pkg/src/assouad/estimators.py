"""scikit-learn style wrappers around the per-point estimators.

Samples are points (one column).  ``fit`` only records the measure handle;
``transform`` returns one row of estimates per point.  Exact inputs (object
arrays of Fractions) stay exact; floats are converted to their binary
rationals.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .dims import estimate_local_dims, estimate_pointwise_assouad

__all__ = ["PointwiseAssouadEstimator", "LocalDimensionEstimator"]


def _points(X):
    X = check_array(X, dtype=None, ensure_all_finite=False)
    if X.shape[1] != 1:
        raise ValueError(f"expected one column of points, got {X.shape[1]}")
    out = []
    for v in X[:, 0]:
        out.append(v if isinstance(v, Fraction) else Fraction(float(v)))
    return out


class PointwiseAssouadEstimator(TransformerMixin, BaseEstimator):
    """Rows (theta_lo, theta_hi) at the largest gap."""

    def __init__(self, measure=None, depth=24, min_gap=8, base=2, threads=None):
        self.measure = measure
        self.depth = depth
        self.min_gap = min_gap
        self.base = base
        self.threads = threads

    def fit(self, X=None, y=None):
        if self.measure is None:
            raise ValueError("measure is required")
        self.measure_ = self.measure
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "measure_")
        rows, self.reports_, self.profiles_ = [], [], []
        for x in _points(X):
            prof, rep = estimate_pointwise_assouad(self.measure_, x, self.depth, self.min_gap,
                                                   self.base, self.threads)
            self.profiles_.append(prof)
            self.reports_.append(rep)
            rows.append((float(rep.enclosure.lo), float(rep.enclosure.hi)))
        return np.array(rows, dtype=float).reshape(-1, 2)


class LocalDimensionEstimator(TransformerMixin, BaseEstimator):
    """Rows (lower local, upper local) from the last ``tail`` of dyadic scales."""

    def __init__(self, measure=None, depth=24, tail=0.25, threads=None):
        self.measure = measure
        self.depth = depth
        self.tail = tail
        self.threads = threads

    def fit(self, X=None, y=None):
        if self.measure is None:
            raise ValueError("measure is required")
        self.measure_ = self.measure
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "measure_")
        rows = []
        for x in _points(X):
            ld = estimate_local_dims(self.measure_, x, self.depth, self.tail, self.threads)
            rows.append((ld.lower, ld.upper))
        return np.array(rows, dtype=float).reshape(-1, 2)
