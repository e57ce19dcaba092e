"""Scikit-learn style adapter around the separation pipeline.

The separation itself is stateless per record, so `fit` runs the pipeline
on the given record and stores the outcome, and `transform` returns the
separated components as columns.  Calling `transform` with the fitted
record reuses the stored result; any other record is separated afresh with
the same settings.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .core import SampledSignal
from .errors import InvalidParameterError
from .pipeline import separate


def _as_record(X):
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise InvalidParameterError("X must be a single record: a 1-D array or an (n, 1) column")
    return arr


class AdaptiveSignalSeparator(BaseEstimator, TransformerMixin):
    """Separate a sampled record into oscillatory components.

    Parameters mirror the pipeline entry point: `sample_rate` is required
    at fit time, `config` is an optional AssoConfig, and `start_time`
    places the first sample on the time axis.
    """

    def __init__(self, sample_rate=None, config=None, start_time=0.0):
        self.sample_rate = sample_rate
        self.config = config
        self.start_time = start_time

    def _separate(self, X):
        if self.sample_rate is None:
            raise InvalidParameterError("sample_rate must be set before fitting")
        record = SampledSignal(_as_record(X), float(self.sample_rate), float(self.start_time))
        return separate(record, self.config)

    def fit(self, X, y=None):
        result = self._separate(X)
        self.result_ = result
        self.components_ = list(result.components)
        self.n_components_ = result.n_components
        self.trend_ = result.trend
        self.residual_ = result.residual
        self.stopping_reason_ = result.stopping_reason
        return self

    def transform(self, X):
        check_is_fitted(self, "result_")
        arr = _as_record(X)
        fitted = self.result_.signal.samples
        if arr.shape == fitted.shape and np.array_equal(arr, fitted):
            result = self.result_
        else:
            result = self._separate(arr)
        return result.component_matrix().T

    def fit_transform(self, X, y=None):
        return self.fit(X, y).transform(X)
