import math
from fractions import Fraction as F

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from assouad.estimators import LocalDimensionEstimator, PointwiseAssouadEstimator


def test_pointwise_transform_shape(cantor_uniform):
    est = PointwiseAssouadEstimator(cantor_uniform, depth=12, min_gap=4).fit()
    out = est.transform(np.array([[0.0], [2 / 3]], dtype=object))
    assert out.shape == (2, 2)
    assert np.all(out[:, 0] <= out[:, 1])
    assert len(est.reports_) == 2 and est.profiles_[0].max_gap == 12


def test_fraction_inputs_are_kept_exact(cantor_uniform):
    est = PointwiseAssouadEstimator(cantor_uniform, depth=10, min_gap=3).fit()
    est.transform(np.array([[F(1, 4)]], dtype=object))
    assert est.reports_[0].witness["point"] == F(1, 4)


def test_local_dims_estimator(cantor_uniform):
    out = LocalDimensionEstimator(cantor_uniform, depth=20).fit_transform(np.array([[0.0]]))
    s = math.log(2) / math.log(3)
    assert out[0, 0] <= s + 0.05 and out[0, 1] >= s - 0.05


def test_params_and_clone(cantor_uniform):
    est = PointwiseAssouadEstimator(cantor_uniform, depth=9)
    assert est.get_params()["depth"] == 9
    c = clone(est).set_params(min_gap=2)
    # clone deep-copies non-estimator parameters
    assert c.min_gap == 2 and c.measure is not cantor_uniform
    assert c.measure.ball_measure(0, F(1, 3)) == cantor_uniform.ball_measure(0, F(1, 3))


def test_unfitted_and_bad_input(cantor_uniform):
    with pytest.raises(NotFittedError):
        PointwiseAssouadEstimator(cantor_uniform).transform([[0.0]])
    with pytest.raises(ValueError):
        PointwiseAssouadEstimator().fit()
    with pytest.raises(ValueError):
        LocalDimensionEstimator(cantor_uniform, depth=8).fit().transform([[0.0, 1.0]])
