"""
Tests for the 1-D two-component EM fit, checked against scikit-learn.
"""
import logging

import numpy as np
import pytest
from sklearn.mixture import GaussianMixture

from src.errors import DegenerateData
from src.labeler import gmm as gmm_module
from src.labeler.gmm import (
    LL_DECREASE_RTOL,
    Gmm1d,
    em_fit,
    gmm_posteriors,
    gmm_predict,
    gmm_predict_many,
    log_likelihood,
)
from src.labeler.labeler import LabelModel


def _two_clusters(seed, n=400):
    rng = np.random.default_rng(seed)
    sigma = rng.uniform(0.5, 2.0)
    mu0 = rng.uniform(-10, 10)
    mu1 = mu0 + rng.uniform(5, 10) * sigma
    w0 = rng.uniform(0.3, 0.7)
    n0 = int(n * w0)
    return np.concatenate([rng.normal(mu0, sigma, n0), rng.normal(mu1, sigma, n - n0)])


def test_point_masses():
    g = em_fit([-1.0] * 50 + [1.0] * 50)
    order = np.argsort(g.means)
    np.testing.assert_allclose(g.means[order], [-1.0, 1.0], atol=1e-6)
    np.testing.assert_allclose(g.weights, [0.5, 0.5], atol=1e-6)
    assert np.all(g.variances >= 1e-6)


def test_separated_gaussians():
    rng = np.random.default_rng(7)
    x = np.concatenate([rng.normal(0, 1, 500), rng.normal(10, 1, 500)])
    g = em_fit(x)
    np.testing.assert_allclose(np.sort(g.means), [0.0, 10.0], atol=0.2)


@pytest.mark.parametrize("data", [[3.0] * 20, [1.0, 2.0, 3.0]])
def test_degenerate_data(data):
    with pytest.raises(DegenerateData):
        em_fit(data)


@pytest.mark.parametrize("seed", range(20))
def test_matches_sklearn(seed):
    """Same mixture as GaussianMixture on well separated data."""
    x = _two_clusters(seed)
    ours = em_fit(x, tol=1e-10, max_iter=2000)
    ref = GaussianMixture(n_components=2, tol=1e-10, max_iter=2000, random_state=0).fit(x.reshape(-1, 1))

    ours_order = np.argsort(ours.means)
    ref_means = ref.means_.ravel()
    ref_order = np.argsort(ref_means)
    np.testing.assert_allclose(ours.means[ours_order], ref_means[ref_order], atol=0.2)
    np.testing.assert_allclose(ours.weights[ours_order], ref.weights_[ref_order], atol=0.05)


@pytest.mark.parametrize("seed", range(5))
def test_log_likelihood_never_decreases(seed):
    rng = np.random.default_rng(seed)
    x = np.concatenate([rng.normal(0, 1, 100), rng.normal(2, 0.5, 60)])
    g = em_fit(x, tol=1e-12, max_iter=500)
    trace = np.asarray(g.log_likelihood_trace)
    assert np.all(np.diff(trace) >= -LL_DECREASE_RTOL * np.maximum(1.0, np.abs(trace[:-1])))
    assert g.log_likelihood == pytest.approx(log_likelihood(g, x))


def test_likelihood_drop_stops_the_fit(monkeypatch, caplog):
    """An iteration that lowers the likelihood is discarded and the fit stops."""
    real = gmm_module._total_log_likelihood
    calls = []

    def sagging(log_p):
        calls.append(None)
        value = real(log_p)
        return value - 1e3 if len(calls) == 4 else value

    monkeypatch.setattr(gmm_module, "_total_log_likelihood", sagging)
    x = _two_clusters(3)
    with caplog.at_level(logging.WARNING, logger="src.labeler.gmm"):
        g = em_fit(x, tol=1e-12, max_iter=50)

    assert not g.converged
    assert g.n_iter == 3
    assert len(g.log_likelihood_trace) == 3
    assert list(g.log_likelihood_trace) == sorted(g.log_likelihood_trace)
    assert g.log_likelihood == pytest.approx(log_likelihood(g, x))
    assert "fell" in caplog.text


def test_predict_picks_dominant_component():
    g = Gmm1d(weights=np.array([0.5, 0.5]), means=np.array([0.0, 10.0]), variances=np.array([1.0, 1.0]))
    component, resp = gmm_predict(g, 9.0)
    assert component == 1 and resp > 0.99


def test_exact_tie_goes_to_component_zero():
    g = Gmm1d(weights=np.array([0.5, 0.5]), means=np.array([-1.0, 1.0]), variances=np.array([1.0, 1.0]))
    component, resp = gmm_predict(g, 0.0)
    assert component == 0
    assert resp == pytest.approx(0.5)


def test_posteriors_sum_to_one():
    g = em_fit(_two_clusters(3))
    post = gmm_posteriors(g, np.linspace(-20, 30, 101))
    np.testing.assert_allclose(post.sum(axis=1), 1.0)
    components, resp = gmm_predict_many(g, [0.0, 1.0])
    assert components.shape == (2,) and np.all(resp >= 0.5)


def test_labels_invariant_to_component_order():
    """Interference is the low-mean component whichever index it has."""
    x = np.concatenate([np.linspace(-2.0, -1.0, 40), np.linspace(1.0, 2.0, 40)])
    g = em_fit(x)
    swapped = g.permuted([1, 0])
    a = LabelModel(g, center=0.0, scale=1.0, interference_component=g.lowest_mean_component(), trained_end_idx=0)
    b = LabelModel(swapped, center=0.0, scale=1.0,
                   interference_component=swapped.lowest_mean_component(), trained_end_idx=0)
    probe = np.linspace(-3, 3, 61)
    assert a.predict(probe) == b.predict(probe)
