"""
One-dimensional Gaussian mixture fitted by expectation-maximization.
"""
import logging
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from ..errors import DegenerateData

logger = logging.getLogger(__name__)

VARIANCE_FLOOR = 1e-6
_MIN_COMPONENT_MASS = 1e-12
LL_DECREASE_RTOL = 1e-9
_LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class Gmm1d:
    """
    Fitted mixture parameters plus fit diagnostics.

    `converged` is False when max_iter was reached first or an iteration
    lowered the log-likelihood; the parameters are then the best found so far.
    """
    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    log_likelihood: float = float("nan")
    n_iter: int = 0
    converged: bool = True
    log_likelihood_trace: Tuple[float, ...] = field(default=(), repr=False)

    @property
    def n_components(self) -> int:
        return len(self.weights)

    def lowest_mean_component(self) -> int:
        return int(np.argmin(self.means))

    def permuted(self, order: Sequence[int]) -> "Gmm1d":
        """Same mixture with components listed in a different order."""
        idx = np.asarray(order)
        return Gmm1d(self.weights[idx], self.means[idx], self.variances[idx],
                     self.log_likelihood, self.n_iter, self.converged,
                     self.log_likelihood_trace)


def _component_log_density(x: np.ndarray, g_weights: np.ndarray, means: np.ndarray,
                           variances: np.ndarray) -> np.ndarray:
    """log(w_k * N(x | mu_k, var_k)) with shape (n, k)."""
    diff = x[:, None] - means[None, :]
    return (np.log(g_weights)[None, :]
            - 0.5 * (_LOG_2PI + np.log(variances)[None, :] + diff * diff / variances[None, :]))


def _total_log_likelihood(log_p: np.ndarray) -> float:
    return float(np.sum(np.logaddexp.reduce(log_p, axis=1)))


def log_likelihood(g: Gmm1d, data: Sequence[float]) -> float:
    """Log-likelihood of data under a fitted mixture."""
    x = np.asarray(data, dtype=np.float64)
    return _total_log_likelihood(_component_log_density(x, g.weights, g.means, g.variances))


def bic(log_lik: float, n_params: int, n: int) -> float:
    """Bayesian information criterion, lower is better."""
    return -2.0 * log_lik + n_params * np.log(n)


def mixture_bic(g: Gmm1d, n: int) -> float:
    # k weights (k-1 free) + k means + k variances
    return bic(g.log_likelihood, 3 * g.n_components - 1, n)


def single_gaussian_bic(data: Sequence[float]) -> float:
    """BIC of the maximum-likelihood single Gaussian."""
    x = np.asarray(data, dtype=np.float64)
    var = max(float(np.var(x)), VARIANCE_FLOOR)
    log_lik = -0.5 * len(x) * (_LOG_2PI + np.log(var) + 1.0)
    return bic(log_lik, 2, len(x))


def em_fit(
    data: Sequence[float],
    k: int = 2,
    tol: float = 1e-6,
    max_iter: int = 200,
    variance_floor: float = VARIANCE_FLOOR,
) -> Gmm1d:
    """
    Fit a k-component 1-D mixture with EM.

    Initialization is deterministic: means at evenly spaced percentiles (25th and
    75th for k=2), equal weights, variances equal to the data variance.

    Args:
        data: Observations, at least 4 and not constant
        k: Number of components
        tol: Stop when the log-likelihood gain of one iteration is below this
        max_iter: Iteration cap
        variance_floor: Lower bound on every component variance

    Returns:
        Fitted mixture
    """
    x = np.asarray(data, dtype=np.float64)
    if x.size < 4:
        raise DegenerateData(f"need at least 4 points, got {x.size}")
    if float(np.std(x)) < 1e-9:
        raise DegenerateData("data is constant")

    n = x.size
    percentiles = [100.0 * (i + 0.5) / k for i in range(k)]
    means = np.percentile(x, percentiles).astype(np.float64)
    weights = np.full(k, 1.0 / k)
    variances = np.full(k, max(float(np.var(x)), variance_floor))

    log_p = _component_log_density(x, weights, means, variances)
    ll = _total_log_likelihood(log_p)
    trace = [ll]
    converged = False
    n_iter = 0

    for n_iter in range(1, max_iter + 1):
        previous = (weights, means, variances, log_p)

        # E-step
        log_norm = np.logaddexp.reduce(log_p, axis=1)
        resp = np.exp(log_p - log_norm[:, None])

        # M-step
        mass = np.maximum(resp.sum(axis=0), _MIN_COMPONENT_MASS)
        weights = mass / mass.sum()
        means = resp.T @ x / mass
        diff = x[:, None] - means[None, :]
        variances = np.maximum((resp * diff * diff).sum(axis=0) / mass, variance_floor)

        log_p = _component_log_density(x, weights, means, variances)
        new_ll = _total_log_likelihood(log_p)
        gain = new_ll - ll
        if gain < -LL_DECREASE_RTOL * max(1.0, abs(ll)):
            # returned parameters never score below an earlier iterate
            logger.warning(f"EM log-likelihood fell by {-gain:.3g} at iteration {n_iter}; stopping")
            weights, means, variances, log_p = previous
            break
        trace.append(new_ll)
        ll = new_ll
        if gain < tol:
            converged = True
            break

    if not converged:
        logger.debug(f"EM stopped unconverged after {n_iter} iterations (ll={ll:.4f})")

    return Gmm1d(
        weights=weights,
        means=means,
        variances=variances,
        log_likelihood=ll,
        n_iter=n_iter,
        converged=converged,
        log_likelihood_trace=tuple(trace),
    )


def gmm_posteriors(g: Gmm1d, xs: Sequence[float]) -> np.ndarray:
    """Posterior responsibilities, shape (n, k); rows sum to 1."""
    x = np.atleast_1d(np.asarray(xs, dtype=np.float64))
    log_p = _component_log_density(x, g.weights, g.means, g.variances)
    return np.exp(log_p - np.logaddexp.reduce(log_p, axis=1)[:, None])


def gmm_predict_many(g: Gmm1d, xs: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorized prediction.

    Returns:
        (components, responsibility of the chosen component)
    """
    post = gmm_posteriors(g, xs)
    # argmax returns the first maximum, so exact ties go to component 0
    components = np.argmax(post, axis=1)
    return components, post[np.arange(len(components)), components]


def gmm_predict(g: Gmm1d, x: float) -> Tuple[int, float]:
    """
    Assign one value to its most probable component.

    Returns:
        (component, posterior of that component)
    """
    components, resp = gmm_predict_many(g, [x])
    return int(components[0]), float(resp[0])
