"""Deviation bounds, moment inequalities and sup-norm checks for selector sums.

Everything here concerns sums of centered selectors eta_j = xi_j - tau with
xi_j independent Bernoulli(tau).  The checks are two-sided: closed-form
bounds on one side, exact enumeration or Monte Carlo on the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

_CHUNK_ROWS = 4096


def _as_weights(a):
    w = np.asarray(a, dtype=np.complex128).ravel()
    if w.size == 0:
        raise ValueError("weight vector must be nonempty")
    return w


def selector_sigma(tau, weights):
    """Standard deviation of sum a_j eta_j: sigma^2 = tau(1-tau) sum |a_j|^2."""
    w = _as_weights(weights)
    return math.sqrt(tau * (1.0 - tau) * float(np.sum(np.abs(w) ** 2)))


@dataclass(frozen=True)
class DeviationCheck:
    lambda_grid: tuple
    exceed_freq: np.ndarray
    bound: np.ndarray
    condition_ok: np.ndarray
    sigma: float
    trials: int

    def slack(self):
        """Four-sigma sampling slack for each exceedance frequency."""
        b = np.clip(self.bound, 0.0, 1.0)
        return 4.0 * np.sqrt(b * (1.0 - b) / self.trials)


def ldt_empirical(weights, tau, lambda_grid, trials, seed):
    """Empirical tail of |sum a_j eta_j| against the bound 4 exp(-lambda^2 / 8).

    The bound is stated under the smallness condition max_j lambda |a_j| <=
    4 sigma, recorded per lambda in condition_ok.
    """
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must lie in (0, 1), got {tau}")
    w = _as_weights(weights)
    lam = np.asarray(lambda_grid, dtype=float)
    sigma = selector_sigma(tau, w)
    n = w.size
    exceed = np.zeros(lam.size, dtype=np.int64)
    done = 0
    while done < trials:
        rows = min(_CHUNK_ROWS, trials - done)
        rng_chunk = seed.generator(done) if hasattr(seed, "generator") else seed
        eta = (rng_chunk.random((rows, n)) < tau).astype(float) - tau
        sums = np.abs(eta @ w)
        exceed += np.count_nonzero(sums[:, None] > lam[None, :] * sigma, axis=0)
        done += rows
    peak = float(np.abs(w).max())
    return DeviationCheck(
        lambda_grid=tuple(float(x) for x in lam),
        exceed_freq=exceed / float(trials),
        bound=4.0 * np.exp(-(lam ** 2) / 8.0),
        condition_ok=lam * peak <= 4.0 * sigma,
        sigma=sigma,
        trials=int(trials),
    )


@dataclass(frozen=True)
class MgfCheck:
    tau_grid: tuple
    x_grid: tuple
    ok: np.ndarray          # shape (len(tau_grid), len(x_grid))
    probe_x: np.ndarray     # tau^{-1/2} per tau
    probe_holds: np.ndarray


def mgf_inequality_check(tau_grid, x_grid):
    """Check tau e^{(1-tau)x} + (1-tau) e^{-tau x} <= e^{2 tau (1-tau) x^2}.

    The inequality holds on |x| <= 1 but is a small-x statement: at the probe
    x = tau^{-1/2} it fails for small tau, which the result records.
    """
    taus = np.asarray(tau_grid, dtype=float)
    xs = np.asarray(x_grid, dtype=float)
    if np.any(taus <= 0.0) or np.any(taus >= 1.0):
        raise ValueError("tau grid must lie strictly inside (0, 1)")
    t = taus[:, None]
    x = xs[None, :]
    lhs = t * np.exp((1.0 - t) * x) + (1.0 - t) * np.exp(-t * x)
    rhs = np.exp(2.0 * t * (1.0 - t) * x ** 2)
    probe = taus ** -0.5
    probe_lhs = taus * np.exp((1.0 - taus) * probe) + (1.0 - taus) * np.exp(-taus * probe)
    probe_rhs = np.exp(2.0 * taus * (1.0 - taus) * probe ** 2)
    return MgfCheck(
        tau_grid=tuple(float(v) for v in taus),
        x_grid=tuple(float(v) for v in xs),
        ok=lhs <= rhs * (1.0 + 1e-12),
        probe_x=probe,
        probe_holds=probe_lhs <= probe_rhs * (1.0 + 1e-12),
    )


@dataclass(frozen=True)
class MomentBound:
    exact: float
    bound: float
    ok: bool
    log_exact: float
    log_bound: float


def moment_bound_check(n, tau, q):
    """Exact binomial moment E[(sum xi_j)^q] against the bound (q + e tau n)^q.

    The exact moment sum_l C(n,l) l^q tau^l (1-tau)^(n-l) is accumulated in
    log space so large n and q do not overflow.
    """
    if n < 1 or q < 1:
        raise ValueError("n and q must be positive integers")
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"tau must lie in (0, 1], got {tau}")
    ls = np.arange(1, n + 1, dtype=float)
    log_terms = (
        gammaln(n + 1) - gammaln(ls + 1) - gammaln(n - ls + 1)
        + q * np.log(ls) + ls * math.log(tau)
    )
    if tau < 1.0:
        log_terms = log_terms + (n - ls) * math.log1p(-tau)
    log_exact = float(logsumexp(log_terms))
    log_bound = q * math.log(q + math.e * tau * n)
    return MomentBound(
        exact=float(np.exp(log_exact)),
        bound=float(np.exp(log_bound)),
        ok=log_exact <= log_bound + 1e-12,
        log_exact=log_exact,
        log_bound=log_bound,
    )


def centered_square_second_moment(tau):
    """Exact E|eta^2 - E eta^2|^2 for eta = xi - tau: tau(1-tau)(1-2tau)^2.

    Comparable to tau(1-tau) only away from tau = 1/2, where eta^2 becomes
    deterministic and the moment vanishes.
    """
    return tau * (1.0 - tau) * (1.0 - 2.0 * tau) ** 2


@dataclass(frozen=True)
class SupNormCheck:
    skipped: bool
    reason: str
    violations: int
    trials: int
    sigma: float
    threshold: float
    sup_max: float


def salem_zygmund_check(n, tau, weights, trials, seed, grid_factor=4, threshold_factor=20.0):
    """Count trials where sup_theta |sum a_j eta_j e(j theta)| beats the bound.

    The bound threshold_factor * sigma * sqrt(log n) needs two size
    conditions: 10 max_j |a_j|^2 log n <= sigma^2 and 10 <= tau(1-tau) n log n.
    If either fails the check is skipped with a diagnostic instead of
    reporting a vacuous count.  The sup is taken over a grid of grid_factor*n
    points (power-of-two padded).
    """
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must lie in (0, 1), got {tau}")
    w = _as_weights(weights)
    if w.size != n:
        raise ValueError(f"expected {n} weights, got {w.size}")
    sigma2 = tau * (1.0 - tau) * float(np.sum(np.abs(w) ** 2))
    logn = math.log(n)
    peak2 = float(np.max(np.abs(w) ** 2))
    if 10.0 * peak2 * logn > sigma2:
        return SupNormCheck(True, "weight too concentrated for the sup-norm bound",
                            0, 0, math.sqrt(sigma2), 0.0, 0.0)
    if 10.0 > tau * (1.0 - tau) * n * logn:
        return SupNormCheck(True, "tau(1-tau) n log n too small for the sup-norm bound",
                            0, 0, math.sqrt(sigma2), 0.0, 0.0)
    m = 1
    while m < grid_factor * n:
        m *= 2
    sigma = math.sqrt(sigma2)
    threshold = threshold_factor * sigma * math.sqrt(logn)
    violations = 0
    sup_max = 0.0
    done = 0
    rows_cap = max(1, (1 << 23) // m)
    while done < trials:
        rows = min(rows_cap, trials - done)
        rng_chunk = seed.generator(done) if hasattr(seed, "generator") else seed
        eta = (rng_chunk.random((rows, n)) < tau).astype(float) - tau
        dense = np.zeros((rows, m), dtype=np.complex128)
        dense[:, 1: n + 1] = eta * w[None, :]
        sup = np.abs(m * np.fft.ifft(dense, axis=1)).max(axis=1)
        violations += int(np.count_nonzero(sup > threshold))
        sup_max = max(sup_max, float(sup.max()))
        done += rows
    return SupNormCheck(False, "", violations, int(trials), sigma, threshold, sup_max)


def perturbed_ap_sup_constant(b, a, length, s, trials, seed):
    """Measured constant in the sup bound for centered jittered progressions.

    For the mean-zero polynomial T = f_S - E f_S of a jittered progression,
    returns max over trials of ||T||_inf / (sqrt(L) sqrt(log(s + L))), the
    constant the sup-norm bound controls.  Reported, not asserted.
    """
    from .setgen import gen_perturbed_ap, perturbed_ap_base

    n = b + a * (length - 1) + s
    m = 1
    while m < 4 * (n + 1):
        m *= 2
    base = perturbed_ap_base(b, a, length)
    mean_dense = np.zeros(m, dtype=np.complex128)
    width = 2 * s + 1
    for j in base:
        mean_dense[j - s: j + s + 1] += 1.0 / width
    mean_poly = m * np.fft.ifft(mean_dense)
    scale = math.sqrt(length) * math.sqrt(math.log(s + length))
    worst = 0.0
    for trial in range(trials):
        fset = gen_perturbed_ap(n, b, a, length, s, seed, trial)
        dense = np.zeros(m, dtype=np.complex128)
        dense[fset.as_array()] = 1.0
        poly = m * np.fft.ifft(dense)
        worst = max(worst, float(np.abs(poly - mean_poly).max()) / scale)
    return worst
