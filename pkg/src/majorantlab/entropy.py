"""Gaussian mean widths, packing/covering counts and the dual volume bounds.

Norms enter through small oracle objects so the same machinery runs on l1,
l-infinity, Euclidean and trigonometric L^q norms of coefficient vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .expsum import GridSpec


@dataclass(frozen=True)
class NormOracle:
    """A norm on R^n: scalar evaluator plus an optional row-batch evaluator."""

    dimension: int
    name: str
    fn: object
    batch_fn: object = None

    def __call__(self, x):
        return float(self.fn(np.asarray(x, dtype=float)))

    def batch(self, rows):
        rows = np.asarray(rows, dtype=float)
        if self.batch_fn is not None:
            return np.asarray(self.batch_fn(rows), dtype=float)
        return np.array([self.fn(row) for row in rows], dtype=float)


def l1_oracle(n):
    return NormOracle(n, "l1", lambda x: np.sum(np.abs(x)),
                      lambda rows: np.sum(np.abs(rows), axis=1))


def l2_oracle(n):
    return NormOracle(n, "l2", lambda x: np.linalg.norm(x),
                      lambda rows: np.linalg.norm(rows, axis=1))


def linf_oracle(n):
    return NormOracle(n, "linf", lambda x: np.max(np.abs(x)),
                      lambda rows: np.max(np.abs(rows), axis=1))


def trig_lq_oracle(q, n, freqs=None):
    """Norm a -> ||sum_j a_j e(f_j theta)||_q with default frequencies 1..n."""
    if q < 1:
        raise ValueError("q must be at least 1")
    if freqs is None:
        freqs = np.arange(1, n + 1, dtype=np.int64)
    else:
        freqs = np.asarray(freqs, dtype=np.int64)
        if freqs.size != n:
            raise ValueError(f"expected {n} frequencies, got {freqs.size}")
    ambient = int(freqs.max())
    m = GridSpec.for_ambient(ambient).points
    basis = np.exp(2j * np.pi * np.outer(freqs, np.arange(m)) / m)

    def batch(rows):
        vals = rows @ basis
        return np.mean(np.abs(vals) ** q, axis=1) ** (1.0 / q)

    return NormOracle(n, f"trig_l{q}", lambda x: batch(x[None, :])[0], batch)


def check_norm_axioms(oracle, probes=32, seed=None, rel_tol=1e-9):
    """Spot-check homogeneity and the triangle inequality on random vectors."""
    rng = seed.generator(0) if hasattr(seed, "generator") else np.random.default_rng(seed)
    for _ in range(probes):
        x = rng.standard_normal(oracle.dimension)
        y = rng.standard_normal(oracle.dimension)
        c = rng.uniform(-3.0, 3.0)
        nx, ny = oracle(x), oracle(y)
        if abs(oracle(c * x) - abs(c) * nx) > rel_tol * max(1.0, abs(c) * nx):
            return False
        if oracle(x + y) > nx + ny + rel_tol * max(1.0, nx + ny):
            return False
    return True


def gaussian_norm_constant(n):
    """alpha_n = Gamma(n/2) / (Gamma((n+1)/2) sqrt(2)), via log-gamma.

    The reciprocal is the mean Euclidean length of a standard Gaussian
    vector, so alpha_n * sqrt(n) tends to 1 from above.
    """
    if n < 1:
        raise ValueError("n must be positive")
    return float(np.exp(gammaln(n / 2.0) - gammaln((n + 1) / 2.0)) / math.sqrt(2.0))


@dataclass(frozen=True)
class LevyMeanEstimate:
    mean: float
    std_error: float
    samples: int
    alpha_n: float


def levy_mean(oracle, samples, seed):
    """Spherical mean of the norm, estimated as alpha_n E||g|| over Gaussians.

    Scaling by alpha_n converts the Gaussian average into the average over
    the Euclidean unit sphere exactly, by polar factorization.
    """
    if samples < 2:
        raise ValueError("need at least 2 samples")
    n = oracle.dimension
    alpha = gaussian_norm_constant(n)
    rng = seed.generator(1) if hasattr(seed, "generator") else np.random.default_rng(seed)
    vals = np.empty(samples, dtype=float)
    done = 0
    rows_cap = max(1, (1 << 22) // max(n, 1))
    while done < samples:
        rows = min(rows_cap, samples - done)
        g = rng.standard_normal((rows, n))
        vals[done: done + rows] = oracle.batch(g)
        done += rows
    mean = float(vals.mean())
    sem = float(vals.std(ddof=1) / math.sqrt(samples))
    return LevyMeanEstimate(alpha * mean, alpha * sem, int(samples), alpha)


def dual_sudakov_rhs(mean_width, n, t, c=1.0):
    """log-covering bound c n (M/t)^2 for the ball pair (Euclidean into X)."""
    if t <= 0:
        raise ValueError("t must be positive")
    return c * n * (mean_width / t) ** 2


def _pairwise_scan(points, oracle, t):
    """Greedy maximal t-separated subset, scanning points in the given order."""
    centers = []
    for idx in range(len(points)):
        p = points[idx]
        if not centers:
            centers.append(idx)
            continue
        dists = oracle.batch(points[centers] - p[None, :])
        if np.all(dists >= t):
            centers.append(idx)
    return centers


def greedy_packing_cover(points, oracle, t):
    """Packing and covering counts of a finite point set at scale t.

    The scan builds a maximal t-separated subset; maximality makes the same
    centers a t-cover, which is then pruned of centers that cover nothing
    first.  Returns (packing_size, cover_size) with cover_size <=
    packing_size by construction.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2:
        raise ValueError("points must be a 2-d array (count, dimension)")
    if len(points) > 10 ** 4:
        raise ValueError("point set too large for exhaustive pairwise distances")
    if t <= 0:
        raise ValueError("t must be positive")
    centers = _pairwise_scan(points, oracle, t)
    covered = np.zeros(len(points), dtype=bool)
    kept = 0
    for c in centers:
        within = oracle.batch(points - points[c][None, :]) < t
        gain = within & ~covered
        if gain.any():
            kept += 1
            covered |= within
    # every point sits within t of some center, by maximality of the scan
    assert covered.all()
    return len(centers), kept


def ball_samples(oracle, n, samples, seed):
    """Random points in the unit ball of the norm (Gaussian direction, radial u^(1/n))."""
    rng = seed.generator(2) if hasattr(seed, "generator") else np.random.default_rng(seed)
    g = rng.standard_normal((samples, n))
    norms = oracle.batch(g)
    norms = np.where(norms == 0.0, 1.0, norms)
    radii = rng.random(samples) ** (1.0 / n)
    return g * (radii / norms)[:, None]


def volume_bound_check(oracle, n, t, samples, seed):
    """Greedy t-packing of the unit ball against the volume bound (4/t)^n.

    The measured count is a lower bound for the packing number, so staying
    under (4/t)^n is a necessary consistency check, valid for t <= 2.
    """
    if n > 16:
        raise ValueError("dimension too large for a meaningful greedy packing")
    points = ball_samples(oracle, n, samples, seed)
    centers = _pairwise_scan(points, oracle, t)
    return len(centers), (4.0 / t) ** n
