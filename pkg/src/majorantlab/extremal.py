"""Search for coefficient sequences maximizing the L^p norm over unit balls.

The objective F(a) = integral |sum a_n e(n theta)|^p is convex in a, so its
maximum over a ball is attained at an extreme point and the conditional
gradient scheme applies: linearize at the current iterate and jump to the
ball point maximizing the linearization.  Each step is monotone by convexity.
For even p the majorant property makes the all-ones start already optimal on
the unit polydisc; odd and fractional p are where the search earns its keep.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .expsum import (
    CoefficientDomain,
    CoefficientSeq,
    GridSpec,
    dirichlet_norm,
    lp_norm,
)

_PHASE_EPS = 1e-14


@dataclass(frozen=True)
class SearchParams:
    restarts: int = 8
    max_iter: int = 200
    tol: float = 1e-9
    seed: int = 0


@dataclass(frozen=True)
class ExtremalResult:
    """Outcome of an ascent run.

    best_norm is re-evaluated with the default norm policy; the per-restart
    objective histories record the discrete grid objective (M^-1 sum |g|^p)
    whose monotonicity certifies each run.
    """

    best_norm: float
    best_coeffs: CoefficientSeq
    ratio: float
    iterations_used: int
    restarts: int
    converged: bool
    objective_histories: tuple

    @property
    def gamma_estimate(self):
        """Exponent gamma with ratio = N^gamma."""
        n = self.best_coeffs.support.ambient_size
        if n < 2 or self.ratio <= 0:
            return 0.0
        return math.log(self.ratio) / math.log(n)


def linearization_coeffs(coeffs, p, grid=None):
    """Fourier coefficients b_n of g |g|^(p-2) on the support, via FFT.

    Up to the factor p and a conjugation these are the gradient of the
    quadrature objective: perturbing a_n by da changes M^-1 sum |g|^p by
    p * Re(conj(da) * b_n) to first order.
    """
    if p < 2:
        raise ValueError(f"linearization requires p >= 2, got {p}")
    if grid is None:
        grid = GridSpec.for_ambient(coeffs.support.ambient_size)
    grid.require_ambient(coeffs.support.ambient_size)
    m = grid.points
    dense = np.zeros(m, dtype=np.complex128)
    dense[coeffs.support.as_array()] = coeffs.values
    g = m * np.fft.ifft(dense)
    weighted = g * np.abs(g) ** (p - 2.0)
    spectrum = np.fft.fft(weighted) / m
    return spectrum[coeffs.support.as_array()]


def _start_values(size, domain, restart, rng):
    if restart == 0:
        vals = np.ones(size, dtype=np.complex128)
    else:
        vals = np.exp(2j * np.pi * rng.random(size))
    if domain is CoefficientDomain.L2_BALL:
        vals = vals / np.sqrt(size)
    return vals


def _ball_step(b, prev, domain):
    """Ball point maximizing the linearized objective Re sum conj(a_n) b_n."""
    if domain is CoefficientDomain.LINF_BALL:
        mod = np.abs(b)
        small = mod < _PHASE_EPS
        out = np.where(small, prev, b / np.where(small, 1.0, mod))
        return out
    norm = float(np.linalg.norm(b))
    if norm < _PHASE_EPS:
        return prev
    return b / norm


def ascend(support, p, domain, grid=None, params=None):
    """Conditional-gradient ascent of the L^p norm over the chosen ball.

    Restart 0 starts from all-ones (normalized for the l2 ball); the
    remaining restarts use random unimodular phases.  The best restart wins,
    ties broken by the lowest restart index.

    Returns an ExtremalResult; `ratio` is best_norm / dirichlet_norm for the
    polydisc domain and best_norm itself for the l2 ball.
    """
    if support.size == 0:
        raise ValueError("cannot search over an empty support")
    if p < 2:
        raise ValueError(f"ascent requires p >= 2, got {p}")
    if domain is CoefficientDomain.UNCONSTRAINED:
        raise ValueError("ascent needs a bounded domain (linf or l2 ball)")
    params = params or SearchParams()
    if grid is None:
        grid = GridSpec.for_ambient(support.ambient_size)
    grid.require_ambient(support.ambient_size)
    m = grid.points
    elems = support.as_array()

    def objective(vals):
        dense = np.zeros(m, dtype=np.complex128)
        dense[elems] = vals
        g = m * np.fft.ifft(dense)
        absg = np.abs(g)
        return float(np.mean(absg ** p)), g, absg

    best = None
    histories = []
    for restart in range(max(1, params.restarts)):
        rng = np.random.default_rng(np.random.SeedSequence([params.seed, restart]))
        vals = _start_values(support.size, domain, restart, rng)
        obj, g, absg = objective(vals)
        history = [obj]
        converged = False
        iterations = 0
        for iterations in range(1, params.max_iter + 1):
            weighted = g * absg ** (p - 2.0)
            b = (np.fft.fft(weighted) / m)[elems]
            new_vals = _ball_step(b, vals, domain)
            new_obj, new_g, new_absg = objective(new_vals)
            history.append(new_obj)
            gain = new_obj - obj
            vals, obj, g, absg = new_vals, new_obj, new_g, new_absg
            if gain <= params.tol * max(abs(obj), 1e-300):
                converged = True
                break
        histories.append(tuple(history))
        if best is None or obj > best[0]:
            best = (obj, vals, iterations, converged)

    obj, vals, iterations, converged = best
    coeffs = CoefficientSeq(support, vals, domain)
    best_norm = lp_norm(coeffs, p)
    if domain is CoefficientDomain.LINF_BALL:
        ratio = best_norm / dirichlet_norm(support, p)
    else:
        ratio = best_norm
    return ExtremalResult(
        best_norm=best_norm,
        best_coeffs=coeffs,
        ratio=ratio,
        iterations_used=iterations,
        restarts=max(1, params.restarts),
        converged=converged,
        objective_histories=tuple(histories),
    )


def majorant_ratio(freq_set, p, grid=None, params=None):
    """sup over the unit polydisc of ||sum a_n e(n.)||_p over the all-ones norm.

    Equals 1 exactly for even integer p; the excess at other p measures the
    failure of the majorant property on this set.
    """
    return ascend(freq_set, p, CoefficientDomain.LINF_BALL, grid=grid, params=params).ratio


def exhaustive_phase_search(support, p, phases=(1, -1, 1j, -1j), grid=None, fix_first=True):
    """Best L^p norm over all coefficient patterns from a fixed phase menu.

    Exponential in the support size; a global phase is quotiented out by
    pinning the first coefficient.  Returns (best_norm, best_values).

    Patterns are ranked on a single quadrature grid for speed; the winner
    is then re-measured under the default refinement policy so the value
    is comparable with `ascend` output at non-even p.
    """
    if support.size == 0:
        raise ValueError("cannot search over an empty support")
    if support.size > 16:
        raise ValueError("exhaustive search is limited to supports of size <= 16")
    refine = grid is None
    if grid is None:
        grid = GridSpec.for_ambient(support.ambient_size)
    grid.require_ambient(support.ambient_size)
    m = grid.points
    elems = support.as_array()
    basis = np.exp(2j * np.pi * np.outer(elems, np.arange(m)) / m)
    phases = np.asarray(phases, dtype=np.complex128)
    free = support.size - 1 if fix_first else support.size

    best_norm = -1.0
    best_vals = None
    chunk = []
    batch = 2048

    def flush(chunk_patterns):
        nonlocal best_norm, best_vals
        pats = np.asarray(chunk_patterns, dtype=np.complex128)
        vals = pats @ basis
        norms = np.mean(np.abs(vals) ** p, axis=1) ** (1.0 / p)
        idx = int(np.argmax(norms))
        if norms[idx] > best_norm:
            best_norm = float(norms[idx])
            best_vals = pats[idx].copy()

    for combo in itertools.product(range(len(phases)), repeat=free):
        pattern = np.empty(support.size, dtype=np.complex128)
        if fix_first:
            pattern[0] = 1.0
            pattern[1:] = phases[list(combo)]
        else:
            pattern[:] = phases[list(combo)]
        chunk.append(pattern)
        if len(chunk) >= batch:
            flush(chunk)
            chunk = []
    if chunk:
        flush(chunk)
    if refine:
        seq = CoefficientSeq(support, best_vals, CoefficientDomain.LINF_BALL)
        best_norm = lp_norm(seq, p)
    return best_norm, best_vals
