"""Exponential sums on the circle and their L^p norms.

The central object is a trigonometric polynomial f(theta) = sum over n in A
of a_n e(n theta), with e(x) = exp(2 pi i x), supported on a finite frequency
set A inside [1, N].  Norms are computed two independent ways: trapezoid
quadrature on a uniform grid (spectrally accurate, evaluated by zero-padded
FFT), and, for even integer p, an exact combinatorial route through k-fold
coefficient convolution.  The second path doubles as an oracle for the first.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

DEFAULT_OVERSAMPLE = 8.0
LADDER_REL_TOL = 1e-9
LADDER_MAX_POINTS = 2 ** 24


class GridTooSmallError(ValueError):
    """Raised when a quadrature grid is too coarse for the ambient size."""


def cis(x):
    """e(x) = exp(2 pi i x), elementwise."""
    return np.exp(2j * np.pi * np.asarray(x, dtype=float))


def next_pow2(n):
    """Smallest power of two >= n."""
    m = 1
    while m < n:
        m *= 2
    return m


@dataclass(frozen=True)
class FrequencySet:
    """Finite set of integer frequencies inside the ambient window [1, N].

    Parameters
    ----------
    ambient_size : int
        The window size N.  All elements must lie in [1, N].
    elems : tuple of int
        Strictly increasing frequencies.
    """

    ambient_size: int
    elems: tuple

    def __post_init__(self):
        if self.ambient_size < 1:
            raise ValueError("ambient_size must be a positive integer")
        elems = tuple(int(n) for n in self.elems)
        object.__setattr__(self, "elems", elems)
        for prev, cur in zip(elems, elems[1:]):
            if cur <= prev:
                raise ValueError("elements must be strictly increasing")
        if elems and (elems[0] < 1 or elems[-1] > self.ambient_size):
            raise ValueError(
                f"elements must lie in [1, {self.ambient_size}], "
                f"got range [{elems[0]}, {elems[-1]}]"
            )

    @classmethod
    def from_iterable(cls, elems, ambient_size=None):
        elems = sorted(int(n) for n in elems)
        if ambient_size is None:
            ambient_size = elems[-1] if elems else 1
        return cls(ambient_size, tuple(elems))

    @property
    def size(self):
        return len(self.elems)

    def as_array(self):
        return np.asarray(self.elems, dtype=np.int64)


class CoefficientDomain(enum.Enum):
    LINF_BALL = "linf_ball"
    L2_BALL = "l2_ball"
    UNCONSTRAINED = "unconstrained"


_BALL_SLACK = 1e-12


@dataclass(frozen=True)
class CoefficientSeq:
    """Complex coefficients attached to a frequency set.

    The domain tag records which ball the sequence is meant to live in;
    construction validates membership (with a small numerical slack) so
    that search routines cannot silently leave the feasible region.
    """

    support: FrequencySet
    values: np.ndarray
    domain: CoefficientDomain = CoefficientDomain.UNCONSTRAINED

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.complex128)
        if vals.shape != (self.support.size,):
            raise ValueError(
                f"expected {self.support.size} coefficients, got shape {vals.shape}"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.domain is CoefficientDomain.LINF_BALL:
            worst = np.abs(vals).max() if vals.size else 0.0
            if worst > 1.0 + _BALL_SLACK:
                raise ValueError(f"coefficient modulus {worst} exceeds the unit ball")
        elif self.domain is CoefficientDomain.L2_BALL:
            total = float(np.sum(np.abs(vals) ** 2))
            if total > 1.0 + _BALL_SLACK:
                raise ValueError(f"squared l2 mass {total} exceeds the unit ball")

    @classmethod
    def indicator(cls, support):
        """All-ones coefficients (the Dirichlet-type polynomial of the set)."""
        return cls(support, np.ones(support.size), CoefficientDomain.LINF_BALL)

    def is_integer_valued(self):
        v = self.values
        return bool(v.size == 0 or (np.all(v.imag == 0.0) and np.all(v.real == np.rint(v.real))))


@dataclass(frozen=True)
class GridSpec:
    """Uniform quadrature grid theta_m = m / points, m = 0..points-1."""

    points: int
    oversample: float = DEFAULT_OVERSAMPLE

    def __post_init__(self):
        if self.points < 1 or (self.points & (self.points - 1)) != 0:
            raise ValueError("points must be a positive power of two")
        if self.oversample < 4:
            raise ValueError("oversample must be at least 4")

    @classmethod
    def for_ambient(cls, ambient_size, oversample=DEFAULT_OVERSAMPLE):
        """Smallest power-of-two grid with points >= oversample * ambient_size."""
        return cls(next_pow2(int(np.ceil(oversample * ambient_size))), oversample)

    def require_ambient(self, ambient_size):
        if self.points < 4 * ambient_size:
            raise GridTooSmallError(
                f"grid of {self.points} points is too small for ambient size "
                f"{ambient_size}; need at least {4 * ambient_size}"
            )


def _dense_coefficients(coeffs, length):
    dense = np.zeros(length, dtype=np.complex128)
    if coeffs.support.size:
        dense[coeffs.support.as_array()] = coeffs.values
    return dense


def evaluate_on_grid(coeffs, grid):
    """Evaluate f(theta_m) = sum a_n e(n m / M) on the grid, via zero-padded FFT.

    Parameters
    ----------
    coeffs : CoefficientSeq
    grid : GridSpec
        Must satisfy points >= 4 * ambient_size.

    Returns
    -------
    ndarray of complex, length grid.points
    """
    grid.require_ambient(coeffs.support.ambient_size)
    dense = _dense_coefficients(coeffs, grid.points)
    # ifft uses the e(+ n m / M) convention, so M * ifft is exactly the sum.
    return grid.points * np.fft.ifft(dense)


def _quadrature_power_mean(coeffs, p, points):
    dense = np.zeros(points, dtype=np.complex128)
    if coeffs.support.size:
        dense[coeffs.support.as_array()] = coeffs.values
    f = points * np.fft.ifft(dense)
    return float(np.mean(np.abs(f) ** p))


def _is_even_integer(p):
    return float(p) == int(p) and int(p) % 2 == 0


def lp_norm(coeffs, p, grid=None):
    """L^p norm of the exponential sum by uniform-grid quadrature.

    With an explicit grid the plain trapezoid rule is used (on the circle this
    is just the mean of |f|^p over the grid).  Without one, even integer p gets
    a single grid at the default oversampling, which integrates the
    band-limited |f|^p exactly; other p >= 1 use a doubling ladder that stops
    once the norm changes by less than 1e-9 relative, capped at 2^24 points.

    Parameters
    ----------
    coeffs : CoefficientSeq
    p : float
        Exponent, p >= 1.
    grid : GridSpec, optional

    Returns
    -------
    float
    """
    p = float(p)
    if p < 1.0:
        raise ValueError("p must be at least 1")
    if coeffs.support.size == 0:
        return 0.0
    if grid is not None:
        grid.require_ambient(coeffs.support.ambient_size)
        return _quadrature_power_mean(coeffs, p, grid.points) ** (1.0 / p)
    start = GridSpec.for_ambient(coeffs.support.ambient_size).points
    if _is_even_integer(p):
        return _quadrature_power_mean(coeffs, p, start) ** (1.0 / p)
    points = start
    value = _quadrature_power_mean(coeffs, p, points) ** (1.0 / p)
    while points < LADDER_MAX_POINTS:
        points *= 2
        refined = _quadrature_power_mean(coeffs, p, points) ** (1.0 / p)
        close = abs(refined - value) <= LADDER_REL_TOL * max(refined, 1e-300)
        value = refined
        if close:
            break
    return value


def _sum_of_squares_exact(int_values):
    """Exact sum of squares of an integer array, immune to overflow."""
    if int_values.size == 0:
        return 0
    peak = int(np.abs(int_values).max())
    # float64 sums of integer terms stay exact while everything is < 2^53
    if peak > 0 and int_values.size * peak * peak < 2 ** 53:
        return int(np.sum(int_values.astype(np.float64) ** 2))
    return sum(int(v) * int(v) for v in int_values if v)


def _snap_to_int(arr, context):
    snapped = np.rint(np.real(arr))
    resid = np.max(np.abs(np.real(arr) - snapped)) if arr.size else 0.0
    if resid > 1e-3:
        raise ArithmeticError(f"{context}: convolution drifted {resid} from integers")
    return snapped


def _kfold_convolution(dense, k):
    """k-fold additive self-convolution of a dense coefficient array."""
    out = dense
    for _ in range(k - 1):
        if len(out) + len(dense) <= 4096:
            out = np.convolve(out, dense)
        else:
            out = fftconvolve(out, dense)
    return out


def lp_norm_even_exact(coeffs, p):
    """Exact L^p norm for even integer p via k-fold coefficient convolution.

    Writing f^k = sum_n c_k(n) e(n theta) with c_k the k-fold convolution of
    the coefficient sequence, Parseval gives ||f||_{2k}^{2k} = sum |c_k(n)|^2.
    Integer-valued coefficient sequences (indicators, sign patterns) take an
    exact integer path; convolutions are validated against integer drift.
    """
    if float(p) != int(p) or int(p) % 2 != 0 or int(p) < 2:
        raise ValueError("p must be an even integer >= 2")
    k = int(p) // 2
    if coeffs.support.size == 0:
        return 0.0
    if k == 1:
        return float(np.sqrt(np.sum(np.abs(coeffs.values) ** 2)))
    n = coeffs.support.ambient_size
    if coeffs.is_integer_valued():
        dense = np.zeros(n + 1, dtype=np.float64)
        dense[coeffs.support.as_array()] = coeffs.values.real
        conv = _snap_to_int(_kfold_convolution(dense, k), "even-exact norm")
        total = _sum_of_squares_exact(conv[conv != 0.0])
        return float(total) ** (1.0 / (2 * k))
    dense = _dense_coefficients(coeffs, n + 1)
    conv = _kfold_convolution(dense, k)
    return float(np.sum(np.abs(conv) ** 2)) ** (1.0 / (2 * k))


@dataclass(frozen=True)
class Autocorrelation:
    """Correlation counts A_l = sum over n - m = l of a_n conj(a_m).

    Lags run over [-(N-1), N-1]; counts are stored with lag l at index
    l + (N - 1).  Indicator input yields integer counts.
    """

    ambient_size: int
    counts: np.ndarray

    def lag_range(self):
        n = self.ambient_size
        return np.arange(-(n - 1), n)

    def count(self, lag):
        n = self.ambient_size
        if abs(lag) >= n:
            return 0
        return self.counts[lag + n - 1]


def _autocorrelation_direct(coeffs):
    n = coeffs.support.ambient_size
    out = np.zeros(2 * n - 1, dtype=np.complex128)
    elems = coeffs.support.as_array()
    if elems.size:
        diffs = np.subtract.outer(elems, elems).ravel() + (n - 1)
        prods = np.multiply.outer(coeffs.values, np.conj(coeffs.values)).ravel()
        out += np.bincount(diffs, weights=prods.real, minlength=2 * n - 1)
        out += 1j * np.bincount(diffs, weights=prods.imag, minlength=2 * n - 1)
    return out


def _autocorrelation_fft(coeffs):
    n = coeffs.support.ambient_size
    m = next_pow2(2 * n)
    dense = _dense_coefficients(coeffs, m)
    f = m * np.fft.ifft(dense)
    spec = np.fft.fft(np.abs(f) ** 2) / m
    out = np.empty(2 * n - 1, dtype=np.complex128)
    out[n - 1:] = spec[: n]
    out[: n - 1] = spec[m - (n - 1):]
    return out


def autocorrelation(coeffs, method="auto"):
    """Autocorrelation of the coefficient sequence.

    method is one of "auto", "direct" (pairwise sums, for small supports) or
    "fft" (forward transform of |f|^2).  The two routes agree to 1e-10 and the
    "auto" choice switches on support size.  Indicator input is snapped to
    exact integers.
    """
    if method not in ("auto", "direct", "fft"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        method = "direct" if coeffs.support.size ** 2 <= 2 ** 18 else "fft"
    raw = _autocorrelation_direct(coeffs) if method == "direct" else _autocorrelation_fft(coeffs)
    if coeffs.is_integer_valued():
        counts = _snap_to_int(raw, "autocorrelation").astype(np.int64)
    else:
        counts = raw
    return Autocorrelation(coeffs.support.ambient_size, counts)


def dirichlet_norm(freq_set, p, grid=None):
    """L^p norm of the all-ones polynomial of the set.

    Even integer p goes through the exact convolution path; other exponents
    through quadrature (with the ladder when no grid is supplied).
    """
    coeffs = CoefficientSeq.indicator(freq_set)
    p = float(p)
    if grid is None and _is_even_integer(p):
        return lp_norm_even_exact(coeffs, int(p))
    return lp_norm(coeffs, p, grid)
