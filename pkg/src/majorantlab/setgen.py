"""Random and structured frequency-set generators with explicit seeding.

Every generator is a pure function of (parameters, seed, trial index), so a
run is reproducible across platforms and thread counts.  Seeds are expanded
through numpy SeedSequence chains; distinct trial indices give independent
streams.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .expsum import FrequencySet

_FIXED_POINT_BITS = 128
_FIXED_POINT_MOD = 1 << _FIXED_POINT_BITS


@dataclass(frozen=True)
class Seed:
    """Base seed plus a stream index, expanded per trial via SeedSequence."""

    base: int = 0
    stream: int = 0

    def sequence(self, *branch):
        return np.random.SeedSequence([self.base, self.stream, *[int(b) for b in branch]])

    def generator(self, *branch):
        return np.random.default_rng(self.sequence(*branch))

    def __str__(self):
        return f"{self.base}:{self.stream}"

    @classmethod
    def parse(cls, text):
        base, _, stream = str(text).partition(":")
        return cls(int(base), int(stream) if stream else 0)


def gen_bernoulli(n, tau, seed, trial=0):
    """Bernoulli set: each of 1..n kept independently with probability tau.

    tau = 0 and tau = 1 are exact clamps (empty and full set).
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau}")
    if tau == 0.0:
        return FrequencySet(n, ())
    if tau == 1.0:
        return FrequencySet(n, tuple(range(1, n + 1)))
    rng = seed.generator(trial) if isinstance(seed, Seed) else seed
    mask = rng.random(n) < tau
    return FrequencySet(n, tuple((np.nonzero(mask)[0] + 1).tolist()))


def doubling_selectors(bits, n, k):
    """Selector bits of the dyadic-window construction.

    With omega = 0.d1 d2 d3 ... in binary, position j is selected iff the k
    digits d_{j+1} .. d_{j+k} all vanish, i.e. frac(2^j omega) falls in the
    half-open cell [0, 2^-k).  bits[i] holds digit d_{i+1}.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size < n + k:
        raise ValueError(f"need at least {n + k} digits, got {bits.size}")
    csum = np.concatenate(([0], np.cumsum(bits, dtype=np.int64)))
    # window sum over digits d_{j+1}..d_{j+k} for j = 1..n
    window = csum[k + 1: n + k + 1] - csum[1: n + 1]
    return window == 0


def gen_doubling(n, k, seed, trial=0, bits=None):
    """Random dyadic-window set of expected density 2^-k.

    omega is drawn as a fair random bit vector (length n + k + 64); selected
    positions are those whose following k digits are all zero.
    """
    if k < 1 or k > 60:
        raise ValueError(f"k must lie in [1, 60], got {k}")
    if bits is None:
        rng = seed.generator(trial) if isinstance(seed, Seed) else seed
        bits = rng.integers(0, 2, size=n + k + 64, dtype=np.uint8)
    mask = doubling_selectors(bits, n, k)
    return FrequencySet(n, tuple((np.nonzero(mask)[0] + 1).tolist()))


def gen_power_selector(n, s_exp, tau, seed, trial=0, omega=None):
    """Orbit set {j : frac(j^s * omega) < tau} for a random omega.

    omega is kept as a 128-bit fixed-point integer so the fractional parts
    are exact for n up to 2^20 and s_exp up to 3.  Pass omega (a float in
    [0, 1) or an integer numerator out of 2^128) to pin the draw.
    """
    if s_exp < 1 or int(s_exp) != s_exp:
        raise ValueError(f"s_exp must be a positive integer, got {s_exp}")
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must lie in (0, 1), got {tau}")
    if omega is None:
        rng = seed.generator(trial) if isinstance(seed, Seed) else seed
        words = rng.integers(0, 1 << 32, size=4, dtype=np.uint64)
        w = 0
        for word in words:
            w = (w << 32) | int(word)
    elif isinstance(omega, (int, np.integer)):
        w = int(omega) % _FIXED_POINT_MOD
    else:
        if not 0.0 <= omega < 1.0:
            raise ValueError("omega as a float must lie in [0, 1)")
        w = int(omega * _FIXED_POINT_MOD)
    # tau scaled by 2^128 is exact for any float in (0, 1)
    threshold = int(tau * _FIXED_POINT_MOD)
    s = int(s_exp)
    elems = [j for j in range(1, n + 1) if (pow(j, s, _FIXED_POINT_MOD) * w) % _FIXED_POINT_MOD < threshold]
    return FrequencySet(n, tuple(elems))


def perturbed_ap_base(b, a, length):
    return np.arange(length, dtype=np.int64) * a + b


def gen_perturbed_ap(n, b, a, length, s, seed, trial=0, jitter=None):
    """Arithmetic progression {b + a*l} with each point jittered on [-s, s].

    The windows around distinct progression points must not overlap, which
    pins 2s + 1 <= a; together with b - s >= 1 and max + s <= n the jittered
    points stay distinct and inside [1, n], so the set keeps cardinality
    `length`.  An explicit `jitter` vector replaces the random draw.
    """
    if s < 1:
        raise ValueError(f"s must be at least 1, got {s}")
    if 2 * s + 1 > a:
        raise ValueError(f"need 2s+1 <= a for disjoint windows, got s={s}, a={a}")
    if b - s < 1:
        raise ValueError(f"need b - s >= 1, got b={b}, s={s}")
    top = b + a * (length - 1) + s
    if top > n:
        raise ValueError(f"progression overflows the window: max {top} > {n}")
    if jitter is None:
        rng = seed.generator(trial) if isinstance(seed, Seed) else seed
        jitter = rng.integers(-s, s + 1, size=length)
    else:
        jitter = np.asarray(jitter, dtype=np.int64)
        if jitter.shape != (length,):
            raise ValueError(f"jitter must have length {length}")
        if np.any(np.abs(jitter) > s):
            raise ValueError("jitter entries must lie in [-s, s]")
    elems = perturbed_ap_base(b, a, length) + jitter
    return FrequencySet(n, tuple(sorted(int(v) for v in elems)))


def perturbed_ap_window(length, s, a_mult=4):
    """Convenient valid parameters (n, b, a) for a jittered progression."""
    a = max(2 * s + 1, a_mult * s)
    b = s + 1
    n = b + a * (length - 1) + s
    return n, b, a


def expected_autocorrelation_perturbed_ap(b, a, length, s, lag):
    """Exact expected autocorrelation of the jittered progression at a lag.

    For lag l near a nonzero multiple i of the step, the contribution is the
    progression pair count (length - |i|/a) times the triangular law of a
    difference of two independent uniforms on {-s..s}.
    """
    if lag == 0:
        return float(length)
    i = a * int(round(lag / a))
    d = lag - i
    if i == 0 or abs(d) > 2 * s:
        return 0.0
    pairs = max(length - abs(i) // a, 0)
    width = 2 * s + 1
    prob = max(width - abs(d), 0) / width ** 2
    return pairs * prob


def gen_squares(n):
    """Perfect squares up to n."""
    return FrequencySet(n, tuple(i * i for i in range(1, math.isqrt(n) + 1)))


def gen_ap(n, b, a, length):
    """Arithmetic progression {b + a*l : 0 <= l < length} inside [1, n]."""
    if b < 1 or a < 1 or length < 1:
        raise ValueError("b, a, length must be positive")
    top = b + a * (length - 1)
    if top > n:
        raise ValueError(f"progression overflows the window: max {top} > {n}")
    return FrequencySet(n, tuple(range(b, top + 1, a)))


def gen_ap2d(n, b, a1, l1, a2, l2):
    """Two-dimensional progression {b + j1*a1 + j2*a2}, with a1*l1 < a2.

    The gap condition makes the (j1, j2) representation unique, so the set
    has exactly l1*l2 elements.
    """
    if a1 * l1 >= a2:
        raise ValueError(f"need a1*l1 < a2, got {a1}*{l1} >= {a2}")
    if b < 1:
        raise ValueError("b must be positive")
    top = b + a1 * (l1 - 1) + a2 * (l2 - 1)
    if top > n:
        raise ValueError(f"progression overflows the window: max {top} > {n}")
    elems = sorted(b + j1 * a1 + j2 * a2 for j1 in range(l1) for j2 in range(l2))
    return FrequencySet(n, tuple(elems))


_MODEL_VARIANTS = ("bernoulli", "doubling", "power", "perturbed_ap", "squares", "ap", "ap2d")


@dataclass(frozen=True)
class RandomSetModel:
    """Tagged description of a set distribution, used by experiments and CLI.

    params is a plain dict so configurations echo straight into JSON.
    Bernoulli accepts either an explicit tau or a density exponent delta
    (tau = n^-delta); doubling takes the window length k.
    """

    variant: str
    ambient_size: int
    params: dict

    def __post_init__(self):
        if self.variant not in _MODEL_VARIANTS:
            raise ValueError(f"unknown model variant {self.variant!r}")
        self.resolved_params()  # validate eagerly

    def resolved_params(self):
        p = dict(self.params)
        n = self.ambient_size
        if self.variant == "bernoulli":
            if "tau" not in p:
                p["tau"] = float(n) ** -float(p["delta"])
            if not 0.0 <= p["tau"] <= 1.0:
                raise ValueError(f"tau must lie in [0, 1], got {p['tau']}")
        elif self.variant == "doubling":
            if "k" not in p:
                p["k"] = max(1, round(float(p["delta"]) * math.log2(n)))
        elif self.variant == "power":
            p.setdefault("s_exp", 1)
            if "tau" not in p:
                p["tau"] = float(n) ** -float(p["delta"])
        elif self.variant == "perturbed_ap":
            for key in ("b", "a", "length", "s"):
                if key not in p:
                    raise ValueError(f"perturbed_ap model needs {key!r}")
        elif self.variant == "ap":
            for key in ("b", "a", "length"):
                if key not in p:
                    raise ValueError(f"ap model needs {key!r}")
        elif self.variant == "ap2d":
            for key in ("b", "a1", "l1", "a2", "l2"):
                if key not in p:
                    raise ValueError(f"ap2d model needs {key!r}")
        return p

    def generate(self, seed, trial=0):
        p = self.resolved_params()
        n = self.ambient_size
        if self.variant == "bernoulli":
            return gen_bernoulli(n, p["tau"], seed, trial)
        if self.variant == "doubling":
            return gen_doubling(n, p["k"], seed, trial)
        if self.variant == "power":
            return gen_power_selector(n, p["s_exp"], p["tau"], seed, trial)
        if self.variant == "perturbed_ap":
            return gen_perturbed_ap(n, p["b"], p["a"], p["length"], p["s"], seed, trial)
        if self.variant == "squares":
            return gen_squares(n)
        if self.variant == "ap":
            return gen_ap(n, p["b"], p["a"], p["length"])
        return gen_ap2d(n, p["b"], p["a1"], p["l1"], p["a2"], p["l2"])

    def tag(self):
        return self.variant


class SetFileError(ValueError):
    """Malformed set file."""


_HEADER_RE = re.compile(r"^#\s*N=(\d+)\s+model=(\S+)\s+seed=(-?\d+:-?\d+)\s*$")


def write_set_file(path, freq_set, model_tag="custom", seed=None):
    """Write a set as a commented header plus newline-delimited integers."""
    seed = seed if seed is not None else Seed(0, 0)
    with open(path, "w") as fh:
        fh.write(f"# N={freq_set.ambient_size} model={model_tag} seed={seed}\n")
        for n in freq_set.elems:
            fh.write(f"{n}\n")


def read_set_file(path):
    """Read a set file; returns (FrequencySet, metadata dict)."""
    meta = {"model": "custom", "seed": "0:0"}
    ambient = None
    elems = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            if text.startswith("#"):
                match = _HEADER_RE.match(text)
                if match:
                    ambient = int(match.group(1))
                    meta["model"] = match.group(2)
                    meta["seed"] = match.group(3)
                elif lineno == 1:
                    raise SetFileError(f"line {lineno}: malformed header {text!r}")
                continue
            try:
                elems.append(int(text))
            except ValueError:
                raise SetFileError(f"line {lineno}: expected an integer, got {text!r}") from None
    if ambient is None:
        ambient = max(elems) if elems else 1
    try:
        fset = FrequencySet.from_iterable(elems, ambient)
    except ValueError as exc:
        raise SetFileError(str(exc)) from None
    return fset, meta
