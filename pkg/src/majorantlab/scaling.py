"""Scaling experiments: measured norm statistics against predicted exponents.

A run sweeps a size grid, draws sets from one model family at each size with
per-trial seeds, evaluates a statistic per draw, and fits a power law to the
trial means on a log-log scale.  Where two predicted branches nearly tie the
single-power fit is replaced by a positivity check on a fixed-exponent
two-term fit, since no slope is identifiable at a crossover.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from .expsum import CoefficientDomain, dirichlet_norm
from .extremal import SearchParams, ascend, majorant_ratio
from .setgen import RandomSetModel, Seed, gen_squares, perturbed_ap_window

STATISTICS = ("dirichlet_norm_p", "majorant_ratio", "kp_constant", "star_ratio")
MODEL_FAMILIES = ("bernoulli", "doubling", "power", "perturbed_ap")
CROSSOVER_GAP = 0.25
EXCLUDED_FRACTION_CAP = 0.05


@dataclass(frozen=True)
class PredictedExponent:
    exponent: float
    crossover: float
    branches: tuple


def predicted_exponent(family, p, delta=None, beta=None):
    """Predicted log-size exponent of the mean statistic E ||D_S||_p^p.

    Selector families (density n^-delta) follow the two-term law
    tau^p n^(p-1) + (tau n)^(p/2); jittered progressions with spacing
    s = L^beta follow L^(p/2) + L^(p-1)/s.  The crossover is the parameter
    where the branches tie.
    """
    p = float(p)
    if family in ("bernoulli", "doubling", "power"):
        if delta is None:
            raise ValueError("selector families need delta")
        branches = (p - 1.0 - p * delta, (p / 2.0) * (1.0 - delta))
        return PredictedExponent(max(branches), 1.0 - 2.0 / p, branches)
    if family == "perturbed_ap":
        if beta is None:
            raise ValueError("perturbed_ap needs beta")
        branches = (p / 2.0, p - 1.0 - beta)
        return PredictedExponent(max(branches), p / 2.0 - 1.0, branches)
    raise ValueError(f"no predicted exponent for family {family!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of a scaling run; echoes verbatim into the report."""

    family: str
    sizes: tuple
    p: float
    trials: int
    seed: Seed = Seed(0, 0)
    statistic: str = "dirichlet_norm_p"
    delta: float = None
    tau: float = None
    tau_rule: str = None            # "critical" pins tau = n^(2/p - 1)
    k: int = None                   # doubling window override
    s_exp: int = 1                  # power-selector exponent
    s_beta: float = 0.5             # perturbed_ap: s = ceil(L^beta)
    a_mult: int = 4                 # perturbed_ap: a = a_mult * s
    search: SearchParams = field(default_factory=SearchParams)
    fit_min_size: int = 256

    def __post_init__(self):
        if self.family not in MODEL_FAMILIES:
            raise ValueError(f"unknown model family {self.family!r}")
        if self.statistic not in STATISTICS:
            raise ValueError(f"unknown statistic {self.statistic!r}")
        sizes = tuple(int(s) for s in self.sizes)
        if len(sizes) < 2 or any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError("sizes must be strictly increasing with >= 2 entries")
        object.__setattr__(self, "sizes", sizes)
        if self.trials < 8:
            raise ValueError("need at least 8 trials per size")
        if float(self.p) < 1.0:
            raise ValueError("p must be at least 1")

    def tau_for(self, size):
        if self.tau is not None:
            return self.tau
        if self.tau_rule == "critical":
            return float(size) ** (2.0 / float(self.p) - 1.0)
        if self.delta is not None:
            return float(size) ** -float(self.delta)
        raise ValueError("no density rule: set tau, delta or tau_rule")

    def model_for(self, size):
        if self.family == "bernoulli":
            return RandomSetModel("bernoulli", size, {"tau": self.tau_for(size)})
        if self.family == "doubling":
            if self.k is not None:
                k = self.k
            else:
                k = max(1, round(float(self.delta) * math.log2(size)))
            return RandomSetModel("doubling", size, {"k": k})
        if self.family == "power":
            return RandomSetModel(
                "power", size, {"s_exp": self.s_exp, "tau": self.tau_for(size)}
            )
        length = size
        s = max(1, math.ceil(float(length) ** self.s_beta))
        n, b, a = perturbed_ap_window(length, s, self.a_mult)
        return RandomSetModel(
            "perturbed_ap", n, {"b": b, "a": a, "length": length, "s": s}
        )

    def predicted(self):
        if self.family == "perturbed_ap":
            return predicted_exponent(self.family, self.p, beta=self.s_beta)
        if self.delta is not None:
            return predicted_exponent(self.family, self.p, delta=self.delta)
        return None

    def echo(self):
        out = asdict(self)
        out["seed"] = str(self.seed)
        out["search"] = asdict(self.search)
        return out


def star_ratio(freq_set, p, grid=None):
    """Reverse-interpolation ratio ||D||_2 ||D||_{2(p-1)}^{p-1} / ||D||_p^p.

    Bounded for progressions; grows like a power of the window for selector
    sets at the critical density, which is what rules out an interpolation
    proof of the sharp norm bound.
    """
    p = float(p)
    if p <= 2.0:
        raise ValueError("star ratio needs p > 2")
    if freq_set.size == 0:
        raise ValueError("star ratio undefined for the empty set")
    n2 = math.sqrt(freq_set.size)
    q = 2.0 * (p - 1.0)
    nq = dirichlet_norm(freq_set, q, grid)
    np_ = dirichlet_norm(freq_set, p, grid)
    return n2 * nq ** (p - 1.0) / np_ ** p


def baseline_bounds(freq_set, p, c=1.0):
    """(upper, lower) anchors for the polydisc ratio and the norm.

    upper: interpolation bound c (N/|A|)^(1/p) on the majorant ratio.
    lower: the near-zero-frequency floor (|A|^p / N)^(1/p) on ||D||_p.
    """
    if freq_set.size == 0:
        raise ValueError("bounds undefined for the empty set")
    n = freq_set.ambient_size
    m = freq_set.size
    return c * (n / m) ** (1.0 / p), (m ** p / n) ** (1.0 / p)


def _statistic_value(stat, fset, p, search):
    if stat == "dirichlet_norm_p":
        if fset.size == 0:
            return 0.0
        return dirichlet_norm(fset, p) ** p
    if fset.size == 0:
        return None  # ratio statistics are undefined on the empty draw
    if stat == "majorant_ratio":
        return majorant_ratio(fset, p, params=search)
    if stat == "kp_constant":
        return ascend(fset, p, CoefficientDomain.L2_BALL, params=search).best_norm
    return star_ratio(fset, p)


@dataclass(frozen=True)
class SizeRow:
    size: int
    mean: float
    std: float
    min: float
    max: float
    trials: int
    excluded: int
    valid: bool


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    residual_rms: float
    sizes_used: tuple


@dataclass(frozen=True)
class ScalingReport:
    config: dict
    statistic: str
    rows: tuple
    fit: FitResult
    predicted: PredictedExponent
    fit_mode: str                   # "single" or "two_term"
    two_term: dict

    def to_json(self):
        payload = {
            "config": self.config,
            "statistic": self.statistic,
            "rows": [asdict(r) for r in self.rows],
            "fit": asdict(self.fit) if self.fit else None,
            "predicted_exponent": asdict(self.predicted) if self.predicted else None,
            "fit_mode": self.fit_mode,
            "two_term": self.two_term,
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    def csv_lines(self):
        lines = ["size,stat_mean,stat_std,trials,excluded"]
        for r in self.rows:
            lines.append(f"{r.size},{r.mean!r},{r.std!r},{r.trials},{r.excluded}")
        return lines


def fit_power_law(sizes, means):
    """Unweighted least squares of log(mean) against log(size)."""
    sizes = np.asarray(sizes, dtype=float)
    means = np.asarray(means, dtype=float)
    keep = means > 0.0
    if keep.sum() < 2:
        raise ValueError("need at least two positive means to fit")
    x = np.log(sizes[keep])
    y = np.log(means[keep])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return FitResult(
        slope=float(slope),
        intercept=float(intercept),
        residual_rms=float(np.sqrt(np.mean(resid ** 2))),
        sizes_used=tuple(int(s) for s in sizes[keep]),
    )


def _two_term_fit(sizes, means, branches):
    """Least squares c1 x^e1 + c2 x^e2 with the exponents pinned."""
    x = np.asarray(sizes, dtype=float)
    design = np.stack([x ** branches[0], x ** branches[1]], axis=1)
    coeffs, *_ = np.linalg.lstsq(design, np.asarray(means, dtype=float), rcond=None)
    return {
        "c1": float(coeffs[0]),
        "c2": float(coeffs[1]),
        "e1": float(branches[0]),
        "e2": float(branches[1]),
        "positive": bool(coeffs[0] > 0.0 and coeffs[1] > 0.0),
    }


def run_experiment(config, threads=1):
    """Execute a scaling run; deterministic for fixed (config, seed).

    Per-draw seeds depend only on (seed, size index, trial index), and the
    reduction is an ordered mean, so thread count cannot change the output.
    Draws where the statistic is undefined (empty sets under a ratio
    statistic) are excluded and counted; a size whose exclusions exceed 5%
    of trials is flagged invalid and dropped from the fit.
    """
    rows = []
    for si, size in enumerate(config.sizes):
        model = config.model_for(size)

        def one_trial(trial, _model=model, _si=si):
            fset = _model.generate(config.seed.generator(_si, trial))
            return _statistic_value(config.statistic, fset, config.p, config.search)

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                values = list(pool.map(one_trial, range(config.trials)))
        else:
            values = [one_trial(t) for t in range(config.trials)]
        kept = np.array([v for v in values if v is not None], dtype=float)
        excluded = config.trials - kept.size
        valid = excluded <= EXCLUDED_FRACTION_CAP * config.trials and kept.size >= 2
        rows.append(SizeRow(
            size=int(size),
            mean=float(kept.mean()) if kept.size else float("nan"),
            std=float(kept.std(ddof=1)) if kept.size > 1 else 0.0,
            min=float(kept.min()) if kept.size else float("nan"),
            max=float(kept.max()) if kept.size else float("nan"),
            trials=int(config.trials),
            excluded=int(excluded),
            valid=bool(valid),
        ))

    fit_rows = [r for r in rows if r.valid and r.size >= config.fit_min_size]
    fit = fit_power_law([r.size for r in fit_rows], [r.mean for r in fit_rows]) \
        if len(fit_rows) >= 2 else None

    predicted = config.predicted() if config.statistic == "dirichlet_norm_p" else None
    fit_mode = "single"
    two_term = None
    if predicted is not None and abs(predicted.branches[0] - predicted.branches[1]) < CROSSOVER_GAP:
        fit_mode = "two_term"
        if fit_rows:
            two_term = _two_term_fit(
                [r.size for r in fit_rows], [r.mean for r in fit_rows], predicted.branches
            )
    return ScalingReport(
        config=config.echo(),
        statistic=config.statistic,
        rows=tuple(rows),
        fit=fit,
        predicted=predicted,
        fit_mode=fit_mode,
        two_term=two_term,
    )


def _exact_l4_fourth_power(freqs, values):
    """Exact ||sum a e(freq theta)||_4^4 via pair-sum collision counts."""
    freqs = np.asarray(freqs, dtype=np.int64)
    sums = np.add.outer(freqs, freqs).ravel()
    prods = np.multiply.outer(values, values).ravel()
    base = sums.min()
    idx = sums - base
    length = int(idx.max()) + 1
    conv_r = np.bincount(idx, weights=prods.real, minlength=length)
    conv_i = np.bincount(idx, weights=prods.imag, minlength=length)
    return float(np.sum(conv_r ** 2 + conv_i ** 2))


@dataclass(frozen=True)
class KinkRow:
    p: float
    root: int
    ambient: int
    norm: float


@dataclass(frozen=True)
class KinkReport:
    rows: tuple
    fits: dict        # p -> {root_exponent, ambient_exponent, residual_rms}
    ratio_rows: tuple  # (root, mean L4/l2 ratio over coefficient draws)
    ratio_slope: float
    config: dict

    def to_json(self):
        return json.dumps({
            "config": self.config,
            "rows": [asdict(r) for r in self.rows],
            "fits": {str(p): f for p, f in sorted(self.fits.items())},
            "ratio_rows": [list(r) for r in self.ratio_rows],
            "ratio_slope": self.ratio_slope,
        }, indent=2, sort_keys=True)

    def csv_lines(self, p):
        lines = ["size,stat_mean,stat_std,trials,excluded"]
        for r in self.rows:
            if r.p == float(p):
                lines.append(f"{r.root},{r.norm!r},0.0,1,0")
        return lines

    def ratio_csv_lines(self):
        lines = ["size,stat_mean,stat_std,trials,excluded"]
        trials = self.config["coeff_trials"]
        for root, mean in self.ratio_rows:
            lines.append(f"{root},{mean!r},0.0,{trials},0")
        return lines


def squares_kink(p_grid, roots, coeff_trials=16, seed=Seed(0, 0)):
    """Norms of the square-frequency polynomial across p, plus the L4/l2 probe.

    The polynomial sum_{j <= x} e(j^2 theta) has x terms in the window
    [1, x^2]; power laws are fitted against the root count x (the ambient
    exponent is half of it).  The probe draws random unit-disc coefficients
    on the same support and tracks ||sum a_j e(j^2 .)||_4 / ||a||_2, whose
    near-flat slope is the quadratic-set failure of l2 domination at p = 4.
    """
    roots = tuple(int(x) for x in roots)
    if len(roots) < 2 or any(b <= a for a, b in zip(roots, roots[1:])):
        raise ValueError("roots must be strictly increasing with >= 2 entries")
    rows = []
    for p in p_grid:
        for x in roots:
            fset = gen_squares(x * x)
            rows.append(KinkRow(float(p), x, x * x, dirichlet_norm(fset, p)))
    fits = {}
    for p in p_grid:
        mine = [r for r in rows if r.p == float(p)]
        fit = fit_power_law([r.root for r in mine], [r.norm for r in mine])
        fits[float(p)] = {
            "root_exponent": fit.slope,
            "ambient_exponent": fit.slope / 2.0,
            "residual_rms": fit.residual_rms,
        }
    ratio_rows = []
    for xi, x in enumerate(roots):
        freqs = gen_squares(x * x).as_array()
        ratios = []
        for trial in range(coeff_trials):
            rng = seed.generator(xi, trial)
            radii = np.sqrt(rng.random(x))
            vals = radii * np.exp(2j * np.pi * rng.random(x))
            l2 = float(np.linalg.norm(vals))
            l4 = _exact_l4_fourth_power(freqs, vals) ** 0.25
            ratios.append(l4 / l2)
        ratio_rows.append((x, float(np.mean(ratios))))
    ratio_fit = fit_power_law([r[0] for r in ratio_rows], [r[1] for r in ratio_rows])
    return KinkReport(
        rows=tuple(rows),
        fits=fits,
        ratio_rows=tuple(ratio_rows),
        ratio_slope=ratio_fit.slope,
        config={
            "p_grid": [float(p) for p in p_grid],
            "roots": list(roots),
            "coeff_trials": int(coeff_trials),
            "seed": str(seed),
        },
    )
