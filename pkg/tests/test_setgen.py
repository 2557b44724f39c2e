"""Set generators: worked examples, distributional checks, serialization.

Distributional assertions use 4-sigma tolerances around exact moments so
the suite stays deterministic (fixed seeds) yet honest about sampling.
"""

import math

import numpy as np
import pytest
from scipy.stats import chi2

from majorantlab.setgen import (
    RandomSetModel,
    Seed,
    SetFileError,
    doubling_selectors,
    expected_autocorrelation_perturbed_ap,
    gen_ap,
    gen_ap2d,
    gen_bernoulli,
    gen_doubling,
    gen_perturbed_ap,
    gen_power_selector,
    gen_squares,
    perturbed_ap_base,
    perturbed_ap_window,
    read_set_file,
    write_set_file,
)


class TestSeed:
    def test_str_and_parse_round_trip(self):
        s = Seed(17, 3)
        assert str(s) == "17:3"
        assert Seed.parse("17:3") == s
        assert Seed.parse("17") == Seed(17, 0)

    def test_same_branch_reproduces(self):
        a = Seed(5, 1).generator(2).integers(0, 1000, 8)
        b = Seed(5, 1).generator(2).integers(0, 1000, 8)
        assert np.array_equal(a, b)

    def test_distinct_trials_differ(self):
        a = Seed(5, 1).generator(0).integers(0, 1000, 8)
        b = Seed(5, 1).generator(1).integers(0, 1000, 8)
        assert not np.array_equal(a, b)


class TestBernoulli:
    def test_clamps(self):
        assert gen_bernoulli(100, 0.0, Seed(0)).size == 0
        assert gen_bernoulli(100, 1.0, Seed(0)).elems == tuple(range(1, 101))

    def test_near_one_density(self):
        fs = gen_bernoulli(100, 1 - 1e-18, Seed(1))
        assert fs.size == 100

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            gen_bernoulli(10, -0.1, Seed(0))
        with pytest.raises(ValueError):
            gen_bernoulli(10, 1.5, Seed(0))

    def test_reproducible(self):
        a = gen_bernoulli(500, 0.2, Seed(9), trial=4)
        b = gen_bernoulli(500, 0.2, Seed(9), trial=4)
        assert a == b

    def test_mean_cardinality(self):
        """Sample mean of |S| stays within 4 sigma of N tau."""
        n, tau, trials = 10000, 0.1, 1000
        sizes = [gen_bernoulli(n, tau, Seed(7), trial=t).size for t in range(trials)]
        tol = 4 * math.sqrt(n * tau * (1 - tau) / trials)
        assert abs(np.mean(sizes) - n * tau) <= tol


class TestDoubling:
    def test_worked_digit_example(self):
        """Digits 0100 1100 with a one-digit window select {2,3,6,7}."""
        bits = np.array([0, 1, 0, 0, 1, 1, 0, 0] + [0] * 64, dtype=np.uint8)
        sel = doubling_selectors(bits, 7, 1)
        assert tuple(np.nonzero(sel)[0] + 1) == (2, 3, 6, 7)

    def test_zero_omega_selects_everything(self):
        fs = gen_doubling(20, 2, Seed(0), bits=np.zeros(20 + 2 + 64, dtype=np.uint8))
        assert fs.elems == tuple(range(1, 21))

    def test_k_out_of_range(self):
        with pytest.raises(ValueError):
            gen_doubling(10, 0, Seed(0))

    def test_marginal_density(self):
        """Each position is kept with probability 2^-k (4 sigma)."""
        n, k, draws = 64, 2, 4000
        rng = Seed(101).generator()
        hits = np.zeros(n)
        for _ in range(draws):
            bits = rng.integers(0, 2, size=n + k + 64).astype(np.uint8)
            hits += doubling_selectors(bits, n, k)
        freq = hits.mean() / draws
        se = math.sqrt(0.25 * 0.75 / (n * draws))
        assert abs(freq - 0.25) <= 4 * se

    def test_window_spaced_subsequence_independence(self):
        """Selectors k apart behave independently: pooled chi-square at 1%."""
        n, k, j0, draws = 64, 2, 3, 4000
        rng = Seed(101).generator()
        rows = []
        for _ in range(draws):
            bits = rng.integers(0, 2, size=n + k + 64).astype(np.uint8)
            rows.append(doubling_selectors(bits, n, k)[j0 - 1 :: k][:20])
        s = np.array(rows)
        obs = np.zeros((2, 2))
        for c in range(s.shape[1] - 1):
            for x in (0, 1):
                for y in (0, 1):
                    obs[x, y] += np.sum((s[:, c] == x) & (s[:, c + 1] == y))
        tot = obs.sum()
        exp = np.outer(obs.sum(axis=1), obs.sum(axis=0)) / tot
        stat = np.sum((obs - exp) ** 2 / exp)
        assert 1 - chi2.cdf(stat, df=1) > 0.01


class TestPowerSelector:
    def test_worked_linear_orbit(self):
        """s=1, tau=1/2, omega=1/4 keeps j with frac(j/4) in {0, 1/4}."""
        fs = gen_power_selector(12, 1, 0.5, Seed(0), omega=0.25)
        assert fs.elems == (1, 4, 5, 8, 9, 12)

    def test_zero_omega_full_set(self):
        fs = gen_power_selector(9, 2, 0.4, Seed(0), omega=0)
        assert fs.elems == tuple(range(1, 10))

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            gen_power_selector(10, 0, 0.5, Seed(0))
        with pytest.raises(ValueError):
            gen_power_selector(10, 1, 0.0, Seed(0))

    def test_mean_density_over_draws(self):
        """Orbit equidistribution: density approaches tau (4 sigma)."""
        n, tau, draws = 4096, 0.3, 200
        sizes = [
            gen_power_selector(n, 2, tau, Seed(55), trial=t).size for t in range(draws)
        ]
        se = math.sqrt(tau * (1 - tau) / (n * draws))
        assert abs(np.mean(sizes) / n - tau) <= 4 * se


class TestPerturbedAp:
    def test_base_progression(self):
        assert np.array_equal(perturbed_ap_base(10, 10, 3), [10, 20, 30])

    def test_explicit_jitter(self):
        fs = gen_perturbed_ap(40, 10, 10, 3, 2, Seed(0), jitter=[-1, 0, 2])
        assert fs.elems == (9, 20, 32)

    def test_zero_jitter_recovers_base(self):
        fs = gen_perturbed_ap(40, 10, 10, 3, 2, Seed(0), jitter=[0, 0, 0])
        assert fs.elems == (10, 20, 30)

    def test_jitter_bounds_validated(self):
        with pytest.raises(ValueError):
            gen_perturbed_ap(40, 10, 10, 3, 2, Seed(0), jitter=[3, 0, 0])

    def test_overlap_rejected(self):
        # 2s+1 > a would let neighbouring windows collide
        with pytest.raises(ValueError):
            gen_perturbed_ap(100, 5, 4, 10, 2, Seed(0))

    def test_clipping_rejected(self):
        with pytest.raises(ValueError):
            gen_perturbed_ap(100, 2, 10, 5, 3, Seed(0))   # b - s < 1
        with pytest.raises(ValueError):
            gen_perturbed_ap(30, 10, 10, 3, 2, Seed(0))   # top + s > n

    def test_cardinality_and_window_membership(self):
        """The jittered set keeps exactly L distinct points, one per window."""
        n, b, a, length, s = 200, 6, 12, 16, 3
        for t in range(20):
            fs = gen_perturbed_ap(n, b, a, length, s, Seed(2), trial=t)
            assert fs.size == length
            base = perturbed_ap_base(b, a, length)
            assert all(
                abs(x - j) <= s for x, j in zip(fs.elems, base)
            )

    def test_window_helper_is_valid(self):
        for length, s in ((8, 1), (32, 5), (100, 10)):
            n, b, a = perturbed_ap_window(length, s)
            fs = gen_perturbed_ap(n, b, a, length, s, Seed(3))
            assert fs.size == length

    def test_expected_autocorrelation_closed_form(self):
        """Hand-checked values of the triangular-law autocorrelation."""
        b, a, length, s = 6, 10, 30, 2
        assert expected_autocorrelation_perturbed_ap(b, a, length, s, 0) == 30.0
        # lag exactly one step: 29 pairs, difference-of-uniforms mass 1/5
        assert expected_autocorrelation_perturbed_ap(b, a, length, s, 10) == pytest.approx(29 / 5)
        # two off the step: mass (5-2)/25
        assert expected_autocorrelation_perturbed_ap(b, a, length, s, 12) == pytest.approx(29 * 3 / 25)
        # farther than 2s from every multiple of a
        assert expected_autocorrelation_perturbed_ap(b, a, length, s, 15) == 0.0
        assert expected_autocorrelation_perturbed_ap(b, a, length, s, 5) == 0.0

    def test_expected_autocorrelation_against_monte_carlo(self):
        """Trial-mean pair counts match the closed form within 4 sigma."""
        n, b, a, length, s = 320, 6, 10, 30, 2
        trials = 4000
        lags = (8, 10, 12, 20)
        counts = {lag: [] for lag in lags}
        for t in range(trials):
            elems = np.array(gen_perturbed_ap(n, b, a, length, s, Seed(13), trial=t).elems)
            diffs = elems[None, :] - elems[:, None]
            for lag in lags:
                counts[lag].append(np.sum(diffs == lag))
        for lag in lags:
            mean = np.mean(counts[lag])
            sem = np.std(counts[lag], ddof=1) / math.sqrt(trials)
            expect = expected_autocorrelation_perturbed_ap(b, a, length, s, lag)
            assert abs(mean - expect) <= 4 * sem + 1e-9


class TestDeterministicSets:
    def test_squares(self):
        fs = gen_squares(100)
        assert fs.elems == tuple(i * i for i in range(1, 11))
        assert fs.size == 10

    def test_ap(self):
        fs = gen_ap(100, 3, 7, 14)
        assert fs.size == 14
        assert fs.elems[-1] == 94

    def test_ap_overflow(self):
        with pytest.raises(ValueError):
            gen_ap(90, 3, 7, 14)

    def test_ap2d_enumeration(self):
        fs = gen_ap2d(13, 1, 1, 3, 10, 2)
        assert fs.elems == (1, 2, 3, 11, 12, 13)

    def test_ap2d_gap_condition(self):
        with pytest.raises(ValueError):
            gen_ap2d(100, 1, 2, 5, 10, 2)   # a1*l1 = 10 >= a2


class TestRandomSetModel:
    def test_delta_resolves_to_tau(self):
        m = RandomSetModel("bernoulli", 256, {"delta": 0.5})
        assert m.resolved_params()["tau"] == pytest.approx(1 / 16)

    def test_doubling_k_from_delta(self):
        m = RandomSetModel("doubling", 256, {"delta": 0.5})
        assert m.resolved_params()["k"] == 4

    def test_generate_matches_direct_call(self):
        m = RandomSetModel("bernoulli", 200, {"tau": 0.3})
        assert m.generate(Seed(4), trial=2) == gen_bernoulli(200, 0.3, Seed(4), trial=2)

    def test_unknown_variant_rejected(self):
        with pytest.raises(ValueError):
            RandomSetModel("mystery", 10, {})

    def test_missing_parameters_rejected(self):
        with pytest.raises(ValueError):
            RandomSetModel("perturbed_ap", 100, {"b": 2, "a": 9})

    def test_deterministic_variants_ignore_seed(self):
        m = RandomSetModel("squares", 64, {})
        assert m.generate(Seed(1)) == m.generate(Seed(999))


class TestSetFiles:
    def test_round_trip(self, tmp_path):
        fs = gen_bernoulli(300, 0.2, Seed(21))
        path = tmp_path / "set.txt"
        write_set_file(path, fs, model_tag="bernoulli", seed=Seed(21))
        back, meta = read_set_file(path)
        assert back == fs
        assert meta["model"] == "bernoulli"
        assert meta["seed"] == "21:0"

    def test_headerless_file(self, tmp_path):
        path = tmp_path / "plain.txt"
        path.write_text("4\n9\n16\n")
        fs, meta = read_set_file(path)
        assert fs.elems == (4, 9, 16)
        assert fs.ambient_size == 16
        assert meta["model"] == "custom"

    def test_parse_error_reports_line_number(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("1\n2\nbanana\n")
        with pytest.raises(SetFileError) as err:
            read_set_file(path)
        assert "line 3" in str(err.value)

    def test_malformed_header_rejected(self, tmp_path):
        path = tmp_path / "hdr.txt"
        path.write_text("# N=ten model=x seed=0:0\n1\n")
        with pytest.raises(SetFileError) as err:
            read_set_file(path)
        assert "line 1" in str(err.value)

    def test_element_outside_header_window_rejected(self, tmp_path):
        path = tmp_path / "big.txt"
        path.write_text("# N=10 model=custom seed=0:0\n4\n11\n")
        with pytest.raises(SetFileError):
            read_set_file(path)
