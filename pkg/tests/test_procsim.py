import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import ks_2samp

from hypervis import closedform as cf
from hypervis import hypgeom as hg
from hypervis import procsim as ps
from hypervis.rng import stream

from conftest import ks_statistic, random_rotation


class TestSampleRadial:
    def test_range(self, rng):
        for d in (2, 3, 5):
            t = ps.sample_radial(d, 2.0, rng, size=500)
            assert np.all((t >= 0) & (t <= 2.0))

    def test_d2_cdf(self):
        r_max = 2.0
        t = ps.sample_radial(2, r_max, stream(101), size=10_000)
        stat = ks_statistic(t, lambda x: (np.cosh(x) - 1) / (math.cosh(r_max) - 1))
        assert stat < 1.63 / 100

    def test_d3_mean_matches_quadrature(self):
        r_max = 2.0
        t = ps.sample_radial(3, r_max, stream(102), size=20_000)
        norm, _ = quad(lambda s: math.sinh(s) ** 2, 0, r_max)
        mean, _ = quad(lambda s: s * math.sinh(s) ** 2, 0, r_max)
        mean /= norm
        assert abs(t.mean() - mean) < 3 * t.std(ddof=1) / math.sqrt(len(t))

    def test_d5_cdf(self):
        r_max = 1.5
        t = ps.sample_radial(5, r_max, stream(103), size=10_000)
        norm, _ = quad(lambda s: math.sinh(s) ** 4, 0, r_max)

        def cdf(x):
            return np.array([quad(lambda s: math.sinh(s) ** 4, 0, xi)[0] / norm for xi in np.atleast_1d(x)])

        assert ks_statistic(t, cdf) < 1.63 / 100

    def test_annulus_restriction(self, rng):
        t = ps.sample_radial_annulus(3, 1.0, 1.5, rng, 1000)
        assert np.all((t >= 1.0) & (t <= 1.5))


class TestSamplePoissonBall:
    def test_mean_count(self):
        d, gamma, r_max = 2, 1.0, 1.5
        expected = gamma * float(cf.ball_volume(d, r_max))
        counts = np.array([len(ps.sample_poisson_ball(d, gamma, r_max, stream(5, i))) for i in range(1000)])
        stderr = counts.std(ddof=1) / math.sqrt(len(counts))
        assert abs(counts.mean() - expected) < 3 * stderr

    def test_poisson_dispersion(self):
        counts = np.array([len(ps.sample_poisson_ball(2, 1.0, 1.5, stream(6, i))) for i in range(1000)])
        mean = counts.mean()
        var = counts.var(ddof=1)
        # sampling stderr of the variance estimate for a Poisson count
        stderr_var = math.sqrt(2 * var**2 / (len(counts) - 1) + var / len(counts))
        assert abs(var - mean) < 4 * stderr_var

    def test_near_zero_intensity(self, rng):
        pts = ps.sample_poisson_ball(2, 1e-9 / float(cf.ball_volume(2, 1.0)), 1.0, rng)
        assert len(pts) == 0

    def test_points_on_hyperboloid(self, rng):
        pts = ps.sample_poisson_ball(3, 2.0, 1.0, rng)
        for x in pts:
            hg.assert_point(x)

    def test_resource_guard(self, rng):
        with pytest.raises(ValueError, match="resource guard"):
            ps.sample_poisson_ball(2, 1e6, 15.0, rng)


class TestSampleBoolean:
    def test_invariants(self, rng):
        law = cf.UniformRadius(0.1, 0.6)
        sample = ps.sample_boolean(2, 1.5, law, 2.0, rng)
        assert sample.window_radius == pytest.approx(2.6)
        assert np.all(sample.radii <= 0.6 + 1e-12)
        dists = np.arccosh(np.maximum(1.0, sample.centers[:, 0]))
        assert np.all(dists <= sample.window_radius + 1e-9)
        assert sample.conditioned
        assert np.all(dists > sample.radii)  # base point uncovered

    def test_mecke_mean_covering_count(self):
        # unconditioned mean number of grains containing the base point
        law = cf.FixedRadius(0.5)
        expected = 1.0 * float(cf.ball_volume(2, 0.5))
        counts = []
        for i in range(1000):
            s = ps.sample_boolean(2, 1.0, law, 1.5, stream(7, i), condition_origin_free=False)
            d0 = np.arccosh(np.maximum(1.0, s.centers[:, 0]))
            counts.append(int(np.sum(d0 <= s.radii)))
        counts = np.array(counts)
        stderr = counts.std(ddof=1) / math.sqrt(len(counts))
        assert abs(counts.mean() - expected) < 3 * stderr

    def test_uncovered_probability(self):
        law = cf.FixedRadius(0.5)
        expected = math.exp(-1.0 * float(cf.ball_volume(2, 0.5)))
        hits = 0
        n = 10_000
        for i in range(n):
            s = ps.sample_boolean(2, 1.0, law, 1.0, stream(8, i), condition_origin_free=False)
            d0 = np.arccosh(np.maximum(1.0, s.centers[:, 0]))
            hits += int(not np.any(d0 <= s.radii))
        p_hat = hits / n
        stderr = math.sqrt(expected * (1 - expected) / n)
        assert abs(p_hat - expected) < 3 * stderr

    def test_delete_matches_rejection(self):
        law = cf.FixedRadius(0.5)
        n = 4000
        deleted = np.array(
            [ps.sample_boolean(2, 1.0, law, 1.5, stream(9, i), method="delete").n_grains for i in range(n)]
        )
        rejected = np.array(
            [ps.sample_boolean(2, 1.0, law, 1.5, stream(10, i), method="reject").n_grains for i in range(n)]
        )
        diff = deleted.mean() - rejected.mean()
        stderr = math.sqrt(deleted.var(ddof=1) / n + rejected.var(ddof=1) / n)
        assert abs(diff) < 3 * stderr

    def test_reproducible(self):
        law = cf.UniformRadius(0.0, 1.0)
        a = ps.sample_boolean(2, 1.2, law, 2.0, stream(11, 0))
        b = ps.sample_boolean(2, 1.2, law, 2.0, stream(11, 0))
        np.testing.assert_array_equal(a.centers, b.centers)
        np.testing.assert_array_equal(a.radii, b.radii)

    def test_isotropy_two_sample(self):
        # nearest-grain distance distribution is unchanged by a fixed rotation
        law = cf.FixedRadius(0.3)
        q = random_rotation(2, stream(12))

        def nearest(sample, rotate):
            centers = hg.rotate_about_base(sample.centers, q) if rotate else sample.centers
            return float(np.arccosh(np.maximum(1.0, centers[:, 0])).min())

        plain = [nearest(ps.sample_boolean(2, 1.0, law, 2.0, stream(13, i)), False) for i in range(800)]
        rotated = [nearest(ps.sample_boolean(2, 1.0, law, 2.0, stream(14, i)), True) for i in range(800)]
        assert ks_2samp(plain, rotated).pvalue > 0.01


class TestSampleHyperplanes:
    def test_normal_invariants(self, rng):
        sample = ps.sample_hyperplanes(2, 1.0, 2.0, rng)
        for n in sample.normals:
            assert hg.minkowski_dot(n, n) == pytest.approx(1.0, abs=1e-9)
            assert abs(n[0]) <= math.sinh(sample.window_radius) + 1e-9
        assert sample.d == 2

    def test_construction_identity(self, rng):
        # the normal built from (offset, direction) annihilates the foot point
        for d in (2, 3):
            x = rng.uniform(-2, 2)
            w = ps.unit_vectors(d, rng, 1)[0]
            n = ps.normals_from_polar(np.array([x]), w[None, :])[0]
            assert hg.minkowski_dot(n, n) == pytest.approx(1.0, abs=1e-12)
            u = np.concatenate([[0.0], w])
            foot = hg.exp_map(hg.base_point(d), u, abs(x))
            if x >= 0:
                assert abs(hg.minkowski_dot(foot, n)) < 1e-9

    def test_count_mean_d2(self):
        gamma, r_obs = 1.0, 2.0
        expected = gamma * 2 * math.sinh(r_obs)
        counts = np.array([ps.sample_hyperplanes(2, gamma, r_obs, stream(15, i)).n_planes for i in range(1000)])
        stderr = counts.std(ddof=1) / math.sqrt(len(counts))
        assert abs(counts.mean() - expected) < 3 * stderr

    def test_count_mean_d3(self):
        gamma, r_obs = 0.7, 1.5
        expected = gamma * (math.sinh(r_obs) * math.cosh(r_obs) + r_obs)
        counts = np.array([ps.sample_hyperplanes(3, gamma, r_obs, stream(16, i)).n_planes for i in range(1000)])
        stderr = counts.std(ddof=1) / math.sqrt(len(counts))
        assert abs(counts.mean() - expected) < 3 * stderr

    def test_offset_density_d2(self):
        r_obs = 1.5
        dists = ps.sample_plane_distances(2, 0.0, r_obs, stream(17), 10_000)
        stat = ks_statistic(dists, lambda x: np.sinh(x) / math.sinh(r_obs))
        assert stat < 1.63 / 100

    def test_offset_density_d4(self):
        r_obs = 1.0
        dists = ps.sample_plane_distances(4, 0.0, r_obs, stream(18), 10_000)
        norm, _ = quad(lambda s: math.cosh(s) ** 3, 0, r_obs)

        def cdf(x):
            return np.array([quad(lambda s: math.cosh(s) ** 3, 0, xi)[0] / norm for xi in np.atleast_1d(x)])

        assert ks_statistic(dists, cdf) < 1.63 / 100


class TestBandFirstTouches:
    @pytest.mark.parametrize("s_lo", [0.0, 2.0, 7.5])
    def test_band_survival_matches_rate(self, s_lo):
        # survival over a depth band is exp(-a * width) with a = gamma * v*
        gamma, law, width = 0.9, cf.FixedRadius(0.5), 0.5
        a = gamma * cf.grain_moments(2, law).v_dm1_star
        n = 40_000
        first = ps.band_first_touches(2, gamma, law, s_lo, s_lo + width, n, stream(19, int(10 * s_lo)))
        p_hat = np.mean(np.isinf(first))
        p = math.exp(-a * width)
        assert abs(p_hat - p) < 4 * math.sqrt(p * (1 - p) / n)

    def test_touch_positions_in_band(self, rng):
        first = ps.band_first_touches(2, 1.0, cf.UniformRadius(0.1, 0.7), 1.0, 1.5, 2000, rng)
        hit = first[np.isfinite(first)]
        assert np.all((hit > 1.0) & (hit <= 1.5))

    def test_first_touch_density_is_exponential(self):
        # conditional first touch in a long band follows the truncated Exp(a) law
        gamma, law = 1.1, cf.FixedRadius(0.4)
        a = gamma * cf.grain_moments(2, law).v_dm1_star
        first = ps.band_first_touches(2, gamma, law, 0.0, 3.0, 60_000, stream(20))
        hit = first[np.isfinite(first)]
        trunc = 1.0 - math.exp(-a * 3.0)
        stat = ks_statistic(hit, lambda x: (1.0 - np.exp(-a * x)) / trunc)
        assert stat < 1.63 / math.sqrt(len(hit))
