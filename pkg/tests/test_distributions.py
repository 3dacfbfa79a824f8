import numpy as np
import pytest
from scipy import integrate, stats

from garchvi import distributions as d
from garchvi.exceptions import ShapeViolation

CASES = [
    ("Normal", ()),
    ("StudentT", (5.0,)),
    ("StudentT", (30.0,)),
    ("GED", (1.0,)),
    ("GED", (1.46,)),
    ("GED", (2.0,)),
    ("SkewT", (6.0, -0.3)),
    ("SkewT", (4.5, 0.5)),
]


def _moment(kind, shape, power):
    f = lambda z: z**power * np.exp(d.logpdf(kind, z, *shape))
    return sum(integrate.quad(f, a, b, limit=200)[0] for a, b in ((-np.inf, 0), (0, np.inf)))


class TestLogpdf:
    def test_normal_values(self):
        assert d.logpdf("Normal", 0.0) == pytest.approx(-0.918938533204673)
        assert d.logpdf("Normal", 1.0) == pytest.approx(-1.418938533204673)

    def test_student_t_matches_scaled_scipy(self):
        nu, z = 10.0, np.linspace(-4, 4, 9)
        scale = np.sqrt((nu - 2) / nu)
        ref = stats.t.logpdf(z / scale, nu) - np.log(scale)
        np.testing.assert_allclose(d.logpdf("StudentT", z, nu), ref, rtol=1e-12)

    def test_ged_two_is_normal(self):
        z = np.linspace(-3, 3, 7)
        np.testing.assert_allclose(d.logpdf("GED", z, 2.0), d.logpdf("Normal", z), atol=1e-12)

    def test_ged_matches_gennorm(self):
        lam, z = 1.46, np.linspace(-3, 3, 7)
        scale = np.sqrt(stats.gennorm.var(lam))
        ref = stats.gennorm.logpdf(z * scale, lam) + np.log(scale)
        np.testing.assert_allclose(d.logpdf("GED", z, lam), ref, rtol=1e-10)

    def test_skewt_zero_skew_is_t(self):
        z = np.linspace(-3, 3, 7)
        np.testing.assert_allclose(d.logpdf("SkewT", z, 7.0, 0.0), d.logpdf("StudentT", z, 7.0), atol=1e-12)

    @pytest.mark.parametrize("kind, shape", CASES)
    def test_standardized(self, kind, shape):
        assert _moment(kind, shape, 0) == pytest.approx(1.0, abs=1e-6)
        assert _moment(kind, shape, 1) == pytest.approx(0.0, abs=1e-6)
        assert _moment(kind, shape, 2) == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("kind, shape", [("StudentT", (2.0,)), ("GED", (0.0,)), ("SkewT", (5.0, 1.0)),
                                             ("SkewT", (1.5, 0.0))])
    def test_shape_violation(self, kind, shape):
        with pytest.raises(ShapeViolation):
            d.logpdf(kind, 0.0, *shape)

    def test_broadcast_over_shapes(self):
        z = np.zeros((3, 4))
        nu = np.array([[3.0], [5.0], [9.0]])
        out = d.logpdf("StudentT", z, nu)
        assert out.shape == (3, 4)
        np.testing.assert_allclose(out[:, 0], [d.logpdf("StudentT", 0.0, v) for v in (3.0, 5.0, 9.0)])


class TestMoments:
    @pytest.mark.parametrize("kind, shape", CASES)
    def test_mean_abs(self, kind, shape):
        assert float(d.mean_abs(kind, *shape)) == pytest.approx(_moment_abs(kind, shape), rel=1e-7)

    def test_normal_mean_abs(self):
        assert d.mean_abs("Normal") == pytest.approx(0.7978845608)

    @pytest.mark.parametrize("kind, shape", CASES)
    def test_positive_parts(self, kind, shape):
        f = lambda z: z * np.exp(d.logpdf(kind, z, *shape))
        pos = integrate.quad(f, 0, np.inf, limit=200)[0]
        pos2 = integrate.quad(lambda z: z * f(z), 0, np.inf, limit=200)[0]
        assert float(d.mean_positive_part(kind, *shape)) == pytest.approx(pos, rel=1e-6)
        assert float(d.positive_second_moment(kind, *shape)) == pytest.approx(pos2, rel=1e-6)


def _moment_abs(kind, shape):
    f = lambda z: abs(z) * np.exp(d.logpdf(kind, z, *shape))
    return sum(integrate.quad(f, a, b, limit=200)[0] for a, b in ((-np.inf, 0), (0, np.inf)))


class TestSample:
    @pytest.mark.parametrize("kind, shape", CASES)
    def test_unit_variance(self, kind, shape):
        z = d.sample(kind, np.random.default_rng(0), 200_000, *shape)
        assert abs(z.mean()) < 0.02
        assert z.var() == pytest.approx(1.0, rel=0.05)

    @pytest.mark.parametrize("kind, shape", [c for c in CASES if c[0] != "Normal"])
    def test_matches_density(self, kind, shape):
        z = d.sample(kind, np.random.default_rng(1), 50_000, *shape)
        grid = np.linspace(-6, 6, 2001)
        cdf = np.cumsum(np.exp(d.logpdf(kind, grid, *shape))) * (grid[1] - grid[0])
        res = stats.kstest(z, lambda x: np.interp(x, grid, cdf))
        assert res.statistic < 0.01

    def test_deterministic(self):
        a = d.sample("SkewT", np.random.default_rng(3), 10, 5.0, 0.2)
        b = d.sample("SkewT", np.random.default_rng(3), 10, 5.0, 0.2)
        np.testing.assert_array_equal(a, b)


def test_aliases():
    assert d.InnovationDist("t").kind == "StudentT"
    assert d.InnovationDist("skew-t").n_shape == 2
    with pytest.raises(ValueError):
        d.InnovationDist("cauchy")
