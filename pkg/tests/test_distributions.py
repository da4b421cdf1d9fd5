import numpy as np
import pytest

from postedprice import (Beta, InvalidParameterError, TruncatedExponential,
                         Uniform, myerson_price, parse_distribution,
                         static_revenue)

ALL_DISTS = [Uniform(0, 1), Uniform(0.2, 1.6), Beta(4, 2), Beta(2, 4),
             TruncatedExponential(1, 1), TruncatedExponential(2.5, 0.8)]

# p*, H* frozen from an independent 10^6-point grid scan of p * (1 - F(p))
GRID_ORACLE = {
    "beta:4,2": (0.535692, 0.409648251967),
    "beta:2,4": (0.275978, 0.159554510112),
    "texp:1,1": (0.432857, 0.192265389350),
}


def test_static_revenue_uniform():
    u = Uniform(0, 1)
    assert static_revenue(u, 0.5) == pytest.approx(0.25)
    assert static_revenue(u, 0.0) == 0.0
    assert static_revenue(u, 1.0) == pytest.approx(0.0)


def test_static_revenue_rejects_negative_price():
    with pytest.raises(InvalidParameterError):
        static_revenue(Uniform(0, 1), -0.1)


def test_myerson_uniform():
    p_star, h_star = myerson_price(Uniform(0, 1))
    assert p_star == pytest.approx(0.5, abs=1e-6)
    assert h_star == pytest.approx(0.25, abs=1e-10)


@pytest.mark.parametrize("spec", sorted(GRID_ORACLE))
def test_myerson_matches_grid_oracle(spec):
    p_ref, h_ref = GRID_ORACLE[spec]
    p_star, h_star = myerson_price(parse_distribution(spec))
    assert p_star == pytest.approx(p_ref, abs=2e-6)
    assert h_star == pytest.approx(h_ref, abs=1e-10)


@pytest.mark.parametrize("dist", ALL_DISTS, ids=lambda d: d.spec_string())
def test_density_integrates_to_one(dist):
    lo, hi = dist.support
    x, w = np.polynomial.legendre.leggauss(64)
    total = 0.0
    for a, b in zip(np.linspace(lo, hi, 9)[:-1], np.linspace(lo, hi, 9)[1:]):
        half = 0.5 * (b - a)
        total += half * np.dot(w, dist.pdf(0.5 * (a + b) + half * x))
    assert total == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("dist", ALL_DISTS, ids=lambda d: d.spec_string())
def test_cdf_pdf_consistency(dist):
    lo, hi = dist.support
    v = np.linspace(lo, hi, 102)[1:-1]
    h = 1e-6 * (hi - lo)
    derivative = (np.asarray(dist.cdf(v + h)) - np.asarray(dist.cdf(v - h))) / (2 * h)
    assert np.max(np.abs(derivative - np.asarray(dist.pdf(v)))) < 1e-4


@pytest.mark.parametrize("dist", ALL_DISTS, ids=lambda d: d.spec_string())
def test_cdf_shape(dist):
    lo, hi = dist.support
    v = np.linspace(lo, hi, 200)
    F = np.asarray(dist.cdf(v))
    assert F[0] == pytest.approx(0.0, abs=1e-12)
    assert F[-1] == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(F) >= -1e-12)
    assert dist.cdf(lo - 1.0) == 0.0 and dist.cdf(hi + 1.0) == 1.0


@pytest.mark.parametrize("dist", ALL_DISTS, ids=lambda d: d.spec_string())
def test_quantile_inverts_cdf(dist):
    q = np.linspace(0.01, 0.99, 25)
    v = np.asarray(dist.quantile(q))
    assert np.asarray(dist.cdf(v)) == pytest.approx(q, abs=1e-9)


@pytest.mark.parametrize("dist", ALL_DISTS, ids=lambda d: d.spec_string())
def test_mean_matches_quadrature(dist):
    lo, hi = dist.support
    x, w = np.polynomial.legendre.leggauss(96)
    total = 0.0
    for a, b in zip(np.linspace(lo, hi, 9)[:-1], np.linspace(lo, hi, 9)[1:]):
        half = 0.5 * (b - a)
        nodes = 0.5 * (a + b) + half * x
        total += half * np.dot(w, nodes * np.asarray(dist.pdf(nodes)))
    assert dist.mean == pytest.approx(total, abs=1e-9)


@pytest.mark.parametrize("dist", ALL_DISTS, ids=lambda d: d.spec_string())
def test_maximum_dominates_support_grid(dist):
    p_star, h_star = myerson_price(dist)
    lo, hi = dist.support
    grid = np.linspace(lo, hi, 1000)
    values = grid * np.asarray(dist.sf(grid))
    assert np.max(values) <= h_star + 1e-9
    # leftmost-ness: nothing materially left of p_star matches the maximum
    step = (hi - lo) / 999
    left = grid < p_star - step
    assert not np.any(values[left] >= h_star - 1e-12)


def test_parse_distribution():
    assert parse_distribution("uniform:0,1").kind == "uniform"
    assert parse_distribution("beta:4,2").alpha == 4
    texp = parse_distribution("texp:1,1")
    assert texp.rate == 1 and texp.bound == 1
    for bad in ("nope:1", "beta:4", "uniform:1,0", "beta:-1,2", "texp:0,1", ""):
        with pytest.raises(InvalidParameterError):
            parse_distribution(bad)


def test_texp_closed_forms():
    d = TruncatedExponential(1, 1)
    e = np.e
    assert d.mean == pytest.approx(1 - 1 / (e - 1), abs=1e-12)
    assert d.cdf(1.0) == pytest.approx(1.0)
    assert d.pdf(0.0) == pytest.approx(1 / (1 - 1 / e))


def test_beta_integer_cdf_closed_form():
    d = Beta(4, 2)
    v = np.linspace(0, 1, 11)
    assert np.asarray(d.cdf(v)) == pytest.approx(5 * v**4 - 4 * v**5, abs=1e-12)
