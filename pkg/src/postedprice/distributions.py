"""Buyer valuation distributions and the static revenue machinery.

Three continuous families with bounded support are provided: uniform,
beta, and an exponential conditioned on an upper bound.  Each exposes a
CDF, a density, the mean, and quantiles.  `static_revenue` is the one-shot
revenue curve p * P[V >= p]; its leftmost global maximizer is the price an
optimal single-round seller posts.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .errors import InvalidParameterError

__all__ = [
    "ValuationDistribution",
    "Uniform",
    "Beta",
    "TruncatedExponential",
    "parse_distribution",
    "static_revenue",
    "myerson_price",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _maybe_scalar(arr: np.ndarray, scalar_input: bool):
    return float(arr) if scalar_input else arr


class ValuationDistribution:
    """Common interface: continuous distribution of the buyer's valuation."""

    kind: str = ""

    @property
    def support(self) -> tuple[float, float]:
        raise NotImplementedError

    @property
    def mean(self) -> float:
        raise NotImplementedError

    def cdf(self, v):
        raise NotImplementedError

    def pdf(self, v):
        raise NotImplementedError

    def quantile(self, q):
        raise NotImplementedError

    def sf(self, v):
        """Survival function P[V > v] (= P[V >= v] by continuity)."""
        v_arr = np.asarray(v, dtype=float)
        out = 1.0 - np.asarray(self.cdf(v_arr))
        return _maybe_scalar(out, np.isscalar(v) or v_arr.ndim == 0)

    def spec_string(self) -> str:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.spec_string()!r})"


class Uniform(ValuationDistribution):
    kind = "uniform"

    def __init__(self, lo: float = 0.0, hi: float = 1.0):
        lo, hi = float(lo), float(hi)
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo or lo < 0:
            raise InvalidParameterError("uniform needs 0 <= lo < hi, both finite")
        self.lo, self.hi = lo, hi

    @property
    def support(self):
        return (self.lo, self.hi)

    @property
    def mean(self):
        return 0.5 * (self.lo + self.hi)

    def cdf(self, v):
        scalar = np.isscalar(v)
        v = np.asarray(v, dtype=float)
        out = np.clip((v - self.lo) / (self.hi - self.lo), 0.0, 1.0)
        return _maybe_scalar(out, scalar or v.ndim == 0)

    def pdf(self, v):
        scalar = np.isscalar(v)
        v = np.asarray(v, dtype=float)
        out = np.where((v >= self.lo) & (v <= self.hi), 1.0 / (self.hi - self.lo), 0.0)
        return _maybe_scalar(out, scalar or v.ndim == 0)

    def quantile(self, q):
        scalar = np.isscalar(q)
        q = np.asarray(q, dtype=float)
        out = self.lo + q * (self.hi - self.lo)
        return _maybe_scalar(out, scalar or q.ndim == 0)

    def spec_string(self):
        return f"uniform:{self.lo:g},{self.hi:g}"


class Beta(ValuationDistribution):
    kind = "beta"

    def __init__(self, alpha: float, beta: float):
        alpha, beta = float(alpha), float(beta)
        if alpha <= 0 or beta <= 0:
            raise InvalidParameterError("beta needs alpha > 0 and beta > 0")
        self.alpha, self.beta = alpha, beta
        self._log_norm = special.betaln(alpha, beta)

    @property
    def support(self):
        return (0.0, 1.0)

    @property
    def mean(self):
        return self.alpha / (self.alpha + self.beta)

    def cdf(self, v):
        scalar = np.isscalar(v)
        v = np.asarray(v, dtype=float)
        out = special.betainc(self.alpha, self.beta, np.clip(v, 0.0, 1.0))
        return _maybe_scalar(out, scalar or v.ndim == 0)

    def pdf(self, v):
        scalar = np.isscalar(v)
        v = np.asarray(v, dtype=float)
        inside = (v > 0.0) & (v < 1.0)
        x = np.where(inside, v, 0.5)  # dummy abscissa where the density is zero
        with np.errstate(divide="ignore"):
            log_pdf = ((self.alpha - 1.0) * np.log(x)
                       + (self.beta - 1.0) * np.log1p(-x) - self._log_norm)
        out = np.where(inside, np.exp(log_pdf), 0.0)
        return _maybe_scalar(out, scalar or v.ndim == 0)

    def quantile(self, q):
        scalar = np.isscalar(q)
        q = np.asarray(q, dtype=float)
        out = special.betaincinv(self.alpha, self.beta, np.clip(q, 0.0, 1.0))
        return _maybe_scalar(out, scalar or q.ndim == 0)

    def spec_string(self):
        return f"beta:{self.alpha:g},{self.beta:g}"


class TruncatedExponential(ValuationDistribution):
    """Exponential(rate) conditioned on the interval [0, bound].

    Density rate * exp(-rate*x) / (1 - exp(-rate*bound)) on [0, bound]; this
    is the conditional density of an Exp(rate) variable given it lands in
    the interval, so it integrates to one.  Beware the superficially similar
    expression (1 - exp(-x)) / (1 - exp(-1)): at unit parameters that is this
    distribution's CDF, not a density (it does not integrate to one).
    """

    kind = "texp"

    def __init__(self, rate: float = 1.0, bound: float = 1.0):
        rate, bound = float(rate), float(bound)
        if rate <= 0 or bound <= 0 or not math.isfinite(bound):
            raise InvalidParameterError("texp needs rate > 0 and a finite bound > 0")
        self.rate, self.bound = rate, bound
        self._mass = -math.expm1(-rate * bound)  # 1 - exp(-rate*bound)

    @property
    def support(self):
        return (0.0, self.bound)

    @property
    def mean(self):
        lam, b = self.rate, self.bound
        return 1.0 / lam - b * math.exp(-lam * b) / self._mass

    def cdf(self, v):
        scalar = np.isscalar(v)
        v = np.asarray(v, dtype=float)
        x = np.clip(v, 0.0, self.bound)
        out = -np.expm1(-self.rate * x) / self._mass
        return _maybe_scalar(out, scalar or v.ndim == 0)

    def pdf(self, v):
        scalar = np.isscalar(v)
        v = np.asarray(v, dtype=float)
        inside = (v >= 0.0) & (v <= self.bound)
        out = np.where(inside, self.rate * np.exp(-self.rate * v) / self._mass, 0.0)
        return _maybe_scalar(out, scalar or v.ndim == 0)

    def quantile(self, q):
        scalar = np.isscalar(q)
        q = np.asarray(q, dtype=float)
        out = -np.log1p(-np.clip(q, 0.0, 1.0) * self._mass) / self.rate
        return _maybe_scalar(out, scalar or q.ndim == 0)

    def spec_string(self):
        return f"texp:{self.rate:g},{self.bound:g}"


def parse_distribution(spec: str) -> ValuationDistribution:
    """Parse a distribution spec string: 'uniform:0,1', 'beta:4,2', 'texp:1,1'."""
    try:
        name, _, argstr = spec.partition(":")
        args = [float(a) for a in argstr.split(",")] if argstr else []
    except (AttributeError, ValueError):
        raise InvalidParameterError(f"malformed distribution spec {spec!r}") from None
    families = {"uniform": Uniform, "beta": Beta, "texp": TruncatedExponential}
    if name not in families:
        raise InvalidParameterError(
            f"unknown distribution family {name!r}; expected one of {sorted(families)}")
    try:
        return families[name](*args)
    except TypeError:
        raise InvalidParameterError(
            f"wrong number of parameters in distribution spec {spec!r}") from None


def static_revenue(dist: ValuationDistribution, price: float) -> float:
    """One-shot expected revenue p * P[V >= p] of posting a single price."""
    if price < 0:
        raise InvalidParameterError("price must be non-negative")
    return float(price * dist.sf(price))


def _golden_section_max(f, a: float, b: float, tol: float) -> float:
    """Abscissa of the maximum of a unimodal f on [a, b], to absolute tol."""
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 >= f2:  # ties move left, keeping the leftmost maximizer
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
    return a if f(a) >= f(b) else 0.5 * (a + b)


def myerson_price(dist: ValuationDistribution, grid_points: int = 10_000,
                  refine_tol: float = 1e-10) -> tuple[float, float]:
    """Leftmost global maximizer of the static revenue curve, and its value.

    A dense grid scan over the support brackets the global maximum (no
    unimodality assumed), then golden-section search refines the bracket.
    Returns (p_star, h_star).
    """
    lo, hi = dist.support
    grid = np.linspace(lo, hi, grid_points)
    values = grid * np.asarray(dist.sf(grid))
    i = int(np.argmax(values))  # argmax takes the first = leftmost among ties
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, grid_points - 1)]
    p_star = _golden_section_max(lambda p: p * dist.sf(p), a, b, refine_tol)
    return float(p_star), static_revenue(dist, p_star)
