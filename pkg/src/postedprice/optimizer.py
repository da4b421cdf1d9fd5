"""Maximization of the revenue form over the ordered cone Delta^k.

Multi-start projected gradient ascent with Armijo backtracking.  The
feasible set {0 <= v_1 <= ... <= v_k} admits an exact Euclidean projection
(isotonic regression followed by clamping at zero, which commute on this
cone), so no general-purpose NLP solver is needed.  The form is not
concave for unequal discounts, hence the multi-start.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import isotonic_regression

from .core import DiscountSequence, PricingTree
from .distributions import ValuationDistribution, myerson_price
from .errors import InvalidParameterError
from .reduction import (_bilinear_gradient, _bilinear_value, build_system,
                        v_to_tree)

__all__ = [
    "OptimizationResult",
    "DiscountOrderWarning",
    "project_to_delta",
    "discount_rates",
    "rate_order_satisfied",
    "maximize_L",
    "maximize_bilinear",
    "t2_uniform_qp",
]

ARMIJO_C = 1e-4
ARMIJO_SHRINK = 0.5


class DiscountOrderWarning(UserWarning):
    """The per-round discount rates do not certify the optimality guarantee."""


@dataclass(frozen=True)
class OptimizationResult:
    """Outcome of maximizing the revenue form over Delta^k."""

    v_star: np.ndarray
    value: float
    tree: PricingTree
    iterations: int
    starts: int
    converged: bool
    kkt_residual: float


def project_to_delta(x) -> np.ndarray:
    """Euclidean projection onto {0 <= v_1 <= ... <= v_k}.

    Isotonic regression (pool-adjacent-violators) enforces the ordering;
    clamping negatives to zero enforces non-negativity.  The two steps
    commute for this cone, so the composition is the exact projection.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise InvalidParameterError("expected a non-empty 1-d vector")
    iso = isotonic_regression(x, increasing=True).x
    return np.maximum(iso, 0.0)


def discount_rates(discount: DiscountSequence) -> tuple[float, ...]:
    """Per-round rates nu_t = gamma_{t+1} / gamma_t (0 where gamma_t = 0)."""
    w = discount.weights
    return tuple(w[t + 1] / w[t] if w[t] > 0 else 0.0 for t in range(len(w) - 1))


def rate_order_satisfied(buyer_discount: DiscountSequence,
                         seller_discount: DiscountSequence,
                         tol: float = 1e-12) -> bool:
    """Whether nu(buyer) <= nu(seller) holds at every round.

    This is the hypothesis under which searching Delta^k is guaranteed to
    find a globally optimal pricing.  Infinite geometric sequences compare
    by their rates.
    """
    if not buyer_discount.is_finite or not seller_discount.is_finite:
        if buyer_discount.kind == "geometric" and seller_discount.kind == "geometric":
            if buyer_discount.horizon == seller_discount.horizon is None:
                return buyer_discount.rate <= seller_discount.rate + tol
        # a finite sequence viewed inside the infinite game drops to rate 0
        if buyer_discount.is_finite and not seller_discount.is_finite:
            nb = discount_rates(buyer_discount) + (0.0,)
            ns = (seller_discount.rate,) * len(nb)
            return all(b <= s + tol for b, s in zip(nb, ns))
        return False
    nb = discount_rates(buyer_discount)
    ns = discount_rates(seller_discount)
    if len(nb) != len(ns):
        raise InvalidParameterError("discounts must have equal length")
    return all(b <= s + tol for b, s in zip(nb, ns))


def _projected_ascent(value_fn, grad_fn, x0: np.ndarray, step0: float,
                      max_iter: int, tol: float):
    """One run of projected gradient ascent with Armijo backtracking.

    Accepted line-search steps never decrease the objective.  Near the
    optimum the objective differences underflow double precision before
    the gradient mapping does, so once the line search stalls the run
    switches to plain fixed-step projected iterations, which contract to
    the optimum without comparing objective values.  The run stops when
    the gradient-mapping norm (at the reference step) is under `tol` or
    stops decreasing.
    """
    x = project_to_delta(x0)
    f = value_fn(x)
    step = step0
    kkt = np.inf
    best_kkt = np.inf
    stalled = 0
    for it in range(1, max_iter + 1):
        g = grad_fn(x)
        reference = project_to_delta(x + step0 * g)
        kkt = float(np.linalg.norm(reference - x) / step0)
        if kkt <= tol:
            return x, value_fn(x), it, True, kkt
        if kkt < best_kkt * (1.0 - 1e-4):
            best_kkt = kkt
            stalled = 0
        else:
            stalled += 1
            if stalled > 250:  # gradient mapping hit its noise floor
                return x, value_fn(x), it, False, kkt
        t = min(step * 2.0, step0 * 1e6)
        accepted = False
        while t >= step0 * 1e-14:
            x_new = project_to_delta(x + t * g)
            f_new = value_fn(x_new)
            if np.isfinite(f_new) and f_new >= f + ARMIJO_C * float(g @ (x_new - x)) \
                    and f_new >= f:
                accepted = float(np.linalg.norm(x_new - x)) > 0
                break
            t *= ARMIJO_SHRINK
        if accepted:
            x, f, step = x_new, f_new, t
        else:
            # objective comparisons are below float resolution; take the
            # reference step anyway and keep watching the gradient mapping
            x = reference
            f = value_fn(x)
            step = step0
    return x, value_fn(x), max_iter, False, kkt


def maximize_bilinear(matrix: np.ndarray, dist: ValuationDistribution, *,
                      starts: int | None = None, max_iter: int = 100_000,
                      tol: float = 1e-9, seed: int = 0,
                      extra_starts=()) -> tuple[np.ndarray, float, int, bool, float]:
    """Multi-start ascent of (1 - F(v))' M v over Delta^k for a given kernel M.

    Start points: the constant vector at the one-shot optimal price, the
    distribution's quantiles, seeded random sorted draws, and any caller
    extras.  Among runs tying for the best value (within 1e-10) the
    lexicographically smallest point is reported, so results are stable.
    """
    k = matrix.shape[0]
    if starts is None:
        starts = max(16, 4 * k)
    if starts < 1:
        raise InvalidParameterError("needs at least one start")
    p_star, _ = myerson_price(dist)
    lo, hi = dist.support
    points = [np.full(k, p_star),
              np.sort(np.asarray(dist.quantile(np.linspace(0.0, 1.0, k + 2)[1:-1])))]
    points.extend(np.asarray(p, dtype=float) for p in extra_starts)
    rng = np.random.default_rng(seed)
    while len(points) < starts:
        points.append(np.sort(rng.uniform(lo, hi, size=k)))
    points = points[:max(starts, 1)]

    step0 = 1.0 / max(np.linalg.norm(matrix, 1), 1e-12)
    value_fn = lambda v: _bilinear_value(matrix, dist, v)
    grad_fn = lambda v: _bilinear_gradient(matrix, dist, v)

    runs = []
    total_iters = 0
    for x0 in points:
        x, f, iters, ok, kkt = _projected_ascent(value_fn, grad_fn, x0, step0,
                                                 max_iter, tol)
        total_iters += iters
        runs.append((f, x, ok, kkt))
    best_f = max(r[0] for r in runs)
    tied = [r for r in runs if r[0] >= best_f - 1e-10]
    tied.sort(key=lambda r: tuple(r[1]))
    f, x, ok, kkt = tied[0]
    return x, f, total_iters, ok, kkt


def maximize_L(dist: ValuationDistribution, buyer_discount: DiscountSequence,
               seller_discount: DiscountSequence, horizon: int | None = None, *,
               starts: int | None = None, max_iter: int = 100_000,
               tol: float = 1e-9, seed: int = 0) -> OptimizationResult:
    """Revenue-maximal pricing tree for one game, via the cone reduction.

    Builds the reduction system, ascends L from multiple starts, and maps
    the winning point back to its tree.  If the discount rates violate
    nu(buyer) <= nu(seller) a warning is issued: the result is still the
    best completely active pricing, but the global optimality guarantee
    does not apply.
    """
    system = build_system(buyer_discount, seller_discount, horizon)
    if not rate_order_satisfied(system.buyer_discount, system.seller_discount):
        warnings.warn(
            "discount rates violate nu(buyer) <= nu(seller); the optimum over "
            "completely active pricings may not be globally optimal",
            DiscountOrderWarning, stacklevel=2)
    v, value, iters, ok, kkt = maximize_bilinear(
        system.Xi, dist, starts=starts, max_iter=max_iter, tol=tol, seed=seed)
    tree = v_to_tree(system, v)
    return OptimizationResult(v_star=v, value=value, tree=tree, iterations=iters,
                              starts=starts if starts is not None else max(16, 4 * system.k),
                              converged=ok, kkt_residual=kkt)


def t2_uniform_qp(gs_rate: float, gb_rate: float) -> tuple[np.ndarray, float]:
    """Exact solution of the reduced two-round problem for U[0, 1].

    With a uniform valuation the reduced form is a strictly concave
    quadratic, so enumerating the boundary configurations of
    {0 <= v1 <= v2} (interior, v1 = 0, v1 = v2) solves it exactly.  Used as
    a cross-check of the gradient path, not as the default solver.
    """
    if not 0.0 < gb_rate < gs_rate < 1.0:
        raise InvalidParameterError("rates must satisfy 0 < gb < gs < 1")
    M = np.array([[gs_rate, 0.0],
                  [-(gs_rate - gb_rate), 1.0 + gs_rate - gb_rate]])
    # L(v) = 1' M v - v' M v  for F(v) = v on [0, 1]
    value = lambda v: float(M.sum(axis=0) @ v - v @ M @ v)
    S = M + M.T
    candidates = []
    v_int = np.linalg.solve(S, M.sum(axis=0))
    if 0.0 <= v_int[0] <= v_int[1] <= 1.0:
        candidates.append(v_int)
    # v1 = 0: maximize the scalar quadratic in v2
    v2 = M.sum(axis=0)[1] / S[1, 1]
    candidates.append(np.array([0.0, min(max(v2, 0.0), 1.0)]))
    # v1 = v2 = w: the constant pricing line
    w = M.sum() / S.sum()
    w = min(max(w, 0.0), 1.0)
    candidates.append(np.array([w, w]))
    best = max(candidates, key=value)
    return best, value(best)
