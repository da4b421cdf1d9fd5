"""Approaching infinite games with price-freezing truncations.

A tau-step pricing freezes its price after round tau, which makes the
infinite game equivalent to a tau-round one with the discount tails
aggregated into the last weight.  Its optimal value lower-bounds the true
optimum and is within Gamma_S(beyond tau) * E[V] of it, so sweeping tau
squeezes the unknown optimum from both sides.
"""

from postedprice import Uniform, make_geometric_discount, tau_step_optimal, truncate

uniform = Uniform(0, 1)
gb = make_geometric_discount(0.2)
gs = make_geometric_discount(0.8)

print("tail aggregation at tau = 3 (buyer rate 0.2, seller rate 0.8):")
game = truncate(gb, gs, 3)
print(f"  buyer weights  {tuple(round(w, 4) for w in game.buyer.weights)}")
print(f"  seller weights {tuple(round(w, 4) for w in game.seller.weights)}")
print(f"  seller mass beyond round 3: {game.seller_tail:.4f}")

print("\nsqueezing the infinite-game optimum:")
print("  tau   value (lower bound)   upper bound   gap")
for tau in range(2, 7):
    res = tau_step_optimal(uniform, gb, gs, tau, starts=8, seed=1)
    print(f"  {tau}     {res.opt_lower:.6f}            {res.opt_upper:.6f}"
          f"      {res.opt_upper - res.opt_lower:.6f}")

baseline = gs.total * 0.25
res = tau_step_optimal(uniform, gb, gs, 6, starts=8, seed=1)
print(f"\nconstant pricing earns {baseline:.4f}; the 6-step optimum already "
      f"earns {res.value:.4f} (x{res.value / baseline:.3f})")
