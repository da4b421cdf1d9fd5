"""Why a single well-chosen price is unbeatable when both sides discount alike.

The one-shot revenue curve H(p) = p * P[V >= p] has a leftmost maximizer
p*; posting it every round earns Gamma_S * H(p*).  When the buyer and the
seller share the same discount sequence, no history-dependent pricing tree
can do better -- the numerical optimizer lands back on the constant tree
from every starting point.
"""

import numpy as np

from postedprice import (Uniform, Beta, TruncatedExponential,
                         make_geometric_discount, maximize_L, myerson_price,
                         static_revenue)

for dist in (Uniform(0, 1), Beta(4, 2), TruncatedExponential(1, 1)):
    p_star, h_star = myerson_price(dist)
    print(f"{dist.spec_string():>14}: p* = {p_star:.6f}, H(p*) = {h_star:.6f}")
    for p in (0.25, 0.5, 0.75):
        print(f"                H({p:.2f}) = {static_revenue(dist, p):.6f}")

print()
print("equal discounts: the optimizer recovers constant pricing at p*")
uniform = Uniform(0, 1)
for rate in (0.2, 0.5, 0.8):
    for horizon in (2, 3):
        g = make_geometric_discount(rate, horizon)
        result = maximize_L(uniform, g, g, starts=6, seed=0)
        prices = np.array(list(result.tree.prices().values()))
        print(f"  rate {rate}, T={horizon}: value {result.value:.6f} "
              f"(= {g.total:.2f} * 0.25), prices all within "
              f"{np.max(np.abs(prices - 0.5)):.1e} of p* = 0.5")
