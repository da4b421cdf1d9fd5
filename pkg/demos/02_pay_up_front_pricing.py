"""The "big deal": charge the whole discounted value at round one.

The tree prices the first round at Gamma_B * p*, gives the goods away
after an acceptance, and prices prohibitively after a rejection.  The
strategic buyer therefore accepts exactly when v > p*, which makes the
scheme collect Gamma_B * H(p*) -- tied with constant pricing under equal
discounts, and strictly better whenever the seller is the less patient
side (pointwise smaller seller weights), by the factor Gamma_B / Gamma_S.
"""

from postedprice import (Uniform, best_response, big_deal, constant_myerson,
                         expected_strategic_revenue, make_geometric_discount,
                         myerson_price, truncate)

uniform = Uniform(0, 1)
p_star, h_star = myerson_price(uniform)

g = make_geometric_discount(0.5)  # infinite game, Gamma = 2
tree, revenue = big_deal(uniform, g, g, tau=10)
print(f"first price {tree.price(''):.4f}, rejection price {tree.price('0'):.4f}, "
      f"revenue {revenue:.4f} (= Gamma * H(p*) = {g.total * h_star:.4f})")

game = truncate(g, g, 10)
print("\nbuyer behavior around the threshold p* = %.3f:" % p_star)
for v in (0.40, 0.49, 0.51, 0.60):
    br = best_response(tree, v, game.buyer, game.seller)
    word = "accepts" if br.strategy.decisions[0] else "rejects"
    print(f"  v = {v:.2f}: {word} the deal "
          f"(surplus {br.surplus:+.4f}, revenue {br.revenue:.4f})")

quad = expected_strategic_revenue(tree, uniform, game.buyer, game.seller)
print(f"\nenumeration + quadrature agree with the closed form: {quad:.10f}")

print("\nless patient seller: the up-front trick beats constant pricing")
for gs_rate, gb_rate in [(0.2, 0.5), (0.2, 0.8), (0.5, 0.9)]:
    gs = make_geometric_discount(gs_rate)
    gb = make_geometric_discount(gb_rate)
    _, bd = big_deal(uniform, gb, gs, tau=10)
    _, const = constant_myerson(uniform, gs)
    print(f"  seller rate {gs_rate}, buyer rate {gb_rate}: "
          f"ratio {bd / const:.4f} (= Gamma_B/Gamma_S = {gb.total / gs.total:.4f})")
