"""
Pricing a European put by transform-and-invert
==============================================

One asset, Black-Scholes dynamics.  The Laplace transform in time turns
the pricing PDE into 15 independent complex-valued two-point boundary
problems, each solved with P1 finite elements on (0, L).  The quadrature
inversion then reassembles the price curve, which we compare against the
closed-form Black-Scholes formula.

Expected output: the L2 error drops by a factor of four per mesh
halving (second-order elements), while the 15 transform solves are
already accurate enough that quadrature error never shows.
"""

import numpy as np

from lapbs import (ContourParams, Market1D, Mesh1D, bs_put, invert_at,
                   l2_error, reduction_rate)
from lapbs.parallel import ProblemSpec, solve_ensemble

market = Market1D(r=0.05, sigma=0.3, strike=50.0, maturity=1.0, L=200.0)
contour = ContourParams(67.38, 62.09, 0.4213, 0.04556, 15)
exact = lambda x: bs_put(x, market.maturity, market.strike, market.r,
                         market.sigma)

##############################################################################
# Mesh refinement sweep.
print(f"{'meshes':>8} {'h':>8} {'L2 error':>12} {'rate':>6}")
prev = None
for m in (10, 20, 40, 80, 160, 320, 640):
    spec = ProblemSpec("put1d", market, m)
    ensemble, _ = solve_ensemble(spec, contour)
    price = invert_at(ensemble, market.maturity)
    mesh = Mesh1D(market.L, m)
    err = l2_error(price, exact, mesh)
    rate = f"{reduction_rate(prev, err):.3f}" if prev else ""
    print(f"{m:>8} {mesh.h:>8.4g} {err:>12.4e} {rate:>6}")
    prev = err

##############################################################################
# Spot-check a few prices on the finest mesh against the formula.
mesh = Mesh1D(market.L, 640)
print("\nspot prices at T = 1 (finest mesh):")
print(f"{'S':>6} {'computed':>12} {'closed form':>12}")
for spot in (30.0, 50.0, 70.0):
    i = int(spot / mesh.h)
    print(f"{spot:>6.0f} {price[i]:>12.6f} {exact(spot):>12.6f}")
