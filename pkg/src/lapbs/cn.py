"""Crank-Nicolson time marching on the same P1 spatial discretizations.

Used for the Table-1 comparison run and for building the basket reference
solution.  The spatial matrix is the z = 0 transformed-problem matrix with
the mass part removed, so both methods discretize the identical operator.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded
from scipy.sparse import csc_matrix
from scipy.sparse.linalg import splu

from . import fem1d, fem2d

__all__ = ["MarchConfig", "march1d", "march2d"]


@dataclass(frozen=True)
class MarchConfig:
    steps: int

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")


def _split_1d(mesh, market, u0, kink):
    """Return (mass bands, spatial bands, load vector)."""
    bc = fem1d.BoundarySpec(left=lambda z: 0.0, right=lambda z: 0.0)
    bands0, _ = fem1d.assemble(mesh, market, 0.0, bc, u0=u0, kink=kink)
    bands1, _ = fem1d.assemble(mesh, market, 1.0, bc, u0=u0, kink=kink)
    mass = bands1 - bands0  # pure mass matrix (the z-coefficient)
    load = fem1d._load_vector(mesh, u0, kink=kink)
    return mass, bands0, load


def march1d(mesh, market, config, u0=None, kink=None,
            left_value=None, right_value=None):
    """theta = 1/2 two-level scheme; Dirichlet data imposed each step.

    ``left_value``/``right_value`` are time-domain boundary data t -> value;
    defaults are the put problem's K*exp(-r*t) and 0.
    """
    if u0 is None:
        u0 = lambda xx: fem1d.payoff_put(xx, market.strike)
        kink = market.strike
    if left_value is None:
        left_value = lambda t: market.strike * np.exp(-market.r * t)
    if right_value is None:
        right_value = lambda t: 0.0

    mass, spatial, load = _split_1d(mesh, market, u0, kink)
    dt = market.maturity / config.steps

    lhs = mass / dt + 0.5 * spatial
    rhs_op = mass / dt - 0.5 * spatial
    # strong Dirichlet rows at both ends
    for bands in (lhs,):
        bands[1, 0] = 1.0
        bands[0, 1] = 0.0
        bands[1, -1] = 1.0
        bands[2, -2] = 0.0

    # L2-projected initial data: consistent with the Galerkin space and
    # free of the kink-interpolation overshoot on coarse meshes
    proj = mass.copy()
    proj[1, 0] = 1.0
    proj[0, 1] = 0.0
    proj[1, -1] = 1.0
    proj[2, -2] = 0.0
    b0 = load.astype(complex)
    b0[0] = left_value(0.0)
    b0[-1] = right_value(0.0)
    u = solve_banded((1, 1), proj, b0).real
    for n in range(config.steps):
        t_next = (n + 1) * dt
        b = _band_mul(rhs_op, u)
        b[0] = left_value(t_next)
        b[-1] = right_value(t_next)
        u = solve_banded((1, 1), lhs, b).real
    return u


def _band_mul(bands, v):
    out = bands[1] * v
    out[:-1] += bands[0, 1:] * v[1:]
    out[1:] += bands[2, :-1] * v[:-1]
    return out


def march2d(mesh, basket, config, edges=None, u0=None):
    """Crank-Nicolson for the basket equation on the triangulated grid."""
    if u0 is None:
        u0 = lambda x1, x2: fem2d.payoff_basket_maxput(x1, x2, basket.strike)
    if edges is None:
        edges = fem2d.EdgeSpec()

    spatial, mass, load = fem2d.build_matrices(mesh, basket, u0)
    dt = basket.maturity / config.steps
    dirichlet = fem2d.dirichlet_nodes(mesh, edges)

    lhs = (mass / dt + 0.5 * spatial).tolil()
    rhs_op = (mass / dt - 0.5 * spatial).tocsr()
    lhs[dirichlet, :] = 0.0
    for i in dirichlet:
        lhs[i, i] = 1.0
    lu = splu(csc_matrix(lhs))

    # L2-projected initial data, matching the 1D march
    proj = mass.tolil()
    proj[dirichlet, :] = 0.0
    for i in dirichlet:
        proj[i, i] = 1.0
    b0 = load.copy()
    b0[dirichlet] = 0.0
    u = splu(csc_matrix(proj)).solve(b0)
    for _ in range(config.steps):
        b = rhs_op @ u
        b[dirichlet] = 0.0
        u = lu.solve(b)
    return u
