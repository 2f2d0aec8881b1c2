"""P1 triangle elements for the Laplace-transformed two-asset equation.

The rectangle [0,L1] x [0,L2] carries a uniform tensor grid, each cell
split along the (i,j)-(i+1,j+1) diagonal.  All variable-coefficient
integrands are quadratic per triangle, so the edge-midpoint rule
integrates them exactly.
"""

from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.sparse import coo_matrix, csc_matrix, csr_matrix, identity
from scipy.sparse.linalg import splu

from .fem1d import robin_coefficient

__all__ = [
    "Basket2D",
    "Mesh2D",
    "EdgeSpec",
    "payoff_basket_maxput",
    "build_matrices",
    "assemble2d",
    "solve2d",
    "dirichlet_nodes",
    "interpolate_p1",
    "relative_l2",
]

Condition = Literal["neumann0", "dirichlet0", "transparent"]


@dataclass(frozen=True)
class Basket2D:
    r: float
    a11: float
    a22: float
    a12: float
    strike: float
    maturity: float
    L1: float
    L2: float

    def __post_init__(self):
        if self.a11 <= 0 or self.a22 <= 0:
            raise ValueError("diagonal diffusion coefficients must be positive")
        if self.a12 * self.a12 >= self.a11 * self.a22:
            raise ValueError("diffusion matrix must be positive definite")
        if self.maturity <= 0:
            raise ValueError("maturity must be positive")


class Mesh2D:
    """Uniform (m1+1) x (m2+1) tensor grid, node k = j*(m1+1) + i."""

    def __init__(self, L1, L2, m1, m2):
        self.L1, self.L2 = float(L1), float(L2)
        self.m1, self.m2 = int(m1), int(m2)
        self.h1 = self.L1 / self.m1
        self.h2 = self.L2 / self.m2
        self.x1 = np.linspace(0.0, self.L1, self.m1 + 1)
        self.x2 = np.linspace(0.0, self.L2, self.m2 + 1)
        self.x1g, self.x2g = np.meshgrid(self.x1, self.x2)

    @property
    def n_nodes(self):
        return (self.m1 + 1) * (self.m2 + 1)


@dataclass(frozen=True)
class EdgeSpec:
    """One condition per edge of the rectangle."""

    x1_zero: Condition = "neumann0"
    x2_zero: Condition = "neumann0"
    x1_far: Condition = "dirichlet0"
    x2_far: Condition = "dirichlet0"


def payoff_basket_maxput(x1, x2, strike):
    """Put-on-maximum payoff (K - max(x1, x2))_+."""
    return np.maximum(strike - np.maximum(x1, x2), 0.0)


def _triangles(mesh):
    """Vertex index triplets, both orientations CCW."""
    m1, m2 = mesh.m1, mesh.m2
    ii, jj = np.meshgrid(np.arange(m1), np.arange(m2))
    n00 = (jj * (m1 + 1) + ii).ravel()
    n10 = n00 + 1
    n01 = n00 + (m1 + 1)
    n11 = n01 + 1
    lower = np.stack([n00, n10, n11], axis=1)
    upper = np.stack([n00, n11, n01], axis=1)
    return np.vstack([lower, upper])


def build_matrices(mesh, basket, u0):
    """z-independent pieces: (spatial matrix, mass matrix, load vector).

    The spatial matrix is the weak form of the transformed operator minus
    its z-mass part; boundary rows are untouched here.
    """
    tris = _triangles(mesh)
    coords = np.stack([mesh.x1g.ravel(), mesh.x2g.ravel()], axis=1)
    p = coords[tris]  # (nt, 3, 2)
    nt = len(tris)

    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    area = 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    # constant P1 gradients: grad lambda_k = perp(p_{k+1} - p_{k+2}) / (2A)
    # with perp(d) = (d_y, -d_x), so that grad lambda_k points toward p_k
    g = np.empty((nt, 3, 2))
    for k in range(3):
        d = p[:, (k + 1) % 3] - p[:, (k + 2) % 3]
        g[:, k, 0] = d[:, 1]
        g[:, k, 1] = -d[:, 0]
    g /= (2.0 * area)[:, None, None]

    # edge midpoints; weights A/3; exact for quadratics
    mids = 0.5 * (p[:, [0, 1, 2]] + p[:, [1, 2, 0]])  # (nt, 3, 2)
    lam = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])
    wq = (area / 3.0)[:, None]

    q1, q2 = mids[:, :, 0], mids[:, :, 1]
    m11 = np.sum(wq * q1 * q1, axis=1)
    m22 = np.sum(wq * q2 * q2, axis=1)
    m12 = np.sum(wq * q1 * q2, axis=1)
    # int x_i * lambda_k over the triangle
    ix1 = (wq * q1) @ lam  # (nt, 3)
    ix2 = (wq * q2) @ lam

    a11, a22, a12, r = basket.a11, basket.a22, basket.a12, basket.r
    c1 = a11 + 0.5 * a12 - r
    c2 = a22 + 0.5 * a12 - r

    el = np.zeros((nt, 3, 3))
    # diffusion, symmetric split of the cross term
    el += 0.5 * a11 * m11[:, None, None] * np.einsum("ti,tj->tij", g[:, :, 0], g[:, :, 0])
    el += 0.5 * a22 * m22[:, None, None] * np.einsum("ti,tj->tij", g[:, :, 1], g[:, :, 1])
    el += 0.5 * a12 * m12[:, None, None] * (
        np.einsum("ti,tj->tij", g[:, :, 1], g[:, :, 0])
        + np.einsum("ti,tj->tij", g[:, :, 0], g[:, :, 1])
    )
    # convection: rows are test functions, columns trial
    el += c1 * np.einsum("ti,tj->tij", ix1, g[:, :, 0])
    el += c2 * np.einsum("ti,tj->tij", ix2, g[:, :, 1])
    # r * mass
    mass_el = (area[:, None, None] / 12.0) * (np.ones((3, 3)) + np.eye(3))
    el += r * mass_el

    rows = np.repeat(tris, 3, axis=1).ravel()
    cols = np.tile(tris, (1, 3)).ravel()
    n = mesh.n_nodes
    spatial = coo_matrix((el.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    mass = coo_matrix((mass_el.ravel(), (rows, cols)), shape=(n, n)).tocsr()

    f_el = (wq * u0(q1, q2)) @ lam
    load = np.zeros(n)
    np.add.at(load, tris.ravel(), f_el.ravel())
    return spatial, mass, load


def dirichlet_nodes(mesh, edges):
    """Node indices lying on dirichlet0 edges."""
    m1, m2 = mesh.m1, mesh.m2
    idx = []
    if edges.x1_zero == "dirichlet0":
        idx.append(np.arange(m2 + 1) * (m1 + 1))
    if edges.x1_far == "dirichlet0":
        idx.append(np.arange(m2 + 1) * (m1 + 1) + m1)
    if edges.x2_zero == "dirichlet0":
        idx.append(np.arange(m1 + 1))
    if edges.x2_far == "dirichlet0":
        idx.append(m2 * (m1 + 1) + np.arange(m1 + 1))
    if not idx:
        return np.array([], dtype=int)
    return np.unique(np.concatenate(idx))


def _edge_mass(indices, h, n):
    """1D P1 mass matrix of a boundary line, scattered into the 2D system."""
    seg = np.stack([indices[:-1], indices[1:]], axis=1)
    el = (h / 6.0) * np.array([[2.0, 1.0], [1.0, 2.0]])
    data = np.tile(el.ravel(), len(seg))
    rows = np.repeat(seg, 2, axis=1).ravel()
    cols = np.tile(seg, (1, 2)).ravel()
    return coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()


def assemble2d(mesh, basket, z, edges, u0=None, cache=None):
    """Sparse complex system for the transformed basket solution at one z.

    ``cache`` may hold the output of :func:`build_matrices` so the
    z-independent work is shared across contour nodes.
    """
    if u0 is None:
        u0 = lambda x1, x2: payoff_basket_maxput(x1, x2, basket.strike)
    if cache is None:
        cache = build_matrices(mesh, basket, u0)
    spatial, mass, load = cache
    n = mesh.n_nodes

    a = (spatial + z * mass).astype(complex).tolil()
    m1, m2 = mesh.m1, mesh.m2

    if edges.x1_far == "transparent":
        c = robin_coefficient(z, basket.r, np.sqrt(basket.a11), basket.L1)
        idx = np.arange(m2 + 1) * (m1 + 1) + m1
        a = (a.tocsr() - 0.5 * basket.a11 * basket.L1**2 * c
             * _edge_mass(idx, mesh.h2, n)).tolil()
    if edges.x2_far == "transparent":
        c = robin_coefficient(z, basket.r, np.sqrt(basket.a22), basket.L2)
        idx = m2 * (m1 + 1) + np.arange(m1 + 1)
        a = (a.tocsr() - 0.5 * basket.a22 * basket.L2**2 * c
             * _edge_mass(idx, mesh.h1, n)).tolil()

    rhs = load.astype(complex)
    fixed = dirichlet_nodes(mesh, edges)
    if len(fixed):
        a[fixed, :] = 0.0
        for i in fixed:
            a[i, i] = 1.0
        rhs[fixed] = 0.0
    return csc_matrix(a), rhs


def solve2d(system):
    """Direct sparse complex solve with a relative residual guard."""
    a, rhs = system
    lu = splu(a)
    sol = lu.solve(rhs)
    res = np.linalg.norm(a @ sol - rhs)
    scale = np.linalg.norm(rhs)
    if scale > 0 and res > 1e-10 * scale:
        raise RuntimeError(f"sparse solve relative residual {res/scale:g}")
    return sol


def interpolate_p1(values, mesh, x1, x2):
    """Evaluate the triangulated P1 interpolant at tensor points (x1 x x2).

    Points must lie inside [0,L1] x [0,L2]; returns array of shape
    (len(x2), len(x1)) matching meshgrid layout.
    """
    v = np.asarray(values).reshape(mesh.m2 + 1, mesh.m1 + 1)
    I, J = np.meshgrid(np.minimum(np.asarray(x1) / mesh.h1, mesh.m1 - 1e-12),
                       np.minimum(np.asarray(x2) / mesh.h2, mesh.m2 - 1e-12))
    i = I.astype(int)
    j = J.astype(int)
    fx = I - i
    fy = J - j
    v00 = v[j, i]
    v10 = v[j, i + 1]
    v01 = v[j + 1, i]
    v11 = v[j + 1, i + 1]
    lower = fx >= fy  # triangle (n00, n10, n11)
    out = np.where(
        lower,
        v00 + (v10 - v00) * fx + (v11 - v10) * fy,
        v00 + (v11 - v01) * fx + (v01 - v00) * fy,
    )
    return out


def relative_l2(values, mesh, ref_values, ref_mesh, L1, L2):
    """||u - u_ref|| / ||u_ref|| in discrete L2 over [0,L1] x [0,L2].

    Both fields are sampled on the reference grid restricted to the window
    and integrated with tensor trapezoid weights.
    """
    n1 = int(round(L1 / ref_mesh.h1))
    n2 = int(round(L2 / ref_mesh.h2))
    x1 = ref_mesh.x1[: n1 + 1]
    x2 = ref_mesh.x2[: n2 + 1]
    ref = np.asarray(ref_values).reshape(ref_mesh.m2 + 1, ref_mesh.m1 + 1)
    ref = ref[: n2 + 1, : n1 + 1]
    num = interpolate_p1(values, mesh, x1, x2)

    w1 = np.full(n1 + 1, ref_mesh.h1)
    w1[[0, -1]] *= 0.5
    w2 = np.full(n2 + 1, ref_mesh.h2)
    w2[[0, -1]] *= 0.5
    w = np.outer(w2, w1)
    diff = np.sqrt(np.sum(w * (num - ref) ** 2))
    base = np.sqrt(np.sum(w * ref**2))
    return diff / base
