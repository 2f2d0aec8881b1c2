"""P1 finite elements for the Laplace-transformed one-asset equation.

The transformed problem on the truncated interval (0, L) is

    z*u - (1/2)*sigma^2*x^2*u'' - r*x*u' + r*u = u0,

assembled in weak form with exact element integrals (the coefficients are
polynomials, so every entry is closed-form).  The x = 0 node is always a
Dirichlet node; the right end is either Dirichlet or a transparent Robin
condition built from the exterior solution's logarithmic derivative.
"""

import cmath
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.linalg import solve_banded

__all__ = [
    "Market1D",
    "Mesh1D",
    "BoundarySpec",
    "ComplexField",
    "payoff_put",
    "left_dirichlet_transform",
    "robin_coefficient",
    "assemble",
    "solve",
    "solve_transformed",
]


@dataclass(frozen=True)
class Market1D:
    r: float
    sigma: float
    strike: float
    maturity: float
    L: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.strike <= 0:
            raise ValueError("strike must be positive")
        if self.maturity <= 0:
            raise ValueError("maturity must be positive")
        if self.L < self.strike:
            raise ValueError("truncation L must not cut the payoff support")


class Mesh1D:
    """Uniform mesh 0 = x_0 < ... < x_M = L."""

    def __init__(self, L, m):
        if m < 2:
            raise ValueError("need at least 2 elements")
        self.L = float(L)
        self.m = int(m)
        self.h = self.L / self.m
        self.x = np.linspace(0.0, self.L, self.m + 1)

    def __len__(self):
        return self.m + 1


@dataclass(frozen=True)
class BoundarySpec:
    """Exactly one condition per endpoint.

    ``left`` is a map z -> Dirichlet value at x=0.  ``right`` is either a
    map z -> Dirichlet value at x=L, or None for the transparent Robin
    condition.
    """

    left: Callable[[complex], complex]
    right: Optional[Callable[[complex], complex]] = None

    @property
    def right_is_robin(self):
        return self.right is None


@dataclass
class ComplexField:
    """Nodal complex values of one transformed solve."""

    mesh: Mesh1D
    values: np.ndarray

    def __post_init__(self):
        if len(self.values) != len(self.mesh):
            raise ValueError("field length must match node count")


def payoff_put(x, strike):
    """European put payoff (K - x)_+."""
    return np.maximum(strike - np.asarray(x, dtype=float), 0.0)


def left_dirichlet_transform(z, strike, r):
    """Laplace transform of the x=0 boundary data K*exp(-r*t)."""
    if z == -r:
        raise ZeroDivisionError("transform singular at z = -r")
    return strike / (z + r)


def robin_coefficient(z, r, sigma, L):
    """Transparent-boundary coefficient c(z) with u'(L) = c(z)*u(L).

    The square root is the principal branch, which has positive real part
    for every nonzero argument.
    """
    s2 = sigma * sigma
    radicand = (r - 0.5 * s2) ** 2 + 2.0 * s2 * (r + z)
    if radicand == 0:
        raise ValueError("degenerate transparent boundary: zero radicand")
    return (-(r - 0.5 * s2) - cmath.sqrt(radicand)) / (L * s2)


# Gauss-Legendre, 5 points on [0, 1]; exact through degree 9.
_GAUSS_X = (np.polynomial.legendre.leggauss(5)[0] + 1.0) / 2.0
_GAUSS_W = np.polynomial.legendre.leggauss(5)[1] / 2.0


def _load_vector(mesh, u0, kink=None):
    """(u0, phi_i) for all basis functions, element integrals split at the
    payoff kink so piecewise-polynomial payoffs integrate exactly."""
    x = mesh.x
    rhs = np.zeros(len(mesh))
    for e in range(mesh.m):
        a, b = x[e], x[e + 1]
        cuts = [a, b]
        if kink is not None and a < kink < b:
            cuts = [a, kink, b]
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            pts = lo + (hi - lo) * _GAUSS_X
            w = (hi - lo) * _GAUSS_W
            f = u0(pts) * w
            rhs[e] += f @ ((b - pts) / mesh.h)
            rhs[e + 1] += f @ ((pts - a) / mesh.h)
    return rhs


def assemble(mesh, market, z, bc, u0=None, kink=None):
    """Tridiagonal complex system for the transformed solution at one z.

    Returns (bands, rhs) where bands is the (3, M+1) matrix in
    ``solve_banded`` layout.  ``u0`` defaults to the put payoff with its
    kink at the strike.
    """
    r, s2 = market.r, market.sigma**2
    x = mesh.x
    h = mesh.h
    n = len(mesh)

    a, b = x[:-1], x[1:]
    # exact element integrals of the polynomial coefficients
    ix2 = (b**3 - a**3) / 3.0                       # int x^2
    ixl = (b * (b**2 - a**2) / 2.0 - (b**3 - a**3) / 3.0) / h   # int x*phi_left
    ixr = ((b**3 - a**3) / 3.0 - a * (b**2 - a**2) / 2.0) / h   # int x*phi_right

    # stiffness (1/2)*sigma^2 * int x^2 phi_i' phi_j'
    k_el = 0.5 * s2 * ix2 / h**2
    # convection (sigma^2 - r) * int x * phi_j' * phi_i ; phi_j' = -+1/h
    cc = (s2 - r) / h
    # mass (z + r) * standard P1 mass
    zm = z + r

    diag = np.zeros(n, dtype=complex)
    lower = np.zeros(n - 1, dtype=complex)  # A[i+1, i]
    upper = np.zeros(n - 1, dtype=complex)  # A[i, i+1]

    # element [a,b]: local (L, R) = (e, e+1)
    diag[:-1] += k_el + cc * (-ixl) + zm * h / 3.0
    diag[1:] += k_el + cc * (+ixr) + zm * h / 3.0
    upper[:] = -k_el + cc * (+ixl) + zm * h / 6.0
    lower[:] = -k_el + cc * (-ixr) + zm * h / 6.0

    if u0 is None:
        u0 = lambda xx: payoff_put(xx, market.strike)
        kink = market.strike
    rhs = _load_vector(mesh, u0, kink=kink).astype(complex)

    # x = 0: strong Dirichlet (operator degenerates there)
    diag[0] = 1.0
    upper[0] = 0.0
    rhs[0] = bc.left(z)

    if bc.right_is_robin:
        c = robin_coefficient(z, market.r, market.sigma, mesh.L)
        diag[-1] += -0.5 * s2 * mesh.L**2 * c
    else:
        diag[-1] = 1.0
        lower[-1] = 0.0
        rhs[-1] = bc.right(z)

    bands = np.zeros((3, n), dtype=complex)
    bands[0, 1:] = upper
    bands[1, :] = diag
    bands[2, :-1] = lower
    return bands, rhs


def solve(system, mesh=None):
    """Direct banded solve with a residual guard."""
    bands, rhs = system
    sol = solve_banded((1, 1), bands, rhs)
    res = _residual(bands, sol) - rhs
    scale = np.linalg.norm(bands) * np.linalg.norm(sol) + np.linalg.norm(rhs)
    if np.linalg.norm(res) > 1e-12 * max(scale, 1.0):
        raise RuntimeError(
            f"banded solve residual too large: {np.linalg.norm(res):g}"
        )
    if mesh is not None:
        return ComplexField(mesh, sol)
    return sol


def _residual(bands, sol):
    out = bands[1] * sol
    out[:-1] += bands[0, 1:] * sol[1:]
    out[1:] += bands[2, :-1] * sol[:-1]
    return out


def solve_transformed(mesh, market, z, bc, u0=None, kink=None):
    """Assemble and solve at one contour point."""
    return solve(assemble(mesh, market, z, bc, u0=u0, kink=kink), mesh=mesh)


def p1_l2_sq(mesh, v):
    """Exact ||v||^2 on (0, L) for a complex P1 nodal field (Simpson)."""
    v = np.asarray(v)
    a, b = v[:-1], v[1:]
    mid2 = np.abs(0.5 * (a + b)) ** 2
    return float(mesh.h / 6.0 * np.sum(np.abs(a) ** 2 + 4.0 * mid2
                                       + np.abs(b) ** 2))


def p1_weighted_semi_sq(mesh, v):
    """Exact weighted seminorm int |x v'|^2 for a P1 field."""
    v = np.asarray(v)
    x = mesh.x
    dv = np.abs((v[1:] - v[:-1]) / mesh.h) ** 2
    ix2 = (x[1:] ** 3 - x[:-1] ** 3) / 3.0
    return float(np.sum(dv * ix2))


def p1_b_form(mesh, market, v):
    """Exact B(v, v) for a complex P1 field (constant coefficients)."""
    v = np.asarray(v, dtype=complex)
    x = mesh.x
    h = mesh.h
    r, s2 = market.r, market.sigma**2
    a, b = x[:-1], x[1:]
    va, vb = v[:-1], v[1:]
    total = 0.5 * s2 * p1_weighted_semi_sq(mesh, v)
    # int x v' conj(v) per element; v' constant, conj(v) linear
    dv = (vb - va) / h
    ixv = h * ((2 * a + b) / 6.0 * np.conj(va) + (a + 2 * b) / 6.0 * np.conj(vb))
    total += (s2 - r) * complex(np.sum(dv * ixv))
    total += r * p1_l2_sq(mesh, v)
    return complex(total)
