"""Time-domain reconstruction from transformed solutions.

The contour sum needs only the conjugate-half nodes j = 0 ... N-1: for
real problem data the j < 0 terms are complex conjugates of their
positive partners, so the symmetric sum collapses to
weight_0*u_0*e^{z_0 t} + 2*Re{sum_{j>=1} weight_j*u_j*e^{z_j t}}.
"""

from dataclasses import dataclass, field
from typing import List

import numpy as np

from .contour import ContourParams, QuadNode, quadrature_nodes

__all__ = ["TransformEnsemble", "invert_at", "invert_many", "direct_trapezoid"]


@dataclass
class TransformEnsemble:
    """Conjugate-half transformed solutions, one per node j = 0 ... N-1."""

    contour: ContourParams
    nodes: List[QuadNode]
    values: np.ndarray  # shape (N, ndof) complex
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.atleast_2d(np.asarray(self.values, dtype=complex))
        if len(self.nodes) != self.contour.n:
            raise ValueError("need one node per conjugate-half index")
        if self.values.shape[0] != self.contour.n:
            raise ValueError("need one value row per node")

    @classmethod
    def from_evaluator(cls, contour, transform):
        """Build from a scalar transform z -> u_hat(z) (oracle use)."""
        half = [q for q in quadrature_nodes(contour) if q.j >= 0]
        vals = np.array([[transform(q.z)] for q in half])
        return cls(contour, half, vals)


def _kahan_sum(terms):
    # fixed ascending order + compensation: bit-stable reduction
    total = 0.0 + 0.0j
    comp = 0.0 + 0.0j
    for t in terms:
        y = t - comp
        s = total + y
        comp = (s - total) - y
        total = s
    return total


def invert_at(ensemble, t, return_residual=False):
    """Evaluate the quadrature inversion sum at one time t."""
    if t <= 0:
        raise ValueError("t must be positive")
    terms = []
    for q, row in zip(ensemble.nodes, ensemble.values):
        term = q.weight * np.exp(q.z * t) * row
        terms.append(term if q.j == 0 else term + np.conj(term))
    total = np.zeros(ensemble.values.shape[1], dtype=complex)
    comp = np.zeros_like(total)
    for term in terms:
        y = term - comp
        s = total + y
        comp = (s - total) - y
        total = s
    result = total.real
    residual = float(np.max(np.abs(total.imag)))
    scale = float(np.max(np.abs(result)))
    ensemble.diagnostics[t] = residual
    if scale > 0 and residual > 1e-10 * scale:
        raise RuntimeError(
            f"imaginary residual {residual:g} exceeds 1e-10 of result scale"
        )
    if result.size == 1:
        result = float(result[0])
    if return_residual:
        return result, residual
    return result


def invert_many(ensemble, times):
    """One inversion sum per time; the solves are reused, nothing re-solved."""
    return [invert_at(ensemble, t) for t in times]


def direct_trapezoid(alpha, period, n_terms, transform, t):
    """Vertical-line trapezoid inversion (slowly converging baseline).

    Sum' halves the first and last summands; node spacing is pi/period.
    """
    if not 0 < t < period:
        raise ValueError("t must lie in (0, period)")
    total = 0.0
    for k in range(0, n_terms):
        w = k * np.pi / period
        u = transform(complex(alpha, w))
        term = u.real * np.cos(w * t) - u.imag * np.sin(w * t)
        if k == 0 or k == n_terms - 1:
            term *= 0.5
        total += term
    return float(np.exp(alpha * t) / period * total)
