"""Fan-out of the per-z elliptic solves across worker processes.

Each contour node is an independent solve, so workers share nothing but
the read-only problem description.  Node j goes to worker j mod W; the
result rows are placed by node index, making the assembled ensemble
bit-identical for any worker count.
"""

import time
from dataclasses import dataclass
from multiprocessing import get_context

import numpy as np

from . import fem1d, fem2d
from .contour import quadrature_nodes
from .inversion import TransformEnsemble

__all__ = ["SpeedupRow", "ProblemSpec", "solve_ensemble"]


@dataclass(frozen=True)
class SpeedupRow:
    workers: int
    wall_time: float
    speedup: float


@dataclass(frozen=True)
class ProblemSpec:
    """Picklable description of one pricing problem.

    ``kind`` is "put1d" or "basket2d"; boundary fields mirror the fem
    modules (right_bc: "dirichlet0" | "transparent" for 1D, EdgeSpec for 2D).
    """

    kind: str
    market: object
    m: int
    right_bc: str = "dirichlet0"
    edges: object = None

    def mesh(self):
        if self.kind == "put1d":
            return fem1d.Mesh1D(self.market.L, self.m)
        return fem2d.Mesh2D(self.market.L1, self.market.L2, self.m, self.m)


def _solve_node_1d(spec, mesh, z):
    mk = spec.market
    left = lambda zz: fem1d.left_dirichlet_transform(zz, mk.strike, mk.r)
    if spec.right_bc == "transparent":
        bc = fem1d.BoundarySpec(left=left, right=None)
    else:
        bc = fem1d.BoundarySpec(left=left, right=lambda zz: 0.0)
    return fem1d.solve_transformed(mesh, mk, z, bc).values


_WORKER_STATE = {}


def _init_worker(spec, mesh, cache, zs):
    _WORKER_STATE.update(spec=spec, mesh=mesh, cache=cache, zs=zs)


def _run_nodes(node_ids):
    spec = _WORKER_STATE["spec"]
    mesh = _WORKER_STATE["mesh"]
    cache = _WORKER_STATE["cache"]
    zs = _WORKER_STATE["zs"]
    out = []
    for j in node_ids:
        if spec.kind == "put1d":
            out.append((j, _solve_node_1d(spec, mesh, zs[j])))
        else:
            edges = spec.edges or fem2d.EdgeSpec()
            system = fem2d.assemble2d(mesh, spec.market, zs[j], edges,
                                      cache=cache)
            out.append((j, fem2d.solve2d(system)))
    return out


def solve_ensemble(spec, contour, workers=1, baseline_time=None):
    """Solve the conjugate-half nodes, fanning out over ``workers``.

    Returns (TransformEnsemble, SpeedupRow).  Timing covers only the
    elliptic solves, not mesh/payoff setup or the inversion sum.
    ``baseline_time`` is the 1-worker wall time used for the speedup
    column; by definition speedup(1 worker) = 1.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    mesh = spec.mesh()
    half = [q for q in quadrature_nodes(contour) if q.j >= 0]
    zs = [q.z for q in half]
    cache = None
    if spec.kind == "basket2d":
        mk = spec.market
        u0 = lambda x1, x2: fem2d.payoff_basket_maxput(x1, x2, mk.strike)
        cache = fem2d.build_matrices(mesh, mk, u0)

    n = len(half)
    assignments = [list(range(w, n, workers)) for w in range(workers)]
    assignments = [a for a in assignments if a]

    results = [None] * n
    start = time.perf_counter()
    if workers == 1:
        _init_worker(spec, mesh, cache, zs)
        chunks = [_run_nodes(a) for a in assignments]
    else:
        chunks = None
        for attempt in range(2):
            ctx = get_context("fork")
            try:
                with ctx.Pool(processes=len(assignments),
                              initializer=_init_worker,
                              initargs=(spec, mesh, cache, zs)) as pool:
                    chunks = pool.map(_run_nodes, assignments)
                break
            except Exception:
                # one retry: worker loss can be transient (OOM kill, signal)
                if attempt == 1:
                    raise
    wall = time.perf_counter() - start

    for chunk in chunks:
        for j, vals in chunk:
            results[j] = vals
    missing = [j for j, v in enumerate(results) if v is None]
    if missing:
        raise RuntimeError(f"nodes never solved: {missing}")
    ensemble = TransformEnsemble(contour, half, np.array(results))
    speedup = 1.0 if workers == 1 else (
        baseline_time / wall if baseline_time else float("nan"))
    return ensemble, SpeedupRow(workers=workers, wall_time=wall,
                                speedup=speedup)
