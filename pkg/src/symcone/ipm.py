"""Primal-dual path-following solver on symmetric cones.

Solves the conic pair

    (P)  inf <x, s0>  over  x in (L + x0) and K
    (D)  inf <x0, s>  over  s in (L-perp + s0) and K

with a single-direction long-step method: at each iterate the scaling
point w with F''(w) x = s defines the Newton system

    F''(w) dx + ds = sigma mu (-F'(x)) - s,    dx in L,  ds in L-perp,

whose solution is unique because the reduced matrix L^T F''(w) L is
symmetric positive definite.  Steps take the largest alpha <= 1 that
keeps both iterates interior at a fraction-to-boundary margin, found by
an exact spectral minimum-eigenvalue computation.  Orthogonality of
(dx, ds) and the scaling identity make the duality gap contract exactly
by the factor 1 - alpha (1 - sigma) per step.

All subspace geometry (orthonormality, complements, projections) uses
the trace inner product of the cone, which is what makes the gap and
centrality identities exact on Lorentz blocks too.

One solve is single-threaded and owns its state; concurrent solves do
not interfere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .algebra import (
    Algebra,
    DomainError,
    Element,
    Membership,
    eigenvalues,
    inner,
    membership,
    quadratic_representation,
    scale_power,
)
from .barrier import SelfScaledBarrier

__all__ = [
    "ConicProblem",
    "IterateState",
    "Solution",
    "SolveStatus",
    "StepRecord",
    "build_problem",
    "max_step",
    "nt_direction",
    "solve",
]


class SolveStatus(Enum):
    OPTIMAL = "optimal"
    ITERATION_LIMIT = "iteration_limit"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass
class ConicProblem:
    """A validated primal-dual pair: cone, barrier, subspace and the
    interior anchors x0 (primal) and s0 (dual).

    ``L`` holds an orthonormal basis of the subspace as columns and
    ``Lperp`` its orthogonal complement, both for the trace inner
    product.
    """

    cone: Algebra
    barrier: SelfScaledBarrier
    L: np.ndarray
    Lperp: np.ndarray
    x0: Element
    s0: Element


@dataclass
class IterateState:
    x: Element
    s: Element
    mu: float
    iteration: int
    res_primal: float
    res_dual: float
    gap: float


@dataclass
class StepRecord:
    """Per-iteration diagnostics collected by ``solve``."""

    iteration: int
    gap: float
    mu: float
    alpha: float
    dx_ds: float            # <dx, ds>, zero up to roundoff
    gap_predicted: float    # (1 - alpha (1 - sigma)) * gap
    gap_after: float
    scaling_residual: float  # ||F''(w) x - s|| / ||s|| at this iterate


@dataclass
class Solution:
    x: Element
    s: Element
    objective: float
    gap: float
    status: SolveStatus
    iterations: int
    res_primal: float
    res_dual: float
    trace: list[StepRecord] = field(default_factory=list)


def build_problem(cone: Algebra, barrier: SelfScaledBarrier, L,
                  x0: Element, s0: Element) -> ConicProblem:
    """Validate and orthonormalize a problem description.

    ``L`` is a dim x k matrix whose columns span the subspace (k may be
    zero); dependent columns, or anchors that are not strictly
    interior, are rejected.
    """
    if barrier.cone != cone:
        raise ValueError("barrier is defined on a different cone")
    if membership(x0, tol=1e-9) is not Membership.INTERIOR:
        raise ValueError("x0 not interior")
    if membership(s0, tol=1e-9) is not Membership.INTERIOR:
        raise ValueError("s0 not interior")
    L = np.asarray(L, dtype=float)
    if L.size == 0:
        L = L.reshape(cone.dim, 0)
    if L.ndim != 2 or L.shape[0] != cone.dim:
        raise ValueError(f"L must have {cone.dim} rows")
    k = L.shape[1]
    sqw = np.sqrt(cone.metric_weights)
    U, svals, _ = np.linalg.svd(sqw[:, None] * L if k else np.eye(cone.dim),
                                full_matrices=True)
    if k:
        if svals[k - 1] < 1e-10 * svals[0]:
            raise ValueError("L columns dependent")
        L_on = U[:, :k] / sqw[:, None]
        Lperp = U[:, k:] / sqw[:, None]
    else:
        L_on = np.zeros((cone.dim, 0))
        Lperp = np.eye(cone.dim) / sqw[:, None]
    return ConicProblem(cone=cone, barrier=barrier, L=L_on, Lperp=Lperp,
                        x0=x0.copy(), s0=s0.copy())


def max_step(x: Element, dx: Element) -> float:
    """sup { alpha >= 0 : x + alpha dx in K } for interior x.

    Scaling by P(x^-1/2) reduces the ray to e + alpha d', so the bound
    is -1 / lambda_min(d') when that eigenvalue is negative and
    infinity otherwise; exact for the closed-form families, one
    eigensolve for PSD blocks.
    """
    u = scale_power(x, -0.5)
    d = quadratic_representation(u)(dx)
    lam_min = float(eigenvalues(d).min())
    if lam_min >= -1e-300:
        return math.inf
    return -1.0 / lam_min


def _subspace_residual(basis: np.ndarray, w: np.ndarray, v: Element) -> float:
    """Distance of v from span(basis), relative; basis is w-orthonormal."""
    comp = basis.T @ (w * v.coords)
    rem = v.coords - basis @ comp
    return float(np.linalg.norm(rem)) / (1.0 + v.norm())


def _state(problem: ConicProblem, x: Element, s: Element,
           iteration: int) -> IterateState:
    w = problem.cone.metric_weights
    gap = inner(x, s)
    return IterateState(
        x=x, s=s, mu=gap / problem.barrier.nu, iteration=iteration,
        res_primal=_subspace_residual(problem.L, w, x - problem.x0),
        res_dual=_subspace_residual(problem.Lperp, w, s - problem.s0),
        gap=gap)


def nt_direction(problem: ConicProblem, state: IterateState,
                 sigma: float) -> tuple[Element, Element]:
    """The scaled Newton direction at the given iterate.

    Solves F''(w) dx + ds = sigma mu (-F'(x)) - s with dx in L and
    ds in L-perp, w being the scaling point of (x, s).  At an exactly
    centered iterate with sigma = 1 the direction vanishes.
    """
    if not 0.0 <= sigma <= 1.0:
        raise ValueError("sigma must lie in [0, 1]")
    B = problem.barrier
    x, s = state.x, state.s
    w = B.scaling_point(x, s, tol=1e-14)
    H = B.hessian(w, tol=1e-14).matrix
    rhs = -sigma * state.mu * B.gradient(x, tol=1e-14) - s
    wt = problem.cone.metric_weights
    L = problem.L
    if L.shape[1]:
        A = L.T @ (wt[:, None] * H) @ L
        b = L.T @ (wt * rhs.coords)
        y = np.linalg.solve(0.5 * (A + A.T), b)
        dx = Element(problem.cone, L @ y)
    else:
        dx = Element(problem.cone, np.zeros(problem.cone.dim))
    ds = Element(problem.cone, rhs.coords - H @ dx.coords)
    return dx, ds


def solve(problem: ConicProblem, gap_tol: float = 1e-8,
          feas_tol: float = 1e-9, max_iter: int = 200, sigma: float = 0.1,
          step_frac: float = 0.9) -> Solution:
    """Run the path-following iteration until the gap closes.

    Terminates Optimal when <x, s> <= gap_tol (1 + |<x0, s0>|) with
    feasibility residuals below feas_tol; IterationLimit after
    max_iter steps; NumericalFailure on a singular reduced system or a
    scaling breakdown.
    """
    x, s = problem.x0.copy(), problem.s0.copy()
    gap_target = gap_tol * (1.0 + abs(inner(problem.x0, problem.s0)))
    status = SolveStatus.ITERATION_LIMIT
    trace: list[StepRecord] = []
    state = _state(problem, x, s, 0)
    for it in range(max_iter):
        if (state.gap <= gap_target and state.res_primal <= feas_tol
                and state.res_dual <= feas_tol):
            status = SolveStatus.OPTIMAL
            break
        try:
            dx, ds = nt_direction(problem, state, sigma)
            w_pt = problem.barrier.scaling_point(x, s, tol=1e-14)
            scaling_res = ((problem.barrier.hessian(w_pt, tol=1e-14)(x) - s)
                           .norm() / s.norm())
            alpha = min(1.0, step_frac * min(max_step(x, dx), max_step(s, ds)))
            x_next = x + alpha * dx
            s_next = s + alpha * ds
            if (membership(x_next, tol=1e-300) is not Membership.INTERIOR
                    or membership(s_next, tol=1e-300) is not Membership.INTERIOR):
                status = SolveStatus.NUMERICAL_FAILURE
                break
        except (np.linalg.LinAlgError, DomainError):
            status = SolveStatus.NUMERICAL_FAILURE
            break
        gap_pred = (1.0 - alpha * (1.0 - sigma)) * state.gap
        new_state = _state(problem, x_next, s_next, it + 1)
        # the gap contracts by exactly 1 - alpha (1 - sigma) in exact
        # arithmetic, so an increase certifies a numerical breakdown;
        # keep the last good iterate in that case
        if not np.isfinite(new_state.gap) or new_state.gap > state.gap:
            status = SolveStatus.NUMERICAL_FAILURE
            break
        x, s = x_next, s_next
        trace.append(StepRecord(
            iteration=it, gap=state.gap, mu=state.mu, alpha=alpha,
            dx_ds=inner(dx, ds), gap_predicted=gap_pred,
            gap_after=new_state.gap, scaling_residual=scaling_res))
        state = new_state
    else:
        # the loop ran out; a final convergence check still applies
        if (state.gap <= gap_target and state.res_primal <= feas_tol
                and state.res_dual <= feas_tol):
            status = SolveStatus.OPTIMAL
    return Solution(
        x=x, s=s, objective=inner(x, problem.s0), gap=state.gap,
        status=status, iterations=state.iteration,
        res_primal=state.res_primal, res_dual=state.res_dual, trace=trace)
