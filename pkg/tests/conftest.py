"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the library code paths they check:
finite differences for derivatives, a damped Newton iteration on the
defining equation for scaling points, and brute-force optimization for
the conjugate barrier.
"""

import numpy as np
import pytest

from symcone import Element, Membership, SelfScaledBarrier, membership


def fd_gradient(f, x: Element, rel_step: float = 1e-5) -> np.ndarray:
    """Central-difference Euclidean gradient of a scalar function."""
    h = rel_step * max(x.norm(), 1.0)
    g = np.empty(x.algebra.dim)
    for i in range(x.algebra.dim):
        step = np.zeros(x.algebra.dim)
        step[i] = h
        g[i] = (f(Element(x.algebra, x.coords + step))
                - f(Element(x.algebra, x.coords - step))) / (2.0 * h)
    return g


def fd_trace_gradient(f, x: Element, rel_step: float = 1e-5) -> np.ndarray:
    """Finite-difference gradient with respect to the trace form."""
    return fd_gradient(f, x, rel_step) / x.algebra.metric_weights


def fd_second_directional(f, x: Element, h: Element,
                          rel_step: float = 1e-4) -> float:
    """Second difference of f along h: d^2/dt^2 f(x + t h) at t = 0."""
    t = rel_step * max(x.norm(), 1.0) / max(h.norm(), 1e-12)
    fp = f(x + t * h)
    fm = f(x + (-t) * h)
    return (fp - 2.0 * f(x) + fm) / t ** 2


def newton_scaling_point(B: SelfScaledBarrier, x: Element, s: Element,
                         w0: Element, tol: float = 1e-12,
                         max_iter: int = 60) -> Element:
    """Solve F''(w) x = s by damped Newton with a finite-difference
    Jacobian, independent of the closed-form construction."""
    cone = B.cone
    n = cone.dim
    w = w0.copy()
    s_norm = s.norm()
    for _ in range(max_iter):
        r = (B.hessian(w, tol=1e-13)(x) - s).coords
        if np.linalg.norm(r) <= tol * s_norm:
            break
        h = 1e-6 * w.norm()
        J = np.empty((n, n))
        for j in range(n):
            step = np.zeros(n)
            step[j] = h
            gp = B.hessian(Element(cone, w.coords + step), tol=1e-13)(x).coords
            gm = B.hessian(Element(cone, w.coords - step), tol=1e-13)(x).coords
            J[:, j] = (gp - gm) / (2.0 * h)
        dw = np.linalg.solve(J, -r)
        alpha = 1.0
        while alpha > 1e-10:
            cand = Element(cone, w.coords + alpha * dw)
            if membership(cand, tol=1e-13) is Membership.INTERIOR:
                break
            alpha *= 0.5
        w = Element(cone, w.coords + alpha * dw)
    return w


def perturb_interior(w: Element, rng: np.random.Generator,
                     scale: float = 0.05) -> Element:
    """An interior point near w, for seeding independent solves."""
    delta = rng.standard_normal(w.algebra.dim)
    delta *= scale * w.norm() / np.linalg.norm(delta)
    for _ in range(30):
        cand = Element(w.algebra, w.coords + delta)
        if membership(cand, tol=1e-12) is Membership.INTERIOR:
            return cand
        delta *= 0.5
    return w.copy()


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
