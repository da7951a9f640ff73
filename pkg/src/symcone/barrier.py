"""Weighted log-determinant barriers on symmetric cones.

The family implemented here is

    F(x) = c0 - sum_i c_i ln det_i(x_i),    c_i >= 1,

summed over the irreducible blocks of the cone, with barrier parameter
nu = sum_i c_i r_i.  These are exactly the barriers that satisfy the
self-scaled identities; ``verify_self_scaled`` samples every one of
those identities numerically and returns a machine-checkable report, so
the same function also serves to expose impostors (see
``BarrierOracle`` for plugging in arbitrary value/gradient callbacks).

Blockwise closed forms:

* gradient          -c_i x_i^-1
* Hessian           c_i P(x_i)^-1          (P = quadratic representation)
* inverse Hessian   (1/c_i) P(x_i)
* dual barrier      -c_i ln det(s_i) + c_i r_i (ln c_i - 1), minus c0
* scaling point     w_i = P(x_i^1/2) [P(x_i^1/2)(s_i/c_i)]^(-1/2)

Gradients and Hessians are taken with respect to the trace inner
product; the metric weights of the cone keep finite-difference checks
honest on Lorentz blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .algebra import (
    Algebra,
    DomainError,
    Element,
    LinearOperator,
    Membership,
    Orthant,
    determinant,
    eigenvalues,
    inner,
    inverse,
    membership,
    quadratic_representation,
    scale_power,
    sqrt,
)

__all__ = [
    "BarrierOracle",
    "FUnitPair",
    "IdentityRecord",
    "SelfScaledBarrier",
    "VerificationReport",
    "characteristic_function_log",
    "verify_self_scaled",
]


@dataclass
class FUnitPair:
    """The barrier's unit e (where F''(e) = I) and e_inv = -F'(e)."""

    e: Element
    e_inv: Element


class SelfScaledBarrier:
    """A member of the classified barrier family on a symmetric cone.

    Parameters
    ----------
    cone : Algebra
        Any supported algebra; a direct sum contributes one block per
        summand leaf, and orthant leaves split further into rank-one
        blocks.
    weights : sequence of float
        One weight per leaf (a scalar weight on an orthant leaf applies
        to each of its axes) or one weight per irreducible block.
        Every weight must be >= 1; smaller values fall outside the
        classified family and are rejected.
    offset : float
        The additive constant c0.
    """

    def __init__(self, cone: Algebra, weights: Sequence[float] | float = 1.0,
                 offset: float = 0.0):
        self.cone = cone
        self.offset = float(offset)
        leaves = cone.leaves()
        if np.isscalar(weights):
            weights = [float(weights)] * len(leaves)
        weights = [float(w) for w in weights]
        n_irreducible = sum(
            leaf.dim if isinstance(leaf, Orthant) else 1 for leaf, _ in leaves)
        if len(weights) == len(leaves):
            expanded = []
            for (leaf, _), w in zip(leaves, weights):
                expanded.extend([w] * (leaf.dim if isinstance(leaf, Orthant) else 1))
            weights = expanded
        elif len(weights) != n_irreducible:
            raise ValueError(
                f"expected {len(leaves)} per-leaf or {n_irreducible} "
                f"per-block weights, got {len(weights)}")
        if min(weights) < 1.0:
            raise ValueError(
                "every weight must be >= 1: -c ln det is self-concordant "
                "only for c >= 1, smaller weights are outside the family")
        self.weights = tuple(weights)
        # per-leaf weight arrays (orthant leaves carry one weight per axis)
        self._leaf_weights: list[np.ndarray] = []
        pos = 0
        for leaf, _ in leaves:
            take = leaf.dim if isinstance(leaf, Orthant) else 1
            self._leaf_weights.append(np.array(weights[pos:pos + take]))
            pos += take
        self._leaves = leaves
        self.nu = 0.0
        for (leaf, _), w in zip(leaves, self._leaf_weights):
            self.nu += float(w.sum()) if isinstance(leaf, Orthant) \
                else float(w[0]) * leaf.rank

    def __repr__(self):
        return (f"SelfScaledBarrier({self.cone!r}, weights={list(self.weights)}, "
                f"offset={self.offset})")

    # ------------------------------------------------------------------
    def _blocks(self, x: Element):
        for (leaf, off), w in zip(self._leaves, self._leaf_weights):
            yield leaf, slice(off, off + leaf.dim), w

    def _require_interior(self, x: Element, tol: float, what: str) -> None:
        if x.algebra != self.cone:
            raise DomainError(f"{what} does not belong to the barrier's cone")
        if membership(x, tol) is not Membership.INTERIOR:
            raise DomainError(f"{what} is not interior to the cone")

    def value(self, x: Element, tol: float = 1e-9) -> float:
        """F(x) = c0 - sum_i c_i ln det_i(x_i)."""
        self._require_interior(x, tol, "x")
        total = self.offset
        for leaf, sl, w in self._blocks(x):
            if isinstance(leaf, Orthant):
                total -= float(np.dot(w, np.log(x.coords[sl])))
            else:
                total -= w[0] * math.log(determinant(Element(leaf, x.coords[sl])))
        return total

    def gradient(self, x: Element, tol: float = 1e-9) -> Element:
        """F'(x), blockwise -c_i x_i^-1 (trace inner product)."""
        self._require_interior(x, tol, "x")
        g = np.empty(self.cone.dim)
        for leaf, sl, w in self._blocks(x):
            if isinstance(leaf, Orthant):
                g[sl] = -w / x.coords[sl]
            else:
                g[sl] = -w[0] * inverse(Element(leaf, x.coords[sl])).coords
        return Element(self.cone, g)

    def hessian(self, x: Element, tol: float = 1e-9) -> LinearOperator:
        """F''(x), blockwise c_i P(x_i)^-1; symmetric positive definite.

        Uses P(x)^-1 = P(x^-1) (a consequence of the fundamental
        formula), which is far better conditioned than inverting the
        quadratic representation outright.
        """
        self._require_interior(x, tol, "x")
        H = np.zeros((self.cone.dim, self.cone.dim))
        for leaf, sl, w in self._blocks(x):
            if isinstance(leaf, Orthant):
                H[sl, sl] = np.diag(w / x.coords[sl] ** 2)
            else:
                xi_inv = inverse(Element(leaf, x.coords[sl]))
                P = quadratic_representation(xi_inv).matrix
                H[sl, sl] = w[0] * 0.5 * (P + P.T)
        return LinearOperator(self.cone, H)

    def hessian_inverse(self, x: Element, tol: float = 1e-9) -> LinearOperator:
        """F''(x)^-1, blockwise (1/c_i) P(x_i)."""
        self._require_interior(x, tol, "x")
        H = np.zeros((self.cone.dim, self.cone.dim))
        for leaf, sl, w in self._blocks(x):
            if isinstance(leaf, Orthant):
                H[sl, sl] = np.diag(x.coords[sl] ** 2 / w)
            else:
                P = quadratic_representation(Element(leaf, x.coords[sl])).matrix
                H[sl, sl] = P / w[0]
        return LinearOperator(self.cone, H)

    def dual_value(self, s: Element, tol: float = 1e-9) -> float:
        """The conjugate barrier F_*(s) = sup_x { -<x, s> - F(x) }.

        Closed form per block: -c_i ln det(s_i) + c_i r_i (ln c_i - 1),
        summed, minus c0.
        """
        self._require_interior(s, tol, "s")
        total = -self.offset
        for leaf, sl, w in self._blocks(s):
            if isinstance(leaf, Orthant):
                total += float(np.dot(w, np.log(w) - 1.0 - np.log(s.coords[sl])))
            else:
                c = w[0]
                det = determinant(Element(leaf, s.coords[sl]))
                total += -c * math.log(det) + c * leaf.rank * (math.log(c) - 1.0)
        return total

    def dual_gradient(self, s: Element, tol: float = 1e-9) -> Element:
        """F_*'(s) = -c_i s_i^-1 blockwise (same form as the primal)."""
        return self.gradient(s, tol)

    def dual_hessian(self, s: Element, tol: float = 1e-9) -> LinearOperator:
        """F_*''(s) = c_i P(s_i)^-1 blockwise (same form as the primal)."""
        return self.hessian(s, tol)

    def scaling_point(self, x: Element, s: Element, tol: float = 1e-9) -> Element:
        """The unique interior w with F''(w) x = s (Nesterov-Todd point).

        Computed by the blockwise closed form
        w_i = P(x_i^1/2) [P(x_i^1/2)(s_i/c_i)]^(-1/2); weighted blocks
        divide s_i by c_i because F''(w) x = s reads
        c_i P(w_i)^-1 x_i = s_i.  A couple of Newton refinement steps on
        P(w) u = x repair the digits the closed form loses when x and s
        are both ill-conditioned (near the end of an interior-point run).
        """
        self._require_interior(x, tol, "x")
        self._require_interior(s, tol, "s")
        out = np.empty(self.cone.dim)
        for leaf, sl, w in self._blocks(x):
            if isinstance(leaf, Orthant):
                out[sl] = np.sqrt(w * x.coords[sl] / s.coords[sl])
            else:
                xi = Element(leaf, x.coords[sl])
                ui = Element(leaf, s.coords[sl] / w[0])
                out[sl] = _scaling_block(leaf, xi, ui).coords
        return Element(self.cone, out)

    def unit(self) -> FUnitPair:
        """The F-unit e = sqrt(c_i) f_i blockwise, with F''(e) = I."""
        coords = np.empty(self.cone.dim)
        for (leaf, off), w in zip(self._leaves, self._leaf_weights):
            sl = slice(off, off + leaf.dim)
            if isinstance(leaf, Orthant):
                coords[sl] = np.sqrt(w)
            else:
                coords[sl] = math.sqrt(w[0]) * leaf._identity_coords()
        e = Element(self.cone, coords)
        return FUnitPair(e=e, e_inv=-self.gradient(e))

    def as_oracle(self) -> "BarrierOracle":
        return BarrierOracle(
            cone=self.cone,
            nu=self.nu,
            unit=self.unit().e,
            value=self.value,
            gradient=self.gradient,
            hessian=self.hessian,
            hessian_inverse=self.hessian_inverse,
            dual_value=self.dual_value,
            dual_gradient=self.dual_gradient,
            dual_hessian=self.dual_hessian,
            scaling_point=self.scaling_point,
        )


def _nt_closed_form(leaf: Algebra, x: Element, u: Element) -> Element:
    Pr = quadratic_representation(sqrt(x))
    return Pr(scale_power(Pr(u), -0.5))


def _scaling_block(leaf: Algebra, x: Element, u: Element) -> Element:
    """Scaling point of an irreducible block, with scaled refinement.

    The plain closed form determines the small eigenvalues of w only in
    an absolute sense, which is not enough for the Hessian equation
    F''(w) x = u when x and u are both near the boundary.  Re-solving
    in the frame of the current estimate fixes that: with Q = P(w^1/2)
    the pair (Q^-1 x, Q u) is balanced near sqrt(mu) times the unit, the
    closed form there is perfectly conditioned, and the correction maps
    back exactly through w <- Q w_hat by the fundamental formula.
    """
    w = _nt_closed_form(leaf, x, u)
    e = leaf.identity()
    for _ in range(2):
        Q = quadratic_representation(sqrt(w)).matrix
        try:
            x_hat = Element(leaf, np.linalg.solve(Q, x.coords))
        except np.linalg.LinAlgError:
            break
        u_hat = Element(leaf, Q @ u.coords)
        if (membership(x_hat, tol=1e-300) is not Membership.INTERIOR
                or membership(u_hat, tol=1e-300) is not Membership.INTERIOR):
            break
        w_hat = _nt_closed_form(leaf, x_hat, u_hat)
        w = Element(leaf, Q @ w_hat.coords)
        if (w_hat - e).norm() <= 1e-14:
            break
    return w


@dataclass
class BarrierOracle:
    """Callback bundle consumed by ``verify_self_scaled``.

    Lets the verification suite audit arbitrary candidate barriers, not
    only members of the family; wrap a ``SelfScaledBarrier`` with
    ``as_oracle`` or supply modified callbacks for negative tests.
    """

    cone: Algebra
    nu: float
    unit: Element
    value: Callable[[Element], float]
    gradient: Callable[[Element], Element]
    hessian: Callable[[Element], LinearOperator]
    hessian_inverse: Callable[[Element], LinearOperator]
    dual_value: Callable[[Element], float]
    dual_gradient: Callable[[Element], Element]
    dual_hessian: Callable[[Element], LinearOperator]
    scaling_point: Callable[[Element, Element], Element]


@dataclass
class IdentityRecord:
    """Outcome of sampling one identity across all trials."""

    name: str
    trials: int
    max_residual: float
    tolerance: float
    passed: bool

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "trials": self.trials,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "passed": bool(self.passed),
        }


@dataclass
class VerificationReport:
    """Per-identity residual records for one verification run."""

    records: list[IdentityRecord]
    seed: int
    trials: int
    overall_pass: bool = field(init=False)

    def __post_init__(self):
        self.overall_pass = all(r.passed for r in self.records)

    def record(self, name: str) -> IdentityRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "overall_pass": bool(self.overall_pass),
            "records": [r.as_dict() for r in self.records],
        }

    def format_table(self) -> str:
        """Plain-text table, one identity per line."""
        width = max(len(r.name) for r in self.records)
        lines = [f"{'identity':<{width}}  {'trials':>6}  {'max residual':>13}  "
                 f"{'tolerance':>10}  result"]
        for r in self.records:
            lines.append(
                f"{r.name:<{width}}  {r.trials:>6}  {r.max_residual:>13.4e}  "
                f"{r.tolerance:>10.1e}  {'pass' if r.passed else 'FAIL'}")
        lines.append("overall: %s" % ("pass" if self.overall_pass else "FAIL"))
        return "\n".join(lines)


class _Check:
    def __init__(self, name: str, tolerance: float):
        self.name = name
        self.tolerance = tolerance
        self.worst = 0.0
        self.count = 0

    def add(self, residual: float) -> None:
        if not np.isfinite(residual):
            residual = np.inf
        self.worst = max(self.worst, float(residual))
        self.count += 1

    def guarded(self, fn) -> None:
        try:
            self.add(fn())
        except (DomainError, FloatingPointError, np.linalg.LinAlgError, ValueError):
            self.add(np.inf)

    def record(self) -> IdentityRecord:
        return IdentityRecord(self.name, self.count, self.worst, self.tolerance,
                              self.worst <= self.tolerance)


def _neg_eig_residual(x: Element) -> float:
    lam = eigenvalues(x)
    scale = max(float(np.abs(lam).max()), 1e-300)
    return max(0.0, -float(lam.min()) / scale)


def verify_self_scaled(barrier, trials: int = 100, seed: int = 0,
                       tol: float = 1e-8) -> VerificationReport:
    """Sample the self-scaled identities and report residuals.

    Checks, per random interior pair (x, w): logarithmic homogeneity,
    ss-1, ss-2, sym-2, the c(w) constancy, the first-version fundamental
    formula (Hessian form), the fundamental formula in P-form, the
    seven logarithmic-homogeneity consequences prop2.1-i..vii, the
    gradient against a central finite difference, positive definiteness
    of the Hessian, and the scaling-point residual.  Deterministic for a
    fixed seed; identity failures are report entries, never exceptions.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    oracle = barrier.as_oracle() if isinstance(barrier, SelfScaledBarrier) else barrier
    cone = oracle.cone
    W = cone.metric_weights
    nu = oracle.nu
    e = oracle.unit
    rng = np.random.default_rng(seed)

    names = ["log-homogeneous", "ss-1", "ss-2", "sym-2", "c(w)",
             "ff1stversion", "fundamental",
             "prop2.1-i", "prop2.1-ii", "prop2.1-iii", "prop2.1-iv",
             "prop2.1-v", "prop2.1-vi", "prop2.1-vii",
             "gradient-fd", "hessian-pd", "scaling-point"]
    tols = {name: tol for name in names}
    tols["gradient-fd"] = 1e-6
    tols["prop2.1-vii"] = 1e-10
    checks = {name: _Check(name, tols[name]) for name in names}

    try:
        F_e = oracle.value(e)
    except (DomainError, ValueError):
        F_e = np.nan

    for _ in range(trials):
        x = cone.random_interior(rng)
        w = cone.random_interior(rng)
        x2 = cone.random_interior(rng)
        s = cone.random_interior(rng)
        t = float(rng.uniform(0.5, 2.0))

        Fx = oracle.value(x)
        Fw = oracle.value(w)
        g = oracle.gradient(x)
        minus_g = -g
        Hx = oracle.hessian(x)
        Hw = oracle.hessian(w)
        z = Hw(x)

        checks["log-homogeneous"].guarded(
            lambda: abs(oracle.value(t * x) - (Fx - nu * math.log(t)))
            / (1.0 + abs(Fx)))
        checks["ss-1"].guarded(lambda: _neg_eig_residual(z))
        checks["ss-2"].guarded(
            lambda: abs(oracle.dual_value(z) - (Fx - 2.0 * Fw - nu))
            / (1.0 + abs(Fx) + abs(Fw)))
        checks["sym-2"].guarded(
            lambda: abs(oracle.value(z) - (Fx - 2.0 * Fw + 2.0 * F_e))
            / (1.0 + abs(Fx) + abs(Fw)))

        def c_of_w():
            c1 = oracle.value(z) - Fx
            c2 = oracle.value(Hw(x2)) - oracle.value(x2)
            formula = -2.0 * Fw + 2.0 * F_e
            return max(abs(c1 - c2), abs(c1 - formula)) / (1.0 + abs(formula))
        checks["c(w)"].guarded(c_of_w)

        def ff_first():
            M = Hw.matrix @ oracle.dual_hessian(z).matrix @ Hw.matrix
            return np.linalg.norm(Hx.matrix - M) / np.linalg.norm(Hx.matrix)
        checks["ff1stversion"].guarded(ff_first)

        def fundamental():
            Pw = oracle.hessian_inverse(w)
            Px = oracle.hessian_inverse(x)
            u = Pw(x)
            lhs = oracle.hessian_inverse(u).matrix
            rhs = Pw.matrix @ Px.matrix @ Pw.matrix
            return np.linalg.norm(lhs - rhs) / (Pw.norm() ** 2 * Px.norm())
        checks["fundamental"].guarded(fundamental)

        def prop_i():
            v = Hx(x)
            vec = np.linalg.norm(v.coords - minus_g.coords) / minus_g.norm()
            return max(vec, _neg_eig_residual(v))
        checks["prop2.1-i"].guarded(prop_i)
        checks["prop2.1-ii"].guarded(
            lambda: (-oracle.dual_gradient(minus_g) - x).norm() / x.norm())

        def prop_iii():
            lhs = oracle.dual_hessian(minus_g).matrix
            rhs = np.linalg.inv(Hx.matrix)
            return np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs)
        checks["prop2.1-iii"].guarded(prop_iii)
        checks["prop2.1-iv"].guarded(lambda: abs(inner(x, minus_g) - nu) / nu)

        def prop_v():
            g_t = oracle.gradient(t * x)
            r1 = (g_t - (1.0 / t) * g).norm() / ((1.0 / t) * g).norm()
            H_t = oracle.hessian(t * x).matrix
            ref = Hx.matrix / t ** 2
            r2 = np.linalg.norm(H_t - ref) / np.linalg.norm(ref)
            return max(r1, r2)
        checks["prop2.1-v"].guarded(prop_v)
        checks["prop2.1-vi"].guarded(
            lambda: abs(oracle.dual_value(minus_g) + nu + Fx) / (1.0 + abs(Fx)))

        def prop_vii():
            slack = (Fx + oracle.dual_value(s) + nu + nu * math.log(nu)
                     + nu * math.log(inner(x, s)))
            return max(0.0, -slack)
        checks["prop2.1-vii"].guarded(prop_vii)

        def gradient_fd():
            h = 1e-5 * x.norm()
            g_fd = np.empty(cone.dim)
            for i in range(cone.dim):
                step = np.zeros(cone.dim)
                step[i] = h
                g_fd[i] = (oracle.value(Element(cone, x.coords + step))
                           - oracle.value(Element(cone, x.coords - step))) / (2 * h)
            g_fd /= W  # Euclidean gradient -> trace-form gradient
            return np.linalg.norm(g_fd - g.coords) / g.norm()
        checks["gradient-fd"].guarded(gradient_fd)

        def hessian_pd():
            M = W[:, None] * Hx.matrix
            lam = np.linalg.eigvalsh(0.5 * (M + M.T))
            return max(0.0, -float(lam.min()) / float(lam.max()))
        checks["hessian-pd"].guarded(hessian_pd)

        def scaling_residual():
            w_star = oracle.scaling_point(x, s)
            r = (oracle.hessian(w_star)(x) - s).norm() / s.norm()
            return max(r, _neg_eig_residual(w_star))
        checks["scaling-point"].guarded(scaling_residual)

    return VerificationReport(records=[checks[n].record() for n in names],
                              seed=seed, trials=trials)


def characteristic_function_log(cone: Algebra, x: Element,
                                tol: float = 1e-9) -> float:
    """ln of the cone's characteristic integral, up to additive constants.

    Per irreducible leaf this equals -(n_i / r_i) ln det_i(x_i) plus an
    additive constant that we normalize to zero blockwise, so only the
    affine relation in x is meaningful.
    """
    if x.algebra != cone:
        raise DomainError("x does not belong to the given cone")
    if membership(x, tol) is not Membership.INTERIOR:
        raise DomainError("x is not interior to the cone")
    total = 0.0
    for leaf, off in cone.leaves():
        xi = Element(leaf, x.coords[off:off + leaf.dim])
        total -= (leaf.dim / leaf.rank) * math.log(determinant(xi))
    return total
