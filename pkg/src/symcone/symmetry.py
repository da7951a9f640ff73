"""Automorphism-group machinery for symmetric cones.

The cone automorphisms used here come in two flavours: quadratic
automorphisms Q(u) = P(u) for interior u, and orthogonal automorphisms,
which form the stabiliser of the cone's unit f.  Every automorphism A
factors uniquely as A = Q(u) H with u interior and H orthogonal; the
polar decomposition below recovers that factorisation from
u = (A f)^(1/2).

Orthogonal automorphisms are only ever *sampled by construction* from
the identity component (rotations on Lorentz blocks, congruences by
rotations on PSD blocks, blockwise on direct sums, no block swaps);
arbitrary operators are never classified into components.
"""

from __future__ import annotations

import numpy as np
from dataclasses import dataclass

from .algebra import (
    Algebra,
    DirectSum,
    DomainError,
    Element,
    LinearOperator,
    Lorentz,
    Membership,
    Orthant,
    SymPSD,
    determinant,
    inverse,
    jordan_product,
    membership,
    quadratic_representation,
    scale_power,
    spectral_decompose,
    sqrt,
)
from .barrier import IdentityRecord, SelfScaledBarrier, VerificationReport

__all__ = [
    "PolarDecomposition",
    "frame_restriction_check",
    "isotropy_check",
    "orthogonal_automorphism_sample",
    "orthogonal_quadratic_product",
    "polar_decompose",
    "quad_automorphism",
]


@dataclass
class PolarDecomposition:
    """Factorisation A = Q(u) H of a cone automorphism.

    ``u`` is interior, ``H`` is an orthogonal automorphism fixing the
    unit, and ``residual`` is the worst relative defect among the
    reconstruction Q(u) H = A and the orthogonality of H.
    """

    u: Element
    H: LinearOperator
    residual: float


def quad_automorphism(u: Element) -> LinearOperator:
    """The quadratic automorphism Q(u) = P(u) for interior u."""
    if membership(u) is not Membership.INTERIOR:
        raise DomainError("quadratic automorphisms need an interior point")
    return quadratic_representation(u)


def _haar_rotation(n: int, rng: np.random.Generator) -> np.ndarray:
    """A rotation (det +1) drawn from the Haar measure on SO(n)."""
    if n == 1:
        return np.ones((1, 1))
    A = rng.standard_normal((n, n))
    Q, R = np.linalg.qr(A)
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def orthogonal_automorphism_sample(cone: Algebra, seed: int = 0) -> LinearOperator:
    """A random orthogonal automorphism from the identity component.

    Orthant blocks contribute the identity (the connected stabiliser of
    the orthant's unit is trivial); a Lorentz block gets 1 (+) a random
    rotation of its xbar-space; a PSD block gets the congruence
    X -> O X O^T by a random rotation O; direct sums act blockwise.
    The result is orthogonal for the trace inner product and fixes the
    cone's unit.
    """
    rng = np.random.default_rng(seed)
    return LinearOperator(cone, _orthogonal_block(cone, rng))


def _orthogonal_block(cone: Algebra, rng: np.random.Generator) -> np.ndarray:
    if isinstance(cone, Orthant):
        return np.eye(cone.dim)
    if isinstance(cone, Lorentz):
        H = np.eye(cone.dim)
        H[1:, 1:] = _haar_rotation(cone.n, rng)
        return H
    if isinstance(cone, SymPSD):
        O = _haar_rotation(cone.k, rng)
        cols = []
        for i in range(cone.dim):
            basis = np.zeros(cone.dim)
            basis[i] = 1.0
            cols.append(cone.vec(O @ cone.mat(basis) @ O.T))
        return np.column_stack(cols)
    if isinstance(cone, DirectSum):
        H = np.eye(cone.dim)
        for part, sl in zip(cone.parts, cone.slices()):
            H[sl, sl] = _orthogonal_block(part, rng)
        return H
    raise ValueError(f"no orthogonal sampler for {cone!r}")


def polar_decompose(A: LinearOperator, cone: Algebra,
                    samples: int = 200, seed: int = 0) -> PolarDecomposition:
    """Split a cone automorphism as A = Q(u) H.

    Automorphism-ness has no finite certificate for a dense matrix, so
    it is checked by mapping ``samples`` random cone points through A
    and testing membership; a point leaving the cone, or A f leaving
    the interior, raises.  The decomposition itself is u = (A f)^(1/2)
    and H = Q(u)^-1 A, and it is unique.
    """
    if A.algebra != cone:
        raise ValueError("operator and cone do not match")
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        p = cone.random_interior(rng, eig_range=(0.0, 2.0))
        if membership(A(p), tol=1e-7) is Membership.EXTERIOR:
            raise ValueError("operator maps a cone point outside the cone; "
                             "not a cone automorphism")
    f = cone.identity()
    Af = A(f)
    if membership(Af) is not Membership.INTERIOR:
        raise ValueError("A f is not interior; not a cone automorphism")
    u = sqrt(Af)
    Qu = quadratic_representation(u)
    H = LinearOperator(cone, np.linalg.solve(Qu.matrix, A.matrix))
    recon = np.linalg.norm(Qu.matrix @ H.matrix - A.matrix) / A.norm()
    HH = H.adjoint().matrix @ H.matrix
    orth = np.linalg.norm(HH - np.eye(cone.dim)) / np.sqrt(cone.dim)
    return PolarDecomposition(u=u, H=H, residual=max(recon, orth))


def isotropy_check(B: SelfScaledBarrier, H: LinearOperator,
                   trials: int = 100, seed: int = 0,
                   tol: float = 1e-8) -> VerificationReport:
    """Check F(H x) = F(x) over sampled interior points.

    Holds whenever H is an orthogonal automorphism from the identity
    component; an orthogonal automorphism from outside it (a block swap,
    say) may fail, which this reports rather than raises.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        x = B.cone.random_interior(rng)
        try:
            resid = abs(B.value(H(x)) - B.value(x)) / (1.0 + abs(B.value(x)))
        except DomainError:
            resid = np.inf
        worst = max(worst, resid)
    rec = IdentityRecord("isotropy", trials, worst, tol, worst <= tol)
    return VerificationReport(records=[rec], seed=seed, trials=trials)


def frame_restriction_check(B: SelfScaledBarrier, alphas,
                            frame_seed: int = 0) -> tuple[float, float]:
    """Barrier restricted to a Jordan frame versus its predicted value.

    Builds x = sum_i alpha_i e_i on a frame sampled from a random
    interior point and returns ``(measured, predicted)`` where measured
    is F(x) - c0 and predicted is -(nu / r) sum_i ln alpha_i.  The two
    agree for barriers on irreducible cones (and uniformly weighted
    orthants, which restrict the same way).
    """
    alphas = np.asarray(alphas, dtype=float)
    if alphas.min() <= 0.0:
        raise DomainError("frame coefficients must be positive")
    leaves = B.cone.leaves()
    if len(leaves) != 1:
        raise ValueError("frame restriction requires an irreducible cone")
    if len(set(B.weights)) != 1:
        raise ValueError("frame restriction requires a uniform weight")
    r = B.cone.rank
    if alphas.size != r:
        raise ValueError(f"need {r} frame coefficients, got {alphas.size}")
    rng = np.random.default_rng(frame_seed)
    dec = spectral_decompose(B.cone.random_interior(rng))
    coords = np.zeros(B.cone.dim)
    for a, e in zip(alphas, dec.frame):
        coords += a * e.coords
    x = Element(B.cone, coords)
    measured = B.value(x) - B.offset
    predicted = -(B.nu / r) * float(np.log(alphas).sum())
    return measured, predicted


def orthogonal_quadratic_product(cone: Algebra, seed: int = 0
                                 ) -> tuple[LinearOperator, list[Element]]:
    """An orthogonal automorphism built purely from quadratic maps.

    Draws interior b, c and sets a = (P(b)^-1 c^-2)^(1/2); the product
    H = P(a) P(b) P(c) is then orthogonal for the trace form (and hence
    fixes the unit), while each factor is a bona fide quadratic
    automorphism.  Returns (H, [a, b, c]).
    """
    rng = np.random.default_rng(seed)
    b = cone.random_interior(rng)
    c = cone.random_interior(rng)
    Pb = quadratic_representation(b)
    c_inv2 = scale_power(c, -2.0)
    a = sqrt(Element(cone, np.linalg.solve(Pb.matrix, c_inv2.coords)))
    H = quadratic_representation(a) @ Pb @ quadratic_representation(c)
    return H, [a, b, c]
