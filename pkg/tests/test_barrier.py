"""Barrier values, derivatives, duals, scaling points, verification."""

import math

import numpy as np
import pytest
import scipy.optimize

import symcone as sc
from symcone import (
    BarrierOracle,
    DirectSum,
    DomainError,
    Element,
    Lorentz,
    Membership,
    Orthant,
    SelfScaledBarrier,
    SymPSD,
    characteristic_function_log,
    verify_self_scaled,
)

from conftest import (
    fd_second_directional,
    fd_trace_gradient,
    newton_scaling_point,
    perturb_interior,
)

CONES = [
    (Orthant(3), [1.0, 1.0, 1.0]),
    (Lorentz(3), [2.0]),
    (SymPSD(3), [1.5]),
    (DirectSum([Lorentz(2), Orthant(2)]), [2.0, 1.0]),
]


def barriers():
    return [SelfScaledBarrier(cone, w) for cone, w in CONES]


# ---------------------------------------------------------------------------
# values


def test_value_examples():
    B = SelfScaledBarrier(Orthant(2), [1.0, 1.0])
    assert B.value(Orthant(2).element([1, 1])) == pytest.approx(0.0)
    Bw = SelfScaledBarrier(Orthant(2), [2.0, 1.0])
    assert Bw.value(Orthant(2).element([1, 3])) == pytest.approx(-math.log(3))
    assert Bw.value(Orthant(2).element([2, 3])) == pytest.approx(
        -2 * math.log(2) - math.log(3))


def test_log_homogeneity(rng):
    for B in barriers():
        x = B.cone.random_interior(rng)
        for t in (2.0, 0.3):
            assert B.value(t * x) == pytest.approx(
                B.value(x) - B.nu * math.log(t), abs=1e-12)


def test_nu_accumulates_weight_times_rank():
    assert SelfScaledBarrier(Orthant(2), [2.0, 1.0]).nu == pytest.approx(3.0)
    assert SelfScaledBarrier(Lorentz(4), [3.0]).nu == pytest.approx(6.0)
    assert SelfScaledBarrier(SymPSD(3), [1.5]).nu == pytest.approx(4.5)
    B = SelfScaledBarrier(DirectSum([Orthant(2), Lorentz(3)]), [1.0, 2.0])
    assert B.nu == pytest.approx(2.0 + 4.0)
    assert B.weights == (1.0, 1.0, 2.0)  # per-leaf weight broadcast to axes


def test_weight_validation():
    with pytest.raises(ValueError, match=">= 1"):
        SelfScaledBarrier(Orthant(3), [0.5, 1.0, 1.0])
    with pytest.raises(ValueError, match="weights"):
        SelfScaledBarrier(DirectSum([Orthant(2), Lorentz(3)]), [1.0, 2.0, 3.0, 4.0])


def test_non_interior_rejected():
    B = SelfScaledBarrier(Orthant(2), 1.0)
    for fn in (B.value, B.gradient, B.hessian, B.hessian_inverse, B.dual_value):
        with pytest.raises(DomainError):
            fn(Orthant(2).element([1.0, 0.0]))


# ---------------------------------------------------------------------------
# derivatives


def test_gradient_example():
    B = SelfScaledBarrier(Orthant(2), 1.0)
    np.testing.assert_allclose(B.gradient(Orthant(2).element([2, 4])).coords,
                               [-0.5, -0.25])


def test_gradient_matches_finite_differences(rng):
    for B in barriers():
        x = B.cone.random_interior(rng)
        g_fd = fd_trace_gradient(B.value, x)
        assert np.linalg.norm(g_fd - B.gradient(x).coords) <= \
            1e-6 * B.gradient(x).norm()


def test_hessian_matches_second_differences(rng):
    for B in barriers():
        x = B.cone.random_interior(rng)
        H = B.hessian(x)
        for _ in range(3):
            h = Element(B.cone, rng.standard_normal(B.cone.dim))
            quad = sc.inner(h, H(h))
            fd = fd_second_directional(B.value, x, h)
            assert abs(fd - quad) <= 1e-4 * abs(quad)


def test_hessian_inverse_consistent(rng):
    for B in barriers():
        x = B.cone.random_interior(rng)
        prod = B.hessian(x).matrix @ B.hessian_inverse(x).matrix
        np.testing.assert_allclose(prod, np.eye(B.cone.dim), atol=1e-9)


def test_gradient_pairing_gives_nu(rng):
    for B in barriers():
        for _ in range(5):
            x = B.cone.random_interior(rng)
            assert sc.inner(x, -B.gradient(x)) == pytest.approx(B.nu, rel=1e-10)


def test_hessian_scaling(rng):
    for B in barriers():
        x = B.cone.random_interior(rng)
        H = B.hessian(x).matrix
        H3 = B.hessian(3.0 * x).matrix
        np.testing.assert_allclose(H3, H / 9.0, atol=1e-10 * np.abs(H).max())


# ---------------------------------------------------------------------------
# dual barrier


def test_dual_value_scalar_example():
    B = SelfScaledBarrier(Orthant(1), 1.0)
    assert B.dual_value(Orthant(1).element([1.0])) == pytest.approx(-1.0)


def _dual_by_optimization(B, s):
    """Brute-force sup { -<x, s> - F(x) } via Nelder-Mead."""
    def objective(coords):
        x = Element(B.cone, coords)
        if sc.membership(x, tol=1e-12) is not Membership.INTERIOR:
            return 1e100
        return sc.inner(x, s) + B.value(x)
    res = scipy.optimize.minimize(
        objective, B.cone.identity().coords, method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 40000,
                 "maxfev": 40000})
    return -res.fun


def test_dual_value_matches_sup_definition(rng):
    for B in [SelfScaledBarrier(Orthant(2), [2.0, 1.0]),
              SelfScaledBarrier(Lorentz(2), [1.5])]:
        s = B.cone.random_interior(rng)
        assert B.dual_value(s) == pytest.approx(_dual_by_optimization(B, s),
                                                abs=1e-6)


def test_dual_of_negative_gradient(rng):
    for B in barriers():
        for _ in range(5):
            x = B.cone.random_interior(rng)
            assert B.dual_value(-B.gradient(x)) == pytest.approx(
                -B.nu - B.value(x), abs=1e-10)


def test_dual_minus_primal_constant_for_unit_weights(rng):
    # with all weights 1 the two barriers differ by -2 F(e) - nu
    cone = DirectSum([Lorentz(2), Orthant(2)])
    B = SelfScaledBarrier(cone, 1.0, offset=0.7)
    e = B.unit().e
    assert B.value(e) == pytest.approx(0.7)
    for _ in range(5):
        x = cone.random_interior(rng)
        assert B.dual_value(x) - B.value(x) == pytest.approx(
            -2 * B.value(e) - B.nu, abs=1e-10)


# ---------------------------------------------------------------------------
# the unit


def test_unit_properties():
    for B in barriers():
        pair = B.unit()
        H = B.hessian(pair.e).matrix
        assert np.linalg.norm(H - np.eye(B.cone.dim)) <= 1e-10
        assert (pair.e_inv - pair.e).norm() <= 1e-12  # -F'(e) = e here
        # blockwise sqrt(c) times the block identity
        pos = 0
        for (leaf, off), w in zip(B.cone.leaves(), B._leaf_weights):
            expected = (np.sqrt(w) if isinstance(leaf, Orthant)
                        else math.sqrt(w[0]) * leaf._identity_coords())
            np.testing.assert_allclose(pair.e.coords[off:off + leaf.dim],
                                       expected)
            pos += len(w)


# ---------------------------------------------------------------------------
# scaling points


def test_scaling_point_examples():
    B = SelfScaledBarrier(Orthant(2), 1.0)
    w = B.scaling_point(Orthant(2).element([4, 1]), Orthant(2).element([1, 4]))
    np.testing.assert_allclose(w.coords, [2.0, 0.5])
    s3 = SymPSD(2)
    B2 = SelfScaledBarrier(s3, 1.0)
    w2 = B2.scaling_point(s3.element(s3.vec(np.diag([4.0, 1.0]))),
                          s3.element(s3.vec(np.diag([1.0, 4.0]))))
    np.testing.assert_allclose(s3.mat(w2.coords), np.diag([2.0, 0.5]),
                               atol=1e-12)


def test_scaling_point_of_equal_pair_is_unit(rng):
    for cone, _ in CONES:
        B = SelfScaledBarrier(cone, 1.0)
        x = cone.random_interior(rng)
        w = B.scaling_point(x, x)
        np.testing.assert_allclose(w.coords, cone.identity().coords, atol=1e-10)


def test_scaling_point_defining_equation(rng):
    for B in barriers():
        for _ in range(10):
            x = B.cone.random_interior(rng)
            s = B.cone.random_interior(rng)
            w = B.scaling_point(x, s)
            assert sc.membership(w) is Membership.INTERIOR
            assert (B.hessian(w)(x) - s).norm() <= 1e-8 * s.norm()


def test_scaling_point_matches_newton_solve(rng):
    for B in barriers():
        x = B.cone.random_interior(rng)
        s = B.cone.random_interior(rng)
        w = B.scaling_point(x, s)
        w_newton = newton_scaling_point(B, x, s, perturb_interior(w, rng))
        assert (w_newton - w).norm() <= 1e-7 * w.norm()


def test_scaling_hessian_maps_cone_to_cone(rng):
    for B in barriers():
        x = B.cone.random_interior(rng)
        s = B.cone.random_interior(rng)
        H = B.hessian(B.scaling_point(x, s))
        for _ in range(100):
            p = B.cone.random_interior(rng, eig_range=(0.0, 2.0))
            assert sc.membership(H(p), tol=1e-9) is not Membership.EXTERIOR


# ---------------------------------------------------------------------------
# the verification suite


def test_verify_standard_orthant_barrier():
    report = verify_self_scaled(SelfScaledBarrier(Orthant(3), 1.0),
                                trials=100, seed=11)
    assert report.overall_pass
    assert {r.name for r in report.records} >= {
        "ss-1", "ss-2", "sym-2", "c(w)", "ff1stversion", "fundamental",
        "log-homogeneous", "gradient-fd", "hessian-pd", "scaling-point"}


def test_verify_weighted_sum_barrier():
    B = SelfScaledBarrier(DirectSum([Lorentz(3), Orthant(1)]), [2.0, 1.0])
    report = verify_self_scaled(B, trials=100, seed=5)
    assert report.overall_pass
    assert all(r.max_residual <= r.tolerance for r in report.records)


def test_verify_deterministic_for_fixed_seed():
    B = SelfScaledBarrier(Lorentz(2), 1.0)
    r1 = verify_self_scaled(B, trials=30, seed=9)
    r2 = verify_self_scaled(B, trials=30, seed=9)
    assert [a.max_residual for a in r1.records] == \
        [b.max_residual for b in r2.records]


def _linear_perturbation_oracle(B, q: Element, eps: float = 0.1) -> BarrierOracle:
    """F(x) + eps <q, x>: gradient and dual shift exactly, Hessian does not."""
    base = B.as_oracle()
    return BarrierOracle(
        cone=base.cone, nu=base.nu, unit=base.unit,
        value=lambda x: B.value(x) + eps * sc.inner(q, x),
        gradient=lambda x: B.gradient(x) + eps * q,
        hessian=base.hessian,
        hessian_inverse=base.hessian_inverse,
        dual_value=lambda s: B.dual_value(s + eps * q),
        dual_gradient=lambda s: B.dual_gradient(s + eps * q),
        dual_hessian=lambda s: B.dual_hessian(s + eps * q),
        scaling_point=base.scaling_point,
    )


def test_verify_flags_perturbed_oracle(rng):
    B = SelfScaledBarrier(Orthant(3), 1.0)
    q = Element(B.cone, rng.standard_normal(3))
    report = verify_self_scaled(_linear_perturbation_oracle(B, q),
                                trials=50, seed=2)
    assert not report.overall_pass
    assert not report.record("ss-2").passed
    assert not report.record("log-homogeneous").passed
    # value and gradient stay mutually consistent
    assert report.record("gradient-fd").passed
    assert report.record("hessian-pd").passed


def test_verify_argument_validation():
    B = SelfScaledBarrier(Orthant(2), 1.0)
    with pytest.raises(ValueError):
        verify_self_scaled(B, trials=0)
    with pytest.raises(ValueError):
        verify_self_scaled(B, tol=0.0)


def test_report_serialization_roundtrip():
    B = SelfScaledBarrier(Lorentz(2), 1.0)
    report = verify_self_scaled(B, trials=10, seed=1)
    doc = report.as_dict()
    assert doc["overall_pass"] is True
    assert doc["seed"] == 1
    assert len(doc["records"]) == len(report.records)
    assert "ss-2" in report.format_table()


# ---------------------------------------------------------------------------
# characteristic function


def test_characteristic_function_examples():
    assert characteristic_function_log(Orthant(2), Orthant(2).element([1, 2])) \
        == pytest.approx(-math.log(2))
    assert characteristic_function_log(Lorentz(2), Lorentz(2).element([2, 1, 0])) \
        == pytest.approx(-1.5 * math.log(3))
    for cone, _ in CONES:
        assert characteristic_function_log(cone, cone.identity()) \
            == pytest.approx(0.0)


def test_characteristic_affine_relation(rng):
    for cone, _ in CONES:
        for _ in range(20):
            x = cone.random_interior(rng)
            correction = 0.0
            for leaf, off in cone.leaves():
                xi = Element(leaf, x.coords[off:off + leaf.dim])
                correction += (leaf.dim / leaf.rank) * math.log(sc.determinant(xi))
            assert abs(characteristic_function_log(cone, x) + correction) \
                <= 1e-10


def test_log_det_hessian_proposition(rng):
    # per irreducible block: ln det F''(x) + (2 n / r) ln det(x) is constant
    for cone, c in [(Lorentz(3), 2.0), (SymPSD(3), 1.5), (Orthant(1), 3.0)]:
        B = SelfScaledBarrier(cone, c)
        vals = []
        for _ in range(100):
            x = cone.random_interior(rng)
            _, logdet_H = np.linalg.slogdet(B.hessian(x).matrix)
            vals.append(logdet_H + (2.0 * cone.dim / cone.rank)
                        * math.log(sc.determinant(x)))
        assert max(vals) - min(vals) <= 1e-7
        assert vals[0] == pytest.approx(cone.dim * math.log(c), abs=1e-8)
