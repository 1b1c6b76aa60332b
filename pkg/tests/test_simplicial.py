import itertools
import math

import numpy as np
import pytest

from virasoro_transgression import cocycle as C
from virasoro_transgression import diffeo as D
from virasoro_transgression import simplicial as S

from conftest import sup_circle_distance


def rng_seeded(seed=0):
    return np.random.default_rng(seed)


def sample(rng, p, q):
    return S.random_point_tangent(rng, p, q)


# ---------------------------------------------------------------------------
# Face maps on points.


def test_horizontal_face_zero_drops_gamma():
    rng = rng_seeded()
    g = D.random_diffeo(rng)
    pt = S.BisimplicialPoint((g,), 1.2, 0.8)
    out = S.face_map(S.HORIZONTAL, 0, pt)
    assert out.gammas == ()
    assert (out.theta, out.v) == (1.2, 0.8)


def test_horizontal_face_one_acts_on_frame():
    rng = rng_seeded()
    g = D.random_diffeo(rng)
    pt = S.BisimplicialPoint((g,), 1.2, 0.8)
    out = S.face_map(S.HORIZONTAL, 1, pt)
    f, f1, _ = g.derivatives(1.2)
    assert out.theta == f
    assert out.v == pytest.approx(f1 * 0.8, rel=1e-15)


def test_horizontal_face_composes_middle_slots():
    rng = rng_seeded()
    g1, g2 = D.random_diffeo(rng), D.random_diffeo(rng)
    pt = S.BisimplicialPoint((g1, g2), 0.4, 1.0)
    out = S.face_map(S.HORIZONTAL, 1, pt)
    assert out.p == 1
    assert sup_circle_distance(out.gammas[0], D.compose(g1, g2)) == 0.0


def test_vertical_face_formulas():
    pt = S.BisimplicialPoint((), 1.2, 0.8, (0.3, -0.7))
    act = S.face_map(S.VERTICAL, 0, pt)
    assert act.v == pytest.approx(math.exp(0.3) * 0.8, rel=1e-15)
    assert act.xs == (-0.7,)
    add = S.face_map(S.VERTICAL, 1, pt)
    assert add.xs == (0.3 - 0.7,)
    drop = S.face_map(S.VERTICAL, 2, pt)
    assert drop.xs == (0.3,)


def test_face_index_out_of_range():
    pt = S.BisimplicialPoint((), 0.1, 1.0, (0.5,))
    with pytest.raises(S.LevelError):
        S.face_map(S.VERTICAL, 2, pt)
    with pytest.raises(S.LevelError):
        S.face_map(S.HORIZONTAL, 0, pt)


def test_frame_coordinate_must_be_positive():
    with pytest.raises(ValueError):
        S.BisimplicialPoint((), 0.0, -1.0)


# ---------------------------------------------------------------------------
# Pushforwards against hand chain-rule oracles.


def test_pushforward_action_face_zero_fields():
    rng = rng_seeded(1)
    g1, g2 = D.random_diffeo(rng), D.random_diffeo(rng)
    th, v, dth, dv = 0.9, 1.3, 0.4, -0.2
    pt = S.BisimplicialPoint((g1, g2), th, v)
    tan = S.Tangent((S.ZERO_FIELD, S.ZERO_FIELD), dth, dv)
    out = S.pushforward(S.HORIZONTAL, 2, pt, tan)
    f, f1, f2 = g2.derivatives(th)
    assert out.dtheta == pytest.approx(f1 * dth, rel=1e-14)
    assert out.dv == pytest.approx(f2 * v * dth + f1 * dv, rel=1e-14)


def test_pushforward_action_face_general_fields():
    rng = rng_seeded(2)
    pt, tan = sample(rng, 2, 0)
    out = S.pushforward(S.HORIZONTAL, 2, pt, tan)
    g2, u2 = pt.gammas[1], tan.fields[1]
    f, f1, f2 = g2.derivatives(pt.theta)
    u, du = u2.jet(pt.theta)
    assert out.dtheta == pytest.approx(u + f1 * tan.dtheta, rel=1e-12)
    expected_dv = (du + f2 * tan.dtheta) * pt.v + f1 * tan.dv
    assert out.dv == pytest.approx(expected_dv, rel=1e-12)


def test_pushforward_composition_face_field():
    # tangent of (g1, g2) -> g1 o g2 is u1(g2) + g1'(g2) u2
    rng = rng_seeded(3)
    pt, tan = sample(rng, 2, 0)
    new_tan = S.pushforward(S.HORIZONTAL, 1, pt, tan)
    g1, g2 = pt.gammas
    u1, u2 = tan.fields
    thetas = np.linspace(0.0, D.TAU, 9)
    got, dgot = new_tan.fields[0].jet(thetas)
    f2 = g2(thetas)
    expected = u1.value(f2) + g1.derivatives(f2)[1] * u2.value(thetas)
    assert np.allclose(got, expected, rtol=0, atol=1e-12)
    h = 1e-6
    fd = (new_tan.fields[0].jet(thetas + h)[0] - new_tan.fields[0].jet(thetas - h)[0]) / (2 * h)
    assert np.allclose(dgot, fd, rtol=0, atol=1e-6)


# ---------------------------------------------------------------------------
# Simplicial identities.


def _points_match(p1, p2, tol=1e-10):
    if p1.p != p2.p or p1.q != p2.q:
        return False
    grid = np.linspace(0.0, D.TAU, 17)
    for g1, g2 in zip(p1.gammas, p2.gammas):
        if sup_circle_distance(g1, g2, grid) > tol:
            return False
    return (
        abs(p1.theta - p2.theta) < tol
        and abs(p1.v - p2.v) < tol
        and np.allclose(p1.xs, p2.xs, atol=tol)
    )


def _tangents_match(pt1, t1, pt2, t2, tol=1e-10):
    grid = np.linspace(0.0, D.TAU, 9)
    for f1, f2 in zip(t1.fields, t2.fields):
        v1, d1 = f1.jet(grid)
        v2, d2 = f2.jet(grid)
        if not (np.allclose(v1, v2, atol=tol) and np.allclose(d1, d2, atol=tol)):
            return False
    return (
        abs(t1.dtheta - t2.dtheta) < tol
        and abs(t1.dv - t2.dv) < tol
        and np.allclose(t1.dxs, t2.dxs, atol=tol)
    )


@pytest.mark.parametrize("direction", [S.HORIZONTAL, S.VERTICAL])
@pytest.mark.parametrize("level", [(2, 2), (3, 3)])
def test_simplicial_identity_on_points_and_tangents(direction, level):
    rng = rng_seeded(4)
    p, q = level
    n = p if direction == S.HORIZONTAL else q
    pt, tan = sample(rng, p, q)
    for j in range(1, n + 1):
        for i in range(j):
            a_pt, a_tan = S._apply_face(direction, j, pt, tan)
            a_pt, a_tan = S._apply_face(direction, i, a_pt, a_tan)
            b_pt, b_tan = S._apply_face(direction, i, pt, tan)
            b_pt, b_tan = S._apply_face(direction, j - 1, b_pt, b_tan)
            assert _points_match(a_pt, b_pt), (direction, i, j)
            assert _tangents_match(a_pt, a_tan, b_pt, b_tan), (direction, i, j)


def test_pushforward_is_linear_in_the_tangent():
    # probe the pushed tangents with a 1-form; faces from (2, 0) land at (1, 0)
    rng = rng_seeded(20)
    probe = S.form_log_gamma_prime_dlog_v()
    for index in (1, 2):
        pt, t1 = sample(rng, 2, 0)
        _, t2 = sample(rng, 2, 0)
        a = rng.uniform(-2.0, 2.0)
        combo = t1.scaled_plus(a, t2)
        target_pt = S.face_map(S.HORIZONTAL, index, pt)
        pushed_combo = S.pushforward(S.HORIZONTAL, index, pt, combo)
        pushed_1 = S.pushforward(S.HORIZONTAL, index, pt, t1)
        pushed_2 = S.pushforward(S.HORIZONTAL, index, pt, t2)
        lhs = probe(target_pt, pushed_combo)
        rhs = a * probe(target_pt, pushed_1) + probe(target_pt, pushed_2)
        assert abs(lhs - rhs) < 1e-10


def test_double_coboundary_vanishes_vertical():
    rng = rng_seeded(5)
    dd = S.coboundary(S.VERTICAL, S.coboundary(S.VERTICAL, S.form_minus_log_v_dx()))
    worst = max(abs(dd(*sample(rng, 0, 3))) for _ in range(100))
    assert worst < 1e-9


def test_double_coboundary_vanishes_horizontal():
    rng = rng_seeded(6)
    dd = S.coboundary(
        S.HORIZONTAL, S.coboundary(S.HORIZONTAL, S.form_log_gamma_prime_dlog_v())
    )
    worst = max(abs(dd(*sample(rng, 3, 0))) for _ in range(100))
    assert worst < 1e-9


# ---------------------------------------------------------------------------
# Forms: linearity and the z1 consistency statement.


def test_form_linearity():
    rng = rng_seeded(7)
    z2 = S.form_bott_thurston_integrand()
    for _ in range(20):
        pt, t1 = sample(rng, 2, 0)
        _, t2 = sample(rng, 2, 0)
        a = rng.uniform(-2.0, 2.0)
        lhs = z2(pt, t1.scaled_plus(a, t2))
        rhs = a * z2(pt, t1) + z2(pt, t2)
        assert abs(lhs - rhs) < 1e-10


def test_z1_agrees_with_plane_cocycle():
    # the (0, 2) cochain is literally x1 dx2 on the R^2 factor
    rng = rng_seeded(8)
    z1 = S.form_x1_dx2()
    for _ in range(20):
        pt, tan = sample(rng, 0, 2)
        assert z1(pt, tan) == pt.xs[0] * tan.dxs[1]


def test_form_level_mismatch_rejected():
    rng = rng_seeded(9)
    pt, tan = sample(rng, 1, 1)
    with pytest.raises(S.LevelError):
        S.form_x1_dx2()(pt, tan)


# ---------------------------------------------------------------------------
# The coboundary identities.


def test_lemma_identities_on_identity_data():
    ident_pt = {
        (0, 2): (S.BisimplicialPoint((), 0.3, 1.0, (0.2, 0.4)), S.Tangent((), 0, 0, (0, 0))),
        (1, 1): (
            S.BisimplicialPoint((D.identity(),), 0.3, 1.0, (0.2,)),
            S.Tangent((S.ZERO_FIELD,), 0, 0, (0,)),
        ),
        (2, 0): (
            S.BisimplicialPoint((D.identity(), D.identity()), 0.3, 1.0),
            S.Tangent((S.ZERO_FIELD, S.ZERO_FIELD), 0, 0),
        ),
    }
    residuals = S.lemma_residuals(S.LemmaCochains.standard(), ident_pt)
    assert residuals == (0.0, 0.0, 0.0)


def test_lemma_identities_random_samples():
    assert S.verify_main_lemma(samples=100, seed=10) < 1e-9


def test_lemma_componentwise_targets():
    # each identity individually, against the closed-form target cochains
    rng = rng_seeded(11)
    dv_b1 = S.coboundary(S.VERTICAL, S.form_minus_log_v_dx())
    dh_b1 = S.coboundary(S.HORIZONTAL, S.form_minus_log_v_dx())
    dv_b2 = S.coboundary(S.VERTICAL, S.form_log_gamma_prime_dlog_v())
    dh_b2 = S.coboundary(S.HORIZONTAL, S.form_log_gamma_prime_dlog_v())
    mid = S.form_log_gamma_prime_dx()
    z1 = S.form_x1_dx2()
    z2 = S.form_bott_thurston_integrand()
    for _ in range(50):
        pt, tan = sample(rng, 0, 2)
        assert abs(dv_b1(pt, tan) + z1(pt, tan)) < 1e-10
        pt, tan = sample(rng, 1, 1)
        assert abs(dh_b1(pt, tan) - mid(pt, tan)) < 1e-10
        assert abs(dv_b2(pt, tan) - mid(pt, tan)) < 1e-10
        pt, tan = sample(rng, 2, 0)
        assert abs(dh_b2(pt, tan) - z2(pt, tan)) < 1e-10


def test_mutated_cochain_fails_loudly():
    mutated = S.LemmaCochains(
        z1=S.form_x1_dx2(),
        z2=S.form_bott_thurston_integrand(),
        beta1=S.LevelOneForm(0, 1, lambda pt, tan: np.log(pt.v) * tan.dxs[0], "+log(v) dx"),
        beta2=S.form_log_gamma_prime_dlog_v(),
    )
    assert S.verify_main_lemma(samples=100, seed=12, cochains=mutated) > 0.1


# ---------------------------------------------------------------------------
# Fiber integration and transgression.


def test_fiber_integration_matches_direct_quadrature():
    rng = rng_seeded(13)
    fi = S.fiber_integrate(S.form_bott_thurston_integrand())
    for _ in range(20):
        g1, g2 = D.random_diffeo(rng), D.random_diffeo(rng)
        direct = C.bott_thurston_R(g1, g2)
        assert abs(fi(g1, g2) - direct) <= 1e-10 * max(1e-6, abs(direct))


def test_fiber_integration_of_zero_dtheta_form():
    zero_form = S.LevelOneForm(1, 0, lambda pt, tan: 0.0 * np.asarray(pt.theta), "0")
    g = D.random_diffeo(rng_seeded(14))
    assert S.fiber_integrate(zero_form)(g) == 0.0


def test_fiber_integration_identity_slot_vanishes():
    fi = S.fiber_integrate(S.form_bott_thurston_integrand())
    g = D.random_diffeo(rng_seeded(15))
    assert fi(D.identity(), g) == 0.0


def test_fiber_integration_rejects_nonbasic_forms():
    g = D.random_diffeo(rng_seeded(16))
    with pytest.raises(S.NotBasicError):
        S.fiber_integrate(S.form_log_gamma_prime_dlog_v())(g)
    v_dep = S.LevelOneForm(1, 0, lambda pt, tan: pt.v * tan.dtheta, "v dtheta")
    with pytest.raises(S.NotBasicError):
        S.fiber_integrate(v_dep)(g)
    with pytest.raises(S.NotBasicError):
        S.fiber_integrate(S.form_minus_log_v_dx())


def test_fiber_integration_arity_checked():
    fi = S.fiber_integrate(S.form_bott_thurston_integrand())
    with pytest.raises(S.LevelError):
        fi(D.identity())


def test_transgress_zero_scale_is_zero_cocycle():
    rng = rng_seeded(17)
    zero = S.transgress(0.0)
    for _ in range(5):
        g1, g2 = D.random_diffeo(rng), D.random_diffeo(rng)
        assert zero(g1, g2) == 0.0


def test_transgress_is_linear_in_scale():
    rng = rng_seeded(18)
    g1, g2 = D.random_diffeo(rng), D.random_diffeo(rng)
    one = S.transgress(0.35)(g1, g2)
    two = S.transgress(0.70)(g1, g2)
    assert two == pytest.approx(2.0 * one, rel=1e-12)
