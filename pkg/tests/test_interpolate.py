import math

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ilab.errors import ShapeMismatchError, SolverConvergenceError
from ilab.interpolate import (
    CoupleSpec, Interpolated, LozanovskiiProblem, calderon_norm, closed_form_space, interpolated_exponent,
    interpolation_inequality, lozanovskii_factor, lozanovskii_objective, numerical_derivation, reiteration_check,
    restrict_couple, space_at, weighted_couple_for,
)
from ilab.spaces import (
    INF, Amalgam, Convexified, DualOf, Lorentz, Lp, Restricted, Tsirelson2, TsirelsonT,
    WeightedLp, dyadic_block, norm, uniform_partition,
)

SOLVER_REL_TOLERANCE = 1e-3
DERIVATION_ABS_TOLERANCE = 2e-2
DIM = 5
MIN_ENTRY = 1e-2
MAX_ENTRY = 1e2

TEST_VECTORS = [
    np.array([1.0, 1.0, 1.0, 1.0]),
    np.array([3.0, -1.0, 0.5, 0.0]),
    np.array([0.0, 2.0, 0.0, -0.25]),
]


def test_interpolated_exponent():
    assert interpolated_exponent(1.0, INF, 0.5) == pytest.approx(2.0)
    assert interpolated_exponent(1.0, 2.0, 0.5) == pytest.approx(4.0 / 3.0)
    assert interpolated_exponent(INF, INF, 0.3) == INF


@pytest.mark.parametrize("theta", [0.0, 1.0, -0.1, 1.2])
def test_theta_outside_open_interval_is_rejected(theta):
    with pytest.raises(ValueError, match="fuera de rango"):
        CoupleSpec(Lp(1), Lp(INF), theta)


@pytest.mark.parametrize("p0,p1,theta", [(1.0, INF, 0.5), (1.0, 3.0, 0.25), (2.0, 4.0, 0.5)])
def test_calderon_norm_matches_lp_family(p0, p1, theta):
    couple = CoupleSpec(Lp(p0), Lp(p1), theta)
    p = interpolated_exponent(p0, p1, theta)
    for x in TEST_VECTORS:
        assert calderon_norm(couple, x) == pytest.approx(norm(Lp(p), x), rel=SOLVER_REL_TOLERANCE)


def test_calderon_norm_of_zero_is_zero():
    assert calderon_norm(CoupleSpec(Lp(1), Lp(INF), 0.5), np.zeros(3)) == 0.0


def test_equal_couple_factors_without_solver():
    X = Lorentz(2, 3)
    x = np.array([1.0, -2.0, 0.5])
    fac = lozanovskii_factor(CoupleSpec(X, X, 0.4), x)
    assert not fac.s.any()
    assert fac.bound == pytest.approx(norm(X, x))
    assert numerical_derivation(CoupleSpec(X, X, 0.4), x) == pytest.approx(np.zeros(3))


def test_factorization_constraint_and_normalization():
    couple = CoupleSpec(Lp(1), Lp(2), 0.3)
    x = np.array([2.0, -1.0, 0.0, 0.5])
    fac = lozanovskii_factor(couple, x)
    rebuilt = fac.a0 ** 0.7 * fac.a1 ** 0.3
    assert rebuilt == pytest.approx(np.abs(x), rel=1e-12)
    assert norm(Lp(1), fac.a0) == pytest.approx(norm(Lp(2), fac.a1), rel=1e-9)
    assert fac.s[2] == 0.0
    assert fac.certificate == "duality"
    assert fac.residual <= fac.eps
    assert fac.lower_bound <= fac.bound * (1.0 + 1e-12)


def test_factorization_rejects_zero_vector():
    with pytest.raises(ValueError):
        lozanovskii_factor(CoupleSpec(Lp(1), Lp(2), 0.5), np.zeros(2))


def test_numerical_derivation_of_flat_vector():
    # (ℓ1, ℓ2)_{1/2} = ℓ_{4/3} con derivación (2/3)·𝒦; en (1, 1) vale ½ log 2 por coordenada
    omega = numerical_derivation(CoupleSpec(Lp(1), Lp(2), 0.5), [1.0, 1.0])
    assert omega == pytest.approx([0.5 * math.log(2.0)] * 2, abs=DERIVATION_ABS_TOLERANCE)


def test_numerical_derivation_of_zero_vector():
    assert not numerical_derivation(CoupleSpec(Lp(1), Lp(2), 0.5), np.zeros(3)).any()


def test_closed_form_spaces():
    assert closed_form_space(CoupleSpec(Lp(1), Lp(INF), 0.5)) == Lp(2.0)
    w0, w1 = (1.0, 4.0), (4.0, 1.0)
    weighted = closed_form_space(CoupleSpec(WeightedLp(2, w0), WeightedLp(2, w1), 0.5))
    assert weighted == WeightedLp(2, (2.0, 2.0))
    convex = closed_form_space(CoupleSpec(Convexified(TsirelsonT(), 1.0), Convexified(TsirelsonT(), 2.0), 0.5))
    assert convex == Convexified(TsirelsonT(), 4.0 / 3.0)
    restricted = closed_form_space(restrict_couple(CoupleSpec(Lp(1), Lp(INF), 0.5), (1, 2)))
    assert restricted == Restricted(Lp(2.0), (1, 2))
    assert closed_form_space(CoupleSpec(Lorentz(2, 2), Lorentz(4, 4), 0.5)) is None


def test_amalgam_closed_form_interpolates_blockwise():
    partition = uniform_partition(2, 2)
    X0 = Amalgam(Lp(4.0), (Lp(4.0 / 3.0),) * 2, partition)
    X1 = Amalgam(Lp(4.0 / 3.0), (Lp(4.0),) * 2, partition)
    resolved = closed_form_space(CoupleSpec(X0, X1, 0.5))
    assert isinstance(resolved, Amalgam)
    assert resolved.partition == partition
    assert resolved.outer.p == pytest.approx(2.0)
    assert all(X.p == pytest.approx(2.0) for X in resolved.inner)


def test_interpolated_space_uses_closed_form_when_available():
    X = Interpolated(CoupleSpec(Lp(1), Lp(INF), 0.5))
    assert X.resolved == Lp(2.0)
    assert norm(X, [3.0, 4.0]) == pytest.approx(5.0)


def test_interpolated_space_falls_back_to_solver():
    X = Interpolated(CoupleSpec(Lorentz(2, 2), Lorentz(2, 2.5), 0.5))
    assert X.resolved is None
    x = [1.0, 0.5, 0.25]
    assert norm(X, x) == pytest.approx(calderon_norm(X.couple, x))
    assert norm(X, np.zeros(3)) == 0.0


def test_weighted_couple_interpolates_to_lp():
    f = np.array([0.5, -1.0, 2.0])
    couple = weighted_couple_for(f, 2.0, 0.3)
    resolved = closed_form_space(couple)
    assert isinstance(resolved, WeightedLp)
    assert np.allclose(resolved.weights_array, 1.0)


@seed(4)
@settings(max_examples=60, deadline=None)
@given(
    a=arrays(np.float64, (DIM,), elements=st.floats(min_value=MIN_ENTRY, max_value=MAX_ENTRY)),
    b=arrays(np.float64, (DIM,), elements=st.floats(min_value=MIN_ENTRY, max_value=MAX_ENTRY)),
    p0=st.sampled_from([1.0, 1.5, 2.0]),
    p1=st.sampled_from([2.0, 3.0, 4.0]),
    theta=st.floats(min_value=0.05, max_value=0.95),
)
def test_interpolation_inequality(a, b, p0, p1, theta):
    lhs, rhs = interpolation_inequality(a, b, p0, p1, theta)
    assert lhs <= rhs * (1.0 + 1e-9)


def test_interpolation_inequality_shape_mismatch():
    with pytest.raises(ShapeMismatchError):
        interpolation_inequality([1.0, 2.0], [1.0], 1.0, 2.0, 0.5)


def test_space_at_endpoints():
    base = CoupleSpec(Lp(1), Lp(INF), 0.5)
    assert space_at(base, 0.0) == Lp(1)
    assert space_at(base, 1.0) == Lp(INF)
    assert space_at(base, 0.5) == Lp(2.0)


def test_reiteration_on_lp_scale():
    base = CoupleSpec(Lp(1), Lp(INF), 0.5)
    result = reiteration_check(base, 0.25, 0.75, 0.5, dim=4, samples=6, seed=0)
    assert result.theta == pytest.approx(0.5)
    assert result.distance <= 0.1
    assert result.as_dict()["samples"] == 6


def test_reiteration_rejects_theta_outside_unit_interval():
    with pytest.raises(ValueError, match="theta0"):
        reiteration_check(CoupleSpec(Lp(1), Lp(2), 0.5), 1.5, 0.5, 0.5, dim=2, samples=1)


# ─── certificados del solver ───────────────────────────────────────────────────

BLOCK = dyadic_block(3)
BLOCK_VECTOR = np.array([0.0, 0.0, 0.0, 1.0, 0.9, 0.8, 0.7])


def _block_weak_hilbert_couple():
    X = Restricted(Tsirelson2(), BLOCK)
    return CoupleSpec(X, DualOf(X, budget=60, restarts=4), 0.5)


def test_duality_certificate_on_lp_couple():
    # (ℓ1, ℓ3)_{1/2} = ℓ_{3/2}
    couple = CoupleSpec(Lp(1), Lp(3), 0.5)
    x = np.array([3.0, -1.0, 0.5, 2.0])
    fac = lozanovskii_factor(couple, x)
    assert fac.certificate == "duality"
    assert fac.lower_bound <= norm(Lp(1.5), x) * (1.0 + 1e-9)
    assert fac.bound == pytest.approx(norm(Lp(1.5), x), rel=1e-5)


def test_flat_l1_linf_is_certified_by_duality():
    fac = lozanovskii_factor(CoupleSpec(Lp(1), Lp(INF), 0.5), [1.0, 1.0, 1.0, 1.0])
    assert fac.certificate == "duality"
    assert fac.bound == pytest.approx(2.0, rel=1e-6)


@pytest.mark.parametrize("x", [BLOCK_VECTOR, np.array([0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0])])
def test_tsirelson_block_and_its_dual_interpolate_to_l2(x):
    fac = lozanovskii_factor(_block_weak_hilbert_couple(), x)
    assert fac.certificate == "duality"
    assert fac.lower_bound <= norm(Lp(2), x) * (1.0 + 1e-9)
    assert fac.bound == pytest.approx(norm(Lp(2), x), rel=1e-5)


def test_quasi_normed_lorentz_and_its_dual_bracket_l2():
    # para un espacio cuasi-normado (X, X*)_{1/2} ≥ ℓ2; la norma dual por ascenso es cota inferior
    X = Lorentz(2, 4)
    Y = DualOf(X, budget=80, restarts=6)
    x = np.array([1.0, 0.6, 0.3])
    fac = lozanovskii_factor(CoupleSpec(X, Y, 0.5), x, eps=1e-3)
    assert fac.certificate == "stationarity"
    assert fac.lower_bound is None
    assert norm(Lp(2), x) * (1.0 - 2e-2) <= fac.bound
    assert fac.bound <= math.sqrt(norm(X, x) * norm(Y, x)) * (1.0 + 1e-9)


def test_uncertified_factorization_raises():
    with pytest.raises(SolverConvergenceError) as info:
        lozanovskii_factor(CoupleSpec(Lp(1), Lp(3), 0.5), [3.0, 1.0, 0.5], max_sweeps=1)
    assert info.value.sweeps == 1


@pytest.mark.parametrize("x", TEST_VECTORS[1:])
def test_calderon_norm_below_endpoint_product(x):
    couple = CoupleSpec(Lp(1.5), Lorentz(3, 3), 0.4)
    bound = norm(Lp(1.5), x) ** 0.6 * norm(Lorentz(3, 3), x) ** 0.4
    assert calderon_norm(couple, x) <= bound * (1.0 + 1e-12)


def test_problem_gradient_matches_finite_differences():
    problem = lozanovskii_objective(CoupleSpec(Lp(1.5), WeightedLp(2, (1.0, 2.0, 0.5)), 0.3), [1.0, -2.0, 0.5])
    assert isinstance(problem, LozanovskiiProblem)
    s = np.array([0.2, -0.1, 0.4])
    grad, mu0, mu1 = problem.gradient(s)
    assert mu0.sum() == pytest.approx(1.0)
    assert mu1.sum() == pytest.approx(1.0)
    h = 1e-6
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        assert grad[j] == pytest.approx((problem(s + e) - problem(s - e)) / (2.0 * h), abs=1e-6)


CONVEXITY_COUPLES = [
    (CoupleSpec(Lp(1.5), WeightedLp(2, (1.0, 3.0, 0.5, 2.0)), 0.4), np.array([1.0, 0.5, 2.0, 0.25])),
    (CoupleSpec(Lorentz(3, 2), Lp(4), 0.6), np.array([1.0, 0.5, 2.0, 0.25])),
    (CoupleSpec(Restricted(Tsirelson2(), BLOCK), Restricted(Lp(INF), BLOCK), 0.5), BLOCK_VECTOR),
]


@seed(5)
@settings(max_examples=40, deadline=None)
@given(
    case=st.sampled_from(range(len(CONVEXITY_COUPLES))),
    s=arrays(np.float64, (4,), elements=st.floats(min_value=-3.0, max_value=3.0)),
    t=arrays(np.float64, (4,), elements=st.floats(min_value=-3.0, max_value=3.0)),
)
def test_objective_is_midpoint_convex(case, s, t):
    couple, x = CONVEXITY_COUPLES[case]
    G = lozanovskii_objective(couple, x)
    assert G(0.5 * (s + t)) <= 0.5 * (G(s) + G(t)) + 1e-10


def test_numerical_derivation_is_homogeneous_for_negative_scalars():
    couple = CoupleSpec(Lp(1), Lp(2), 0.5)
    x = np.array([2.0, -1.0, 0.5])
    c = -2.5
    scaled = numerical_derivation(couple, c * x)
    assert scaled == pytest.approx(c * numerical_derivation(couple, x), abs=DERIVATION_ABS_TOLERANCE * abs(c))


@pytest.mark.parametrize("couple", [
    CoupleSpec(Lp(1), Lp(3), 0.5),
    CoupleSpec(Tsirelson2(), Lp(4), 0.5),
])
def test_restricted_couple_agrees_on_block_supported_vectors(couple):
    whole = calderon_norm(couple, BLOCK_VECTOR)
    fragment = calderon_norm(restrict_couple(couple, BLOCK), BLOCK_VECTOR)
    assert fragment == pytest.approx(whole, rel=SOLVER_REL_TOLERANCE)


def test_interpolated_space_exposes_closed_form_duality():
    X = Interpolated(CoupleSpec(Lp(1), Lp(INF), 0.5))
    a = np.array([3.0, 4.0])
    assert a @ X.norming(a) == pytest.approx(5.0)
    assert X.dual_bound(np.array([3.0, 4.0])) == pytest.approx(5.0)
    unresolved = Interpolated(CoupleSpec(Lorentz(2, 2), Lorentz(2, 2.5), 0.5))
    assert unresolved.norming(a) is None
    assert unresolved.dual_bound(a) is None
