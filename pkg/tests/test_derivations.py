import math

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ilab.derivations import (
    AmalgamPhi, Blockwise, DerivedVector, Fragmented, KaltonMapNumeric, KaltonPeck,
    LinearDiagonal, LorentzComposite, Numerical, Scaled, derived_norm, fragment_derivation,
    kalton_peck, lorentz_coefficients, lorentz_derivation, lorentz_kappa_source,
    lp_scale_coefficient, lp_scale_derivation, weighted_derivation,
)
from ilab.errors import ShapeMismatchError
from ilab.interpolate import CoupleSpec
from ilab.spaces import INF, Lorentz, Lp, dyadic_partition, norm, uniform_partition

DIM = 6
ABS_TOLERANCE = 1e-9
DERIVATION_ABS_TOLERANCE = 2e-2
MAX_ENTRY = 1e2

vectors = arrays(np.float64, (DIM,), elements=st.floats(min_value=-MAX_ENTRY, max_value=MAX_ENTRY))


def test_kalton_peck_on_flat_pair():
    assert kalton_peck([1.0, 1.0]) == pytest.approx([0.5 * math.log(2.0)] * 2)
    assert not kalton_peck(np.zeros(4)).any()


def test_kalton_peck_vanishes_on_basis_vectors():
    e = np.zeros(5)
    e[3] = -2.0
    assert kalton_peck(e) == pytest.approx(np.zeros(5), abs=ABS_TOLERANCE)


@seed(5)
@settings(max_examples=60, deadline=None)
@given(x=vectors, c=st.floats(min_value=-10.0, max_value=10.0))
def test_kalton_peck_is_homogeneous(x, c):
    lhs = kalton_peck(c * x)
    rhs = c * kalton_peck(x)
    scale = max(1.0, norm(Lp(2), c * x))
    assert np.allclose(lhs, rhs, atol=1e-9 * scale, rtol=1e-9)


def test_lp_scale_coefficient():
    assert lp_scale_coefficient(1.0, INF, 0.5) == pytest.approx(2.0)
    assert lp_scale_coefficient(1.0, 2.0, 0.5) == pytest.approx(2.0 / 3.0)
    assert lp_scale_coefficient(INF, INF, 0.5) == 0.0
    omega = lp_scale_derivation(1.0, INF, 0.5)
    assert omega == KaltonPeck(2.0, Lp(2.0))


def test_lp_scale_derivation_matches_solver():
    couple = CoupleSpec(Lp(1), Lp(2), 0.5)
    closed = lp_scale_derivation(1.0, 2.0, 0.5)
    numeric = Numerical(couple)
    for x in ([1.0, 1.0, 1.0], [2.0, -1.0, 0.5], [0.0, 3.0, 1.0]):
        assert numeric(x) == pytest.approx(closed(x), abs=DERIVATION_ABS_TOLERANCE)


def test_weighted_derivation_is_linear_diagonal():
    w0 = np.array([1.0, 2.0, 0.5])
    w1 = np.array([4.0, 2.0, 2.0])
    omega = weighted_derivation(w0, w1, 2.0)
    assert omega.diagonal == pytest.approx(-np.log(w1 / w0) / 2.0)
    x = np.array([1.0, -3.0, 2.0])
    assert omega(x) == pytest.approx(omega.diagonal * x)


def test_linear_diagonal_rejects_longer_support():
    omega = LinearDiagonal((1.0, 2.0))
    assert omega([1.0, 1.0, 0.0]) == pytest.approx([1.0, 2.0, 0.0])
    with pytest.raises(ShapeMismatchError):
        omega([1.0, 1.0, 1.0])


def test_scaled_keeps_diagonal_and_zero_coefficient():
    base = LinearDiagonal((1.0, -1.0))
    assert Scaled(base, 3.0).diagonal == pytest.approx([3.0, -3.0])
    assert Scaled(KaltonPeck(), 2.0).diagonal is None
    assert not Scaled(KaltonPeck(), 0.0)([1.0, 2.0]).any()


def test_fragment_derivation_of_block():
    # 𝒦 restringido a A = {1, 2} (base 1) sobre (1, 1, 5): ½ log 2 en el bloque, 0 fuera
    out = fragment_derivation(KaltonPeck(), (0, 1), [1.0, 1.0, 5.0])
    assert out == pytest.approx([0.5 * math.log(2.0), 0.5 * math.log(2.0), 0.0])
    assert not fragment_derivation(KaltonPeck(), (0, 1), [0.0, 0.0, 5.0]).any()


def test_fragmented_sums_block_derivations():
    partition = dyadic_partition(3)
    omega = Fragmented(KaltonPeck(), partition)
    x = np.arange(1.0, 8.0)
    expected = sum(fragment_derivation(KaltonPeck(), block, x) for block in partition)
    assert omega(x) == pytest.approx(expected)


def test_blockwise_requires_one_piece_per_block():
    partition = uniform_partition(2, 2)
    with pytest.raises(ShapeMismatchError):
        Blockwise((KaltonPeck(),), partition)
    omega = Blockwise((KaltonPeck(), LinearDiagonal((0.0, 0.0, 1.0, 1.0))), partition)
    x = np.array([1.0, 1.0, 2.0, 3.0])
    assert omega(x) == pytest.approx([0.5 * math.log(2.0), 0.5 * math.log(2.0), 2.0, 3.0])


def test_amalgam_phi_with_equal_outer_exponents_is_inner_derivation():
    partition = uniform_partition(2, 2)
    inner = (lp_scale_derivation(1.0, INF, 0.5),) * 2
    phi = AmalgamPhi(2.0, 2.0, 0.5, partition, inner, (Lp(2.0),) * 2)
    x = np.array([1.0, 1.0, 3.0, 0.0])
    # bloque 1: 2·𝒦(1, 1) = log 2; bloque 2: 𝒦 de un vector de soporte 1 es 0
    assert phi(x) == pytest.approx([math.log(2.0), math.log(2.0), 0.0, 0.0], abs=ABS_TOLERANCE)


def test_amalgam_phi_outer_term():
    partition = uniform_partition(2, 1)
    zero = LinearDiagonal((0.0,))
    phi = AmalgamPhi(1.0, INF, 0.5, partition, (zero, zero), (Lp(2.0),) * 2)
    x = np.array([1.0, 1.0])
    # p = 2, coeficiente p/p1 − p/p0 = −2, ‖a‖ = ‖(1, 1)‖_2 = √2
    assert phi(x) == pytest.approx([-2.0 * math.log(1.0 / math.sqrt(2.0))] * 2)


def test_amalgam_phi_shape_errors():
    partition = uniform_partition(2, 2)
    inner = (KaltonPeck(),)
    with pytest.raises(ShapeMismatchError):
        AmalgamPhi(2.0, 2.0, 0.5, partition, inner, (Lp(2.0),) * 2)([1.0, 1.0, 1.0, 1.0])
    phi = AmalgamPhi(2.0, 2.0, 0.5, partition, (KaltonPeck(),) * 2, (Lp(2.0),) * 2)
    with pytest.raises(ShapeMismatchError):
        phi([1.0, 1.0, 1.0, 1.0, 1.0])


def test_lorentz_coefficients():
    # p_i = q_i: κ desaparece y queda el coeficiente de la escala ℓp
    k_coeff, kappa_coeff = lorentz_coefficients(2.0, 2.0, 4.0, 4.0, 0.5)
    assert k_coeff == pytest.approx(lp_scale_coefficient(2.0, 4.0, 0.5))
    assert kappa_coeff == pytest.approx(0.0, abs=1e-15)
    # q fijo: sólo κ con coeficiente −(1/p0 − 1/p1)
    k_coeff, kappa_coeff = lorentz_coefficients(2.0, 3.0, 4.0, 3.0, 0.5)
    assert k_coeff == 0.0
    assert kappa_coeff == pytest.approx(-0.25)


def test_lorentz_derivation_requires_kappa_when_needed():
    with pytest.raises(ValueError, match="kappa_source"):
        lorentz_derivation([1.0, 2.0], 2.0, 3.0, 4.0, 3.0, 0.5)
    omega = LorentzComposite(2.0, 2.0, 4.0, 4.0, 0.5)
    x = np.array([1.0, 1.0])
    assert omega(x) == pytest.approx(kalton_peck(x, Lorentz(8.0 / 3.0, 8.0 / 3.0), 2.0 / 3.0))


def test_kappa_source_on_first_basis_vector():
    kappa = lorentz_kappa_source(2.0, 4.0, 3.0, 3.0, 0.5)
    assert isinstance(kappa, KaltonMapNumeric)
    predicted = math.log(2.0 / 4.0) / (1.0 / 4.0 - 1.0 / 2.0)
    assert kappa([1.0, 0.0])[0] == pytest.approx(predicted, abs=1e-3)
    with pytest.raises(ValueError):
        lorentz_kappa_source(2.0, 2.0, 3.0, 3.0, 0.5)


def test_derived_vector_shapes():
    with pytest.raises(ShapeMismatchError):
        DerivedVector(np.zeros(2), np.zeros(3))
    v = DerivedVector([1.0, 2.0], [0.5, 0.5]) + DerivedVector([1.0, 0.0], [0.5, 0.5])
    assert v.y == pytest.approx([2.0, 2.0])
    assert v.scaled(2.0).z == pytest.approx([2.0, 2.0])


def test_derived_norm_of_graph_vector():
    omega = KaltonPeck()
    z = np.array([1.0, 1.0, 0.0])
    v = DerivedVector(omega(z), z)
    assert derived_norm(omega, v, Lp(2)) == pytest.approx(math.sqrt(2.0))
    w = DerivedVector([1.0, 0.0, 0.0], np.zeros(3))
    assert derived_norm(omega, w, Lp(2)) == pytest.approx(1.0)
