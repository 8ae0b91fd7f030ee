import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose

from heleshaw.errors import UncancelledPoleError
from heleshaw.maps import AbcRationalMap, PolynomialMap
from heleshaw.moments import (
    MomentVector,
    QuadratureData,
    coeffs_to_moments,
    default_moment_count,
    moments_area_oracle,
    moments_residue,
    moments_richardson,
    moments_to_coeffs,
    quadrature_check,
    quadrature_coeffs,
    richardson_moment,
)
from heleshaw.scenarios import make_example_abc, make_subcase1, subcase2_from_omega

CARDIOID = PolynomialMap((1.0, 0.3))
ABC = AbcRationalMap(0.4, 2.0, 2.0)

# two-node weights for a=0.4, b=2, c=2, computed exactly:
# A = |c|^2 a/b = 4/5;  B = |c|^2 (a-b)(1 - 2b^2 + a b^3)/(b (1-b^2)^2) = 304/225
A_ABC = 0.8
B_ABC = 304.0 / 225.0
NODE_ABC = -1.0 / 15.0  # f(1/conj b) = f(1/2)


def literal_richardson(a, abar, k):
    """The multi-index sum, summed literally over (k+1)-tuples."""
    n = len(a) - 1
    tot = 0.0 + 0.0j
    for js in itertools.product(range(n + 1), repeat=k + 1):
        idx = sum(js) + k
        if idx > n:
            continue
        term = (js[0] + 1) * np.prod([a[j] for j in js]) * abar[idx]
        tot += term
    return tot


# ----------------------------------------------------------------------
# Richardson's sum
# ----------------------------------------------------------------------

def test_richardson_scaled_disk():
    mv = moments_richardson(PolynomialMap((0.8,)), 4)
    assert_allclose(mv[0], 0.64, rtol=1e-15)
    for k in range(1, 5):
        assert mv[k] == 0.0


def test_richardson_cardioid():
    mv = moments_richardson(CARDIOID, 4)
    assert_allclose(mv[0], 1.18, rtol=1e-15)
    assert_allclose(mv[1], 0.3, rtol=1e-15)
    for k in range(2, 5):
        assert_allclose(mv[k], 0.0, atol=1e-16)


def test_richardson_matches_literal_sum():
    rng = np.random.default_rng(5)
    for n in (1, 2, 3):
        a = np.concatenate([[1.0], 0.5 * (rng.standard_normal(n) + 1j * rng.standard_normal(n))])
        abar = np.conj(a)
        for k in range(0, 4):
            assert_allclose(
                richardson_moment(a, abar, k),
                literal_richardson(a, abar, k),
                rtol=1e-13,
                atol=1e-15,
            )


def test_richardson_independent_conjugates():
    # degree 1 with a and abar treated as unrelated symbols: M_1 = a0^2 abar_1
    a = np.array([1.3, 0.4 + 0.2j])
    abar = np.array([2.0, 0.5 - 0.3j])
    assert_allclose(richardson_moment(a, abar, 1), a[0] ** 2 * abar[1], rtol=1e-15)


def test_richardson_vanishes_beyond_support():
    mv = moments_richardson(CARDIOID, 8)
    for k in range(2, 9):
        assert mv[k] == 0.0


def test_moment_vector_conjugate_view():
    mv = MomentVector(1.0, (0.5 + 0.25j,))
    assert mv[-1] == np.conj(mv[1])
    with pytest.raises(IndexError):
        mv[2]
    with pytest.raises(ValueError):
        MomentVector.from_values([1.0 + 0.5j])


# ----------------------------------------------------------------------
# residue route
# ----------------------------------------------------------------------

def test_residue_moments_two_node_family():
    mv = moments_residue(ABC, 4)
    assert_allclose(mv[0], A_ABC + B_ABC, rtol=1e-12)
    assert_allclose(mv[1], B_ABC * NODE_ABC, rtol=1e-12)
    assert_allclose(mv[2], B_ABC * NODE_ABC**2, rtol=1e-12)


def test_residue_moments_geometric_progression():
    mv = moments_residue(ABC, 6)
    for k in range(2, 6):
        lhs = mv[k + 1] * mv[k - 1]
        assert abs(lhs - mv[k] ** 2) < 1e-10 * abs(mv[k] ** 2)


def test_subcase1_moments_vanish():
    m = make_subcase1(2.0, 7.0 - 4.0 * np.sqrt(3.0))
    mv = moments_residue(m, 6)
    assert_allclose(mv[0], 2.0, rtol=1e-12)
    for k in range(1, 7):
        assert abs(mv[k]) < 1e-10


def test_residue_agrees_with_richardson_on_polynomials():
    mv_r = moments_richardson(CARDIOID, 4).as_array()
    mv_s = moments_residue(CARDIOID, 4).as_array()
    assert np.max(np.abs(mv_r - mv_s)) < 1e-12


# ----------------------------------------------------------------------
# area oracle
# ----------------------------------------------------------------------

def test_area_oracle_unit_disk():
    mv, err = moments_area_oracle(PolynomialMap((1.0,)), 2)
    assert abs(mv[0] - 1.0) < 1e-8
    assert err < 1e-10


def test_area_oracle_matches_richardson():
    mv, _ = moments_area_oracle(CARDIOID, 3)
    ref = moments_richardson(CARDIOID, 3)
    assert np.max(np.abs(mv.as_array() - ref.as_array())) < 1e-6


def test_area_oracle_subcase2_roundtrip():
    m = subcase2_from_omega(0.6, 1.0)
    mv, _ = moments_area_oracle(m, 2)
    assert abs(mv[0] - 1.0) < 1e-6


def test_three_way_agreement_random_polynomials():
    # degree <= 6, coefficient components in [-1, 1]; maps with f' nearly
    # vanishing on the circle are excluded by the boundary-form precondition
    rng = np.random.default_rng(17)
    done = 0
    while done < 8:
        n = int(rng.integers(1, 7))
        coeffs = rng.uniform(-1, 1, n + 1) + 1j * rng.uniform(-1, 1, n + 1)
        coeffs[0] = rng.uniform(0.3, 1.0)
        if coeffs[-1] == 0:
            continue
        m = PolynomialMap(tuple(coeffs))
        fp = m.derivative_rational()
        th = np.exp(1j * np.linspace(0, 2 * np.pi, 256, endpoint=False))
        if np.min(np.abs(fp(th))) < 1e-2:
            continue
        K = default_moment_count(m)
        rich = moments_richardson(m, K).as_array()
        res = moments_residue(m, K).as_array()
        area, _ = moments_area_oracle(m, K)
        assert np.max(np.abs(rich - res)) < 1e-10 * max(1.0, np.max(np.abs(rich)))
        assert np.max(np.abs(rich - area.as_array())) < 1e-6
        done += 1


# ----------------------------------------------------------------------
# quadrature coefficients and the c <-> M correspondence
# ----------------------------------------------------------------------

def test_quadrature_coeffs_scaled_disk():
    data = quadrature_coeffs(PolynomialMap((0.7,)))
    assert data.n == 0
    assert_allclose(data.c[0], 0.49, rtol=1e-15)


def test_quadrature_coeffs_subcase2_weight():
    m = subcase2_from_omega(0.6, 1.0)
    data = quadrature_coeffs(m)
    assert data.n == 0
    C = abs(m.numer_coeffs[1]) / 0.6  # |a_1| = C |omega|
    want = C**2 * 0.6**2 * (2 - 0.6**2)
    assert_allclose(data.c[0], want, rtol=1e-12)
    assert_allclose(data.c[0], 1.0, rtol=1e-12)  # equals M0 by construction


def test_quadrature_coeffs_cardioid_consistent_with_moments():
    data = quadrature_coeffs(CARDIOID)
    mv = coeffs_to_moments(data, CARDIOID)
    ref = moments_richardson(CARDIOID, data.n)
    assert np.max(np.abs(mv.as_array() - ref.as_array())) < 1e-13


def test_quadrature_coeffs_rejects_two_node_map():
    with pytest.raises(UncancelledPoleError):
        quadrature_coeffs(ABC)


def test_conversion_n0():
    data = QuadratureData(c=(0.49,))
    mv = coeffs_to_moments(data, PolynomialMap((0.7,)))
    assert_allclose(mv[0], 0.49)


def test_conversion_roundtrip_random_degree3():
    rng = np.random.default_rng(23)
    for _ in range(10):
        coeffs = np.concatenate(
            [[rng.uniform(0.5, 1.2)],
             0.25 * (rng.standard_normal(3) + 1j * rng.standard_normal(3))]
        )
        m = PolynomialMap(tuple(coeffs))
        data = quadrature_coeffs(m)
        mv = coeffs_to_moments(data, m)
        back = moments_to_coeffs(mv, m)
        assert_allclose(back.c, data.c, rtol=1e-12, atol=1e-14)


def test_conversion_degree1_diagonal():
    m = PolynomialMap((0.9, 0.2 + 0.1j))
    data = quadrature_coeffs(m)
    mv = coeffs_to_moments(data, m)
    # M_1 = c_0 * 0 + c_1 * f'(0) = c_1 a_0, and matches Richardson
    assert_allclose(mv[1], data.c[1] * 0.9, rtol=1e-13)
    ref = moments_richardson(m, 1)
    assert_allclose(mv[1], ref[1], rtol=1e-13)


# ----------------------------------------------------------------------
# quadrature identity residuals
# ----------------------------------------------------------------------

def test_quadrature_check_subcase2():
    m = subcase2_from_omega(0.6, 1.0)
    data = quadrature_coeffs(m)
    res = quadrature_check(m, data, [[1.0]])
    assert res[0] < 1e-6


def test_quadrature_check_two_point():
    _, data = make_example_abc(0.4, 2.0, 2.0)
    res = quadrature_check(ABC, data, [[1.0], [0.0, 1.0], [0.0, 0.0, 1.0]])
    assert max(res) < 1e-6


def test_quadrature_check_odd_symmetry():
    m = PolynomialMap((1.0,))
    data = quadrature_coeffs(m)
    res = quadrature_check(m, data, [[0.0, 0.0, 1.0]])
    assert res[0] < 1e-12


def test_residue_moments_reject_boundary_singularity():
    # a pole reflection within 1e-9 of the unit circle invalidates the
    # boundary form
    from heleshaw.errors import HeleShawError

    m = AbcRationalMap(0.4, 1.0 + 1e-10, 2.0)
    with pytest.raises(HeleShawError):
        moments_residue(m, 2)


def test_area_oracle_convergence_target():
    from heleshaw.errors import QuadratureError

    with pytest.raises(QuadratureError):
        moments_area_oracle(CARDIOID, 2, target=1e-30)


def test_default_moment_count():
    assert default_moment_count(CARDIOID) == 2
    assert default_moment_count(PolynomialMap((1.0, 0.1, 0.1, 0.1, 0.05))) == 4
    assert default_moment_count(ABC) == 4
    assert default_moment_count(subcase2_from_omega(0.6, 1.0)) == 4
