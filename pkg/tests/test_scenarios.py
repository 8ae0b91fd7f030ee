import numpy as np
import pytest
from numpy.testing import assert_allclose

from heleshaw.errors import ConfigError
from heleshaw.maps import CircleGrid, PolynomialMap, winding_number
from heleshaw.moments import moments_residue
from heleshaw.scenarios import (
    ScenarioSpec,
    initial_map,
    make_example_abc,
    make_subcase1,
    make_subcase2,
    subcase1_branch_value,
    subcase2_from_omega,
    verify_scenario,
)

# exact subcase-1 constants for b = 2, M0 = 2:
# omega_1 = 2 - sqrt(3), c = 2, B_1 = 4 (1 - sqrt(3)/2)^2 = 7 - 4 sqrt(3)
B1_SUB1 = 7.0 - 4.0 * np.sqrt(3.0)
# exact subcase-2 constants for omega_1 = 0.6, M0 = 1:
# B_1 = 0.36 / sqrt(1.64), C = 1 / (0.6 sqrt(1.64))
B1_SUB2 = 0.36 / np.sqrt(1.64)
C_SUB2 = 1.0 / (0.6 * np.sqrt(1.64))


# ----------------------------------------------------------------------
# two-node family
# ----------------------------------------------------------------------

def test_example_abc_weights():
    m, data = make_example_abc(0.4, 2.0, 2.0)
    assert_allclose(data.weight_a, 0.8, rtol=1e-15)
    assert_allclose(data.weight_b, 304.0 / 225.0, rtol=1e-15)
    assert_allclose(data.image_b, -1.0 / 15.0, rtol=1e-13)


def test_example_abc_weights_match_residues():
    m, data = make_example_abc(0.4, 2.0, 2.0)
    integ = m.reflection() * m.derivative_rational()
    assert abs(integ.residue(0.0) - data.weight_a) < 1e-12
    assert abs(integ.residue(0.5) - data.weight_b) < 1e-12
    mv = moments_residue(m, 4)
    for k in range(5):
        want = data.weight_b * data.image_b**k
        if k == 0:
            want += data.weight_a
        assert abs(mv[k] - want) < 1e-10


def test_example_abc_equal_weights_is_subcase1():
    # a = 1/conj(b) makes the two weights collapse to |c|^2/|b|^2
    m, data = make_example_abc(0.5, 2.0, 2.0)
    assert_allclose(data.weight_a, 1.0, rtol=1e-13)
    assert_allclose(data.weight_b, 1.0, rtol=1e-13)
    assert abs(data.image_b) < 1e-15  # both nodes over the origin


def test_example_abc_complex_parameters_normalized():
    m, _ = make_example_abc(0.4 * np.exp(0.7j), 2.0 * np.exp(-0.3j), 1.5)
    fp0 = m.a * m.c / m.b
    assert abs(fp0.imag) < 1e-14
    assert fp0.real > 0


def test_example_abc_complex_parameters_weights_match_residues():
    # the closed-form weights keep their conjugation pattern straight for
    # genuinely complex a and b
    m, data = make_example_abc(0.4 * np.exp(0.7j), 2.0 * np.exp(-0.3j), 1.5)
    integ = m.reflection() * m.derivative_rational()
    assert abs(integ.residue(0.0) - data.weight_a) < 1e-12
    assert abs(integ.residue(complex(data.node_b)) - data.weight_b) < 1e-12
    mv = moments_residue(m, 3)
    for k in range(4):
        want = data.weight_b * data.image_b**k
        if k == 0:
            want += data.weight_a
        assert abs(mv[k] - want) < 1e-11


def test_example_abc_rejects_bad_parameters():
    with pytest.raises(ConfigError):
        make_example_abc(1.1, 2.0, 2.0)
    with pytest.raises(ConfigError):
        make_example_abc(0.4, 2.0, -1.0)


# ----------------------------------------------------------------------
# subcase 1
# ----------------------------------------------------------------------

def test_subcase1_forward_and_inverse():
    b, M0 = 2.0, 2.0
    B1 = subcase1_branch_value(b, M0)
    assert_allclose(B1, B1_SUB1, rtol=1e-14)
    m = make_subcase1(M0, B1)
    assert_allclose(m.b, 2.0, rtol=1e-10)
    assert_allclose(m.c, 2.0, rtol=1e-10)
    assert_allclose(m.a, 0.5, rtol=1e-10)


def test_subcase1_branch_point_roundtrip():
    m = make_subcase1(2.0, B1_SUB1)
    # omega_1 = b (1 - sqrt(1 - 1/|b|^2)) and f(omega_1) = B_1
    w = m.b * (1.0 - np.sqrt(1.0 - 1.0 / abs(m.b) ** 2))
    assert_allclose(complex(m.rational()(w)), B1_SUB1, rtol=1e-10)


def test_subcase1_rotated_branch_point():
    B1 = B1_SUB1 * np.exp(1.1j)
    m = make_subcase1(2.0, B1)
    w = m.b * (1.0 - np.sqrt(1.0 - 1.0 / abs(m.b) ** 2))
    assert_allclose(complex(m.rational()(w)), B1, rtol=1e-10)


def test_subcase1_admissibility():
    limit = np.sqrt(2.0 / 2.0)
    with pytest.raises(ConfigError):
        make_subcase1(2.0, limit * 1.01)
    with pytest.raises(ConfigError):
        make_subcase1(2.0, 0.0)
    with pytest.raises(ConfigError):
        make_subcase1(-1.0, 0.1)


def test_subcase1_double_covering_and_vanishing_moments():
    m = make_subcase1(2.0, B1_SUB1)
    grid = CircleGrid(1024)
    idx, res = winding_number(m.boundary_values(grid), 0.01)
    assert idx == 2 and res < 1e-6
    mv = moments_residue(m, 6)
    assert_allclose(mv[0], 2.0, rtol=1e-12)
    assert max(abs(mv[k]) for k in range(1, 7)) < 1e-10


def test_subcase1_image_independent_of_branch_point():
    # varying B1 at fixed M0 keeps f(bd D) the same circle of radius
    # sqrt(M0/2); only the covering structure moves
    grid = CircleGrid(512)
    radius = np.sqrt(2.0 / 2.0)
    for B1 in (B1_SUB1, B1_SUB1 * np.exp(2.0j), 0.5 * B1_SUB1):
        m = make_subcase1(2.0, B1)
        bd = np.abs(m.boundary_values(grid))
        assert np.max(np.abs(bd - radius)) < 1e-8


def test_subcase1_coordinate_completeness():
    # perturbing B1 at fixed M0 must change the map itself
    m0 = make_subcase1(2.0, B1_SUB1)
    m1 = make_subcase1(2.0, B1_SUB1 + 1e-3)
    d = max(abs(m0.a - m1.a), abs(m0.b - m1.b), abs(m0.c - m1.c))
    assert d > 1e-4


# ----------------------------------------------------------------------
# subcase 2
# ----------------------------------------------------------------------

def test_subcase2_closed_forms():
    m = subcase2_from_omega(0.6, 1.0)
    assert_allclose(m.numer_coeffs[0], C_SUB2 * (2 * 0.36 - 0.36**2), rtol=1e-14)
    assert_allclose(m.numer_coeffs[1], -C_SUB2 * 0.6, rtol=1e-14)
    assert_allclose(complex(m.rational()(0.6)), B1_SUB2, rtol=1e-13)


def test_subcase2_inversion_recovers_omega():
    m = make_subcase2(1.0, B1_SUB2)
    assert_allclose(np.conj(m.pole_reflections[0]), 0.6, rtol=1e-10)


def test_subcase2_inversion_complex_branch_point():
    w = 0.45 * np.exp(0.9j)
    M0 = 1.7
    m_direct = subcase2_from_omega(w, M0)
    B1 = complex(m_direct.rational()(w))
    m_inv = make_subcase2(M0, B1)
    assert_allclose(np.conj(m_inv.pole_reflections[0]), w, rtol=1e-10)


def test_subcase2_admissibility():
    with pytest.raises(ConfigError):
        make_subcase2(1.0, 1.0)  # |B1| = sqrt(M0)
    with pytest.raises(ConfigError):
        make_subcase2(1.0, 0.0)


def test_subcase2_derivative_zeros():
    m = subcase2_from_omega(0.6, 1.0)
    fp = m.derivative_rational()
    assert abs(complex(fp(0.6))) < 1e-13
    other = 2.0 / 0.6 - 0.6
    assert abs(complex(fp(other))) < 1e-12
    assert abs(other) > 1.0


# ----------------------------------------------------------------------
# verify_scenario
# ----------------------------------------------------------------------

def test_verify_disk():
    rep = verify_scenario(PolynomialMap((1.0,)), "disk")
    assert rep.all_passed


def test_verify_polynomial():
    rep = verify_scenario(PolynomialMap((1.0, 0.3)), "polynomial")
    assert rep.all_passed


def test_verify_example_abc_generic():
    m, _ = make_example_abc(0.4, 2.0, 2.0)
    rep = verify_scenario(m, "example_abc")
    assert rep.all_passed
    names = [c.name for c in rep]
    assert "geometric_progression" in names
    assert "higher_moments_vanish" not in names  # subcase checks skipped


def test_verify_subcase1():
    rep = verify_scenario(make_subcase1(2.0, B1_SUB1), "subcase1")
    assert rep.all_passed
    assert "double_covering" in [c.name for c in rep]


def test_verify_subcase2():
    rep = verify_scenario(make_subcase2(1.0, B1_SUB2), "subcase2")
    assert rep.all_passed


# ----------------------------------------------------------------------
# spec validation
# ----------------------------------------------------------------------

def test_spec_rejects_unknown_family():
    with pytest.raises(ConfigError):
        ScenarioSpec(family="torus")


def test_spec_rejects_missing_and_unknown_params():
    with pytest.raises(ConfigError):
        ScenarioSpec(family="subcase2", params={"M0": 1.0})
    with pytest.raises(ConfigError):
        ScenarioSpec(family="disk", params={"radius": 2.0})


def test_spec_rejects_inadmissible_subcase2():
    with pytest.raises(ConfigError):
        ScenarioSpec(family="subcase2", params={"M0": 1.0, "B1": 1.5})


def test_initial_map_modes():
    m, mode = initial_map(ScenarioSpec(family="disk"))
    assert mode == "polynomial" and m.a0 == 1.0
    m, mode = initial_map(
        ScenarioSpec(family="taylor", params={"coeffs": (1.0, 0.1)})
    )
    assert mode == "taylor" and m.order == 64


def test_scenario_maps_have_nonvanishing_derivative_on_circle():
    grid = CircleGrid(1024)
    for m in (
        PolynomialMap((1.0,)),
        PolynomialMap((1.0, 0.3)),
        make_example_abc(0.4, 2.0, 2.0)[0],
        make_subcase1(2.0, B1_SUB1),
        make_subcase2(1.0, B1_SUB2),
    ):
        fp = np.abs(m.derivative_rational()(grid.nodes))
        assert np.min(fp) > 1e-6
