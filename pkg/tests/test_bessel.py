import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import jv

from kicked_dirac.bessel import bessel_jn_miller, bessel_jn_series
from kicked_dirac.kick import jacobi_anger_coeffs


@pytest.mark.parametrize("x", [1e-3, 0.01, 0.1, 0.5, 1.0, 2.0, 7.5, 30.0])
def test_miller_matches_scipy(x):
    J = bessel_jn_miller(x, 40)
    assert np.max(np.abs(J - jv(np.arange(41), x))) < 1e-15


@pytest.mark.parametrize("x", [0.01, 0.3, 1.0, 2.0])
def test_miller_matches_power_series(x):
    J = bessel_jn_miller(x, 12)
    series = np.array([bessel_jn_series(n, x, terms=30) for n in range(13)])
    assert np.max(np.abs(J - series)) < 1e-15


def test_negative_argument_parity():
    J = bessel_jn_miller(-0.7, 10)
    assert np.allclose(J, (-1.0) ** np.arange(11) * bessel_jn_miller(0.7, 10), atol=0, rtol=1e-15)


def test_j0_of_one_power_series_oracle():
    # 40-term series (mpmath, 30 digits): 0.765197686557966551...
    assert abs(bessel_jn_series(0, 1.0, terms=25) - 0.7651976865579666) < 1e-15
    assert abs(jacobi_anger_coeffs(1.0)[0] - 0.7651976865579666) < 1e-15


def test_zero_strength_single_coefficient():
    assert jacobi_anger_coeffs(0.0, 1e-12) == {0: 1.0 + 0j}


def test_coefficient_structure():
    b = jacobi_anger_coeffs(1.0, 1e-14)
    M = max(b)
    assert sorted(b) == list(range(-M, M + 1))
    assert abs(jv(M + 1, 1.0)) < 1e-14 <= abs(jv(M, 1.0))
    for m in range(M + 1):
        assert b[m] == pytest.approx(1j**m * jv(m, 1.0), abs=1e-15)
        assert b[-m] == pytest.approx(1j ** (-m) * (-1) ** m * jv(m, 1.0), abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=1e-4, max_value=5.0))
def test_bessel_sum_rule(eps):
    tol = 1e-13
    b = jacobi_anger_coeffs(eps, tol)
    total = sum(abs(v) ** 2 for v in b.values())
    assert abs(total - 1.0) <= tol * max(b) + 1e-15


def test_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        jacobi_anger_coeffs(1.0, 0.0)
    with pytest.raises(ValueError):
        jacobi_anger_coeffs(1.0, 1.5)
