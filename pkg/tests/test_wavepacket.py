import math
import warnings

import numpy as np
import pytest

from kicked_dirac.basis import build_basis
from kicked_dirac.observables import density, reconstruct
from kicked_dirac.wavepacket import GaussianPacketSpec, packet_norm_constant, project_packet, spin_factor

# 1/(d sqrt(pi)) for d = 0.01, confirmed by mpmath quadrature over [0, 1]
RAW_NORM_D001 = 56.41895835477563

FIG9 = GaussianPacketSpec(d=0.01, x0=0.5, v0=0.0, s=(1, 0, 0, 0))


@pytest.fixture(scope="module")
def basis512():
    return build_basis(1.0, 512)


@pytest.fixture(scope="module")
def fig9_projection(basis512):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return project_packet(FIG9, basis512)


def test_spin_factor():
    assert spin_factor((1, 0, 0, 0)) == 1.0
    assert spin_factor((1, 1, 1, 1)) == 0.5


def test_raw_norm_regression():
    assert packet_norm_constant(FIG9, 1.0) == pytest.approx(RAW_NORM_D001, rel=1e-12)
    assert packet_norm_constant(FIG9, 1.0) == pytest.approx(1 / (0.01 * math.sqrt(math.pi)), rel=1e-12)


def test_orthogonal_spin_content_rejected(basis512):
    spec = GaussianPacketSpec(0.01, 0.5, 0.0, (0, 1, 1, 0))
    with pytest.raises(ValueError):
        project_packet(spec, basis512)


def test_invalid_specs(basis512):
    for spec in (GaussianPacketSpec(0.0, 0.5), GaussianPacketSpec(0.01, 1.5),
                 GaussianPacketSpec(0.01, 0.5, 0.0, (0, 0, 0, 0))):
        with pytest.raises(ValueError):
            project_packet(spec, basis512)


def test_warns_on_low_capture(basis512):
    with pytest.warns(UserWarning, match="captures"):
        project_packet(FIG9, basis512)


def test_even_modes_vanish(fig9_projection):
    state, report = fig9_projection
    assert np.max(np.abs(state.A[1::2])) < 1e-12
    assert abs(np.vdot(state.A, state.A) - 1) < 1e-13
    assert 0 < report.captured_fraction < 1


def test_initial_density_symmetric_single_peak(basis512, fig9_projection):
    state, _ = fig9_projection
    x = np.linspace(0, 1, 2001)
    rho = density(state, basis512, x)
    assert np.max(np.abs(rho - rho[::-1])) < 1e-10 * rho.max()
    assert x[np.argmax(rho)] == pytest.approx(0.5)


def test_projection_reconstruction(basis512, fig9_projection):
    state, _ = fig9_projection
    x = np.linspace(0, 1, 20001)
    w = np.full(x.size, x[1] - x[0])
    w[[0, -1]] *= 0.5
    phi1, chi2 = reconstruct(state.A, basis512, x)
    assert np.sum(w * (abs(phi1) ** 2 + abs(chi2) ** 2)) == pytest.approx(1.0, abs=1e-6)
    bphi, bchi = basis512.components(x)
    again = (np.conj(bphi).T * w) @ phi1 + (np.conj(bchi).T * w) @ chi2
    err = np.sqrt(np.sum(w * (abs(bphi @ (again - state.A)) ** 2 + abs(bchi @ (again - state.A)) ** 2)))
    assert err < 1e-6


def test_captured_fraction_grows_with_basis():
    fractions = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for n_max in (32, 64, 128, 256):
            fractions.append(project_packet(FIG9, build_basis(1.0, n_max))[1].captured_fraction)
    assert all(b >= a for a, b in zip(fractions, fractions[1:]))


def test_large_component_packet_projection_matches_direct_quadrature():
    b = build_basis(1.0, 40)
    spec = GaussianPacketSpec(0.05, 0.4, 12.0, (1, 0, 0, 1j))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        state, report = project_packet(spec, b)
    from scipy.integrate import quad
    f = lambda x: np.exp(-(x - 0.4) ** 2 / (2 * 0.05**2) + 12j * x) / (0.05 * math.sqrt(math.pi)) / math.sqrt(2)
    n = 5
    kn, Nn, kap = b.k[n - 1], b.norm[n - 1], b.kappa[n - 1]
    integrand = lambda x: np.conj(1j * Nn * np.sin(kn * x)) * f(x) + Nn * kap * np.cos(kn * x) * 1j * f(x)
    re = quad(lambda x: integrand(x).real, 0, 1, limit=200, epsabs=1e-13)[0]
    im = quad(lambda x: integrand(x).imag, 0, 1, limit=200, epsabs=1e-13)[0]
    raw_scale = math.sqrt(report.captured_fraction * report.raw_norm_sq)
    assert state.A[n - 1] * raw_scale == pytest.approx(re + 1j * im, abs=1e-10)
