import numpy as np
import pytest

from kicked_dirac.basis import build_basis
from kicked_dirac.quadrature import panels_for
from kicked_dirac.kick import (
    KickParams,
    build_kick_matrix_bessel,
    build_kick_matrix_quadrature,
    jacobi_anger_coeffs,
    load_kick_matrix,
    required_half_waves,
    save_kick_matrix,
    subunitarity_report,
    _cos_table,
    _assemble,
)

# max_l d_l over l <= 128 at eps=0.1, lambda=L, n_max=256 (frozen from the quadrature route)
DEFICIENCY_EPS01_N256 = 2.2913173708983825e-03


def test_identity_at_zero_strength(basis64):
    for build in (build_kick_matrix_bessel, build_kick_matrix_quadrature):
        op = build(basis64, KickParams(0.0, 1.0, 0.47))
        assert np.max(np.abs(op.V - np.eye(64))) < 1e-13


def test_series_without_shortcut_is_identity(basis64):
    # the general assembly path at eps = 0 (the builder short-circuits this case)
    G = _cos_table({0: 1.0 + 0j}, 64, 1.0, 1.0)
    V = _assemble(basis64, G, G)
    assert np.max(np.abs(V - np.eye(64))) < 1e-13


@pytest.mark.parametrize("eps", [0.1, 0.5, 1.0])
@pytest.mark.parametrize("lam", [1.0, 0.5, 0.37])
@pytest.mark.parametrize("phase", ["scalar", "mass_term"])
def test_bessel_matches_quadrature(basis64, eps, lam, phase):
    p = KickParams(eps, lam, 0.47, phase)
    a = build_kick_matrix_bessel(basis64, p).V
    b = build_kick_matrix_quadrature(basis64, p).V
    assert np.max(np.abs(a - b)) < 1e-10


def test_entries_bounded_and_symmetric(basis64):
    V = build_kick_matrix_bessel(basis64, KickParams(1.0, 1.0, 0.47)).V
    assert np.all(np.abs(V) <= 1 + 1e-14)
    assert np.max(np.abs(V - V.T)) < 1e-14


def test_small_strength_diagonal(basis64):
    for eps in (0.01, 0.05, 0.1):
        V = build_kick_matrix_bessel(basis64, KickParams(eps, 1.0, 0.47)).V
        assert np.all(np.abs(np.diag(V) - 1) <= eps)


def test_conjugation_symmetry(basis64):
    plus = build_kick_matrix_quadrature(basis64, KickParams(0.5, 1.0, 0.47)).V
    minus = build_kick_matrix_quadrature(basis64, KickParams(-0.5, 1.0, 0.47)).V
    assert np.max(np.abs(plus - np.conj(minus).T)) < 1e-12


def test_quadrature_panel_convergence(basis64):
    p = KickParams(1.0, 1.0, 0.47)
    panels = panels_for(required_half_waves(basis64, p), 16)
    coarse = build_kick_matrix_quadrature(basis64, p, panels=panels)
    fine = build_kick_matrix_quadrature(basis64, p, panels=2 * panels)
    assert np.max(np.abs(coarse.V - fine.V)) < 1e-12
    with pytest.raises(ValueError):
        build_kick_matrix_quadrature(basis64, p, panels=4)


def test_truncation_stability():
    p = KickParams(0.5, 1.0, 0.47)
    small = build_kick_matrix_bessel(build_basis(1.0, 64), p).V
    big = build_kick_matrix_bessel(build_basis(1.0, 128), p).V
    assert np.max(np.abs(small[:32, :32] - big[:32, :32])) < 1e-10


def test_series_tail_bound(basis64):
    tol = 1e-10
    b = jacobi_anger_coeffs(1.0, tol)
    M = max(b)
    extended = dict(b)
    from scipy.special import jv
    extended[M + 1] = 1j ** (M + 1) * jv(M + 1, 1.0)
    extended[-M - 1] = 1j ** (-M - 1) * (-1) ** (M + 1) * jv(M + 1, 1.0)
    Va = _assemble(basis64, *(2 * [_cos_table(b, 64, 1.0, 1.0)]))
    Vb = _assemble(basis64, *(2 * [_cos_table(extended, 64, 1.0, 1.0)]))
    assert np.max(np.abs(Va - Vb)) < 10 * tol


def test_deficiency_zero_strength(basis64):
    d = subunitarity_report(build_kick_matrix_bessel(basis64, KickParams(0.0, 1.0, 0.47)))
    assert np.max(np.abs(d)) < 1e-14


def test_deficiency_regression(basis256):
    d = subunitarity_report(build_kick_matrix_bessel(basis256, KickParams(0.1, 1.0, 0.47)))
    assert d.min() >= -1e-12
    assert d[:128].max() == pytest.approx(DEFICIENCY_EPS01_N256, rel=1e-9)
    assert d[:128].max() < 1e-2


def test_deficiency_grows_with_strength(basis64):
    ds = [subunitarity_report(build_kick_matrix_bessel(basis64, KickParams(e, 1.0, 0.47)))
          for e in (0.1, 0.5, 1.0)]
    for lo, hi in zip(ds, ds[1:]):
        assert np.all(hi[:32] >= lo[:32] - 1e-12)


def test_binary_roundtrip(tmp_path, basis64):
    V = build_kick_matrix_bessel(basis64, KickParams(0.3, 1.0, 0.47)).V
    path = tmp_path / "v.bin"
    save_kick_matrix(path, V)
    raw = path.read_bytes()
    assert raw[:8] == b"KICKMAT1"
    assert int.from_bytes(raw[8:12], "little") == 64
    assert len(raw) == 16 + 64 * 64 * 16
    assert np.array_equal(load_kick_matrix(path), V)


def test_binary_rejects_garbage(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"NOTAKICK" + bytes(8))
    with pytest.raises(ValueError):
        load_kick_matrix(path)


def test_parameter_validation(basis64):
    with pytest.raises(ValueError):
        KickParams(0.1, 0.0, 0.47)
    with pytest.raises(ValueError):
        KickParams(0.1, 1.0, -1.0)
    with pytest.raises(ValueError):
        KickParams(0.1, 1.0, 0.47, "vector")
    with pytest.raises(ValueError):
        build_kick_matrix_bessel(basis64, KickParams(0.1, 1.0, 0.47), tol=2.0)


def test_propagator_orders(basis64):
    op = build_kick_matrix_bessel(basis64, KickParams(0.2, 1.0, 0.47))
    D = np.diag(op.phase)
    assert np.allclose(op.propagator("phase_kick"), op.V @ D, atol=1e-15)
    assert np.allclose(op.propagator("kick_phase"), D @ op.V, atol=1e-15)
    with pytest.raises(ValueError):
        op.propagator("sideways")


@pytest.mark.parametrize("lam,exact", [(1.0, True), (0.5, True), (0.37, False)])
def test_parity_forbidden_entries(basis64, lam, exact):
    V = build_kick_matrix_bessel(basis64, KickParams(0.5, lam, 0.47)).V
    n = np.arange(1, 65)
    odd = (n[:, None] + n[None, :]) % 2 == 1
    if exact:
        assert np.all(V[odd] == 0)
    else:
        assert np.abs(V[odd]).max() > 1e-3
