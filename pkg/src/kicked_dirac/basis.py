"""Positive-energy eigenbasis of the free Dirac particle in a box [0, L].

Only the (phi1, chi2) spinor components are nonzero. Mode n reads

    psi_n(x) = (i N_n sin(k_n x), 0, 0, N_n kappa_n cos(k_n x)),

with k_n = n pi / L, E_n = sqrt(k_n^2 + 1), kappa_n = k_n / (E_n + 1) and
N_n = sqrt((E_n + 1) / (E_n L)).
"""
from dataclasses import dataclass

import numpy as np

from .quadrature import composite_gauss_legendre, panels_for


def sinpi(t):
    """sin(pi t) with exact zeros at integer t."""
    t = np.asarray(t, dtype=float)
    r = t - 2.0 * np.round(0.5 * t)  # r in [-1, 1]
    r = np.where(r > 0.5, 1.0 - r, np.where(r < -0.5, -1.0 - r, r))
    return np.sin(np.pi * r)


def cospi(t):
    """cos(pi t) with exact zeros at half-integer t."""
    return sinpi(np.asarray(t, dtype=float) + 0.5)


@dataclass(frozen=True)
class SpinorSample:
    phi1: complex
    chi2: complex


@dataclass(frozen=True, eq=False)
class BoxBasis:
    L: float
    n_max: int
    k: np.ndarray
    E: np.ndarray
    norm: np.ndarray
    kappa: np.ndarray

    @property
    def modes(self):
        return np.arange(1, self.n_max + 1)

    def components(self, x):
        """Sampled (phi1, chi2) of every mode; arrays of shape (len(x), n_max)."""
        x = np.asarray(x, dtype=float)
        if np.any(x < 0) or np.any(x > self.L):
            raise ValueError("positions must lie in [0, L]")
        t = np.multiply.outer(x / self.L, self.modes.astype(float))
        phi1 = 1j * self.norm * sinpi(t)
        chi2 = (self.norm * self.kappa) * cospi(t)
        return phi1, chi2

    def quadrature(self, extra_half_waves=0.0, order=16):
        """Composite Gauss-Legendre nodes resolving products of two modes."""
        panels = panels_for(2 * self.n_max + extra_half_waves, order)
        return composite_gauss_legendre(0.0, self.L, panels, order)


def build_basis(L, n_max, check=True):
    if not L > 0:
        raise ValueError(f"box length must be positive, got {L}")
    if int(n_max) != n_max or n_max < 1:
        raise ValueError(f"n_max must be a positive integer, got {n_max}")
    n_max = int(n_max)
    n = np.arange(1, n_max + 1)
    k = n * np.pi / L
    E = np.sqrt(k * k + 1.0)
    kappa = k / (E + 1.0)
    norm = np.sqrt((E + 1.0) / (E * L))
    basis = BoxBasis(float(L), n_max, k, E, norm, kappa)
    if check:
        # closed-form normalization against quadrature, lowest and highest mode
        idx = sorted({1, n_max})
        x, w = composite_gauss_legendre(0.0, L, panels_for(2 * max(idx)), 16)
        for m in idx:
            phi1, chi2 = eval_eigenspinor_array(basis, m, x)
            total = np.sum(w * (np.abs(phi1) ** 2 + np.abs(chi2) ** 2))
            assert abs(total - 1.0) < 1e-10, (m, total)
    return basis


def eval_eigenspinor_array(basis, n, x):
    if not 1 <= n <= basis.n_max:
        raise IndexError(f"mode {n} outside 1..{basis.n_max}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(x > basis.L):
        raise ValueError("positions must lie in [0, L]")
    t = n * (x / basis.L)
    c = basis.norm[n - 1]
    return 1j * c * sinpi(t), c * basis.kappa[n - 1] * cospi(t)


def eval_eigenspinor(basis, n, x):
    """Nonzero components (phi1, chi2) of mode ``n`` at a single point."""
    phi1, chi2 = eval_eigenspinor_array(basis, n, float(x))
    return SpinorSample(complex(phi1), complex(chi2))


def mode_overlap(basis, n, m):
    """Quadrature value of the overlap integral of modes n and m."""
    for i in (n, m):
        if not 1 <= i <= basis.n_max:
            raise IndexError(f"mode {i} outside 1..{basis.n_max}")
    x, w = composite_gauss_legendre(0.0, basis.L, panels_for(n + m), 16)
    pn, cn = eval_eigenspinor_array(basis, n, x)
    pm, cm = eval_eigenspinor_array(basis, m, x)
    return complex(np.sum(w * (np.conj(pn) * pm + np.conj(cn) * cm)))


def overlap_matrix(basis, n_modes=None):
    n_modes = basis.n_max if n_modes is None else n_modes
    x, w = composite_gauss_legendre(0.0, basis.L, panels_for(2 * n_modes), 16)
    phi1, chi2 = basis.components(x)
    phi1, chi2 = phi1[:, :n_modes], chi2[:, :n_modes]
    return (np.conj(phi1).T * w) @ phi1 + (np.conj(chi2).T * w) @ chi2
