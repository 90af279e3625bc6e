"""Expectation values and densities from expansion coefficients."""
from dataclasses import dataclass, field

import numpy as np


@dataclass
class ObservableSeries:
    kicks: np.ndarray
    times: np.ndarray
    energy: np.ndarray
    energy_total: np.ndarray
    velocity: np.ndarray
    norm: np.ndarray
    density_frames: list = field(default_factory=list)
    final_state: object = None

    def __len__(self):
        return len(self.times)


def kinetic_matrix(basis):
    """Diagonal of <psi_n| -i alpha_x d/dx |psi_n>; the operator is diagonal."""
    return basis.E - 1.0 / basis.E


def mass_diagonal(basis):
    """Diagonal of <psi_n| beta |psi_n> = 1 / E_n."""
    return 1.0 / basis.E


def _sin_cos_integral(a, b, L):
    """Integral over [0, L] of sin(a pi x/L) cos(b pi x/L) for positive integers a, b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    odd = (a + b) % 2 == 1
    denom = np.where(odd, a * a - b * b, 1.0)
    return np.where(odd, (L / np.pi) * 2.0 * a / denom, 0.0)


def velocity_matrix(basis):
    """M[n, m] = integral of psi_n^dagger alpha_x psi_m.

    Purely imaginary and hermitian; zero whenever n + m is even.
    """
    n = basis.modes
    a, b = n[:, None], n[None, :]
    s_nm = _sin_cos_integral(a, b, basis.L)  # int sin_n cos_m
    s_mn = s_nm.T  # int sin_m cos_n
    c = np.outer(basis.norm, basis.norm)
    # conj(phi1_n) chi2_m + conj(chi2_n) phi1_m
    return 1j * c * (basis.kappa[None, :] * (-s_nm) + basis.kappa[:, None] * s_mn)


def norm(state):
    A = state.A if hasattr(state, "A") else state
    return float(np.vdot(A, A).real)


def kinetic_energy(state, basis):
    A = state.A if hasattr(state, "A") else state
    return float(np.dot(np.abs(A) ** 2, kinetic_matrix(basis)))


def total_energy(state, basis):
    A = state.A if hasattr(state, "A") else state
    return float(np.dot(np.abs(A) ** 2, basis.E))


def velocity(state, basis, matrix=None):
    """Real part of A^dagger M A with M the velocity matrix."""
    A = state.A if hasattr(state, "A") else state
    M = velocity_matrix(basis) if matrix is None else matrix
    return float(np.vdot(A, M @ A).real)


def reconstruct(A, basis, grid):
    phi1, chi2 = basis.components(grid)
    return phi1 @ A, chi2 @ A


def density(state, basis, grid):
    A = state.A if hasattr(state, "A") else state
    phi1, chi2 = reconstruct(A, basis, grid)
    return np.abs(phi1) ** 2 + np.abs(chi2) ** 2


def current(state, basis, grid):
    """Probability current 2 Re(conj(phi1) chi2)."""
    A = state.A if hasattr(state, "A") else state
    phi1, chi2 = reconstruct(A, basis, grid)
    return 2.0 * np.real(np.conj(phi1) * chi2)
