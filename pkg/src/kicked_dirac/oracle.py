"""Real-space reference integrator used to cross-check the spectral map.

The free Dirac Hamiltonian acts on (phi1, chi2) sampled on a uniform grid:

    H (phi1, chi2) = (-i chi2' + phi1, -i phi1' - chi2).

phi1 is pinned to zero at the walls. The derivative of chi2 is a central
difference at interior nodes; the derivative of phi1 is its adjoint with
respect to trapezoid weights, so H is self-adjoint in the trapezoid inner
product and implicit-midpoint (Cayley) steps preserve the discrete norm.
"""
import csv
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .kick import ORDERS

MIN_POINTS_PER_MODE = 8


@dataclass
class GridState:
    x: np.ndarray
    phi1: np.ndarray
    chi2: np.ndarray

    @property
    def h(self):
        return self.x[1] - self.x[0]

    @property
    def weights(self):
        w = np.full(self.x.size, self.h)
        w[0] = w[-1] = 0.5 * self.h
        return w

    def norm(self):
        return float(np.sum(self.weights * (np.abs(self.phi1) ** 2 + np.abs(self.chi2) ** 2)))

    def copy(self):
        return GridState(self.x, self.phi1.copy(), self.chi2.copy())


def make_grid(L, n_grid):
    if n_grid < 3:
        raise ValueError("grid needs at least 3 points")
    return np.linspace(0.0, L, n_grid)


def from_coefficients(A, basis, n_grid):
    x = make_grid(basis.L, n_grid)
    phi1, chi2 = basis.components(x)
    gs = GridState(x, phi1 @ A, chi2 @ A)
    gs.phi1[0] = gs.phi1[-1] = 0.0
    return gs


def project(gs, basis):
    """Trapezoid overlaps of the grid state with every basis mode."""
    phi1, chi2 = basis.components(gs.x)
    w = gs.weights
    return (np.conj(phi1).T * w) @ gs.phi1 + (np.conj(chi2).T * w) @ gs.chi2


@lru_cache(maxsize=8)
def _cayley_factors(n_grid, L, dt):
    N = n_grid - 1
    h = L / N
    n_phi, n_chi = N - 1, N + 1
    # B: chi -> phi rows (interior nodes 1..N-1), -i (chi[i+1] - chi[i-1]) / 2h
    rows = np.arange(n_phi)
    B = sp.coo_matrix(
        (np.concatenate([np.full(n_phi, -1j / (2 * h)), np.full(n_phi, 1j / (2 * h))]),
         (np.concatenate([rows, rows]), np.concatenate([rows + 2, rows]))),
        shape=(n_phi, n_chi),
    ).tocsr()
    w_chi = np.full(n_chi, h)
    w_chi[0] = w_chi[-1] = 0.5 * h
    # adjoint in the weighted inner product
    C = sp.diags(1.0 / w_chi) @ B.conj().T @ sp.diags(np.full(n_phi, h))
    H = sp.bmat([[sp.identity(n_phi), B], [C, -sp.identity(n_chi)]], format="csc")
    eye = sp.identity(n_phi + n_chi, format="csc")
    lhs = splu((eye + 0.5j * dt * H).tocsc())
    rhs = (eye - 0.5j * dt * H).tocsr()
    return lhs, rhs


def free_flight(gs, T, n_substeps, n_modes=None):
    """Advance by time T with ``n_substeps`` implicit-midpoint steps."""
    if n_substeps < 1:
        raise ValueError("n_substeps must be at least 1")
    n_grid = gs.x.size
    if n_modes is not None and n_grid < MIN_POINTS_PER_MODE * n_modes:
        raise ValueError(f"grid of {n_grid} points too coarse for {n_modes} modes")
    if T == 0:
        return gs.copy()
    L = float(gs.x[-1] - gs.x[0])
    lhs, rhs = _cayley_factors(n_grid, L, T / n_substeps)
    u = np.concatenate([gs.phi1[1:-1], gs.chi2])
    for _ in range(n_substeps):
        u = lhs.solve(rhs @ u)
    phi1 = np.zeros(n_grid, dtype=complex)
    phi1[1:-1] = u[: n_grid - 2]
    return GridState(gs.x, phi1, u[n_grid - 2:].copy())


def kick_pointwise(gs, epsilon, lam, phase_mode="scalar"):
    g = np.exp(1j * epsilon * np.cos(2.0 * np.pi * gs.x / lam))
    if phase_mode == "scalar":
        return GridState(gs.x, gs.phi1 * g, gs.chi2 * g)
    if phase_mode == "mass_term":
        return GridState(gs.x, gs.phi1 * g, gs.chi2 * np.conj(g))
    raise ValueError(f"unknown phase mode {phase_mode!r}")


@dataclass
class OracleRun:
    kicks: list
    states: list
    outside: list  # norm removed by each projection


def run_grid(A0, basis, params, n_kicks, n_grid, substeps, order="phase_kick", project_each_kick=True):
    """Grid evolution over ``n_kicks`` periods from spectral coefficients ``A0``.

    With ``project_each_kick`` the state is projected onto the positive-energy
    span after every kick, reproducing the truncated model being checked.
    """
    if order not in ORDERS:
        raise ValueError(f"order must be one of {ORDERS}")
    if n_grid < MIN_POINTS_PER_MODE * basis.n_max:
        raise ValueError(f"grid of {n_grid} points too coarse for {basis.n_max} modes")
    phi_b, chi_b = basis.components(make_grid(basis.L, n_grid))
    gs = from_coefficients(A0, basis, n_grid)
    run = OracleRun([0], [gs], [0.0])

    def kick(state):
        state = kick_pointwise(state, params.epsilon, params.lam, params.kick_phase)
        if not project_each_kick:
            return state, 0.0
        before = state.norm()
        A = (np.conj(phi_b).T * state.weights) @ state.phi1 + (np.conj(chi_b).T * state.weights) @ state.chi2
        out = GridState(state.x, phi_b @ A, chi_b @ A)
        out.phi1[0] = out.phi1[-1] = 0.0
        return out, before - out.norm()

    for k in range(1, n_kicks + 1):
        if order == "phase_kick":
            gs = free_flight(gs, params.T, substeps)
            gs, lost = kick(gs)
        else:
            gs, lost = kick(gs)
            gs = free_flight(gs, params.T, substeps)
        run.kicks.append(k)
        run.states.append(gs)
        run.outside.append(lost)
    return run


@dataclass
class DiscrepancyRow:
    time: float
    l2_distance: float
    grid_norm: float
    spectral_norm: float
    grid_outside: float


def compare_trajectories(spectral, grid_run, basis, T):
    """L2 distance between grid states and basis-reconstructed spectral states.

    ``spectral`` maps kick index -> coefficient array. ``grid_outside`` is the
    grid state's weight outside the positive-energy span, measured by
    trapezoid overlaps.
    """
    if sorted(spectral) != sorted(grid_run.kicks):
        raise ValueError("spectral and grid schedules differ")
    rows = []
    for k, gs in zip(grid_run.kicks, grid_run.states):
        A = np.asarray(spectral[k])
        phi1, chi2 = basis.components(gs.x)
        dphi = gs.phi1 - phi1 @ A
        dchi = gs.chi2 - chi2 @ A
        w = gs.weights
        dist = np.sqrt(np.sum(w * (np.abs(dphi) ** 2 + np.abs(dchi) ** 2)))
        g_norm = gs.norm()
        inside = project(gs, basis)
        rows.append(DiscrepancyRow(k * T, float(dist), g_norm, float(np.vdot(A, A).real),
                                   g_norm - float(np.vdot(inside, inside).real)))
    return rows


def write_discrepancy_csv(path, rows):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["time", "l2_distance", "grid_norm", "spectral_norm"])
        for r in rows:
            wr.writerow([format(v, ".17g") for v in (r.time, r.l2_distance, r.grid_norm, r.spectral_norm)])
