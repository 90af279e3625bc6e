"""Iteration of the one-period Floquet map on expansion coefficients."""
from dataclasses import dataclass, field

import numpy as np

from . import observables as obs


class LeakageFloorError(RuntimeError):
    """Norm dropped below the configured floor: truncation is not trustworthy."""

    def __init__(self, kick, norm, floor):
        super().__init__(
            f"norm {norm:.6g} fell below floor {floor:g} after kick {kick}; "
            "the positive-energy truncation leaks too much for these parameters "
            "(enable renormalize or shorten the run)"
        )
        self.kick = kick
        self.norm = norm
        self.floor = floor


@dataclass
class SpinorState:
    A: np.ndarray
    kicks_elapsed: int = 0
    leakage_log: list = field(default_factory=list)
    renormalize: bool = False

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=complex)
        if self.kicks_elapsed < 0:
            raise ValueError("kicks_elapsed must be non-negative")

    @classmethod
    def from_mode(cls, n_max, mode=1, renormalize=False):
        if not 1 <= mode <= n_max:
            raise ValueError(f"initial mode {mode} outside 1..{n_max}")
        A = np.zeros(n_max, dtype=complex)
        A[mode - 1] = 1.0
        return cls(A, renormalize=renormalize)

    @classmethod
    def from_coefficients(cls, A, renormalize=False):
        A = np.asarray(A, dtype=complex)
        nrm = np.sqrt(np.vdot(A, A).real)
        if nrm == 0:
            raise ValueError("coefficient vector is zero")
        return cls(A / nrm, renormalize=renormalize)


def _check(state, op):
    if state.A.shape != (op.n_max,):
        raise ValueError(f"state has {state.A.size} modes, kick operator has {op.n_max}")


def _advance(state, U, log=None):
    before = np.vdot(state.A, state.A).real
    A = U @ state.A
    after = np.vdot(A, A).real
    # evolve() passes one shared list to avoid quadratic copying
    log = list(state.leakage_log) if log is None else log
    log.append(before - after)
    if state.renormalize:
        A = A / np.sqrt(after)
    return SpinorState(A, state.kicks_elapsed + 1, log, state.renormalize)


def step(state, op, order="phase_kick"):
    """One period: A'_n = sum_l V[n, l] exp(-i E_l T) A_l (default order)."""
    _check(state, op)
    return _advance(state, op.propagator(order))


def evolve(state0, op, n_kicks, basis, stride=1, observers=(), order="phase_kick",
           norm_floor=0.5, density_grid=None, density_kicks=()):
    """Apply ``n_kicks`` periods, recording observables every ``stride`` kicks.

    ``observers`` are extra callables ``f(state)`` invoked at each record.
    Raises LeakageFloorError when the unrenormalized norm drops below
    ``norm_floor``.
    """
    if n_kicks < 0:
        raise ValueError("n_kicks must be non-negative")
    if stride < 1:
        raise ValueError("stride must be at least 1")
    _check(state0, op)
    U = op.propagator(order)
    T = op.params.T
    Tkin = obs.kinetic_matrix(basis)
    # velocity matrix is i * S with S real antisymmetric: <v> = -2 Re(A) . S Im(A)
    S = np.ascontiguousarray(obs.velocity_matrix(basis).imag)
    density_kicks = set(density_kicks)
    rec = {"kicks": [], "energy": [], "energy_total": [], "velocity": [], "norm": []}
    frames = []

    def record(state):
        k = state.kicks_elapsed
        p = np.abs(state.A) ** 2
        rec["kicks"].append(k)
        rec["energy"].append(float(p @ Tkin))
        rec["energy_total"].append(float(p @ basis.E))
        rec["velocity"].append(float(-2.0 * np.dot(state.A.real, S @ state.A.imag)))
        rec["norm"].append(float(p.sum()))
        for f in observers:
            f(state)

    start = state0.kicks_elapsed
    state = state0
    log = list(state0.leakage_log)
    record(state)
    if density_grid is not None and start in density_kicks:
        frames.append((start * T, density_grid, obs.density(state, basis, density_grid)))
    for i in range(1, n_kicks + 1):
        state = _advance(state, U, log)
        k = state.kicks_elapsed
        if not state.renormalize:
            nrm = np.vdot(state.A, state.A).real
            if nrm < norm_floor:
                raise LeakageFloorError(k, nrm, norm_floor)
        if i % stride == 0:
            record(state)
        if density_grid is not None and k in density_kicks:
            frames.append((k * T, density_grid, obs.density(state, basis, density_grid)))
    kicks = np.array(rec["kicks"])
    return obs.ObservableSeries(
        kicks=kicks,
        times=kicks * T,
        energy=np.array(rec["energy"]),
        energy_total=np.array(rec["energy_total"]),
        velocity=np.array(rec["velocity"]),
        norm=np.array(rec["norm"]),
        density_frames=frames,
        final_state=state,
    )
