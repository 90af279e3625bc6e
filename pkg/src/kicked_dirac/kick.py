"""One-period kick transformation between box eigenmodes.

The kick multiplies the spinor by g(x) = exp(i eps cos(2 pi x / lam)). Its
matrix in the truncated positive-energy basis is

    V[n, l] = <psi_n | g | psi_l>,

stored so that ``V @ A`` applies the kick to a coefficient vector. The matrix
is complex symmetric, so row and column conventions coincide.

Two assembly routes are provided: a Jacobi-Anger (Bessel) series with
closed-form trigonometric integrals, and brute-force composite quadrature.
"""
import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .basis import sinpi
from .bessel import bessel_jn_miller
from .quadrature import composite_gauss_legendre, panels_for

KICK_PHASES = ("scalar", "mass_term")
ORDERS = ("phase_kick", "kick_phase")

_MAGIC = b"KICKMAT1"
_RESONANCE = 1e-9


@dataclass(frozen=True)
class KickParams:
    epsilon: float
    lam: float
    T: float
    kick_phase: str = "scalar"

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if not self.T > 0:
            raise ValueError(f"T must be positive, got {self.T}")
        if self.kick_phase not in KICK_PHASES:
            raise ValueError(f"kick_phase must be one of {KICK_PHASES}")


@dataclass(frozen=True, eq=False)
class KickOperator:
    V: np.ndarray
    phase: np.ndarray
    params: KickParams
    method_tag: str
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_max(self):
        return self.V.shape[0]

    def propagator(self, order="phase_kick"):
        """Dense one-period map U with A(t+T) = U @ A(t)."""
        if order not in ORDERS:
            raise ValueError(f"order must be one of {ORDERS}")
        if order not in self._cache:
            if order == "phase_kick":
                self._cache[order] = self.V * self.phase[None, :]
            else:
                self._cache[order] = self.phase[:, None] * self.V
        return self._cache[order]


def jacobi_anger_coeffs(epsilon, tol=1e-14):
    """Coefficients b_m = i^m J_m(eps) for |m| <= M, as a dict m -> b_m.

    M is the smallest order beyond eps with |J_{M+1}(eps)| < tol.
    """
    if not 0 < tol < 1:
        raise ValueError("tol must lie in (0, 1)")
    if epsilon == 0:
        return {0: 1.0 + 0j}
    a = abs(epsilon)
    order = int(a) + 30
    while True:
        J = bessel_jn_miller(epsilon, order + 1)
        small = np.nonzero((np.abs(J[1:]) < tol) & (np.arange(1, order + 2) > a))[0]
        if small.size:
            M = int(small[0])
            break
        order *= 2
    coeffs = {}
    for m in range(-M, M + 1):
        jm = J[abs(m)] * (-1) ** m if m < 0 else J[m]
        coeffs[m] = (1j) ** (m % 4) * jm
    return coeffs


def _exp_integral(t, L):
    """Integral of exp(i w x) over [0, L] with w = pi t / L."""
    t = np.asarray(t, dtype=float)
    out = np.empty(t.shape, dtype=complex)
    res = np.abs(t) < _RESONANCE
    tn = np.where(res, 1.0, t)
    s_half = sinpi(0.5 * tn)
    val = L * (sinpi(tn) + 2j * s_half * s_half) / (np.pi * tn)
    # analytic limit at the resonance, first order in the detuning
    out[:] = np.where(res, L * (1.0 + 0.5j * np.pi * t), val)
    return out


def _cos_table(coeffs, n_max, L, lam):
    """G[j] = integral of g(x) cos(j pi x / L) over [0, L], j = -2n_max..2n_max."""
    j = np.arange(-2 * n_max, 2 * n_max + 1, dtype=float)
    ratio = 2.0 * L / lam  # m q in units of pi/L
    G = np.zeros(j.shape, dtype=complex)
    for m, b in coeffs.items():
        G += b * 0.5 * (_exp_integral(m * ratio + j, L) + _exp_integral(m * ratio - j, L))
    if (L / lam).is_integer():
        # g is mirror-symmetric about L/2, so odd harmonics vanish; zero them
        # exactly instead of leaving ~1e-17 residue in parity-forbidden entries
        G[1::2] = 0.0
    return G


def _assemble(basis, G_upper, G_lower, rows=None):
    n = basis.modes
    rows = slice(None) if rows is None else rows
    nr = n[rows]
    off = 2 * basis.n_max
    diff = G_upper[nr[:, None] - n[None, :] + off], G_lower[nr[:, None] - n[None, :] + off]
    summ = G_upper[nr[:, None] + n[None, :] + off], G_lower[nr[:, None] + n[None, :] + off]
    kk = np.outer(basis.kappa[rows], basis.kappa)
    # sin sin = (cos(d) - cos(s))/2 ; cos cos = (cos(d) + cos(s))/2
    inner = 0.5 * (diff[0] - summ[0]) + kk * 0.5 * (diff[1] + summ[1])
    return np.outer(basis.norm[rows], basis.norm) * inner


def build_kick_matrix_bessel(basis, params, tol=1e-14, block=1024):
    if not 0 < tol < 1:
        raise ValueError("tol must lie in (0, 1)")
    phase = np.exp(-1j * basis.E * params.T)
    if params.epsilon == 0:
        return KickOperator(np.eye(basis.n_max, dtype=complex), phase, params, "bessel")
    coeffs = jacobi_anger_coeffs(params.epsilon, tol)
    G_up = _cos_table(coeffs, basis.n_max, basis.L, params.lam)
    if params.kick_phase == "mass_term":
        G_low = _cos_table(jacobi_anger_coeffs(-params.epsilon, tol), basis.n_max, basis.L, params.lam)
    else:
        G_low = G_up
    V = np.empty((basis.n_max, basis.n_max), dtype=complex)
    for start in range(0, basis.n_max, block):
        sl = slice(start, min(start + block, basis.n_max))
        V[sl] = _assemble(basis, G_up, G_low, sl)
    return KickOperator(V, phase, params, "bessel")


def required_half_waves(basis, params):
    """Half-wavelengths across the box of the fastest quadrature integrand."""
    spread = abs(params.epsilon) + 2.0 * abs(params.epsilon) ** (1 / 3) + 8.0
    return 2 * basis.n_max + 2.0 * basis.L / params.lam * spread


def build_kick_matrix_quadrature(basis, params, panels=None, order=16):
    half_waves = required_half_waves(basis, params)
    min_panels = math.ceil(4 * half_waves / order)
    if panels is None:
        panels = panels_for(half_waves, order, nodes_per_half_wave=8)
    if panels < min_panels:
        raise ValueError(f"{panels} panels too coarse, need at least {min_panels}")
    x, w = composite_gauss_legendre(0.0, basis.L, panels, order)
    phi1, chi2 = basis.components(x)
    g = np.exp(1j * params.epsilon * np.cos(2.0 * np.pi * x / params.lam))
    g_low = np.conj(g) if params.kick_phase == "mass_term" else g
    V = (np.conj(phi1).T * (w * g)) @ phi1 + (np.conj(chi2).T * (w * g_low)) @ chi2
    phase = np.exp(-1j * basis.E * params.T)
    return KickOperator(V, phase, params, "quadrature")


def subunitarity_report(op):
    """Per-mode deficiency d_l = 1 - sum_n |V[n, l]|^2."""
    return 1.0 - np.sum(np.abs(op.V) ** 2, axis=0)


def save_kick_matrix(path, V):
    """Binary dump: 'KICKMAT1', u32 n_max, u32 reserved, then row-major complex128 LE."""
    V = np.asarray(V, dtype="<c16")
    n = V.shape[0]
    if V.shape != (n, n):
        raise ValueError("kick matrix must be square")
    with open(path, "wb") as fh:
        fh.write(_MAGIC + struct.pack("<II", n, 0))
        fh.write(np.ascontiguousarray(V).tobytes())


def load_kick_matrix(path):
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) != 16 or header[:8] != _MAGIC:
            raise ValueError(f"{path}: not a KICKMAT1 file")
        n, _ = struct.unpack("<II", header[8:])
        data = np.frombuffer(fh.read(), dtype="<c16")
    if data.size != n * n:
        raise ValueError(f"{path}: expected {n * n} entries, found {data.size}")
    return data.reshape(n, n).astype(complex)
