"""Run configuration, figure presets, regime classification and CSV output."""
import csv
import dataclasses
import os
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .basis import build_basis
from .evolution import SpinorState, evolve
from .kick import KICK_PHASES, ORDERS, KickParams, build_kick_matrix_bessel, load_kick_matrix, save_kick_matrix, KickOperator
from .wavepacket import GaussianPacketSpec, project_packet

REGIME_TAGS = ("periodic", "nonperiodic", "growing", "packet_split", "packet_revival")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ClassifierThresholds:
    acf_peak: float = 0.9
    growth_factor: float = 1.5
    residual_ratio: float = 0.5
    detrend_degree: int = 2


@dataclass(frozen=True)
class RunConfig:
    L: float = 1.0
    n_max: int = 512
    epsilon: float = 0.1
    lam: float = None  # defaults to L
    T: float = 0.47
    n_kicks: int = 100
    stride: int = 1
    order: str = "phase_kick"
    kick_phase: str = "scalar"
    renormalize: bool = False
    norm_floor: float = 0.5
    initial: object = 1  # mode index or "packet"
    packet: GaussianPacketSpec = None
    density_points: int = 1024
    density_kicks: tuple = ()
    thresholds: ClassifierThresholds = field(default_factory=ClassifierThresholds)

    @property
    def wavelength(self):
        return self.L if self.lam is None else self.lam

    def validate(self):
        """Raise ConfigError naming the offending key."""
        def need(ok, key, rule):
            if not ok:
                raise ConfigError(f"{key}: {rule}")
        need(self.L > 0, "L", "must be positive")
        need(self.n_max >= 1, "n_max", "must be a positive integer")
        need(self.epsilon >= 0, "epsilon", "must be non-negative")
        need(self.wavelength > 0, "lambda", "must be positive")
        need(self.T > 0, "T", "must be positive")
        need(self.n_kicks >= 0, "n_kicks", "must be non-negative")
        need(self.stride >= 1, "stride", "must be positive")
        need(self.n_kicks % self.stride == 0, "stride", f"must divide n_kicks={self.n_kicks}")
        need(self.order in ORDERS, "order", f"must be one of {', '.join(ORDERS)}")
        need(self.kick_phase in KICK_PHASES, "kick_phase", f"must be one of {', '.join(KICK_PHASES)}")
        need(0 <= self.norm_floor < 1, "norm_floor", "must lie in [0, 1)")
        need(self.density_points >= 2, "density_points", "must be at least 2")
        need(all(0 <= k <= self.n_kicks for k in self.density_kicks), "density_kicks",
             "snapshot kicks must lie in 0..n_kicks")
        if self.initial == "packet":
            need(self.packet is not None, "initial", "packet start needs packet_d and packet_x0")
            try:
                self.packet.validate(self.L)
            except ValueError as exc:
                raise ConfigError(f"packet: {exc}") from None
        else:
            need(isinstance(self.initial, int) and 1 <= self.initial <= self.n_max, "initial",
                 f"must be 'packet' or a mode index in 1..{self.n_max}")
        t = self.thresholds
        need(0 < t.acf_peak < 1, "acf_peak", "must lie in (0, 1)")
        need(t.growth_factor > 0, "growth_factor", "must be positive")
        need(t.residual_ratio > 0, "residual_ratio", "must be positive")
        need(t.detrend_degree >= 1, "detrend_degree", "must be at least 1")
        return self


def _bool(v):
    low = v.lower()
    if low in ("1", "true", "on", "yes"):
        return True
    if low in ("0", "false", "off", "no"):
        return False
    raise ValueError(f"expected on/off, got {v!r}")


def _int(v):
    f = float(v)
    if f != int(f):
        raise ValueError(f"expected an integer, got {v!r}")
    return int(f)


def _kicks(v):
    return tuple(sorted({_int(s) for s in v.split(",") if s.strip()}))


def _spins(v):
    parts = [complex(s.strip().replace(" ", "")) for s in v.split(",")]
    if len(parts) != 4:
        raise ValueError("packet_s needs four comma-separated values")
    return tuple(parts)


def _initial(v):
    return "packet" if v.strip().lower() == "packet" else _int(v)


# key -> (parser, destination)
_KEYS = {
    "L": (float, "L"),
    "n_max": (_int, "n_max"),
    "epsilon": (float, "epsilon"),
    "lambda": (float, "lam"),
    "T": (float, "T"),
    "n_kicks": (_int, "n_kicks"),
    "stride": (_int, "stride"),
    "order": (str, "order"),
    "kick_phase": (str, "kick_phase"),
    "renormalize": (_bool, "renormalize"),
    "norm_floor": (float, "norm_floor"),
    "initial": (_initial, "initial"),
    "packet_d": (float, "packet.d"),
    "packet_x0": (float, "packet.x0"),
    "packet_v0": (float, "packet.v0"),
    "packet_s": (_spins, "packet.s"),
    "density_points": (_int, "density_points"),
    "density_kicks": (_kicks, "density_kicks"),
    "acf_peak": (float, "thresholds.acf_peak"),
    "growth_factor": (float, "thresholds.growth_factor"),
    "residual_ratio": (float, "thresholds.residual_ratio"),
    "detrend_degree": (_int, "thresholds.detrend_degree"),
}


def parse_config(text):
    """Parse flat ``key=value`` text (``#`` comments) into a validated RunConfig."""
    top, packet, thresholds, lines = {}, {}, {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        conv, dest = _KEYS[key]
        try:
            val = conv(value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
        lines[key] = lineno
        if dest.startswith("packet."):
            packet[dest[7:]] = val
        elif dest.startswith("thresholds."):
            thresholds[dest[11:]] = val
        else:
            top[dest] = val
    if packet:
        if "d" not in packet or "x0" not in packet:
            raise ConfigError("packet: packet_d and packet_x0 are both required")
        top["packet"] = GaussianPacketSpec(**packet)
    cfg = RunConfig(**top, thresholds=ClassifierThresholds(**thresholds))
    try:
        return cfg.validate()
    except ConfigError as exc:
        key = str(exc).split(":", 1)[0]
        where = f"line {lines[key]}: " if key in lines else ""
        raise ConfigError(f"{where}{exc}") from None


def _fmt(v):
    if isinstance(v, bool):
        return "on" if v else "off"
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, complex):
        return f"{v.real!r}{v.imag:+.17g}j"
    return str(v)


def format_config(cfg):
    """Serialize back to the key=value format parse_config accepts."""
    out = []
    for key, (_, dest) in _KEYS.items():
        if dest.startswith("packet."):
            if cfg.packet is None:
                continue
            val = getattr(cfg.packet, dest[7:])
        elif dest.startswith("thresholds."):
            val = getattr(cfg.thresholds, dest[11:])
        else:
            val = getattr(cfg, dest)
        if val is None:
            continue
        if key == "density_kicks":
            if not val:
                continue
            val = ",".join(str(k) for k in val)
        elif key == "packet_s":
            val = ",".join(_fmt(complex(s)) for s in val)
        else:
            val = _fmt(val)
        out.append(f"{key}={val}")
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class ScenarioPreset:
    name: str
    config: RunConfig
    tag: str
    note: str = ""


def _preset_table():
    base = RunConfig(renormalize=True, n_kicks=2000)
    rep = dataclasses.replace
    presets = []

    def add(name, tag, note="", **kw):
        presets.append(ScenarioPreset(name, rep(base, **kw).validate(), tag, note))

    for eps in (0.01, 0.05, 0.1):
        add(f"fig1_eps{eps:g}", "periodic", "E(t) at T=0.47", epsilon=eps, T=0.47)
    for eps in (0.1, 0.5):
        add(f"fig2_eps{eps:g}", "nonperiodic", "E(t) at T=1e-2", epsilon=eps, T=1e-2)
    # kick counts keep the momentum ladder inside n_max (checked by doubling n_max)
    for eps, kicks in ((0.1, 2000), (0.5, 2000), (1.0, 1000)):
        add(f"fig3_eps{eps:g}", "growing", "E(t) at T=1e-4", epsilon=eps, T=1e-4, n_max=2048,
            n_kicks=kicks)
    add("fig4_T0.1", "periodic", "E(t) at eps=0.5", epsilon=0.5, T=0.1)
    add("fig4_T0.01", "nonperiodic", "E(t) at eps=0.5", epsilon=0.5, T=1e-2)
    add("fig4_T0.0001", "growing", "E(t) at eps=0.5", epsilon=0.5, T=1e-4, n_max=2048)
    frames = tuple(range(0, 2001, 100))
    add("fig6_T0.47", "periodic", "density, eps=0.1", epsilon=0.1, T=0.47, density_kicks=frames)
    add("fig6_T0.01", "nonperiodic", "density, eps=0.1", epsilon=0.1, T=1e-2, density_kicks=frames)
    add("fig6_T0.0001", "growing", "density, eps=0.1", epsilon=0.1, T=1e-4, n_max=2048,
        density_kicks=frames)
    add("fig7", "periodic", "E(t) and velocity, eps=0.1, T=100", epsilon=0.1, T=100.0)
    for eps, kicks in ((0.1, 2000), (0.5, 1000)):
        add(f"fig8_eps{eps:g}", "growing", "E(t) with lambda=L/2, T=1e-4", epsilon=eps, T=1e-4,
            lam=0.5, n_max=2048, n_kicks=kicks)
    packet = GaussianPacketSpec(d=0.01, x0=0.5, v0=0.0, s=(1, 0, 0, 0))
    add("fig9_packet", "packet_split", "Gaussian packet, eps=1, T=1e-2", epsilon=1.0, T=1e-2,
        initial="packet", packet=packet, n_kicks=80, density_kicks=(0, 20, 50, 80))
    add("fig10_packet", "packet_revival", "Gaussian packet, eps=1, T=0.25", epsilon=1.0, T=0.25,
        initial="packet", packet=packet, n_kicks=80, density_kicks=(0, 20, 50, 80))
    return {p.name: p for p in presets}


PRESETS = _preset_table()


def list_presets():
    return list(PRESETS.values())


def get_preset(name):
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}") from None


# --- regime classification -------------------------------------------------

@dataclass(frozen=True)
class RegimeDiagnostics:
    tag: str
    slope: float
    residual_ratio: float
    growth: float
    acf_peak: float
    acf_lag: int


def _autocorrelation(y):
    n = y.size
    f = np.fft.rfft(y, 2 * n)
    a = np.fft.irfft(f * np.conj(f), 2 * n)[:n]
    return a / a[0]


def classify_regime(energy, times=None, thresholds=ClassifierThresholds()):
    y = np.asarray(energy, dtype=float)
    if y.size < 200:
        raise ValueError(f"series too short for classification ({y.size} < 200 samples)")
    t = np.arange(y.size, dtype=float) if times is None else np.asarray(times, dtype=float)
    s = 2.0 * (t - t[0]) / (t[-1] - t[0]) - 1.0
    coef = np.polyfit(s, y, 1)
    resid = y - np.polyval(coef, s)
    spread = y.std()
    ratio = resid.std() / spread if spread > 0 else 0.0
    growth = y[-1] / y[0] if y[0] != 0 else np.inf
    slope = coef[0] * 2.0 / (t[-1] - t[0])
    if slope > 0 and ratio < thresholds.residual_ratio and y[-1] > thresholds.growth_factor * y[0]:
        return RegimeDiagnostics("growing", slope, ratio, growth, np.nan, 0)
    detr = y - np.polyval(np.polyfit(s, y, thresholds.detrend_degree), s)
    if detr.std() <= 1e-12 * max(np.abs(y).max(), 1.0):
        # flat series: counted as period-1
        return RegimeDiagnostics("periodic", slope, ratio, growth, 1.0, 1)
    acf = _autocorrelation(detr - detr.mean())
    half = y.size // 2
    neg = np.nonzero(acf[:half] < 0)[0]
    if neg.size == 0:
        return RegimeDiagnostics("nonperiodic", slope, ratio, growth, np.nan, 0)
    lag = int(neg[0] + np.argmax(acf[neg[0]:half]))
    peak = float(acf[lag])
    tag = "periodic" if peak > thresholds.acf_peak else "nonperiodic"
    return RegimeDiagnostics(tag, slope, ratio, growth, peak, lag)


def regime_classifier(series, thresholds=ClassifierThresholds()):
    """Tag an ObservableSeries' E_kin as periodic, growing or nonperiodic."""
    return classify_regime(series.energy, series.times, thresholds).tag


# --- running -----------------------------------------------------------------

def resolve(config_or_name, n_max=None, n_kicks=None):
    cfg = get_preset(config_or_name).config if isinstance(config_or_name, str) else config_or_name
    changes = {}
    if n_max is not None:
        changes["n_max"] = n_max
    if n_kicks is not None:
        changes["n_kicks"] = n_kicks
        changes["density_kicks"] = tuple(k for k in cfg.density_kicks if k <= n_kicks)
        if n_kicks % cfg.stride:
            changes["stride"] = 1
    return dataclasses.replace(cfg, **changes).validate() if changes else cfg.validate()


def initial_state(cfg, basis):
    if cfg.initial == "packet":
        state, _ = project_packet(cfg.packet, basis, renormalize=cfg.renormalize)
        return state
    return SpinorState.from_mode(basis.n_max, cfg.initial, renormalize=cfg.renormalize)


def simulate(cfg, kick_matrix=None):
    """Build the operator and evolve; returns (series, basis, operator)."""
    basis = build_basis(cfg.L, cfg.n_max)
    params = KickParams(cfg.epsilon, cfg.wavelength, cfg.T, cfg.kick_phase)
    if kick_matrix is None:
        op = build_kick_matrix_bessel(basis, params)
    else:
        if kick_matrix.shape != (cfg.n_max, cfg.n_max):
            raise ConfigError(f"kick matrix is {kick_matrix.shape[0]} modes, config wants {cfg.n_max}")
        op = KickOperator(kick_matrix, np.exp(-1j * basis.E * cfg.T), params, "loaded")
    grid = np.linspace(0.0, cfg.L, cfg.density_points) if cfg.density_kicks else None
    series = evolve(initial_state(cfg, basis), op, cfg.n_kicks, basis, stride=cfg.stride,
                    order=cfg.order, norm_floor=cfg.norm_floor, density_grid=grid,
                    density_kicks=cfg.density_kicks)
    return series, basis, op


SERIES_COLUMNS = ("kick_index", "time", "E_kin", "E_total", "velocity", "norm")


def write_series_csv(path, series):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(SERIES_COLUMNS)
        for row in zip(series.kicks, series.times, series.energy, series.energy_total,
                       series.velocity, series.norm):
            wr.writerow([str(int(row[0]))] + [format(float(v), ".17g") for v in row[1:]])


def read_series_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {c: np.array([float(r[c]) for r in rows]) for c in SERIES_COLUMNS}


def write_density_csv(path, grid, rho):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["x", "rho"])
        for x, r in zip(grid, rho):
            wr.writerow([format(float(x), ".17g"), format(float(r), ".17g")])


def run_scenario(config_or_name, out_dir, n_max=None, n_kicks=None, dump_kick=None, load_kick=None):
    """Run a config or preset and write series.csv, density frames and meta.txt."""
    cfg = resolve(config_or_name, n_max, n_kicks)
    os.makedirs(out_dir, exist_ok=True)
    if not os.access(out_dir, os.W_OK):
        raise PermissionError(f"output directory {out_dir} is not writable")
    matrix = load_kick_matrix(load_kick) if load_kick else None
    series, basis, op = simulate(cfg, matrix)
    if dump_kick:
        save_kick_matrix(dump_kick, op.V)
    paths = []
    p = os.path.join(out_dir, "series.csv")
    write_series_csv(p, series)
    paths.append(p)
    for k, (t, grid, rho) in zip(sorted(cfg.density_kicks), series.density_frames):
        p = os.path.join(out_dir, f"density_{format(t, '.10g')}.csv")
        write_density_csv(p, grid, rho)
        paths.append(p)
    p = os.path.join(out_dir, "meta.txt")
    with open(p, "w") as fh:
        name = config_or_name if isinstance(config_or_name, str) else "custom"
        fh.write(f"# kicked_dirac {__version__}\n# scenario {name}\n")
        fh.write(format_config(cfg))
    paths.append(p)
    return paths, series
