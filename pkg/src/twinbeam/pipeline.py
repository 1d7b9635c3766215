"""
Experiment configuration, sweeps and file output.

Configuration files are JSON objects with optional sections ``nopo``,
``mz1``, ``mz2``, ``coherence``, ``sweep``, ``oracle``, ``output`` and a
top-level ``analysis_frequency``. Anything left out takes the reference
experiment's values, so an empty object ``{}`` reproduces it.
"""

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from . import __version__
from .coherence import CoherenceParams, VANISH_VISIBILITY, vanish_detuning, visibility
from .interferometer import ConfigurationError, MzConfig
from .nopo import NopoParams, ParameterError, detected_spectra, phasematch_edges
from .oracle import OracleError, oracle_run
from .quadrature import variance_to_db

MEASURED_EXTENT = 860e9


class ConfigError(ValueError):
    """Unreadable or invalid configuration; message names the field."""


@dataclass(frozen=True)
class SweepSpec:
    variable: str = "detuning"
    start: float = 0.0
    stop: float = 5e6
    points: int = 101
    scale: str = "linear"
    min_abs: float = 1e6

    def __post_init__(self):
        if self.variable != "detuning":
            raise ConfigError(f"sweep.variable must be 'detuning', got {self.variable!r}")
        if not self.start < self.stop:
            raise ConfigError(f"sweep.start ({self.start}) must be < sweep.stop ({self.stop})")
        if int(self.points) != self.points or self.points < 2:
            raise ConfigError(f"sweep.points must be an integer >= 2, got {self.points}")
        if self.scale not in ("linear", "log"):
            raise ConfigError(f"sweep.scale must be 'linear' or 'log', got {self.scale!r}")
        if not self.min_abs > 0:
            raise ConfigError(f"sweep.min_abs must be > 0, got {self.min_abs}")

    def grid(self):
        """Sorted detuning grid in Hz."""
        n = int(self.points)
        if self.scale == "linear":
            return np.linspace(self.start, self.stop, n)
        lo, hi = self.start, self.stop
        if lo >= 0 or hi <= 0:
            a, b = sorted((abs(lo), abs(hi)))
            a = max(a, self.min_abs)
            g = np.logspace(np.log10(a), np.log10(b), n)
            return np.sort(-g) if hi <= 0 else g
        # two-sided: zero plus log branches weighted by their decade span
        dec_neg = max(np.log10(-lo / self.min_abs), 0.0)
        dec_pos = max(np.log10(hi / self.min_abs), 0.0)
        n_neg = int(round((n - 1) * dec_neg / (dec_neg + dec_pos)))
        n_pos = n - 1 - n_neg
        neg = -np.logspace(np.log10(self.min_abs), np.log10(-lo), n_neg) if n_neg else []
        pos = np.logspace(np.log10(self.min_abs), np.log10(hi), n_pos) if n_pos else []
        return np.sort(np.concatenate([neg, [0.0], pos]))


VISIBILITY_SWEEP = SweepSpec(start=0.0, stop=5e6, points=101, scale="linear")
CORRELATION_SWEEP = SweepSpec(start=-400e9, stop=1.3e12, points=201, scale="log")


@dataclass(frozen=True)
class OracleSettings:
    enabled: bool = False
    n_samples: int = 2 ** 20
    sample_rate: float = 64e6
    seed: int = 0
    rbw: float = 30e3
    n_records: int = 8
    readout_span: float = 300e3


@dataclass(frozen=True)
class OutputSettings:
    directory: str = "out"
    format: str = "csv"

    def __post_init__(self):
        if self.format not in ("csv", "csv+gnuplot"):
            raise ConfigError(f"output.format must be 'csv' or 'csv+gnuplot', got {self.format!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    nopo: NopoParams = field(default_factory=NopoParams)
    mz1: MzConfig = field(default_factory=MzConfig)
    mz2: MzConfig = field(default_factory=MzConfig)
    coherence: CoherenceParams = field(default_factory=CoherenceParams)
    analysis_frequency: float = 2e6
    sweep: SweepSpec = None
    oracle: OracleSettings = field(default_factory=OracleSettings)
    output: OutputSettings = field(default_factory=OutputSettings)

    def to_dict(self):
        d = asdict(self)
        for key in ("mz1", "mz2"):
            d[key]["mode"] = getattr(self, key).mode
            del d[key]["input_splitter_present"]
        del d["coherence"]["detuning"]
        del d["coherence"]["reference_frequency"]
        return d


def _section(cls, raw, name, **extra):
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{name}: expected an object, got {type(raw).__name__}")
    known = {f.name: f for f in fields(cls)}
    kwargs = dict(extra)
    for key, val in raw.items():
        if key not in known:
            raise ConfigError(f"{name}.{key}: unknown field")
        default = known[key].default
        if isinstance(default, bool):
            if not isinstance(val, bool):
                raise ConfigError(f"{name}.{key}: expected true/false, got {val!r}")
        elif isinstance(default, (int, float)):
            if isinstance(val, bool) or not isinstance(val, (int, float)):
                raise ConfigError(f"{name}.{key}: expected a number, got {val!r}")
            if isinstance(default, int) and int(val) != val:
                raise ConfigError(f"{name}.{key}: expected an integer, got {val!r}")
            val = type(default)(val)
        elif isinstance(default, str) and not isinstance(val, str):
            raise ConfigError(f"{name}.{key}: expected a string, got {val!r}")
        kwargs[key] = val
    try:
        return cls(**kwargs)
    except (ParameterError, ConfigurationError, ConfigError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from exc


def _mz_section(raw, name):
    raw = dict(raw or {})
    mode = raw.pop("mode", "phase")
    if mode not in ("amplitude", "phase"):
        raise ConfigError(f"{name}.mode: must be 'amplitude' or 'phase', got {mode!r}")
    if "input_splitter_present" in raw:
        raise ConfigError(f"{name}.input_splitter_present: use 'mode' instead")
    return _section(MzConfig, raw, name, input_splitter_present=(mode == "phase"))


def parse_config(data):
    """Build a validated ExperimentConfig from a decoded JSON object."""
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    known = {f.name for f in fields(ExperimentConfig)}
    for key in data:
        if key not in known:
            raise ConfigError(f"{key}: unknown section")
    nopo = _section(NopoParams, data.get("nopo"), "nopo")
    coh = dict(data.get("coherence") or {})
    for key in ("detuning", "reference_frequency"):
        if key in coh:
            raise ConfigError(f"coherence.{key}: set by the sweep, not the config")
    coh.setdefault("linewidth", nopo.linewidth)
    coherence = _section(CoherenceParams, coh, "coherence")
    f = data.get("analysis_frequency", 2e6)
    if isinstance(f, bool) or not isinstance(f, (int, float)) or not f >= 0:
        raise ConfigError(f"analysis_frequency: expected a number >= 0, got {f!r}")
    sweep = None if data.get("sweep") is None else _section(SweepSpec, data["sweep"], "sweep")
    return ExperimentConfig(
        nopo=nopo,
        mz1=_mz_section(data.get("mz1"), "mz1"),
        mz2=_mz_section(data.get("mz2"), "mz2"),
        coherence=coherence,
        analysis_frequency=float(f),
        sweep=sweep,
        oracle=_section(OracleSettings, data.get("oracle"), "oracle"),
        output=_section(OutputSettings, data.get("output"), "output"),
    )


def load_config(path=None):
    """
    Read and validate a JSON configuration file.

    ``None`` or an empty file gives the reference defaults.

    Raises
    ------
    ConfigError
        With ``path:line:column`` for syntax errors, or the dotted field
        name for invalid values.
    """
    if path is None:
        return parse_config({})
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read configuration ({exc.strerror})") from exc
    if not text.strip():
        return parse_config({})
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return parse_config(data)


@dataclass(frozen=True)
class SweepResult:
    """Tabulated sweep, one column per quantity, rows sorted by detuning."""

    kind: str
    columns: dict
    seed: int = None

    @property
    def detuning(self):
        return self.columns["detuning_hz"]

    def __len__(self):
        return len(self.detuning)

    def rows(self):
        names = list(self.columns)
        return [dict(zip(names, vals)) for vals in zip(*self.columns.values())]


def _grid(cfg, default, points):
    spec = cfg.sweep or default
    if points is not None:
        spec = replace(spec, points=points)
    return spec.grid()


def run_visibility_sweep(cfg, points=None):
    """Fringe visibility against detuning."""
    grid = _grid(cfg, VISIBILITY_SWEEP, points)
    vis = np.array([visibility(replace(cfg.coherence, detuning=d)) for d in grid])
    return SweepResult("visibility", {"detuning_hz": grid, "visibility": vis})


def _point_seed(seed, index):
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def _oracle_point(args):
    cfg, d, seed = args
    o = cfg.oracle
    return oracle_run(cfg.nopo, cfg.mz1, cfg.mz2, d, seed, f=cfg.analysis_frequency,
                      n_samples=o.n_samples, sample_rate=o.sample_rate, rbw=o.rbw,
                      n_records=o.n_records, readout_span=o.readout_span)


def correlation_table(cfg, grid):
    """Analytic columns of the correlation sweep on a detuning grid."""
    grid = np.asarray(grid, dtype=float)
    vx_p, vx_m, vy_p, vy_m = detected_spectra(cfg.nopo, cfg.analysis_frequency, grid)
    vx_p, vx_m, vy_p, vy_m = (np.broadcast_to(v, grid.shape) for v in (vx_p, vx_m, vy_p, vy_m))
    corr = vx_m + vy_p
    anti = vx_p + vy_m
    vis = np.array([visibility(replace(cfg.coherence, detuning=d)) for d in grid])
    return {
        "detuning_hz": grid,
        "visibility": vis,
        "vx_minus_db": variance_to_db(vx_m),
        "vy_plus_db": variance_to_db(vy_p),
        "duan_value": corr,
        "entangled": np.minimum(corr, anti) < 2.0,
    }


def run_correlation_sweep(cfg, points=None, oracle=None, workers=1):
    """
    Correlation variances, inseparability sum and visibility against detuning.

    With the oracle enabled each point also gets a Monte Carlo estimate,
    seeded from ``(cfg.oracle.seed, point index)`` so results do not depend
    on evaluation order or ``workers``.
    """
    grid = _grid(cfg, CORRELATION_SWEEP, points)
    cols = correlation_table(cfg, grid)
    use_oracle = cfg.oracle.enabled if oracle is None else oracle
    if use_oracle:
        jobs = [(cfg, float(d), _point_seed(cfg.oracle.seed, i)) for i, d in enumerate(grid)]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as ex:
                res = list(ex.map(_oracle_point, jobs))
        else:
            res = [_oracle_point(j) for j in jobs]
        res = np.array(res, dtype=float).reshape(len(grid), 3)
        cols["vx_minus_oracle_db"] = res[:, 0]
        cols["vy_plus_oracle_db"] = res[:, 1]
        cols["qnl_oracle_db"] = res[:, 2]
    return SweepResult("correlation", cols, seed=cfg.oracle.seed if use_oracle else None)


def entangled_interval(p, f):
    """
    Open detuning interval where the inseparability sum is below 2.

    Returns ``None`` when no detuning gives entanglement.
    """
    q = replace(p, excess_phase_noise=0.0)
    vx_m, vy_p = detected_spectra(q, f, 0.0)[1:3]
    # in-band reduction of vx- + vy+ below 2; scales linearly with the window
    gain = (1.0 - vx_m) + (1.0 - vy_p)
    excess = p.excess_phase_noise / p.qnl
    if not gain > excess:
        return None
    level = excess / gain
    if level == 0.0:
        return (p.band_low - p.band_softness, p.band_high + p.band_softness)
    return phasematch_edges(p, level)


def _intersect(a, b):
    lo, hi = max(a[0], b[0]), min(a[1], b[1])
    return [lo, hi] if lo < hi else None


def _subtract(a, b):
    """Parts of interval ``a`` outside interval ``b``."""
    out = []
    if b is None:
        return [list(a)]
    if a[0] < b[0]:
        out.append([a[0], min(a[1], b[0])])
    if a[1] > b[1]:
        out.append([max(a[0], b[1]), a[1]])
    return [iv for iv in out if iv[0] < iv[1]]


def run_coexistence_report(cfg):
    """
    Detuning regions where classical coherence and entanglement coexist.

    Region A has both, region B entanglement without visible fringes,
    region C neither. ``classical_only`` (fringes without entanglement) is
    listed for completeness and is empty for the reference parameters.
    Intervals are ``[low, high]`` in Hz, with ``None`` for unbounded ends.
    """
    p = cfg.nopo
    inf = float("inf")
    v = float(vanish_detuning(cfg.coherence.linewidth, VANISH_VISIBILITY))
    coherent = (-v, v)
    ent = entangled_interval(p, cfg.analysis_frequency)

    region_a = [_intersect(coherent, ent)] if ent else []
    region_b = _subtract(ent, coherent) if ent else []
    region_c = _subtract((-inf, inf), ent) if ent else [[-inf, inf]]
    region_c = [iv for c in region_c for iv in _subtract(c, coherent)]
    classical_only = _subtract(coherent, ent)

    def clean(ivs):
        return [[None if not np.isfinite(x) else float(x) for x in iv] for iv in ivs if iv]

    return {
        "classical_vanish_visibility": VANISH_VISIBILITY,
        "classical_vanish_detuning_hz": v,
        "entangled_interval_hz": None if ent is None else [float(ent[0]), float(ent[1])],
        "phase_matching_band_hz": [p.band_low, p.band_high],
        "measured_extent_hz": MEASURED_EXTENT,
        "region_a": clean(region_a),
        "region_b": clean(region_b),
        "region_c": clean(region_c),
        "classical_only": clean(classical_only),
    }


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    return repr(float(x))


def _write_csv(path, result):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(result.columns))
        for vals in zip(*result.columns.values()):
            w.writerow([_fmt(v) for v in vals])


def _write_gnuplot(path, result):
    # gnuplot wants numbers only; booleans become 0/1
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# " + " ".join(result.columns) + "\n")
        for vals in zip(*result.columns.values()):
            fh.write(" ".join(_fmt(float(v)) for v in vals) + "\n")
        fh.write("\n\n")


def emit_outputs(result, cfg, out_dir=None):
    """
    Write a sweep result or region report plus a run manifest.

    Returns the list of written paths. The manifest records the fully
    resolved configuration and seed; nothing time-dependent is written, so
    identical inputs give byte-identical files.
    """
    out_dir = out_dir or cfg.output.directory
    try:
        os.makedirs(out_dir, exist_ok=True)
        written = []
        if isinstance(result, SweepResult):
            name = result.kind
            path = os.path.join(out_dir, f"{name}.csv")
            _write_csv(path, result)
            written.append(path)
            if cfg.output.format == "csv+gnuplot":
                path = os.path.join(out_dir, f"{name}.dat")
                _write_gnuplot(path, result)
                written.append(path)
            seed = result.seed
        else:
            name = "coexistence"
            path = os.path.join(out_dir, f"{name}.json")
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(result, fh, indent=2, sort_keys=True)
                fh.write("\n")
            written.append(path)
            seed = None
        manifest = {
            "command": name,
            "config": cfg.to_dict(),
            "seed": seed,
            "version": __version__,
            "outputs": [os.path.basename(p) for p in written],
        }
        path = os.path.join(out_dir, f"{name}.manifest.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(path)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write outputs: {exc.strerror}",
                      exc.filename or out_dir) from exc
    return written
