"""Command-line parameter sweeps.

Usage::

    photon-scatter <command> [--config FILE] [--set key=value ...]
                   [--out PATH] [--format csv|json] [--jobs N]

A config is a JSON object with the keys ``params``, ``axis``, ``range``,
``scale``, ``fixed`` and ``unit_scale``; anything missing falls back to the
command's defaults. ``--set`` takes a dotted key and a JSON value
(``--set params.g=0.05 --set range=[-3,3,61]``) and overrides the file.

Rates are in normalized units with ``kappa_i1 = 1``. ``unit_scale`` only
rescales the written output: frequencies and rates are multiplied by it and
delays divided by it.

Exit status: 0 on success, 1 on a config error (or a failed
``feynman-check``), 2 when any sweep point hit a divergent normalization. In
that case the data is still written, flagged rows hold the unnormalized
numerator.
"""
from __future__ import annotations

import argparse
import copy
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .exceptions import ConvergenceError, DivergenceError, ParameterError
from .feynman import series_g3, series_g22
from .observables import (
    CorrelationTrace,
    TraceKind,
    blockade_g2,
    down_conversion_g2,
    nonlinear_phase,
    pair_rate,
    zeta,
)
from .params import CavityParams
from .smatrix import three_point_green, two_photon_kernel
from .wavepacket import WavepacketSpec, wavepacket_g2

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DIVERGED = 2
FEYNMAN_RTOL = 1e-8

PARAM_KEYS = ("omega1", "omega2", "omega3", "kappa_e1", "kappa_e2", "kappa_e3",
              "kappa_i1", "kappa_i2", "kappa_i3", "g", "degenerate")
TOP_KEYS = ("params", "axis", "range", "scale", "fixed", "unit_scale")
MODE2_KEYS = ("omega2", "kappa_e2", "kappa_i2")

DEGENERATE_DEFAULT = {
    "omega1": 1.0, "omega3": 2.0,
    "kappa_e1": 1 / 1.04, "kappa_e3": 0.1,
    "kappa_i1": 1.0, "kappa_i3": 2.0,
    "g": 0.02, "degenerate": True,
}
TWO_MODE_DEFAULT = {
    "omega1": 1.0, "omega2": 1.5, "omega3": 2.5,
    "kappa_e1": 1.04, "kappa_e2": 1 / 1.04, "kappa_e3": 0.1,
    "kappa_i1": 1.0, "kappa_i2": 1.0, "kappa_i3": 2.0,
    "g": 0.02, "degenerate": False,
}


class ConfigError(Exception):
    pass


class _Command:
    def __init__(self, name, kind, column, degenerate, axes, fixed, default_axis, default_range):
        self.name = name
        self.kind = kind
        self.column = column
        self.degenerate = degenerate
        self.axes = axes
        self.fixed = fixed
        self.default_axis = default_axis
        self.default_range = default_range


# Fixed-input defaults of None resolve to a resonance of the cavity.
COMMANDS = {
    "blockade-g2": _Command("blockade-g2", TraceKind.BLOCKADE_G2, "g2", True,
                            ("tau", "k", "coupling-ratio"),
                            {"k": None, "tau": 0.0, "coupling_ratio": None},
                            "tau", (-5.0, 5.0, 201)),
    "phase": _Command("phase", TraceKind.PHASE, "phase", True,
                      ("tau", "k", "coupling-ratio"),
                      {"k": None, "tau": 0.0, "coupling_ratio": None},
                      "k", (-1.0, 3.0, 201)),
    "down-g2": _Command("down-g2", TraceKind.DOWN_G2, "g2", False,
                        ("tau", "k"),
                        {"k": None, "tau": 0.0, "alpha_sq": 1.0},
                        "tau", (-5.0, 5.0, 201)),
    "zeta": _Command("zeta", TraceKind.ZETA, "zeta", False,
                     ("tau", "k", "coupling-ratio"),
                     {"k1": None, "k2": None, "tau": 0.0, "coupling_ratio": None},
                     "tau", (-5.0, 5.0, 201)),
    "wavepacket-g2": _Command("wavepacket-g2", TraceKind.WAVEPACKET_G2, "g2", True,
                              ("gamma", "tau"),
                              {"k0": None, "gamma": 1e-2, "tau": 0.0, "coupling_ratio": None},
                              "gamma", (1e-4, 1.0, 41)),
    "pair-rate": _Command("pair-rate", TraceKind.PAIR_RATE, "rate", False,
                          ("k",), {"alpha_sq": 1.0},
                          "k", (0.5, 4.5, 201)),
    "feynman-check": _Command("feynman-check", None, None, None, (),
                              {"k1": None, "k2": None, "p1": None,
                               "max_order": 64, "tol": 1e-12},
                              None, None),
}

# Axis names double as fixed keys; "k" means k1 for zeta.
_AXIS_KEY = {"tau": "tau", "k": "k", "gamma": "gamma", "coupling-ratio": "coupling_ratio"}
# Abscissa units under unit_scale: +1 frequency, -1 time, 0 dimensionless.
_AXIS_DIMENSION = {"tau": -1, "k": 1, "gamma": 1, "coupling-ratio": 0}


# -- config -------------------------------------------------------------------

def _set_dotted(cfg, dotted, raw):
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    keys = dotted.split(".")
    node = cfg
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise ConfigError(f"--set {dotted}: '{key}' is not a section")
    node[keys[-1]] = value


def _finite(name, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be finite, got {value!r}")
    return float(value)


def _build_params(command, raw):
    unknown = sorted(set(raw) - set(PARAM_KEYS))
    if unknown:
        raise ConfigError(f"unknown params key(s) {', '.join(unknown)}; expected {', '.join(PARAM_KEYS)}")
    degenerate = raw.get("degenerate", bool(command.degenerate))
    if not isinstance(degenerate, bool):
        raise ConfigError("params.degenerate must be true or false")
    if command.degenerate is not None and degenerate != command.degenerate:
        need = "a degenerate" if command.degenerate else "a non-degenerate"
        raise ConfigError(f"{command.name} needs {need} cavity: set params.degenerate={str(command.degenerate).lower()}")
    base = dict(DEGENERATE_DEFAULT if degenerate else TWO_MODE_DEFAULT)
    if degenerate:
        given = sorted(set(raw) & set(MODE2_KEYS))
        if given:
            raise ConfigError(f"degenerate cavity: mode 2 copies mode 1, drop {', '.join(given)}")
    base.update(raw)
    vals = {k: _finite(f"params.{k}", v) for k, v in base.items() if k != "degenerate"}
    if degenerate:
        for key in MODE2_KEYS:
            vals[key] = vals[key[:-1] + "1"]
    try:
        return CavityParams(
            omega=(vals["omega1"], vals["omega2"], vals["omega3"]),
            kappa_e=(vals["kappa_e1"], vals["kappa_e2"], vals["kappa_e3"]),
            kappa_i=(vals["kappa_i1"], vals["kappa_i2"], vals["kappa_i3"]),
            g=vals["g"],
            degenerate=degenerate,
        )
    except ParameterError as exc:
        raise ConfigError(f"params: {exc}") from None


class SweepConfig:
    """Validated sweep: command, cavity, axis grid and fixed inputs."""

    def __init__(self, command, params, axis, grid, fixed, unit_scale):
        self.command = command
        self.params = params
        self.axis = axis
        self.grid = grid
        self.fixed = fixed
        self.unit_scale = unit_scale


def parse_config(command_name, doc=None, overrides=()):
    """Merge a JSON document with ``--set`` overrides and validate.

    Returns ``(SweepConfig, warnings)``; raises :class:`ConfigError`.
    """
    if command_name not in COMMANDS:
        raise ConfigError(f"unknown command {command_name!r}; choose from {', '.join(COMMANDS)}")
    command = COMMANDS[command_name]
    cfg = copy.deepcopy(doc) if doc else {}
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    for item in overrides:
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        _set_dotted(cfg, key, raw)

    unknown = sorted(set(cfg) - set(TOP_KEYS))
    if unknown:
        raise ConfigError(f"unknown config key(s) {', '.join(unknown)}; expected {', '.join(TOP_KEYS)}")
    raw_params = cfg.get("params", {})
    if not isinstance(raw_params, dict):
        raise ConfigError("params must be an object")
    params = _build_params(command, raw_params)

    raw_fixed = cfg.get("fixed", {})
    if not isinstance(raw_fixed, dict):
        raise ConfigError("fixed must be an object")
    unknown = sorted(set(raw_fixed) - set(command.fixed))
    if unknown:
        raise ConfigError(f"unknown fixed key(s) {', '.join(unknown)} for {command.name}; "
                          f"expected {', '.join(command.fixed) or 'none'}")
    fixed = dict(command.fixed)
    for key, value in raw_fixed.items():
        fixed[key] = _finite(f"fixed.{key}", value)
    _resolve_fixed(command, params, fixed)
    if fixed.get("coupling_ratio") is not None:
        if fixed["coupling_ratio"] < 0:
            raise ConfigError("fixed.coupling_ratio must be >= 0")
        params = params.with_coupling_ratio(fixed["coupling_ratio"])

    unit_scale = _finite("unit_scale", cfg.get("unit_scale", 1.0))
    if unit_scale <= 0:
        raise ConfigError("unit_scale must be positive")

    warnings = []
    if params.kappa_i[0] != 1.0:
        warnings.append(f"kappa_i1 = {params.kappa_i[0]:g}; configs are meant in units of kappa_i1 = 1 "
                        "(use unit_scale for physical units)")

    if command.kind is None:
        for key in ("axis", "range", "scale"):
            if key in cfg:
                raise ConfigError(f"{command.name} takes no sweep; drop '{key}'")
        return SweepConfig(command, params, None, None, fixed, unit_scale), warnings

    axis = cfg.get("axis", command.default_axis)
    if axis not in command.axes:
        raise ConfigError(f"axis {axis!r} not available for {command.name}; choose from {', '.join(command.axes)}")
    grid = _grid(cfg.get("range", command.default_range), cfg.get("scale", "linear"))
    if axis == "gamma" and grid[0] <= 0:
        raise ConfigError("gamma range must be positive")
    if axis == "coupling-ratio" and grid[0] < 0:
        raise ConfigError("coupling-ratio range must be non-negative")
    return SweepConfig(command, params, axis, grid, fixed, unit_scale), warnings


def _resolve_fixed(command, params, fixed):
    w1, w2, w3 = params.omega
    resonance = {"k": w1, "k0": w1, "k1": w1, "k2": w2}
    if command.name in ("down-g2",):
        resonance["k"] = w3
    if command.name == "feynman-check":
        # Off-resonant defaults so every propagator is exercised.
        resonance = {"k1": w1 + 0.1, "k2": w2 - 0.2}
    for key, value in fixed.items():
        if value is None and key in resonance:
            fixed[key] = resonance[key]
    if command.name == "feynman-check" and fixed["p1"] is None:
        fixed["p1"] = fixed["k1"] + 0.3
    if "gamma" in fixed and fixed["gamma"] <= 0:
        raise ConfigError("fixed.gamma must be positive")


def _grid(raw, scale):
    if not isinstance(raw, (list, tuple)) or len(raw) != 3:
        raise ConfigError("range must be [start, stop, count]")
    start = _finite("range start", raw[0])
    stop = _finite("range stop", raw[1])
    count = raw[2]
    if isinstance(count, bool) or not isinstance(count, int) and not (isinstance(count, float) and count.is_integer()):
        raise ConfigError(f"range count must be an integer, got {count!r}")
    count = int(count)
    if count < 2:
        raise ConfigError(f"range count must be >= 2, got {count}")
    if not start < stop:
        raise ConfigError(f"empty range: start {start:g} must be < stop {stop:g}")
    if scale == "linear":
        return np.linspace(start, stop, count)
    if scale == "log":
        if start <= 0:
            raise ConfigError("log-scale range needs start > 0")
        return np.geomspace(start, stop, count)
    raise ConfigError(f"scale must be 'linear' or 'log', got {scale!r}")


# -- evaluation -----------------------------------------------------------------

def _evaluate(job):
    """One sweep point -> (value, flagged). Module level so worker processes can pickle it."""
    name, params, fixed, axis, x = job
    inputs = dict(fixed)
    inputs[_AXIS_KEY[axis]] = x
    if name == "zeta" and axis == "k":
        inputs["k1"] = x
    if axis == "coupling-ratio":
        params = params.with_coupling_ratio(x)
    try:
        if name == "blockade-g2":
            value = blockade_g2(inputs["k"], inputs["tau"], params)
        elif name == "phase":
            value = nonlinear_phase(inputs["k"], inputs["tau"], params)
        elif name == "down-g2":
            value = down_conversion_g2(inputs["k"], inputs["tau"], params, inputs["alpha_sq"])
        elif name == "zeta":
            value = zeta(inputs["k1"], inputs["k2"], inputs["tau"], params)
        elif name == "wavepacket-g2":
            spec = WavepacketSpec.lorentzian(inputs["k0"], inputs["gamma"])
            value = wavepacket_g2(spec, inputs["tau"], params)
        elif name == "pair-rate":
            value = pair_rate(inputs["k"], params, inputs["alpha_sq"])
        else:
            raise ValueError(name)
    except DivergenceError as exc:
        numerator = exc.numerator
        return (float(np.real(numerator)) if numerator is not None else math.nan), True
    return float(np.real(value)), False


def run_sweep(config: SweepConfig, jobs=1):
    """Evaluate every grid point; returns a :class:`CorrelationTrace` in axis order."""
    command = config.command
    work = [(command.name, config.params, config.fixed, config.axis, float(x)) for x in config.grid]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_evaluate, work, chunksize=max(1, len(work) // (4 * jobs))))
    else:
        results = [_evaluate(w) for w in work]
    values = np.array([r[0] for r in results])
    flags = np.array([r[1] for r in results])
    return CorrelationTrace(config.grid, values, command.kind, config.params, flags)


# -- output -------------------------------------------------------------------

def _columns(config):
    return [_AXIS_KEY[config.axis], config.command.column, "flag"]


def _scaled(config, trace):
    s = config.unit_scale
    x = trace.abscissa * s ** _AXIS_DIMENSION[config.axis]
    y = trace.values * s if config.command.name == "pair-rate" else trace.values
    return x, y


def format_csv(config, trace):
    x, y = _scaled(config, trace)
    lines = [f"# photon-scatter v{__version__}", ",".join(_columns(config))]
    for xi, yi, fi in zip(x, y, trace.flags):
        lines.append(f"{xi:.17g},{yi:.17g},{int(fi)}")
    return "\n".join(lines) + "\n"


def format_json(config, trace):
    x, y = _scaled(config, trace)
    doc = {
        "version": f"photon-scatter v{__version__}",
        "command": config.command.name,
        "columns": _columns(config),
        "rows": [[float(xi), float(yi), int(fi)] for xi, yi, fi in zip(x, y, trace.flags)],
    }
    return json.dumps(doc, indent=1) + "\n"


def read_csv(path):
    """Load an emitted CSV back as ``(columns, data)``."""
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("# photon-scatter"):
            raise ValueError(f"{path}: not a photon-scatter CSV")
        columns = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return columns, data


# -- feynman-check ----------------------------------------------------------------

def feynman_check(config, out):
    """Print the diagram series next to the closed forms; return the worst relative error."""
    f = config.fixed
    params = config.params
    k1, k2, p1 = f["k1"], f["k2"], f["p1"]
    p2 = k1 + k2 - p1
    max_order = int(f["max_order"])
    worst = 0.0
    cases = [
        ("G3", series_g3(k1 + k2, k1, k2, params, max_order=max_order, tol=f["tol"]),
         complex(three_point_green(k1, k2, params))),
        ("G22", series_g22(p1, p2, k1, k2, params, max_order=max_order, tol=f["tol"]),
         complex(two_photon_kernel(p1, p2, k1, k2, params))),
    ]
    print(f"# photon-scatter v{__version__} feynman-check", file=out)
    print(f"# k1={k1:.17g} k2={k2:.17g} p1={p1:.17g} p2={p2:.17g}", file=out)
    for name, series, closed in cases:
        print(f"{name}: ratio |r| = {abs(series.ratio):.6e}", file=out)
        print("order,re_term,im_term,rel_err_partial", file=out)
        partial = 0j
        for n, term in enumerate(series.terms):
            partial += term
            print(f"{n},{term.real:.17g},{term.imag:.17g},{abs(partial - closed) / abs(closed):.3e}", file=out)
        rel = abs(series.total - closed) / abs(closed)
        worst = max(worst, rel)
        print(f"{name} closed form {closed.real:.17g}{closed.imag:+.17g}j", file=out)
        print(f"{name} |sum - closed| / |closed| = {rel:.3e} (tail bound {series.tail_bound:.3e})", file=out)
    return worst


# -- entry point -------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # Keep exit status 2 reserved for divergence flags.
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="photon-scatter",
                     description="Few-photon scattering observables of a waveguide-coupled chi(2) cavity.")
    parser.add_argument("command", choices=list(COMMANDS))
    parser.add_argument("--config", metavar="FILE", help="JSON config file")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key (dotted path, JSON value); repeatable")
    parser.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes for the sweep")
    parser.add_argument("--version", action="version", version=f"photon-scatter {__version__}")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        doc = None
        if args.config:
            try:
                with open(args.config) as fh:
                    doc = json.load(fh)
            except OSError as exc:
                raise ConfigError(f"cannot read config: {exc.strerror}: {args.config}") from None
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{args.config}: invalid JSON ({exc.msg}, line {exc.lineno})") from None
        config, warnings = parse_config(args.command, doc, args.overrides)
    except ConfigError as exc:
        print(f"photon-scatter: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    for message in warnings:
        print(f"photon-scatter: warning: {message}", file=sys.stderr)

    if config.command.name == "feynman-check":
        try:
            worst = feynman_check(config, sys.stdout)
        except ConvergenceError as exc:
            print(f"photon-scatter: error: {exc}", file=sys.stderr)
            return EXIT_ERROR
        return EXIT_OK if worst < FEYNMAN_RTOL else EXIT_ERROR

    trace = run_sweep(config, jobs=args.jobs)
    text = format_csv(config, trace) if args.format == "csv" else format_json(config, trace)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_DIVERGED if trace.diverged else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
