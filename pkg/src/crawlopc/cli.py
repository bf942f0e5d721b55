"""Command-line front end: config parsing, the four experiment commands, CSV/SVG artifacts.

Exit codes: 0 success, 2 configuration problem, 3 solver failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, field, fields

import numpy as np

from .dfhb import hb_solve, hb_speed_curve, optimal_speed
from .errors import ConfigError, CrawlerError
from .model import DimensionlessGroups, FrictionParams
from .opc import OpcConfig, hill_climb
from .sim import SinusoidForcing, Trajectory, frequency_sweep, integrate
from .svg import polyline_chart

__all__ = [
    "ModelSection",
    "SimSection",
    "OpcSection",
    "OutputSection",
    "RunConfig",
    "parse_config",
    "serialize_config",
    "run_command",
    "main",
]

DEFAULT_OMEGA_GRID = tuple(0.05 * k for k in range(6, 41))  # 0.3 .. 2.0


@dataclass(frozen=True)
class ModelSection:
    pi_f: float = 1.0
    pi_sigma: float = 1.0
    zeta: float = 0.2236
    n_f: float = 1.2
    eps_f: float = 0.05


@dataclass(frozen=True)
class SimSection:
    steps_per_period: int = 1024
    settle_cycles: int = 30
    measure_cycles: int = 10


@dataclass(frozen=True)
class OpcSection:
    alpha: float = 3.3
    beta: float = 0.05
    T: float = 2.0 * math.pi
    epsilon: float = 0.01
    grid_n: int = 300
    max_iters: int = 20000
    tol_grad: float = 1e-4
    tol_cost: float = 1e-8


@dataclass(frozen=True)
class OutputSection:
    directory: str = "out"
    emit_svg: bool = False


@dataclass(frozen=True)
class RunConfig:
    model: ModelSection = field(default_factory=ModelSection)
    sim: SimSection = field(default_factory=SimSection)
    opc: OpcSection = field(default_factory=OpcSection)
    output: OutputSection = field(default_factory=OutputSection)

    def groups(self) -> DimensionlessGroups:
        return DimensionlessGroups(
            pi_f=self.model.pi_f,
            pi_sigma=self.model.pi_sigma,
            zeta=self.model.zeta,
            friction=FrictionParams.make(self.model.n_f, self.model.eps_f),
        )

    def opc_config(self) -> OpcConfig:
        o = self.opc
        return OpcConfig(
            alpha=o.alpha,
            beta=o.beta,
            horizon=o.T,
            epsilon=o.epsilon,
            grid_n=o.grid_n,
            max_iters=o.max_iters,
            tol_grad=o.tol_grad,
            tol_cost=o.tol_cost,
        )


# Per-key admissible ranges, checked while parsing so errors carry line numbers.
_RANGES = {
    ("model", "pi_f"): (lambda v: v > 0, "must be positive"),
    ("model", "pi_sigma"): (lambda v: v >= 0, "must be non-negative"),
    ("model", "zeta"): (lambda v: v >= 0, "must be non-negative"),
    ("model", "n_f"): (lambda v: v > 1, "must exceed 1"),
    ("model", "eps_f"): (lambda v: v > 0, "must be positive"),
    ("sim", "steps_per_period"): (lambda v: v >= 16, "must be at least 16"),
    ("sim", "settle_cycles"): (lambda v: v >= 10, "must be at least 10"),
    ("sim", "measure_cycles"): (lambda v: v >= 1, "must be at least 1"),
    ("opc", "alpha"): (lambda v: v > 0, "must be positive"),
    ("opc", "beta"): (lambda v: v > 0, "must be positive"),
    ("opc", "T"): (lambda v: v > 0, "must be positive"),
    ("opc", "epsilon"): (lambda v: v > 0, "must be positive"),
    ("opc", "grid_n"): (lambda v: v >= 64, "must be at least 64"),
    ("opc", "max_iters"): (lambda v: v >= 1, "must be at least 1"),
    ("opc", "tol_grad"): (lambda v: v > 0, "must be positive"),
    ("opc", "tol_cost"): (lambda v: v > 0, "must be positive"),
    ("output", "directory"): (lambda v: len(v) > 0, "must be non-empty"),
}

_SECTIONS = {
    "model": ModelSection,
    "sim": SimSection,
    "opc": OpcSection,
    "output": OutputSection,
}


def _parse_value(raw: str, kind: type, path: str, line: int, key: str):
    raw = raw.strip()
    try:
        if kind is bool:
            low = raw.lower()
            if low in ("true", "1", "yes", "on"):
                return True
            if low in ("false", "0", "no", "off"):
                return False
            raise ValueError(raw)
        return kind(raw)
    except ValueError:
        raise ConfigError(
            f"cannot parse value {raw!r} for key '{key}' as {kind.__name__}", path, line
        ) from None


def parse_config(path: str) -> RunConfig:
    """Read a sectioned key=value file; unspecified keys keep their defaults.

    Sections are [model], [sim], [opc], [output]. Blank lines and '#' comments
    are ignored. Unknown sections or keys, malformed lines, unparsable or
    out-of-range values are rejected with the offending line number.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}", path) from exc
    return _parse_config_text(text, path)


def _parse_config_text(text: str, path: str) -> RunConfig:
    values: dict[str, dict[str, object]] = {name: {} for name in _SECTIONS}
    section: str | None = None
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in _SECTIONS:
                raise ConfigError(f"unknown section '{name}'", path, lineno)
            section = name
            continue
        if "=" not in line:
            raise ConfigError(f"malformed line (expected key = value): {rawline.strip()!r}", path, lineno)
        if section is None:
            raise ConfigError("key outside of any [section]", path, lineno)
        key, raw = (part.strip() for part in line.split("=", 1))
        section_fields = {f.name: f.type for f in fields(_SECTIONS[section])}
        if key not in section_fields:
            raise ConfigError(f"unknown key '{key}' in section [{section}]", path, lineno)
        kind = {"float": float, "int": int, "bool": bool, "str": str}[section_fields[key]]
        val = _parse_value(raw, kind, path, lineno, key)
        check = _RANGES.get((section, key))
        if check is not None and not check[0](val):
            raise ConfigError(f"value {val!r} for key '{key}' {check[1]}", path, lineno)
        values[section][key] = val
    return RunConfig(
        model=ModelSection(**values["model"]),
        sim=SimSection(**values["sim"]),
        opc=OpcSection(**values["opc"]),
        output=OutputSection(**values["output"]),
    )


def serialize_config(cfg: RunConfig) -> str:
    """Canonical text form; parsing it reproduces the config exactly."""

    def fmt(v) -> str:
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, float):
            return repr(v)
        return str(v)

    out = []
    for name, section in (
        ("model", cfg.model),
        ("sim", cfg.sim),
        ("opc", cfg.opc),
        ("output", cfg.output),
    ):
        out.append(f"[{name}]")
        for f in fields(section):
            out.append(f"{f.name} = {fmt(getattr(section, f.name))}")
        out.append("")
    return "\n".join(out)


def _load_config(value: str | None) -> RunConfig:
    if value is None or (value == "default" and not os.path.exists(value)):
        return RunConfig()
    return parse_config(value)


# ---------------------------------------------------------------------------
# artifact emission


def _fmt_num(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".15g")


def _csv_text(header: list[str], rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt_num(v) for v in row))
    return "\n".join(lines) + "\n"


class _OutputSet:
    """Atomic batch of output files: all land, or any partial results are removed."""

    def __init__(self, directory: str):
        self.directory = directory
        self.pending: list[tuple[str, str]] = []
        self.written: list[str] = []

    def add(self, name: str, text: str) -> None:
        self.pending.append((name, text))

    def commit(self) -> list[str]:
        os.makedirs(self.directory, exist_ok=True)
        try:
            for name, text in self.pending:
                target = os.path.join(self.directory, name)
                tmp = target + ".tmp"
                with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
                    fh.write(text)
                os.replace(tmp, target)
                self.written.append(target)
        except BaseException:
            self.discard()
            raise
        return self.written

    def discard(self) -> None:
        for target in self.written:
            try:
                os.remove(target)
            except OSError:
                pass
        self.written.clear()


def _trajectory_rows(traj: Trajectory):
    power = traj.forcing * (traj.z3 - traj.z4)
    for i in range(traj.t_grid.size):
        yield (
            traj.t_grid[i],
            traj.z1[i],
            traj.z2[i],
            traj.z3[i],
            traj.z4[i],
            traj.forcing[i],
            power[i],
        )


_TRAJECTORY_HEADER = ["t", "z1", "z2", "z3", "z4", "f", "power"]


def _positions_svg(traj: Trajectory, title: str) -> str:
    head = 0.5 * (traj.z2 + traj.z1)
    tail = 0.5 * (traj.z2 - traj.z1)
    return polyline_chart(
        traj.t_grid,
        [head, tail],
        ["head x1", "tail x2"],
        title,
        "t",
        "position",
    )


# ---------------------------------------------------------------------------
# commands


def _cmd_simulate(cfg: RunConfig, args) -> int:
    omega = args.omega if args.omega is not None else 1.0
    if omega <= 0:
        raise ConfigError("--omega must be positive")
    cycles = args.cycles if args.cycles is not None else 10
    if cycles < 1:
        raise ConfigError("--cycles must be at least 1")
    g = cfg.groups()
    period = 2.0 * math.pi / omega
    traj = integrate(
        np.zeros(4),
        SinusoidForcing(1.0, omega),
        g,
        cycles * period,
        cycles * cfg.sim.steps_per_period,
    )
    out = _OutputSet(args.out or cfg.output.directory)
    out.add("trajectory.csv", _csv_text(_TRAJECTORY_HEADER, _trajectory_rows(traj)))
    if args.svg or cfg.output.emit_svg:
        out.add("positions.svg", _positions_svg(traj, f"head/tail positions, omega = {omega:g}"))
    for name in out.commit():
        print(f"wrote {name}")
    return 0


def _cmd_sweep(cfg: RunConfig, args) -> int:
    if args.omegas:
        try:
            grid = [float(tok) for tok in args.omegas.split(",") if tok.strip()]
        except ValueError as exc:
            raise ConfigError(f"cannot parse --omegas: {exc}") from None
        if not grid or any(w <= 0 for w in grid):
            raise ConfigError("--omegas must be a comma list of positive frequencies")
    else:
        grid = list(DEFAULT_OMEGA_GRID)
    measure = args.cycles if args.cycles is not None else cfg.sim.measure_cycles
    if measure < 1:
        raise ConfigError("--cycles must be at least 1")
    g = cfg.groups()
    sim_curve = frequency_sweep(
        g,
        1.0,
        grid,
        settle_cycles=cfg.sim.settle_cycles,
        measure_cycles=measure,
        steps_per_period=cfg.sim.steps_per_period,
    )
    hb_curve = hb_speed_curve(g, g.friction.delta, grid)
    rows = [(w, v_sim, v_hb) for (w, v_sim), (_, v_hb) in zip(sim_curve, hb_curve)]
    out = _OutputSet(args.out or cfg.output.directory)
    out.add("sweep.csv", _csv_text(["omega", "v_sim", "v_hb"], rows))
    if args.svg or cfg.output.emit_svg:
        out.add(
            "sweep.svg",
            polyline_chart(
                [r[0] for r in rows],
                [[r[1] for r in rows], [r[2] for r in rows]],
                ["simulated", "harmonic balance"],
                "average CoM speed vs forcing frequency",
                "omega",
                "v_com",
            ),
        )
    for name in out.commit():
        print(f"wrote {name}")
    best = max(rows, key=lambda r: r[1])
    print(f"simulated peak: omega = {best[0]:.6g}, v = {best[1]:.6g}")
    return 0


def _cmd_hb(cfg: RunConfig, args) -> int:
    omega = args.omega if args.omega is not None else 1.0
    if omega <= 0:
        raise ConfigError("--omega must be positive")
    g = cfg.groups()
    delta = g.friction.delta
    sol = hb_solve(g, delta, omega)
    v_star = optimal_speed(g, delta)
    print(f"harmonic balance at omega = {omega:.6g} (delta = {delta:.6g})")
    print(f"  strain amplitude A = {sol.A:.6g}")
    print(f"  forcing phase phi  = {sol.phi:.6g} rad")
    print(f"  speed bias a       = {sol.a:.6g}")
    print(f"  v_bar              = {sol.v_bar:.6g}")
    print(f"  v_tilde            = {sol.v_tilde:.6g}")
    print(f"  theta1, theta2     = {sol.theta1:.6g}, {sol.theta2:.6g}")
    print(f"optimal frequency omega* = 1: v_bar_com* = {v_star:.6g}")
    return 0


def _cmd_opc(cfg: RunConfig, args) -> int:
    g = cfg.groups()
    ocfg = cfg.opc_config()
    # Resonant warm start: whole sinusoid cycles at the frequency nearest resonance.
    m = max(1, round(ocfg.horizon / (2.0 * math.pi)))
    f0 = SinusoidForcing(1.0, 2.0 * math.pi * m / ocfg.horizon)
    result = hill_climb(g, ocfg, f0, n_steps=cfg.sim.steps_per_period)

    out = _OutputSet(args.out or cfg.output.directory)
    out.add(
        "opc_progress.csv",
        _csv_text(
            ["iter", "J", "grad_norm", "residual"],
            ((r.iteration, r.cost, r.grad_sup, r.residual) for r in result.progress),
        ),
    )
    node_t = np.arange(ocfg.grid_n + 1) * (ocfg.horizon / ocfg.grid_n)
    f_star = np.append(result.forcing.values, result.forcing.values[0])
    out.add("opc_forcing.csv", _csv_text(["t", "f"], zip(node_t, f_star)))
    traj = result.state.trajectory
    out.add("opc_trajectory.csv", _csv_text(_TRAJECTORY_HEADER, _trajectory_rows(traj)))
    lam = result.costate.lambdas
    out.add(
        "opc_costate.csv",
        _csv_text(
            ["t", "lambda1", "lambda2", "lambda3", "lambda4"],
            (
                (result.costate.t_grid[i], lam[i, 0], lam[i, 1], lam[i, 2], lam[i, 3])
                for i in range(result.costate.t_grid.size)
            ),
        ),
    )
    if args.svg or cfg.output.emit_svg:
        f_init = f0.eval(node_t)
        out.add(
            "opc_forcing.svg",
            polyline_chart(
                node_t,
                [f_init, f_star],
                ["initial f0", "optimized f*"],
                "actuation waveforms",
                "t",
                "f",
            ),
        )
        out.add("opc_positions.svg", _positions_svg(traj, "optimal gait: head/tail positions"))
        out.add(
            "opc_costate.svg",
            polyline_chart(
                result.costate.t_grid,
                [lam[:, 0], lam[:, 1], lam[:, 2], lam[:, 3]],
                ["lambda1", "lambda2", "lambda3", "lambda4"],
                "periodic co-states",
                "t",
                "lambda",
            ),
        )
    for name in out.commit():
        print(f"wrote {name}")
    print(
        f"J: {result.cost_history[0]:.6g} -> {result.cost_history[-1]:.6g} "
        f"(best {max(result.cost_history):.6g}) in {result.iterations} iterations; "
        f"converged = {result.converged}"
    )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crawl-opc",
        description="Two-segment soft crawler: simulation, resonance analysis, gait optimization.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, omega=False, cycles=False, files=True):
        p.add_argument(
            "--config",
            default=None,
            help="config file path ('default' or omitted: built-in case-study defaults)",
        )
        if omega:
            p.add_argument("--omega", type=float, default=None, help="forcing frequency")
        if cycles:
            p.add_argument("--cycles", type=int, default=None, help="number of periods")
        if files:
            p.add_argument("--out", default=None, help="output directory override")
            p.add_argument("--svg", action="store_true", help="also emit SVG charts")

    p_sim = sub.add_parser("simulate", help="integrate the crawler under sinusoidal forcing")
    common(p_sim, omega=True, cycles=True)

    p_sweep = sub.add_parser("sweep", help="steady-state speed across forcing frequencies")
    common(p_sweep, cycles=True)
    p_sweep.add_argument("--omegas", default=None, help="comma list of frequencies (default 0.3..2.0 step 0.05)")

    p_hb = sub.add_parser("hb", help="harmonic-balance prediction at one frequency")
    common(p_hb, omega=True, files=False)

    p_opc = sub.add_parser("opc", help="hill-climb the optimal periodic gait")
    common(p_opc)

    return parser


_COMMANDS = {
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "hb": _cmd_hb,
    "opc": _cmd_opc,
}


def run_command(argv=None) -> int:
    """Parse arguments, run one command, return the process exit code."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    try:
        return _COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except CrawlerError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run_command())
