"""
Command-line harness: moments, bang-bang solves, synthesis, simulation and
the error-bound table, all written as CSV (or JSON) with fixed formatting so
that repeated runs are byte-identical.

Usage::

    python -m heatreach bounds-table
    python -m heatreach examples --target example1 --N 3 --output out/
    python -m heatreach simulate --control u.json --x-max 4 --points 9

Exit codes: 0 success, 1 usage or I/O error, 2 numerical non-convergence
(partial output is still written).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import heat_solver as hs
from .controls import StepControl
from .errors import HeatReachError, NoConvergence
from .hermite_basis import HermiteExpansion, expand_target
from .moment_problem import moments_of_target, solve_bang_bang
from .numerics import Grid, l2_norm_halfline
from .reach_synth import TABLE_ROWS, epsilon_bounds, synthesize

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
COMMANDS = ("moments", "solve-moments", "synthesize", "simulate", "bounds-table", "examples")
TARGETS = ("example1", "example2", "example3", "custom-expansion-file")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    target: str = "example1"
    T: float = 1.0
    L: float = 1.0
    N: int | None = None
    P: int | None = None
    l: list = field(default_factory=list)
    output_path: str | None = None
    x_min: float = 0.0
    x_max: float = 8.0
    points: int = 161
    format: str = "csv"
    control: str | None = None
    expansion: str | None = None
    initial: str = "zero"
    extra_rows: list = field(default_factory=list)

    def __post_init__(self):
        if not (self.T > 0 and self.L > 0):
            raise UsageError("T and L must be positive")
        if self.points < 2 or not self.x_max > self.x_min:
            raise UsageError("grid needs x_max > x_min and at least 2 points")

    @property
    def grid(self):
        return Grid.linspace(self.x_min, self.x_max, self.points)


# -- formatting -----------------------------------------------------------------

def fmt(value):
    """17 significant digits, plain ``.`` decimal."""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".17g")


def render_csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def render_json(header, rows, extra=None):
    data = {"columns": list(header), "rows": [[_json_value(v) for v in row] for row in rows]}
    if extra:
        data.update(extra)
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _json_value(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    v = float(v)
    return v if math.isfinite(v) else str(v)


def emit(config, header, rows, name=None, extra=None):
    """Write a table to ``output_path`` (a file, or a directory when ``name`` is given) or stdout."""
    text = render_json(header, rows, extra) if config.format == "json" else render_csv(header, rows)
    if config.output_path is None:
        sys.stdout.write(text)
        return None
    path = Path(config.output_path)
    if name is not None:
        path.mkdir(parents=True, exist_ok=True)
        path = path / f"{name}.{config.format}"
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def control_rows(u: StepControl):
    return [(a, b, c) for a, b, c in zip(u.breakpoints[:-1], u.breakpoints[1:], u.levels)]


CONTROL_HEADER = ("t_start", "t_end", "level")


# -- targets ----------------------------------------------------------------------

def load_expansion(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
        return HermiteExpansion(float(data["T"]), [float(w) for w in data["omegas"]])
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"cannot read expansion file {path}: {exc}") from exc


def target_state(config):
    if config.target == "example1":
        return hs.example1(config.T)
    if config.target == "example2":
        return hs.example2(config.T)
    if config.target == "example3":
        return hs.example3(config.T)
    if config.expansion is None:
        raise UsageError("--expansion is required for target custom-expansion-file")
    return hs.ExpansionState(load_expansion(config.expansion))


def target_expansion(config, N):
    if config.target == "example3":
        return HermiteExpansion(config.T, hs.example3(config.T).omegas(N))
    if config.target == "custom-expansion-file":
        exp = load_expansion(config.expansion)
        if exp.N < N:
            raise UsageError(f"expansion file holds {exp.N + 1} coefficients, N={N} requested")
        return HermiteExpansion(exp.T, exp.coeffs[: N + 1])
    return expand_target(target_state(config), N, config.T)


def resolutions(config, N):
    if not config.l:
        raise UsageError("--l is required")
    if len(config.l) == 1:
        return [config.l[0]] * (N + 1)
    if len(config.l) != N + 1:
        raise UsageError(f"--l needs 1 or {N + 1} values")
    return list(config.l)


def _require_N(config):
    if config.N is None:
        raise UsageError("--N is required")
    if config.N < 0:
        raise UsageError("N must be non-negative")
    return config.N


def _bang_bang_order(config):
    """``P`` from ``--P`` or from an odd ``--N = 2P - 1``."""
    if config.P is not None:
        if config.P < 1:
            raise UsageError("P must be at least 1")
        if config.N is not None and config.N != 2 * config.P - 1:
            raise UsageError("N must equal 2P - 1")
        return config.P
    N = _require_N(config)
    if N % 2 == 0:
        raise UsageError("N = 2P - 1 must be odd for the bang-bang moment system")
    return (N + 1) // 2


def norms(W_a, W_b):
    """``(x-side, sigma-side, relative gap)`` for the L2 distance of two states."""
    nx = hs.error_norm(W_a, W_b, side="x")
    ns = hs.error_norm(W_a, W_b, side="sigma")
    rel = abs(nx - ns) / max(abs(ns), np.finfo(float).tiny)
    return nx, ns, rel


# -- commands ---------------------------------------------------------------------

def cmd_moments(config):
    N = _require_N(config)
    mv = moments_of_target(target_state(config), N, config.T, config.L)
    rows = [(n, w, b) for n, (w, b) in enumerate(zip(mv.omegas, mv.trivial_bounds()))]
    emit(config, ("n", "omega", "trivial_bound"), rows)
    return EXIT_OK


def _solve(config):
    P = _bang_bang_order(config)
    W = target_state(config)
    # solve for W / L with a {0, 1} control, then scale back
    mv = moments_of_target(W, 2 * P - 1, config.T, 1.0)
    scaled = type(mv)(mv.T, 1.0, mv.omegas / config.L)
    try:
        return solve_bang_bang(scaled, P), W, True
    except NoConvergence as exc:
        return exc.best, W, False


def cmd_solve_moments(config):
    sol, _, ok = _solve(config)
    header = ("index", "switching_point", "moment_residual")
    n = sol.nu.size
    rows = [(i + 1, sol.nu[i], sol.residuals[i] * config.L) for i in range(n)]
    emit(config, header, rows)
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_synthesize(config):
    N = _require_N(config)
    expansion = target_expansion(config, N)
    plan, u = synthesize(expansion, resolutions(config, N))
    if config.format == "json":
        text = json.dumps(u.to_dict(), indent=2, sort_keys=True) + "\n"
        if config.output_path is None:
            sys.stdout.write(text)
        else:
            Path(config.output_path).write_text(text)
    else:
        emit(config, CONTROL_HEADER, control_rows(u))
    return EXIT_OK


def _initial_state(config):
    if config.initial == "zero":
        return None
    cfg = RunConfig("simulate", target=config.initial, T=config.T)
    return target_state(cfg)


def cmd_simulate(config):
    if config.control is None:
        raise UsageError("--control is required")
    try:
        u = StepControl.from_json(config.control)
    except OSError as exc:
        raise UsageError(f"cannot read control file: {exc}") from exc
    W0 = _initial_state(config)
    state = hs.ControlledState(u, W0)
    x = config.grid.points
    W = hs.end_state_x(u, W0, x)
    emit(config, ("x", "W"), list(zip(x, W)))
    # the boundary trace of the end state should equal u(T)
    trace = float(hs.end_state_x(u, W0, 0.0))
    nx = l2_norm_halfline(state)
    ns = l2_norm_halfline(lambda s: state.fourier(s))
    rel = abs(nx - ns) / max(ns, np.finfo(float).tiny)
    print(
        f"# boundary_trace={fmt(trace)} u(T)={fmt(u(u.T))} "
        f"norm_x={fmt(nx)} norm_sigma={fmt(ns)} plancherel_rel={fmt(rel)}",
        file=sys.stderr,
    )
    return EXIT_OK


def parse_extra_row(text):
    try:
        parts = dict(item.split("=") for item in text.split(","))
        return int(parts["N"]), int(parts["l"])
    except (ValueError, KeyError) as exc:
        raise UsageError(f"--extra-row expects N=<int>,l=<int>, got {text!r}") from exc


def bounds_rows(T, rows, extra_rows=()):
    """Table rows ``(N, l, eps1, eps2, eps, measured, source)``."""
    out = []
    W = hs.example3(T)
    V = hs.SpectralProfile.of_state(W)
    for (N, l), source in [(r, "table") for r in rows] + [(r, "extrapolated") for r in extra_rows]:
        eps1, eps2 = epsilon_bounds(N, l, T)
        plan, _ = synthesize(HermiteExpansion(T, W.omegas(N)), l)
        # the closed-form image avoids the l^N cancellation of summing huge step levels
        measured = hs.error_norm(V, plan.profile())
        out.append((N, l, eps1, eps2, eps1 + eps2, measured, source))
    return out


def cmd_bounds_table(config):
    rows = bounds_rows(config.T, TABLE_ROWS, config.extra_rows)
    emit(config, ("N", "l", "eps1", "eps2", "eps", "measured", "source"), rows)
    return EXIT_OK


def cmd_examples(config):
    """Control profile, curves and summary behind each worked example."""
    out = config.output_path or "heatreach_output"
    config = RunConfig(**{**config.__dict__, "output_path": out})
    x = config.grid.points
    status = EXIT_OK
    if config.target == "example3":
        N = _require_N(config)
        W_T = hs.example3(config.T)
        plan, u = synthesize(HermiteExpansion(config.T, W_T.omegas(N)), resolutions(config, N))
        label = f"l={','.join(str(l) for l in plan.l_per_p)}"
    elif config.target in ("example1", "example2"):
        sol, W_T, ok = _solve(config)
        status = EXIT_OK if ok else EXIT_NUMERIC
        u = sol.boundary_control() * config.L
        N = 2 * sol.P - 1
        label = f"P={sol.P} residual={fmt(sol.residual_inf * config.L)}"
    else:
        raise UsageError("examples runs example1, example2 or example3")
    W_N = hs.ControlledState(u)
    wt, wn = W_T(x), W_N(x)
    emit(config, CONTROL_HEADER, control_rows(u), name="control")
    emit(config, ("x", "W_T", "W_N", "diff"), list(zip(x, wt, wn, wt - wn)), name="curves")
    nx, ns, rel = norms(W_T, W_N)
    emit(config, ("target", "N", "norm_x", "norm_sigma", "plancherel_rel"), [(config.target, N, nx, ns, rel)], name="summary")
    print(f"{config.target} N={N} {label} ||W_T - W_N|| = {fmt(nx)} (sigma side {fmt(ns)}, rel {fmt(rel)})")
    return status


HANDLERS = {
    "moments": cmd_moments,
    "solve-moments": cmd_solve_moments,
    "synthesize": cmd_synthesize,
    "simulate": cmd_simulate,
    "bounds-table": cmd_bounds_table,
    "examples": cmd_examples,
}


# -- argument parsing -----------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text):
    try:
        return [int(v) for v in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}") from exc


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--target", choices=TARGETS, default="example1")
    common.add_argument("--T", type=float, default=1.0, help="time horizon")
    common.add_argument("--L", type=float, default=1.0, help="control bound")
    common.add_argument("--N", type=int, help="truncation index")
    common.add_argument("--P", type=int, help="number of 'on' intervals of the bang-bang control")
    common.add_argument("--l", type=_int_list, default=[], help="step resolution, one value or one per index")
    common.add_argument("--output", dest="output_path", help="output file (or directory for examples)")
    common.add_argument("--x-min", type=float, default=0.0)
    common.add_argument("--x-max", type=float, default=8.0)
    common.add_argument("--points", type=int, default=161)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--control", help="JSON control file {T, breakpoints, levels}")
    common.add_argument("--expansion", help="JSON expansion file {T, omegas}")
    common.add_argument("--initial", choices=("zero", "example1", "example2", "example3"), default="zero")
    common.add_argument("--extra-row", dest="extra_rows", action="append", default=[], metavar="N=..,l=..")

    parser = _Parser(prog="heatreach", description="Boundary reachability for the heat equation on a half-line.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def parse_config(argv):
    args = vars(build_parser().parse_args(argv))
    args["extra_rows"] = [parse_extra_row(r) for r in args["extra_rows"]]
    return RunConfig(**args)


def main(argv=None):
    try:
        config = parse_config(sys.argv[1:] if argv is None else argv)
        return HANDLERS[config.command](config)
    except (UsageError, ValueError, OSError) as exc:
        # InvalidControl, DegreeTooLarge and SupportExceedsHorizon are ValueErrors
        print(f"heatreach: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HeatReachError as exc:
        print(f"heatreach: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
