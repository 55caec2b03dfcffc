"""Command-line front end.

Every subcommand writes its results under the output directory (``--out``,
else ``$FRACHEAT_OUTPUT_DIR``, else the working directory) and echoes the
fully resolved configuration into each file, so a run can be replayed with
``--config <output file>``.

Settings come from three layers, later ones winning: built-in defaults, an
INI file (``--config``), command-line flags. INI sections only group keys::

    [grid]
    n = 1
    N = 256
    L = 6.283185307179586

    [solver]
    alpha = 1
    T = 0.5

Exit status: 0 success, 1 a numerical validation failed, 2 usage or
precondition error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, oracle, regimes
from .fields import FieldSyntaxError, ensemble, parse_field
from .grid import GridSpec, SpatialField, forward_transform, lp_norm
from .semigroup import decay_exponent_fit, kernel
from .smoothing import SmoothingExperiment, smoothing_study
from .solver import BlowUp, PicardDivergence, SolverConfig, march, solve, stability_experiment
from .spaces import (
    SpaceParams,
    ThermicParams,
    dyadic_system,
    minimal_order,
    space_norm,
    split_norm,
    thermic_norm,
)

__all__ = ["run", "main", "OUTPUT_ENV"]

OUTPUT_ENV = "FRACHEAT_OUTPUT_DIR"
SCHEMA = 1
COLE_HOPF_TOL = 1e-4


class UsageError(Exception):
    pass


class ValidationFailure(Exception):
    pass


# ---------------------------------------------------------------- parsing


def number(text) -> float:
    """Float from ``1.5``, ``5/4`` or ``inf``."""
    if isinstance(text, (int, float)):
        return float(text)
    t = str(text).strip().lower()
    if t in ("inf", "infinity"):
        return math.inf
    try:
        return float(Fraction(t))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def integer(text) -> int:
    try:
        return int(str(text).strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def boolean(text) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def rational(text) -> str:
    """Keep exact text for the regime classifier after checking it parses."""
    t = str(text).strip()
    if t.lower() in ("inf", "infinity"):
        return "inf"
    try:
        Fraction(t)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}") from None
    return t


def number_list(text) -> list:
    return [number(x) for x in str(text).split(",") if x.strip()]


# option name -> (type, default, help); shared by flags and INI keys
GRID = {
    "n": (integer, 1, "space dimension"),
    "N": (integer, 256, "grid points per axis"),
    "L": (number, 2 * math.pi, "box length"),
}
SPACE = {
    "A": (str, "B", "B (Besov) or F (Triebel-Lizorkin)"),
    "s": (number, 1.0, "smoothness"),
    "p": (number, 2.0, "integrability"),
    "q": (number, 2.0, "summability"),
}
COMMANDS = {
    "kernel": {
        **GRID,
        "alpha": (number, 0.75, "fractional order"),
        "sigma": (number, 0.0, "extra derivative order"),
        "window": (number_list, None, "fit window lo,hi (default 0.04L,0.2L)"),
    },
    "norm": {
        **GRID,
        **SPACE,
        "field": (str, "sin(x)", "field descriptor"),
        "alpha": (number, 1.0, "semigroup order for thermic norms"),
        "k": (integer, None, "time-derivative order (default: smallest admissible)"),
    },
    "smoothing": {
        **GRID,
        **SPACE,
        "alpha": (number, 1.0, "fractional order"),
        "d": (number, 1.0, "smoothing gain"),
        "size": (integer, 50, "ensemble size"),
        "seed": (integer, 20240601, "ensemble seed"),
        "rtol": (number, 0.25, "stability tolerance"),
    },
    "solve": {
        **GRID,
        **SPACE,
        "u0": (str, "0.1*sin(x)", "initial datum descriptor"),
        "alpha": (number, 1.0, "fractional order"),
        "T": (number, 0.5, "horizon"),
        "M": (integer, 128, "time steps"),
        "mode": (str, "picard", "picard or march"),
        "a": (number, None, "time weight exponent"),
        "v": (number, None, "time integrability"),
        "d": (number, None, "smoothing gain in the proof"),
        "s0": (number, None, "initial smoothness (default s)"),
        "tol": (number, 1e-10, "Picard tolerance"),
        "max_iter": (integer, 100, "Picard iteration cap"),
        "dealias": (boolean, True, "two-thirds dealiasing"),
        "snapshots": (integer, 5, "number of stored time slices"),
        "seed": (integer, 0, "seed echoed for reproducibility"),
    },
    "stability": {
        **GRID,
        **SPACE,
        "u0": (str, "0.1*sin(x)", "base initial datum"),
        "perturbation": (str, "cos(2*x)", "perturbation shape"),
        "deltas": (number_list, [1e-3, 1e-4], "perturbation amplitudes"),
        "alpha": (number, 0.75, "fractional order"),
        "T": (number, 0.5, "horizon"),
        "M": (integer, 128, "time steps"),
        "mode": (str, "picard", "picard or march"),
        "seed": (integer, 0, "seed echoed for reproducibility"),
    },
    "regimes": {
        "n": (integer, 2, "space dimension"),
        "alpha": (rational, "3/4", "fractional order (exact)"),
        "p": (rational, "2", "integrability (exact, or inf)"),
        "q": (rational, "2", "summability (exact, or inf)"),
        "s0": (rational, None, "initial smoothness; omit for the L_p classification"),
        "s": (rational, None, "solution smoothness"),
        "inv_v": (rational, None, "1/v"),
        "a": (rational, None, "time weight"),
        "d": (rational, None, "smoothing gain"),
    },
    "validate": {
        "N": (integer, 32, "grid size for transform checks"),
        "tol": (number, 1e-10, "transform tolerance"),
    },
}

_ALL_KEYS = {key for spec in COMMANDS.values() for key in spec}


def _flag(key: str) -> str:
    return "--" + key.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracheat", description="Fractional heat semigroup toolkit")
    parser.add_argument("--version", action="version", version=f"fracheat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, options in COMMANDS.items():
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="INI file or a previous output file to replay")
        sp.add_argument("--out", help=f"output directory (default ${OUTPUT_ENV} or .)")
        for key, (kind, default, text) in options.items():
            shown = "" if default is None else f" [default {default}]"
            sp.add_argument(_flag(key), dest=key, type=kind, default=None, help=text + shown)
    return parser


def _read_config(path: str, command: str) -> dict:
    """Raw strings from an INI file, or the config echo of a previous output."""
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"--config: no such file {path}")
    text = p.read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            echo = json.loads(text)["config"]
        except (json.JSONDecodeError, KeyError, TypeError):
            raise UsageError(f"--config: {path} has no config echo") from None
        return _echo_to_raw(echo, command)
    if stripped.startswith("#"):
        for line in text.splitlines():
            if line.startswith("# config "):
                return _echo_to_raw(json.loads(line[len("# config "):]), command)
        raise UsageError(f"--config: {path} has no config echo")
    parser = configparser.ConfigParser()
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise UsageError(f"--config: {exc}") from None
    raw = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            key = key.replace("-", "_")
            if key not in _ALL_KEYS:
                raise UsageError(f"--config: unknown key {key!r} in [{section}]")
            if key in COMMANDS[command]:
                raw[key] = value
    return raw


def _echo_to_raw(echo: dict, command: str) -> dict:
    if echo.get("command") != command:
        raise UsageError(f"--config: file was written by {echo.get('command')!r}, not {command!r}")
    raw = {}
    for key, value in echo.get("settings", {}).items():
        if key in COMMANDS[command] and value is not None:
            raw[key] = ",".join(map(str, value)) if isinstance(value, list) else str(value)
    return raw


def resolve_settings(ns: argparse.Namespace) -> dict:
    options = COMMANDS[ns.command]
    raw = _read_config(ns.config, ns.command) if ns.config else {}
    out = {}
    for key, (kind, default, _) in options.items():
        flag = getattr(ns, key)
        if flag is not None:
            out[key] = flag
        elif key in raw:
            try:
                out[key] = kind(raw[key])
            except argparse.ArgumentTypeError as exc:
                raise UsageError(f"{_flag(key)} (from config): {exc}") from None
        else:
            out[key] = default
    return out


# ---------------------------------------------------------------- output


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, Fraction):
        return str(x)
    return x


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


class Output:
    def __init__(self, directory: Path, command: str, settings: dict):
        self.directory = directory
        self.echo = {"command": command, "settings": _jsonable(settings), "version": __version__}
        self.written: list[Path] = []

    def json(self, name: str, payload: dict) -> Path:
        doc = {"schema": SCHEMA, "config": self.echo, **_jsonable(payload)}
        path = self.directory / name
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        self.written.append(path)
        return path

    def csv(self, name: str, header: list, rows) -> Path:
        buf = io.StringIO()
        buf.write(f"# schema {SCHEMA}\n")
        buf.write("# config " + json.dumps(self.echo, sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
        path = self.directory / name
        path.write_text(buf.getvalue())
        self.written.append(path)
        return path


# ---------------------------------------------------------------- commands


def _grid(S) -> GridSpec:
    return GridSpec(S["n"], S["N"], S["L"])


def _space(S) -> SpaceParams:
    return SpaceParams(S["A"], S["s"], S["p"], S["q"])


def cmd_kernel(S, out: Output):
    spec = _grid(S)
    window = S["window"] or [0.04 * spec.L, 0.2 * spec.L]
    if len(window) != 2:
        raise UsageError("--window needs two numbers lo,hi")
    ker = kernel(S["alpha"], S["sigma"], spec)
    fit = decay_exponent_fit(ker, tuple(window))
    coords = spec.coords()
    header = [f"x{i + 1}" for i in range(spec.n)] + ["value"]
    flat = [c.ravel() for c in coords] + [ker.samples.values.real.ravel()]
    out.csv("kernel.csv", header, zip(*flat))
    target = -(spec.n + 2 * S["alpha"]) if S["sigma"] == 0 else -(spec.n + S["sigma"])
    out.json("kernel_fit.json", {"fit": fit, "target_slope": target})
    return 0


def cmd_norm(S, out: Output):
    spec = _grid(S)
    P = _space(S)
    f = parse_field(S["field"], spec)
    D = dyadic_system(spec)
    result = {"Lp": lp_norm(f, P.p), "dyadic": space_norm(f, P, D)}
    if P.s > 0:
        H = dyadic_system(spec, "homogeneous")
        k = S["k"] if S["k"] is not None else minimal_order(P, S["alpha"], spec.n)
        T = ThermicParams.for_grid(spec, S["alpha"], k)
        T.check(spec, P)
        result["split_Lp"] = split_norm(f, P, H, "Lp")
        result["split_phi0"] = split_norm(f, P, H, "phi0")
        result["thermic_Lp"] = thermic_norm(f, P, T, "Lp")
        result["thermic_phi0"] = thermic_norm(f, P, T, "phi0")
        result["thermic_order"] = k
    out.json("norm.json", {"norms": result})
    return 0


def cmd_smoothing(S, out: Output):
    spec = _grid(S)
    E = SmoothingExperiment(S["alpha"], S["d"], _space(S), seed=S["seed"], size=S["size"])
    res = smoothing_study(E, spec, rtol=S["rtol"])
    rep = res.pop("report")
    rows = [(r["field"], r["sup_ratio"], r["t_at_sup"]) for r in rep.as_rows()]
    out.csv("smoothing.csv", ["field", "sup_ratio", "t_at_sup"], rows)
    out.json("smoothing.json", {"summary": res})
    return 0 if res["stable"] else 1


def _solver_config(S, n: int) -> SolverConfig:
    C = SolverConfig(
        alpha=S["alpha"], T=S["T"], M=S["M"], mode=S["mode"], s=S["s"], p=S["p"], q=S["q"], A=S["A"],
        a=S.get("a"), v=S.get("v"), d=S.get("d"), s0=S.get("s0"),
        tol=S.get("tol", 1e-10), max_iter=S.get("max_iter", 100), dealias=S.get("dealias", True),
        check_regime=n >= 2,
    )
    return C.resolve(n)


def cmd_solve(S, out: Output):
    spec = _grid(S)
    u0 = parse_field(S["u0"], spec)
    C = _solver_config(S, spec.n)
    if S["snapshots"] < 1:
        raise UsageError("--snapshots must be positive")
    failure = None
    report = None
    try:
        tr, report = solve(u0, C)
    except PicardDivergence as exc:
        failure, report, tr = str(exc), exc.report, None
    except BlowUp as exc:
        failure, tr = str(exc), None
    payload = {
        "resolved_solver": {k: getattr(C, k) for k in ("alpha", "T", "M", "mode", "s", "p", "q", "A", "a", "v", "d")},
        "picard": None if report is None else report.to_json(),
        "failure": failure,
    }
    status = 0 if failure is None else 1
    if tr is not None:
        picks = np.unique(np.linspace(0, len(tr.times) - 1, S["snapshots"]).round().astype(int))
        coords = [c.ravel() for c in spec.coords()]
        header = ["t"] + [f"x{i + 1}" for i in range(spec.n)] + ["u"]

        def rows():
            for i in picks:
                vals = tr.fields[i].values.real.ravel()
                for j in range(vals.size):
                    yield [tr.times[i]] + [c[j] for c in coords] + [vals[j]]

        out.csv("solve.csv", header, rows())
        if spec.n == 1 and S["alpha"] == 1:
            exact = oracle.cole_hopf(u0, tr.times[-1])
            err = lp_norm(tr.fields[-1] - exact, 2) / lp_norm(exact, 2)
            ok = bool(err < COLE_HOPF_TOL)
            payload["cole_hopf"] = {"relative_l2_error": err, "tolerance": COLE_HOPF_TOL, "passed": ok}
            if not ok:
                status = 1
    out.json("solve.json", payload)
    return status


def cmd_stability(S, out: Output):
    spec = _grid(S)
    u0 = parse_field(S["u0"], spec)
    shape = parse_field(S["perturbation"], spec)
    C = _solver_config(S, spec.n)
    if not S["deltas"]:
        raise UsageError("--deltas needs at least one value")
    rows = []
    for delta in S["deltas"]:
        try:
            rep = stability_experiment(u0, u0 + shape * delta, C)
        except (PicardDivergence, BlowUp) as exc:
            raise ValidationFailure(f"delta = {delta}: {exc}") from None
        rows.extend((delta, t, dv) for t, dv in zip(rep.times, rep.differences))
    out.csv("stability.csv", ["delta", "t", "difference"], rows)
    return 0


def cmd_regimes(S, out: Output):
    if S["s0"] is None:
        res = regimes.lp_regime(S["n"], S["alpha"], S["p"])
        out.json("regimes.json", {"kind": "Lp", "result": res.to_json()})
        return 0
    R = regimes.RegimeInput.make(S["n"], S["alpha"], S["p"], S["q"], S["s0"])
    res = regimes.solution_space_ranges(R, s=S["s"], inv_v=S["inv_v"], a=S["a"], d=S["d"])
    out.json("regimes.json", {"kind": "Besov", "result": res.to_json()})
    return 0


def cmd_validate(S, out: Output):
    checks = {}
    rng = np.random.default_rng(0)
    N = S["N"]
    for n in (1, 2):
        spec = GridSpec(n, N, 2 * math.pi)
        f = SpatialField(spec, rng.normal(size=spec.shape) + 1j * rng.normal(size=spec.shape))
        fast = forward_transform(f).coeffs
        slow = oracle.dft_direct(f).coeffs
        err = float(np.max(np.abs(fast - slow)) / np.max(np.abs(slow)))
        checks[f"dft_n{n}"] = {"error": err, "tolerance": S["tol"], "passed": err <= S["tol"]}
        energy_x = lp_norm(f, 2)
        energy_xi = math.sqrt(float(np.sum(np.abs(fast) ** 2)) * spec.dxi**n)
        gap = abs(energy_x - energy_xi) / energy_x
        checks[f"parseval_n{n}"] = {"error": gap, "tolerance": S["tol"], "passed": gap <= S["tol"]}
    spec = GridSpec(1, 4096, 200.0)
    x = spec.coords()[0]
    inner = np.abs(x) <= 0.3 * spec.L
    for alpha, exact in ((1.0, oracle.gauss_kernel(x)), (0.5, oracle.poisson_kernel_periodic(x, spec.L))):
        ker = kernel(alpha, 0.0, spec).samples.values.real
        err = float(np.max(np.abs(ker[inner] - exact[inner])))
        checks[f"kernel_alpha_{alpha:g}"] = {"error": err, "tolerance": 1e-6, "passed": err <= 1e-6}
    spec = GridSpec(1, 128, 2 * math.pi)
    u0 = parse_field("0.1*sin(x)", spec)
    C = SolverConfig(alpha=1.0, T=0.25, M=64, mode="march", check_regime=False).resolve(1)
    tr = march(u0, C)
    exact = oracle.cole_hopf(u0, tr.times[-1])
    err = lp_norm(tr.fields[-1] - exact, 2) / lp_norm(exact, 2)
    checks["cole_hopf"] = {"error": err, "tolerance": COLE_HOPF_TOL, "passed": bool(err < COLE_HOPF_TOL)}
    passed = all(c["passed"] for c in checks.values())
    out.json("validate.json", {"checks": checks, "passed": passed})
    return 0 if passed else 1


HANDLERS = {
    "kernel": cmd_kernel,
    "norm": cmd_norm,
    "smoothing": cmd_smoothing,
    "solve": cmd_solve,
    "stability": cmd_stability,
    "regimes": cmd_regimes,
    "validate": cmd_validate,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    """Run one subcommand; returns the exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        settings = resolve_settings(ns)
        directory = Path(ns.out or os.environ.get(OUTPUT_ENV) or ".")
        directory.mkdir(parents=True, exist_ok=True)
        out = Output(directory, ns.command, settings)
        status = HANDLERS[ns.command](settings, out)
    except (UsageError, FieldSyntaxError, ValueError, TypeError) as exc:
        print(f"fracheat {ns.command}: error: {exc}", file=stderr)
        return 2
    except ValidationFailure as exc:
        print(f"fracheat {ns.command}: validation failed: {exc}", file=stderr)
        return 1
    for path in out.written:
        print(path, file=stdout)
    return status


def main():
    sys.exit(run())
