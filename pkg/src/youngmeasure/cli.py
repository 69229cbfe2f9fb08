"""Subcommand front end: parse flags into a RunConfig, run, write artifacts.

Exit codes: 0 success, 1 parse/validation failure, 2 numerical failure,
3 I/O failure.  Artifacts carry metadata headers (tool version, seed,
generator, tolerances) and never timestamps, so reruns with identical
flags reproduce files bitwise.
"""

from __future__ import annotations

import os

# YM_THREADS caps engine parallelism.  The knobs below are read by BLAS/
# OpenMP at import time, so this block must precede the numerical imports.
_cap = os.environ.get("YM_THREADS", "")
if _cap.isdigit() and int(_cap) > 0:
    for _var in (
        "OMP_NUM_THREADS",
        "OPENBLAS_NUM_THREADS",
        "MKL_NUM_THREADS",
        "NUMEXPR_NUM_THREADS",
        "VECLIB_MAXIMUM_THREADS",
    ):
        os.environ.setdefault(_var, _cap)

import argparse  # noqa: E402
import json  # noqa: E402
import sys  # noqa: E402
from dataclasses import dataclass  # noqa: E402
from pathlib import Path  # noqa: E402

from . import __version__  # noqa: E402
from .analytic import BUILTIN_NAMES, builtin_function  # noqa: E402
from .errors import InputError, NumericalError  # noqa: E402
from .exports import (  # noqa: E402
    density_csv,
    empirical_csv,
    estimate_payload,
    measure_payload,
    probability_payload,
    report_csv,
    validation_payload,
    write_json,
)
from .montecarlo import DEFAULT_SEED, GENERATOR_NAME  # noqa: E402
from .plots import emit_plot  # noqa: E402
from .service import handlers  # noqa: E402
from .specio import resolve_function, save_spec  # noqa: E402

COMMANDS = (
    "validate",
    "density",
    "atoms",
    "prob",
    "sample",
    "functional",
    "approx",
    "example",
    "serve",
)

DEFAULT_LEVELS = (1, 2, 3, 4, 5, 6, 7, 8)


@dataclass(frozen=True, slots=True)
class RunConfig:
    """One resolved invocation; every flag lands here before any work runs.

    ``seed=None`` means "use the documented default seed"
    (0x5EED_0000_0000_0001) so artifacts can always record the value
    actually used.
    """

    command: str
    input: str | None = None
    output: str | None = None
    grid: int = 4096
    samples: int = 1_000_000
    seed: int | None = None
    truncate: int = 64
    suite: str = "default"
    plot: bool = False
    beta: str = "s"
    weight: str | None = None
    psi: str | None = None
    intervals: tuple[tuple[float, float], ...] = ()
    levels: tuple[int, ...] = DEFAULT_LEVELS
    subdivisions: int = 4096
    cap: int | None = None
    samples_per_piece: int = 1000
    host: str = "127.0.0.1"
    port: int = 8000

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        positives = {
            "grid": (self.grid, 2),
            "samples": (self.samples, 1),
            "truncate": (self.truncate, 2),
            "subdivisions": (self.subdivisions, 2),
            "samples_per_piece": (self.samples_per_piece, 1),
            "port": (self.port, 1),
        }
        for name, (value, floor) in positives.items():
            if value < floor:
                raise InputError(f"{name} must be >= {floor}, got {value}")
        if self.cap is not None and self.cap < 2:
            raise InputError(f"cap must be >= 2, got {self.cap}")
        if any(L < 0 for L in self.levels):
            raise InputError("levels must be nonnegative")

    @property
    def resolved_seed(self) -> int:
        return DEFAULT_SEED if self.seed is None else self.seed


def _parse_levels(text: str) -> tuple[int, ...]:
    """Comma-separated levels with ``a..b`` ranges: ``1,4..6`` → (1,4,5,6)."""
    out: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = part.split("..", 1)
                out.extend(range(int(lo), int(hi) + 1))
            elif part:
                out.append(int(part))
    except ValueError as err:
        raise InputError(f"cannot parse levels {text!r}: {err}") from None
    if not out:
        raise InputError(f"no levels in {text!r}")
    return tuple(out)


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad flags; here 2 means a numerical
    failure, so usage problems are rethrown as input errors instead."""

    def error(self, message):
        raise InputError(message)


def build_parser() -> _Parser:
    parser = _Parser(
        prog="ym",
        description="Distributions of piecewise-defined functions: exact "
        "densities and atoms, Monte Carlo sampling, and convergence reports.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name: str, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        return p

    def function_flags(p, with_input=True):
        if with_input:
            p.add_argument(
                "--input",
                required=True,
                help=f"spec file path or builtin name ({', '.join(BUILTIN_NAMES)})",
            )
        p.add_argument(
            "--truncate",
            type=int,
            default=64,
            help="piece count for truncated builtins (default 64)",
        )

    p = add("validate", "check a spec: disjointness, coverage, images, inverses")
    function_flags(p)
    p.add_argument("--output", help="write the report JSON here (default: stdout)")
    p.add_argument("--samples-per-piece", type=int, default=1000, dest="samples_per_piece")

    p = add("density", "tabulate the distribution density on a grid (CSV)")
    function_flags(p)
    p.add_argument("--output", required=True, help="CSV path")
    p.add_argument("--grid", type=int, default=4096, help="grid size (default 4096)")
    p.add_argument("--plot", action="store_true", help="also write an SVG next to the CSV")

    p = add("atoms", "atomic distribution of a piecewise-constant function (JSON)")
    function_flags(p)
    p.add_argument("--output", help="JSON path (default: stdout)")

    p = add("prob", "probability that the function value lands in given intervals")
    function_flags(p)
    p.add_argument("--output", help="JSON path (default: stdout)")
    p.add_argument(
        "--interval",
        nargs=2,
        type=float,
        action="append",
        required=True,
        metavar=("A", "B"),
        dest="intervals",
        help="target interval [A, B]; repeatable",
    )

    p = add("sample", "draw f(U) samples; CSV plus KS report against a builtin reference")
    function_flags(p)
    p.add_argument("--output", required=True, help="CSV path")
    p.add_argument(
        "--samples", "--n", type=int, default=1_000_000, dest="samples",
        help="sample count (default 1000000)",
    )
    p.add_argument("--seed", type=int, default=None, help="default 0x5EED_0000_0000_0001")
    p.add_argument("--cap", type=int, default=None, help="thin the CSV to this many rows")
    p.add_argument("--plot", action="store_true", help="also write a histogram SVG")

    p = add("functional", "∫ψ(x,f(x))·w(x) dx by Monte Carlo and quadrature")
    function_flags(p)
    p.add_argument("--output", help="JSON path (default: stdout)")
    p.add_argument("--beta", default="s", help="probe β(s) (default: s)")
    p.add_argument("--weight", default=None, help="spatial weight w(x)")
    p.add_argument("--psi", default=None, help="joint integrand ψ(x, s); overrides β")
    p.add_argument(
        "--samples", "--n", type=int, default=1_000_000, dest="samples",
        help="Monte Carlo sample count (default 1000000)",
    )
    p.add_argument("--seed", type=int, default=None, help="default 0x5EED_0000_0000_0001")
    p.add_argument("--subdivisions", type=int, default=4096, help="quadrature nodes per piece")

    p = add("approx", "weak* gaps of the dyadic simple-function ladder (CSV)")
    function_flags(p)
    p.add_argument("--output", required=True, help="CSV path")
    p.add_argument(
        "--levels", default="1..8", help="levels, e.g. '1,2,4' or '2..10' (default 1..8)"
    )
    p.add_argument(
        "--suite",
        choices=("default", "monomial", "trig"),
        default="default",
        help="probe suite for the gap (default: default)",
    )

    p = add("example", "write a builtin's spec JSON and its density CSV")
    p.add_argument("name", choices=BUILTIN_NAMES, help="builtin to materialize")
    p.add_argument(
        "--truncate", "--n", type=int, default=64, dest="truncate",
        help="piece count for truncated builtins (default 64)",
    )
    p.add_argument("--grid", type=int, default=4096, help="grid size for the density CSV")
    p.add_argument("--output", help="spec JSON path (default: <name>.json)")

    p = add("serve", "run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = vars(args).copy()
    values.pop("func", None)
    if values.get("intervals"):
        values["intervals"] = tuple((a, b) for a, b in values["intervals"])
    if isinstance(values.get("levels"), str):
        values["levels"] = _parse_levels(values["levels"])
    if values["command"] == "example":
        values["input"] = values.pop("name")
    known = RunConfig.__dataclass_fields__
    return RunConfig(**{k: v for k, v in values.items() if k in known})


def _emit_json(payload: dict, path: str | None) -> None:
    if path is None:
        sys.stdout.write(json.dumps(payload, indent=2, allow_nan=False) + "\n")
    else:
        write_json(payload, path)
        print(f"wrote {path}")


def _resolve(config: RunConfig):
    if config.input is None:
        raise InputError(f"{config.command} needs --input")
    return resolve_function(config.input, config.truncate)


def _run_validate(config: RunConfig) -> int:
    f, _ = _resolve(config)
    report = handlers.validate(f, config.samples_per_piece)
    _emit_json(validation_payload(report), config.output)
    if not report.ok:
        print(f"validation failed: {report.summary()}", file=sys.stderr)
        return 1
    return 0


def _run_density(config: RunConfig) -> int:
    f, reference = _resolve(config)
    table, breakpoints = handlers.density(f, reference, config.grid)
    extra = {"input": config.input, "requested_grid": config.grid}
    density_csv(table, config.output, extra=extra)
    print(f"wrote {config.output}")
    if config.plot:
        svg = Path(config.output).with_suffix(".svg")
        emit_plot(table, svg, breakpoints=breakpoints)
        print(f"wrote {svg}")
    return 0


def _run_atoms(config: RunConfig) -> int:
    f, _ = _resolve(config)
    _emit_json(measure_payload(handlers.atoms(f)), config.output)
    return 0


def _run_prob(config: RunConfig) -> int:
    f, _ = _resolve(config)
    result = handlers.probability(f, list(config.intervals))
    _emit_json(
        probability_payload(result.value, result.tail_bound, config.intervals),
        config.output,
    )
    return 0


def _run_sample(config: RunConfig) -> int:
    f, reference = _resolve(config)
    e, ks = handlers.sample(f, config.samples, config.resolved_seed, reference)
    empirical_csv(e, config.output, cap=config.cap, extra={"input": config.input})
    print(f"wrote {config.output}")
    if ks is not None:
        ks_path = Path(config.output).with_suffix(".ks.json")
        write_json(
            {
                "statistic": ks.statistic,
                "threshold": ks.threshold,
                "n": ks.n,
                "seed": ks.seed,
                "generator": GENERATOR_NAME,
                "version": __version__,
            },
            ks_path,
        )
        print(f"wrote {ks_path}")
    if config.plot:
        svg = Path(config.output).with_suffix(".svg")
        emit_plot(e, svg, reference=reference)
        print(f"wrote {svg}")
    return 0


def _run_functional(config: RunConfig) -> int:
    f, _ = _resolve(config)
    mc, quad = handlers.functional(
        f,
        beta=config.beta,
        weight=config.weight,
        psi=config.psi,
        n=config.samples,
        seed=config.resolved_seed,
        subdivisions=config.subdivisions,
    )
    payload = {
        "monte_carlo": estimate_payload(mc),
        "quadrature": None if quad is None else estimate_payload(quad),
        "probe": {"beta": config.beta, "weight": config.weight, "psi": config.psi},
        "version": __version__,
    }
    _emit_json(payload, config.output)
    return 0


def _run_approx(config: RunConfig) -> int:
    f, reference = _resolve(config)
    rows, suite_desc, ref_type = handlers.approximate(
        f, list(config.levels), config.suite, reference
    )
    report_csv(
        rows,
        config.output,
        suite_description=suite_desc,
        reference_type=ref_type,
        extra={"input": config.input},
    )
    print(f"wrote {config.output}")
    return 0


def _run_example(config: RunConfig) -> int:
    name = config.input
    if name not in BUILTIN_NAMES:
        raise InputError(f"unknown builtin {name!r}; choose from {BUILTIN_NAMES}")
    f, reference = builtin_function(name, config.truncate)
    spec_path = Path(config.output) if config.output else Path(f"{name}.json")
    save_spec(f, spec_path)
    print(f"wrote {spec_path}")
    table, _ = handlers.density(f, reference, config.grid)
    csv_path = spec_path.with_name(spec_path.stem + "-reference.csv")
    density_csv(
        table, csv_path, extra={"builtin": name, "truncate": config.truncate}
    )
    print(f"wrote {csv_path}")
    return 0


def _run_serve(config: RunConfig) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=config.host, port=config.port)
    return 0


_RUNNERS = {
    "validate": _run_validate,
    "density": _run_density,
    "atoms": _run_atoms,
    "prob": _run_prob,
    "sample": _run_sample,
    "functional": _run_functional,
    "approx": _run_approx,
    "example": _run_example,
    "serve": _run_serve,
}


def run(config: RunConfig) -> int:
    """Dispatch one configured invocation; artifacts land on disk."""
    return _RUNNERS[config.command](config)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        config = config_from_args(parser.parse_args(argv))
        return run(config)
    except InputError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except NumericalError as err:
        print(f"numerical error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
