"""Command line front end.

Subcommands map onto the library surface: verify runs registry checks and
writes one JSON report per check, sweep archives the comparability CSV,
hs-check restricts to the Hilbert-Schmidt identities, besov prints a single
norm estimate, list-checks enumerates the registry.  The verify/hs-check and
sweep paths also render matplotlib figures next to the delimited output; the
JSON and CSV files are the normative artifacts, figures are auxiliary.

Exit codes: 0 all checks passed, 1 at least one check failed its gate,
2 configuration error (bad JSON, unknown keys, invalid values), 3 internal
failure (a check raised instead of reporting, or an unexpected error).

Config files are strict JSON: unknown keys and duplicate keys are rejected
rather than ignored, so a typo cannot silently fall back to a default.
Complex numbers are written as [re, im] pairs.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from .blaschke import BlaschkeSpec, generate_zeros
from .boundary import BoundaryFunction, QuadratureControl
from .figures import render_suite_residuals, render_sweep_ratios
from .operators import SymbolSpec
from .reporting import write_report, write_sweep_csv
from .symbol_norms import besov_norm
from .verify import (ANCHORS, CHECKS, DEFAULT_SEED, comparability_sweep,
                     resolve_selection, run_suite)

_TOP_LEVEL_KEYS = ("zeros", "symbols", "quadrature", "pValues", "checks",
                   "seed", "outputDir")


@dataclass(frozen=True)
class RunConfig:
    """Resolved run configuration, duck-typed into the verification layer.

    quadrature stays None unless the config overrides it, so each registry
    check keeps its own grid policy.  zeros_family records the generator
    (kind, params) when zeros came from a named family; the sweep path needs
    it to regenerate at each size.
    """

    zeros: BlaschkeSpec
    symbols: tuple
    quadrature: QuadratureControl | None
    p_values: tuple
    checks: tuple
    seed: int
    output_dir: str
    zeros_family: tuple | None = None


def _reject_duplicates(pairs):
    obj = {}
    for key, value in pairs:
        if key in obj:
            raise ValueError(f"duplicate key {key!r} in config object")
        obj[key] = value
    return obj


def _as_complex(value, where: str) -> complex:
    if isinstance(value, bool):
        raise ValueError(f"{where} must be a number or [re, im] pair")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 \
            and all(isinstance(p, (int, float)) and not isinstance(p, bool)
                    for p in value):
        return complex(value[0], value[1])
    raise ValueError(f"{where} must be a number or [re, im] pair, "
                     f"got {value!r}")


def _parse_zeros(data):
    if isinstance(data, dict):
        extra = {k: v for k, v in data.items() if k not in ("kind", "count")}
        if "kind" not in data or "count" not in data:
            raise ValueError("zero generator spec needs 'kind' and 'count'")
        kind = data["kind"]
        count = data["count"]
        if not isinstance(count, int) or isinstance(count, bool):
            raise ValueError(f"zeros count must be an integer, got {count!r}")
        spec = generate_zeros(kind, count, **extra)
        return spec, (kind, extra)
    if isinstance(data, list):
        zs = []
        for i, entry in enumerate(data):
            z = _as_complex(entry, f"zeros[{i}]")
            if abs(z) >= 1.0:
                raise ValueError(f"zeros[{i}] has modulus {abs(z):.3e}, "
                                 "must lie inside the open unit disk")
            zs.append(z)
        if not zs:
            raise ValueError("zeros list must be nonempty")
        return BlaschkeSpec(tuple(zs)), None
    raise ValueError("zeros must be a [re, im] list or a generator spec")


def _parse_symbol(data, where: str) -> SymbolSpec:
    if not isinstance(data, dict) or "kind" not in data:
        raise ValueError(f"{where} must be an object with a 'kind'")
    kind = data["kind"]
    label = data.get("label")
    known = {"laurent": ("coefficients",), "monomial": ("degree",),
             "nodeValues": ("values",)}
    if kind not in known:
        raise ValueError(f"{where}: unknown symbol kind {kind!r}; expected "
                         "laurent, monomial, or nodeValues")
    extra = set(data) - {"kind", "label", *known[kind]}
    if extra:
        raise ValueError(f"{where}: unknown keys {sorted(extra)} for "
                         f"kind {kind!r}")
    if kind == "monomial":
        degree = data.get("degree")
        if not isinstance(degree, int) or isinstance(degree, bool):
            raise ValueError(f"{where}: monomial degree must be an integer")
        return SymbolSpec.monomial(degree)
    if kind == "laurent":
        table = data.get("coefficients")
        if not isinstance(table, dict) or not table:
            raise ValueError(f"{where}: laurent coefficients must be a "
                             "nonempty object of exponent -> value")
        coeffs = {}
        for key, value in table.items():
            try:
                exponent = int(key)
            except ValueError:
                raise ValueError(f"{where}: laurent exponent {key!r} is not "
                                 "an integer") from None
            coeffs[exponent] = _as_complex(
                value, f"{where}.coefficients[{key}]")
        return SymbolSpec.laurent(coeffs, label)
    values = data.get("values")
    if not isinstance(values, list) or not values:
        raise ValueError(f"{where}: nodeValues needs a nonempty values list")
    vals = [_as_complex(v, f"{where}.values[{i}]")
            for i, v in enumerate(values)]
    return SymbolSpec.node_values(vals, label)


def _parse_quadrature(data) -> QuadratureControl:
    if not isinstance(data, dict):
        raise ValueError("quadrature must be an object")
    extra = set(data) - {"initialM", "maxM", "relTol"}
    if extra:
        raise ValueError(f"unknown quadrature keys {sorted(extra)}")
    kwargs = {}
    if "initialM" in data:
        kwargs["initial_m"] = data["initialM"]
    if "maxM" in data:
        kwargs["max_m"] = data["maxM"]
    if "relTol" in data:
        kwargs["rel_tol"] = data["relTol"]
    return QuadratureControl(**kwargs)


def _parse_p_values(data) -> tuple:
    if not isinstance(data, list) or not data:
        raise ValueError("pValues must be a nonempty list")
    out = []
    for i, entry in enumerate(data):
        if entry == "inf":
            out.append(math.inf)
            continue
        if isinstance(entry, bool) or not isinstance(entry, (int, float)):
            raise ValueError(f"pValues[{i}] must be a positive number or "
                             f"\"inf\", got {entry!r}")
        if entry <= 0:
            raise ValueError(f"pValues[{i}] must be positive, got {entry}")
        out.append(float(entry))
    return tuple(out)


def parse_config(text: str) -> RunConfig:
    """Parse a strict-JSON config into a RunConfig with defaults filled in."""
    data = json.loads(text, object_pairs_hook=_reject_duplicates)
    if not isinstance(data, dict):
        raise ValueError("config must be a JSON object")
    unknown = set(data) - set(_TOP_LEVEL_KEYS)
    if unknown:
        raise ValueError(f"unknown config keys {sorted(unknown)}; expected "
                         f"a subset of {list(_TOP_LEVEL_KEYS)}")

    zeros_family = ("radialExponential", {})
    zeros = generate_zeros("radialExponential", 8)
    if "zeros" in data:
        zeros, zeros_family = _parse_zeros(data["zeros"])

    symbols = (SymbolSpec.monomial(1),)
    if "symbols" in data:
        raw = data["symbols"]
        if not isinstance(raw, list) or not raw:
            raise ValueError("symbols must be a nonempty list")
        symbols = tuple(_parse_symbol(s, f"symbols[{i}]")
                        for i, s in enumerate(raw))

    quadrature = None
    if "quadrature" in data:
        quadrature = _parse_quadrature(data["quadrature"])

    p_values = (1.0, 2.0, math.inf)
    if "pValues" in data:
        p_values = _parse_p_values(data["pValues"])

    checks = ("all",)
    if "checks" in data:
        raw = data["checks"]
        if not isinstance(raw, list) or not raw \
                or not all(isinstance(c, str) for c in raw):
            raise ValueError("checks must be a nonempty list of names")
        resolve_selection(raw)  # unknown names rejected here
        checks = tuple(raw)

    seed = DEFAULT_SEED
    if "seed" in data:
        raw = data["seed"]
        if not isinstance(raw, int) or isinstance(raw, bool):
            raise ValueError(f"seed must be an integer, got {raw!r}")
        seed = raw

    output_dir = "reports"
    if "outputDir" in data:
        raw = data["outputDir"]
        if not isinstance(raw, str) or not raw:
            raise ValueError("outputDir must be a nonempty string")
        output_dir = raw

    return RunConfig(zeros=zeros, symbols=symbols, quadrature=quadrature,
                     p_values=p_values, checks=checks, seed=seed,
                     output_dir=output_dir, zeros_family=zeros_family)


def _sizes_argument(text: str):
    try:
        sizes = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"sizes must be comma separated integers, got {text!r}") from None
    if not sizes or any(n < 1 for n in sizes):
        raise argparse.ArgumentTypeError("sizes must be positive integers")
    if len(set(sizes)) != len(sizes):
        raise argparse.ArgumentTypeError("sizes must be distinct")
    return sizes


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="strict JSON run configuration")
    common.add_argument("--out", metavar="DIR",
                        help="output directory (overrides config outputDir)")
    common.add_argument("--seed", type=int,
                        help="RNG seed (overrides config seed)")
    common.add_argument("--json", action="store_true",
                        help="stream results as compact JSON lines")

    parser = argparse.ArgumentParser(
        prog="modelspace-lab",
        description="Numerical checks for truncated Toeplitz and Hankel "
                    "operators on finite Blaschke model spaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", parents=[common],
                              help="run registry checks, write JSON reports "
                                   "and a residual figure")
    p_verify.add_argument("--suite", default=None,
                          help="comma separated check names, or 'all' "
                               "(default: config checks)")
    p_verify.set_defaults(handler=_cmd_verify)

    p_sweep = sub.add_parser("sweep", parents=[common],
                             help="comparability sweep over degrees, write "
                                  "CSV and a ratio figure")
    p_sweep.add_argument("--sizes", type=_sizes_argument, default=(2, 4, 8, 16),
                         help="comma separated degrees (default 2,4,8,16)")
    p_sweep.set_defaults(handler=_cmd_sweep)

    p_hs = sub.add_parser("hs-check", parents=[common],
                          help="run only the Hilbert-Schmidt identity checks")
    p_hs.set_defaults(handler=_cmd_hs_check)

    p_besov = sub.add_parser("besov", parents=[common],
                             help="Besov norm estimate for the first "
                                  "configured symbol")
    p_besov.add_argument("--p", type=float, default=2.0)
    p_besov.add_argument("--n", type=int, default=2,
                         help="derivative order, must exceed 1/p")
    p_besov.add_argument("--rings", type=int, default=256)
    p_besov.add_argument("--grid", type=int, default=512,
                         help="boundary samples used to read coefficients")
    p_besov.set_defaults(handler=_cmd_besov)

    p_list = sub.add_parser("list-checks", parents=[common],
                            help="print registry check names and anchors")
    p_list.set_defaults(handler=_cmd_list_checks)

    return parser


def _resolve_config(args) -> RunConfig:
    if args.config is not None:
        text = Path(args.config).read_text(encoding="utf-8")
    else:
        text = "{}"
    config = parse_config(text)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    if args.out is not None:
        config = replace(config, output_dir=args.out)
    return config


def _ensure_outdir(config: RunConfig) -> Path:
    outdir = Path(config.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    return outdir


def _run_reports(selection, args, config: RunConfig) -> int:
    reports = run_suite(selection, config)
    outdir = _ensure_outdir(config)
    for report in reports:
        write_report(report, outdir / f"{report.check}.json")
    render_suite_residuals(reports, outdir / "suite_residuals.png")
    if args.json:
        for report in reports:
            print(report.to_json(compact=True))
    else:
        for report in reports:
            status = "PASS" if report.passed else "FAIL"
            worst = max(report.residuals.values(), default=0.0)
            print(f"{status:4s} {report.check:24s} worst={worst:.3e} "
                  f"grid_M={report.grid_M}")
        passed = sum(r.passed for r in reports)
        print(f"{passed}/{len(reports)} checks passed; reports in {outdir}")
    if any("internal_error" in r.residuals for r in reports):
        return 3
    if any(not r.passed for r in reports):
        return 1
    return 0


def _cmd_verify(args, config: RunConfig) -> int:
    if args.suite is not None:
        names = [part.strip() for part in args.suite.split(",")
                 if part.strip()]
        try:
            resolve_selection(names)
        except ValueError as err:
            print(f"config error: {err}", file=sys.stderr)
            return 2
        selection = names
    else:
        selection = list(config.checks)
    return _run_reports(selection, args, config)


def _cmd_hs_check(args, config: RunConfig) -> int:
    return _run_reports(["theorem8", "theorem9", "remark4_dirichlet"],
                        args, config)


def _cmd_sweep(args, config: RunConfig) -> int:
    if config.zeros_family is not None:
        kind, params = config.zeros_family

        def generator(n):
            return generate_zeros(kind, n, **params)

        sizes = args.sizes
    else:
        # explicit zero list: single size, the sweep reduces to one spec
        def generator(n):
            return config.zeros

        sizes = (len(config.zeros.zeros),)
    result = comparability_sweep(generator, config.symbols[0],
                                 config.p_values, sizes, config)
    outdir = _ensure_outdir(config)
    write_sweep_csv(result.rows, outdir / "sweep.csv")
    render_sweep_ratios(result, outdir / "sweep_ratios.png")
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if args.json:
        keys = ("N", "p", "schatten_norm", "node_lp_norm", "ratio",
                "min_delta", "grid_M")
        for row in result.rows:
            print(json.dumps(dict(zip(keys, row)), sort_keys=True,
                             separators=(",", ":")))
    else:
        sizes_text = ",".join(str(n) for n in sizes)
        print(f"sweep over N={sizes_text} ({len(result.rows)} rows) "
              f"written to {outdir / 'sweep.csv'}")
    return 0


def _cmd_besov(args, config: RunConfig) -> int:
    symbol = config.symbols[0]
    f = BoundaryFunction(symbol.sample(config.zeros, args.grid))
    estimate = besov_norm(f, args.p, n=args.n, rings=args.rings)
    payload = dataclasses.asdict(estimate)
    payload["symbol"] = symbol.label
    if args.json:
        print(json.dumps(payload, sort_keys=True, separators=(",", ":")))
    else:
        print(json.dumps(payload, sort_keys=True, indent=2))
    return 0


def _cmd_list_checks(args, config: RunConfig) -> int:
    del config
    if args.json:
        for name in CHECKS:
            print(json.dumps({"check": name, "anchor": ANCHORS[name]},
                             sort_keys=True, separators=(",", ":")))
    else:
        for name in CHECKS:
            print(f"{name}: {ANCHORS[name]}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _resolve_config(args)
    except (OSError, ValueError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    try:
        return args.handler(args, config)
    except Exception as err:  # anything past config parsing is internal
        print(f"internal failure: {type(err).__name__}: {err}",
              file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
