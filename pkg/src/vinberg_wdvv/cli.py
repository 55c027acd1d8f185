"""Command line entry point: ``verify``, ``scan`` and ``flat``.

Exit codes: 0 when every non-informational check passes, 1 when any check
fails, 2 on configuration or usage errors.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .cone import potential_spec
from .derivatives import chart_geometry
from .flats import cartan_flat, flat_chart
from .frobenius import (frobenius_compat_residual, pencil_residuals, pencil_terms, solve_unit,
                        structure_constants, unit_residual, wdvv_residual)
from .jordan import FAMILIES, make_algebra
from .suite import FORMATS, ConfigError, SuiteConfig, default_seed, emit, load_config, run_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _sign(text: str) -> float:
    val = float(text)
    if val not in (1.0, -1.0):
        raise argparse.ArgumentTypeError("sigma must be +1 or -1")
    return val


def _kappa(text: str) -> float:
    val = 0.5 if text.strip() in ("1/2", "0.5", ".5") else float(text)
    if val not in (1.0, 0.5):
        raise argparse.ArgumentTypeError("kappa must be 1 or 0.5")
    return val


def _add_run_options(p):
    p.add_argument("--seed", type=int, help="master seed (default: $VINBERG_WDVV_SEED or 42)")
    p.add_argument("--samples", type=int, help="samples per check")
    p.add_argument("--format", choices=FORMATS, help="report format (default text)")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--include-mc", action="store_true", help="also run Monte Carlo checks")
    p.add_argument("--sigma", type=_sign, help="sign convention of the product (+1 or -1)")
    p.add_argument("--kappa", type=_kappa, help="scale convention of the product (1 or 0.5)")
    p.add_argument("--workers", type=int, help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vinberg-wdvv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run the residual suite")
    v.add_argument("--config", help="key = value config file")
    v.add_argument("--families", nargs="+", help="e.g. SymR:3 HermC:2 Albert Spin:4 SymR:2+Spin:3")
    _add_run_options(v)

    s = sub.add_parser("scan", help="run the suite on every family up to a given rank")
    s.add_argument("--max-rank", type=int, required=True)
    _add_run_options(s)

    f = sub.add_parser("flat", help="inspect one point of the maximal flat")
    f.add_argument("--family", required=True, choices=FAMILIES)
    f.add_argument("--n", type=int, default=3)
    f.add_argument("--params", required=True, help="comma separated flat parameters")
    f.add_argument("--sigma", type=_sign, default=-1.0)
    f.add_argument("--kappa", type=_kappa, default=0.5)
    return parser


def scan_families(max_rank: int) -> list[str]:
    if max_rank < 1:
        raise ConfigError("max-rank must be >= 1")
    fams = [f"{fam}:{n}" for n in range(1, max_rank + 1) for fam in ("SymR", "HermC", "HermH")]
    if max_rank >= 2:
        fams += ["Spin:3", "Spin:4", "Spin:5"]
    if max_rank >= 3:
        fams.append("Albert")
    return fams


def _apply_overrides(cfg: SuiteConfig, args) -> SuiteConfig:
    if args.seed is not None:
        cfg.seed = args.seed
    if args.samples is not None:
        cfg.samples = args.samples
    if args.format is not None:
        cfg.output_format = args.format
    if args.out is not None:
        cfg.output_path = args.out
    if args.include_mc:
        cfg.include_mc = True
    if args.sigma is not None:
        cfg.sigma = args.sigma
    if args.kappa is not None:
        cfg.kappa = args.kappa
    if args.workers is not None:
        cfg.workers = args.workers
    return cfg


def _run(cfg: SuiteConfig) -> int:
    cfg.validate()
    report = run_suite(cfg)
    try:
        text = emit(report, cfg.output_format, cfg.output_path)
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.output_path in (None, "-"):
        sys.stdout.write(text)
    else:
        verdict = "PASS" if report.overall_pass else "FAIL"
        print(f"{verdict}: {len(report.checks)} checks, report written to {cfg.output_path}")
    return EXIT_OK if report.overall_pass else EXIT_FAIL


def _verify(args) -> int:
    cfg = load_config(args.config) if args.config else SuiteConfig(seed=default_seed())
    if args.families:
        cfg.families = list(args.families)
    return _run(_apply_overrides(cfg, args))


def _scan(args) -> int:
    cfg = SuiteConfig(families=scan_families(args.max_rank), seed=default_seed())
    return _run(_apply_overrides(cfg, args))


def _flat(args) -> int:
    try:
        J = make_algebra(args.family, args.n)
        params = np.array([float(t) for t in args.params.split(",") if t.strip()])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    F = cartan_flat(J)
    if params.shape != (F.dim,):
        raise ConfigError(f"{J.name} flat has dimension {F.dim}, got {params.size} parameters")
    spec = potential_spec(J)
    chart = flat_chart(F, params)
    geo = chart_geometry(spec, chart, 4)
    g, C = geo.metric.g, geo.C
    sc = structure_constants(g, C, args.sigma, args.kappa)
    e, _ = solve_unit(g, C)
    pc = pencil_terms(g, C, geo.Q, args.sigma, args.kappa)
    np.set_printoptions(precision=6, suppress=True, linewidth=100)
    print(f"{J.name}: {F.family_note}, flat dimension {F.dim}")
    print(f"point coordinates:\n{chart.base.coords}")
    print(f"chart directions:\n{chart.dirs}")
    print(f"potential: {geo.value:.12g}")
    print(f"metric g:\n{g}")
    print(f"C tensor (C[a] slices):\n{C}")
    print(f"unit field e: {e}")
    print("residuals:")
    print(f"  wdvv               {wdvv_residual(g, C):.3e}")
    print(f"  frobenius_compat   {frobenius_compat_residual(g, sc, C):.3e}")
    print(f"  unit               {unit_residual(g, C, e):.3e}")
    lams = (-1.0, 0.5, 1.0, 2.0)
    for lam, r in zip(lams, pencil_residuals(pc, lams)):
        print(f"  pencil lambda={lam:<4g} {r:.3e}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"verify": _verify, "scan": _scan, "flat": _flat}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
