"""Batch driver: configuration, suite execution and report emission."""

from __future__ import annotations

import configparser
import csv
import io
import json
import os
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .checks import REGISTRY, CheckContext, run_check
from .frobenius import ResidualReport
from .jordan import JordanAlgebra, parse_family

SEED_ENV = "VINBERG_WDVV_SEED"

DEFAULT_FAMILIES = (
    "SymR:2", "SymR:3", "HermC:2", "HermC:3", "HermH:2", "HermH:3",
    "Albert", "Spin:3", "Spin:4", "Spin:5",
)
FORMATS = ("json", "csv", "text")


class ConfigError(ValueError):
    """Invalid suite configuration; reported before any computation."""


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 42
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}") from exc


@dataclass
class SuiteConfig:
    families: list[str] = field(default_factory=lambda: list(DEFAULT_FAMILIES))
    samples: int = 20
    seed: int = 42
    tolerances: dict[str, float] = field(default_factory=dict)
    family_samples: dict[str, int] = field(default_factory=dict)
    output_format: str = "text"
    output_path: str | None = None
    sigma: float = -1.0
    kappa: float = 0.5
    include_mc: bool = False
    checks: list[str] | None = None
    workers: int = 1

    def validate(self) -> list[JordanAlgebra]:
        if not self.families:
            raise ConfigError("no families configured")
        if self.samples < 1:
            raise ConfigError("samples must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        for name, tol in self.tolerances.items():
            if name not in REGISTRY:
                raise ConfigError(f"unknown check in tolerances: {name!r}")
            if not tol >= 0:
                raise ConfigError(f"tolerance for {name} must be non-negative")
        for name in self.checks or ():
            if name not in REGISTRY:
                raise ConfigError(f"unknown check {name!r}")
        if self.output_format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if self.sigma not in (1.0, -1.0):
            raise ConfigError("sigma must be +1 or -1")
        if self.kappa not in (1.0, 0.5):
            raise ConfigError("kappa must be 1 or 0.5")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        algebras = []
        for fam in self.families:
            try:
                algebras.append(parse_family(fam))
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"bad family {fam!r}: {exc}") from exc
        for fam, n in self.family_samples.items():
            if n < 1:
                raise ConfigError(f"samples for {fam} must be >= 1")
        return algebras

    def tolerance(self, check: str) -> float:
        return self.tolerances.get(check, REGISTRY[check].tolerance)

    def to_dict(self) -> dict:
        return {
            "families": list(self.families),
            "samples": self.samples,
            "seed": self.seed,
            "tolerances": {k: self.tolerance(k) for k in sorted(REGISTRY)},
            "family_samples": dict(sorted(self.family_samples.items())),
            "format": self.output_format,
            "sigma": self.sigma,
            "kappa": self.kappa,
            "include_mc": self.include_mc,
            "checks": self.checks,
        }


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def load_config(path) -> SuiteConfig:
    """Read a ``key = value`` file with ``[suite]``, ``[tolerances]`` and ``[family NAME]`` sections."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    cfg = SuiteConfig(seed=default_seed())
    try:
        if parser.has_section("suite"):
            s = parser["suite"]
            for key in s:
                val = s[key]
                if key == "families":
                    cfg.families = [f.strip() for f in val.split(",") if f.strip()]
                elif key == "samples":
                    cfg.samples = int(val)
                elif key == "seed":
                    cfg.seed = int(val)
                elif key == "format":
                    cfg.output_format = val.strip()
                elif key == "out":
                    cfg.output_path = val.strip() or None
                elif key == "sigma":
                    cfg.sigma = float(val)
                elif key == "kappa":
                    cfg.kappa = float(val)
                elif key == "include_mc":
                    cfg.include_mc = _parse_bool(val)
                elif key == "workers":
                    cfg.workers = int(val)
                elif key == "checks":
                    cfg.checks = [c.strip() for c in val.split(",") if c.strip()]
                else:
                    raise ConfigError(f"unknown key {key!r} in [suite]")
        if parser.has_section("tolerances"):
            for key, val in parser["tolerances"].items():
                cfg.tolerances[key] = float(val)
        for section in parser.sections():
            if not section.startswith("family"):
                if section not in ("suite", "tolerances"):
                    raise ConfigError(f"unknown section [{section}]")
                continue
            fam = section[len("family"):].strip()
            if not fam:
                raise ConfigError("family sections are written [family NAME]")
            if fam not in cfg.families:
                cfg.families.append(fam)
            for key, val in parser[section].items():
                if key != "samples":
                    raise ConfigError(f"unknown key {key!r} in [{section}]")
                cfg.family_samples[fam] = int(val)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    return cfg


# -- execution ---------------------------------------------------------------------------------


@dataclass
class SuiteReport:
    config: dict
    checks: list[ResidualReport]
    timings: dict[str, float]
    version: str = __version__

    @property
    def overall_pass(self) -> bool:
        return all(c.passed for c in self.checks if not c.informational)

    @property
    def failures(self) -> list[ResidualReport]:
        return [c for c in self.checks if not c.passed and not c.informational]

    def body(self) -> dict:
        """Everything except wall-clock timings (deterministic under a fixed seed)."""
        return {
            "version": self.version,
            "config": self.config,
            "overall_pass": self.overall_pass,
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_dict(self) -> dict:
        d = self.body()
        d["timings"] = dict(self.timings)
        return d


def task_rng(seed: int, family: str, check: str) -> np.random.Generator:
    """Independent stream per (family, check), derived from the master seed."""
    key = zlib.crc32(f"{family}|{check}".encode())
    return np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFF, seed >> 32, key]))


def planned_checks(cfg: SuiteConfig, J: JordanAlgebra) -> list[str]:
    names = cfg.checks or list(REGISTRY)
    out = []
    for name in names:
        spec = REGISTRY[name]
        if spec.monte_carlo and not cfg.include_mc:
            continue
        if spec.applies(J):
            out.append(name)
    return out


def _run_task(args) -> tuple[ResidualReport, float]:
    family, check, samples, tol, seed, sigma, kappa = args
    J = parse_family(family)
    ctx = CheckContext(task_rng(seed, family, check), samples, tol, sigma, kappa)
    spec = REGISTRY[check]
    t0 = time.perf_counter()
    try:
        rep = run_check(check, J, ctx)
    except Exception as exc:  # collected, never aborts the suite
        rep = ResidualReport(check, J.name, spec.chart_kind, 0, float("nan"), float("nan"), tol,
                             False, f"error: {type(exc).__name__}: {exc}", spec.bound,
                             spec.informational)
    return rep, time.perf_counter() - t0


def run_suite(cfg: SuiteConfig) -> SuiteReport:
    algebras = cfg.validate()
    tasks = []
    for fam, J in zip(cfg.families, algebras):
        samples = cfg.family_samples.get(fam, cfg.samples)
        for name in planned_checks(cfg, J):
            tasks.append((fam, name, samples, cfg.tolerance(name), cfg.seed, cfg.sigma, cfg.kappa))
    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_task, tasks))
    else:
        results = [_run_task(t) for t in tasks]
    checks = [r for r, _ in results]
    timings = {f"{t[0]}|{t[1]}": dt for t, (_, dt) in zip(tasks, results)}
    return SuiteReport(cfg.to_dict(), checks, timings)


# -- emission -------------------------------------------------------------------------------------

CSV_FIELDS = ("family", "check", "chart_kind", "samples", "max_residual", "mean_residual",
              "tolerance", "bound", "passed", "informational")


def render(report: SuiteReport, fmt: str, include_timings: bool = True) -> str:
    if fmt == "json":
        data = report.to_dict() if include_timings else report.body()
        return json.dumps(data, indent=2, sort_keys=True, default=_json_default) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for c in report.checks:
            d = c.to_dict()
            writer.writerow([repr(d[k]) if isinstance(d[k], float) else d[k] for k in CSV_FIELDS])
        return buf.getvalue()
    if fmt == "text":
        return _text_table(report)
    raise ValueError(f"format must be one of {FORMATS}")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _text_table(report: SuiteReport) -> str:
    rows = [("family", "check", "chart", "n", "max", "mean", "tol", "status")]
    for c in report.checks:
        op = "<" if c.bound == "upper" else ">"
        status = "pass" if c.passed else "FAIL"
        if c.informational:
            status = f"info-{status.lower()}"
        rows.append((c.family, c.check, c.chart_kind, str(c.samples), f"{c.max_residual:.3e}",
                     f"{c.mean_residual:.3e}", f"{op}{c.tolerance:.0e}", status))
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    verdict = "PASS" if report.overall_pass else f"FAIL ({len(report.failures)} failing checks)"
    lines.append("")
    lines.append(f"overall: {verdict}  version {report.version}")
    return "\n".join(lines) + "\n"


def emit(report: SuiteReport, fmt: str, path=None) -> str:
    """Render the report and write it to ``path`` (``None`` or ``-`` returns the text only)."""
    text = render(report, fmt)
    if path not in (None, "-"):
        Path(path).write_text(text)
    return text


def report_from_dict(data: dict) -> SuiteReport:
    checks = [ResidualReport(**c) for c in data.get("checks", [])]
    return SuiteReport(data.get("config", {}), checks, data.get("timings", {}), data.get("version", __version__))
