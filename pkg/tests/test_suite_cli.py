from __future__ import annotations

import csv
import io
import json

import pytest

from vinberg_wdvv.checks import REGISTRY
from vinberg_wdvv.cli import main, scan_families
from vinberg_wdvv.suite import (ConfigError, SuiteConfig, SuiteReport, emit, load_config, render,
                                report_from_dict, run_suite)

SMALL = dict(families=["SymR:2", "Spin:3"], samples=3)


@pytest.fixture(scope="module")
def small_report():
    return run_suite(SuiteConfig(**SMALL))


def test_small_suite_passes(small_report):
    assert small_report.overall_pass
    assert {c.family for c in small_report.checks} == {"SymR(2)", "Spin(3)"}
    assert any(c.informational for c in small_report.checks)


def test_zero_tolerance_fails_only_that_check():
    rep = run_suite(SuiteConfig(**SMALL, tolerances={"wdvv_flat": 0.0}))
    assert not rep.overall_pass
    assert {c.check for c in rep.failures} == {"wdvv_flat"}


def test_same_seed_gives_identical_body(small_report):
    again = run_suite(SuiteConfig(**SMALL))
    assert render(again, "json", include_timings=False) == render(small_report, "json", include_timings=False)
    other = run_suite(SuiteConfig(**SMALL, seed=7))
    assert render(other, "json", include_timings=False) != render(small_report, "json", include_timings=False)


def test_errors_are_collected(monkeypatch):
    from vinberg_wdvv import checks

    def boom(J, ctx):
        raise RuntimeError("broken")

    spec = REGISTRY["trace_assoc"]
    monkeypatch.setitem(REGISTRY, "trace_assoc", checks.CheckSpec("trace_assoc", boom, spec.tolerance))
    rep = run_suite(SuiteConfig(**SMALL, checks=["trace_assoc", "jordan_identity"]))
    failed = [c for c in rep.checks if not c.passed]
    assert len(rep.checks) == 4 and len(failed) == 2
    assert all("broken" in c.note for c in failed)


@pytest.mark.parametrize("bad", [
    dict(samples=0), dict(families=[]), dict(families=["Albert:4"]), dict(tolerances={"nope": 1.0}),
    dict(tolerances={"wdvv_flat": -1.0}), dict(sigma=0.5), dict(kappa=2.0), dict(output_format="xml"),
])
def test_invalid_configs(bad):
    with pytest.raises(ConfigError):
        run_suite(SuiteConfig(**bad))


def test_emit_formats(small_report, tmp_path):
    data = json.loads(emit(small_report, "json", tmp_path / "r.json"))
    assert data == json.loads((tmp_path / "r.json").read_text())
    back = report_from_dict(data)
    assert back.checks == small_report.checks
    rows = list(csv.DictReader(io.StringIO(emit(small_report, "csv"))))
    assert len(rows) == len(small_report.checks)
    assert all(r["passed"] in ("True", "False") for r in rows)
    text = emit(small_report, "text")
    assert "overall: PASS" in text
    with pytest.raises(ValueError):
        emit(small_report, "yaml")
    with pytest.raises(OSError):
        emit(small_report, "json", tmp_path / "missing" / "r.json")


def test_empty_report_is_valid_json():
    data = json.loads(render(SuiteReport({}, [], {}), "json"))
    assert data["checks"] == [] and data["overall_pass"] is True


def test_load_config(tmp_path, monkeypatch):
    monkeypatch.setenv("VINBERG_WDVV_SEED", "123")
    path = tmp_path / "suite.cfg"
    path.write_text(
        "[suite]\nfamilies = SymR:2, Spin:3\nsamples = 4\nformat = csv\nsigma = 1\nkappa = 1\n"
        "[tolerances]\nwdvv_flat = 1e-8\n"
        "[family HermC:2]\nsamples = 2\n"
    )
    cfg = load_config(path)
    assert cfg.families == ["SymR:2", "Spin:3", "HermC:2"]
    assert (cfg.samples, cfg.seed, cfg.output_format) == (4, 123, "csv")
    assert (cfg.sigma, cfg.kappa) == (1.0, 1.0)
    assert cfg.tolerance("wdvv_flat") == 1e-8
    assert cfg.family_samples == {"HermC:2": 2}
    path.write_text("[suite]\ncolour = blue\n")
    with pytest.raises(ConfigError):
        load_config(path)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.cfg")


def test_scan_families():
    assert scan_families(1) == ["SymR:1", "HermC:1", "HermH:1"]
    assert "Albert" in scan_families(3)
    with pytest.raises(ConfigError):
        scan_families(0)


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["verify", "--families", "SymR:2", "--samples", "2"]) == 0
    cfg = tmp_path / "zero.cfg"
    cfg.write_text("[suite]\nfamilies = SymR:2\nsamples = 2\n[tolerances]\nwdvv_flat = 0\n")
    assert main(["verify", "--config", str(cfg)]) == 1
    assert main(["verify", "--families", "Bogus:2"]) == 2
    assert main(["verify", "--config", str(tmp_path / "absent.cfg")]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--sigma", "3"])
    assert exc.value.code == 2
    out = tmp_path / "r.json"
    assert main(["verify", "--families", "Spin:3", "--samples", "2", "--format", "json", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["overall_pass"] is True
    capsys.readouterr()


def test_cli_flat(capsys):
    assert main(["flat", "--family", "SymR", "--n", "3", "--params", "0.1,0.2,-0.3"]) == 0
    text = capsys.readouterr().out
    assert "metric g" in text and "wdvv" in text
    assert main(["flat", "--family", "SymR", "--n", "3", "--params", "0.1"]) == 2
