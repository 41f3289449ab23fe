"""End-to-end tests of the ``resolve`` command line (via subprocess, so
the documented exit codes and report bytes are exercised for real)."""

from __future__ import annotations

import json
import os
import shutil
import subprocess
import sys

import pytest

RESOLVE = [sys.executable, "-m", "lgresolve.cli"]


def run_cli(*args, env=None, timeout=240):
    full_env = dict(os.environ)
    if env:
        full_env.update(env)
    return subprocess.run(
        RESOLVE + list(args), capture_output=True, text=True,
        env=full_env, timeout=timeout,
    )


def test_help_and_usage_errors():
    assert run_cli("--help").returncode == 0
    assert run_cli("verify").returncode == 1  # missing subcommand
    assert run_cli("frobnicate").returncode == 1
    assert run_cli("verify", "step", "9").returncode == 1
    assert run_cli("verify", "nonvanishing").returncode == 1  # missing --k
    assert run_cli("explain", "no-such-goal").returncode == 1


def test_schubert_hasse():
    res = run_cli("schubert", "hasse", "--g", "3", "--format", "json")
    assert res.returncode == 0
    doc = json.loads(res.stdout)
    assert len(doc["nodes"]) == 8 and len(doc["edges"]) == 8

    res = run_cli("schubert", "hasse", "--g", "3", "--format", "dot")
    assert res.returncode == 0
    assert res.stdout.strip().startswith("digraph")


def test_verify_chart_pass(tmp_path):
    report = tmp_path / "report.json"
    res = run_cli("--report", str(report), "verify", "chart", "T2")
    assert res.returncode == 0
    doc = json.loads(report.read_text())
    assert doc["schema"] == 1 and doc["status"] == "pass"
    assert doc["goals"][0]["goal"] == "chart-T2"
    assert run_cli("verify", "chart", "nope").returncode == 1


def test_report_bytes_deterministic(tmp_path):
    paths = []
    for i, jobs in enumerate(("1", "4")):
        p = tmp_path / f"report{i}.json"
        res = run_cli("--jobs", jobs, "--report", str(p),
                      "verify", "identities")
        assert res.returncode == 0
        paths.append(p.read_bytes())
    assert paths[0] == paths[1]


def test_starved_budget_is_inconclusive():
    res = run_cli("--budget-spairs", "1", "verify", "chart", "T5")
    assert res.returncode == 3
    assert "inconclusive" in res.stdout


def test_explain_step_output():
    res = run_cli("explain", "step-3")
    assert res.returncode == 0
    for needle in ("a33_1", "-2*l1*a23_1", "a22_1", "d/d"):
        assert needle in res.stdout


def test_data_dir_override_and_data_error(tmp_path):
    import lgresolve.data as data_pkg

    src = os.path.dirname(data_pkg.__file__)
    override = tmp_path / "data"
    shutil.copytree(src, override,
                    ignore=shutil.ignore_patterns("__pycache__", "*.py"))
    env = {"RESOLVE_DATA_DIR": str(override)}
    assert run_cli("verify", "chart", "T2", env=env).returncode == 0

    # a mutated identity in the data must surface as a failure (exit 2)
    pl = override / "pluecker.json"
    doc = json.loads(pl.read_text())
    doc["cofactors"]["identities"][0] = \
        doc["cofactors"]["identities"][0].replace("l2*", "", 1)
    pl.write_text(json.dumps(doc))
    res = run_cli("verify", "identities", "--step", "3", env=env)
    assert res.returncode == 2

    # malformed JSON is a data error (exit 1)
    pl.write_text("{ not json")
    res = run_cli("verify", "identities", "--step", "3", env=env)
    assert res.returncode == 1
