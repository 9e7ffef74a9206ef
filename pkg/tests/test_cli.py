from __future__ import annotations

import csv

import pytest
from click.testing import CliRunner

from anticyc.cli import (
    CACHE_MAGIC,
    CacheVersionError,
    assumption_checklist,
    cache_get,
    cache_put,
    main,
    parse_exponents,
)
from anticyc.heckechar import dumps_character, enumerate_characters
from anticyc.quatgross import CACHE_MAGIC as BRANDT_MAGIC


@pytest.fixture
def run(tmp_path):
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(main, ["--cache-dir", str(tmp_path / "cache"), *map(str, args)])

    return invoke


def test_classgroup(run):
    r = run("classgroup", "--disc", -7, "--modulus", 25, "--p", 5)
    assert r.exit_code == 0
    assert "Pic(O_25): [30]" in r.output
    assert "5-part of Cl_25(K): [5, 5]" in r.output


def test_classgroup_rejects_bad_disc(run):
    r = run("classgroup", "--disc", -8 * 3 * 3)
    assert r.exit_code == 2 and "assumption failed" in r.output


def test_theta_writes_qexp(run, tmp_path, K7):
    psi = enumerate_characters(K7, (-1, 0), 5, primitive=True)[0]
    path = tmp_path / "psi.char"
    path.write_text(dumps_character(psi))
    r = run("theta", "--char", path, "--prec", 40)
    assert r.exit_code == 0, r.output
    text = (tmp_path / "psi.qexp").read_text().splitlines()
    assert text[0] == "# weight 2" and text[1] == "# level 175" and len(text) == 44


def test_norm_check(run, tmp_path):
    rep = tmp_path / "norm.txt"
    r = run("norm-check", "--samples", 30, "--seed", 1, "--report", rep)
    assert r.exit_code == 0
    assert r.output.startswith("30/30 congruences certified")
    lines = rep.read_text().splitlines()
    assert len(lines) == 2 + 1 + 30
    assert all("PASS" in ln for ln in lines[3:])


def test_brandt(run):
    r = run("brandt", "--nminus", 11, "--Q", 5)
    assert r.exit_code == 0, r.output
    assert "h = 2" in r.output


def test_theta_elem(run):
    r = run("theta-elem", "--level", 1)
    assert r.exit_code == 0, r.output
    assert "level 1: 6 Gross points; trace relation failures 0, structure failures 0" in r.output


def test_lvalue(run):
    r = run("lvalue", "--conductor", 1, "--bits", 60, "--eps", 1e-14)
    assert r.exit_code == 0, r.output
    assert "2.3258103802" in r.output


def test_bk_criterion_deterministic(run, tmp_path):
    outs = []
    for i, w in enumerate((1, 8, 1)):
        rep, cs = tmp_path / f"r{i}.txt", tmp_path / f"r{i}.csv"
        r = run("bk-criterion", "--workers", w, "--report", rep, "--csv", cs)
        assert r.exit_code == 0, r.output
        outs.append((rep.read_bytes(), cs.read_bytes()))
    assert outs[0] == outs[1] == outs[2]
    text = outs[0][0].decode()
    assert "verdict: main-theorem hypothesis numerically satisfied" in text
    rows = list(csv.reader(outs[0][1].decode().splitlines()))
    assert rows[0] == ["character", "exponents", "valuation", "residue_a", "residue_b"]
    assert rows[1][2] == "0"


def test_bk_criterion_eisenstein_inconclusive(run):
    r = run("bk-criterion", "--eisenstein")
    assert r.exit_code == 0, r.output
    assert "inconclusive" in r.output


def test_bk_criterion_assumption_failure(run):
    r = run("bk-criterion", "--p", 11)
    assert r.exit_code == 2
    assert "assumption failed" in r.output


def test_cache_version_mismatch(tmp_path, run):
    cache_put(tmp_path, "x.bin", {"a": 1})
    assert cache_get(tmp_path, "x.bin") == {"a": 1}
    raw = (tmp_path / "x.bin").read_bytes()
    (tmp_path / "x.bin").write_bytes(CACHE_MAGIC + bytes([99]) + raw[len(CACHE_MAGIC) + 1 :])
    with pytest.raises(CacheVersionError):
        cache_get(tmp_path, "x.bin")
    (tmp_path / "y.bin").write_bytes(b"garbage")
    with pytest.raises(CacheVersionError):
        cache_get(tmp_path, "y.bin")
    # the CLI reports a stale Brandt cache instead of using it
    assert run("brandt", "--nminus", 11, "--Q", 5).exit_code == 0
    stale = next((tmp_path / "cache").glob("brandt-*.bin"))
    data = stale.read_bytes()
    m = len(BRANDT_MAGIC)
    stale.write_bytes(data[:m] + bytes([data[m] + 1]) + data[m + 1 :])
    r = run("brandt", "--nminus", 11, "--Q", 5)
    assert r.exit_code == 1 and "version" in r.output


def test_parse_exponents():
    assert parse_exponents(None, 2) == (0, 0)
    assert parse_exponents("trivial", 1) == (0,)
    assert parse_exponents("1, 2", 2) == (1, 2)
    with pytest.raises(ValueError):
        parse_exponents("1", 2)


def test_checklist_reports_witnesses(newform33, K7):
    checks = assumption_checklist(newform33, K7, 5, 1, 1, ())
    assert len(checks) == 12 and all(c.ok and c.witness for c in checks)
    bad = assumption_checklist(newform33, K7, 11, 1, 1, ())
    failed = [c.name for c in bad if not c.ok]
    assert any("inert" in n for n in failed)
