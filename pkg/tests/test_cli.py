"""Command-line behavior: determinism, formats, exit codes, manifests."""

import hashlib
import json

import pytest

from recmaj.cli import main, read_hard_inputs
from recmaj.alphadp import enumerate_stable


def run_cli(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_sample_deterministic(tmp_path, capsys):
    f1 = tmp_path / "a.txt"
    f2 = tmp_path / "b.txt"
    assert main(["sample", "--h", "2", "--count", "5", "--seed", "7",
                 "--out", str(f1)]) == 0
    assert main(["sample", "--h", "2", "--count", "5", "--seed", "7",
                 "--out", str(f2)]) == 0
    assert f1.read_bytes() == f2.read_bytes()
    records = read_hard_inputs(f1.read_text())
    assert len(records) == 5
    assert all(r.height == 2 for r in records)


def test_sample_root_filter(tmp_path):
    f = tmp_path / "r.txt"
    assert main(["sample", "--h", "1", "--root", "0", "--count", "200",
                 "--seed", "1", "--out", str(f)]) == 0
    for r in read_hard_inputs(f.read_text()):
        assert r.input.to_string() in {"001", "010", "100"}


def test_sample_height_cap(capsys):
    code, _, err = run_cli(["sample", "--h", "19", "--count", "1"], capsys)
    assert code == 4
    assert "maximum" in err


def test_manifest_written(tmp_path):
    f = tmp_path / "s.txt"
    assert main(["sample", "--h", "1", "--count", "2", "--seed", "3",
                 "--out", str(f)]) == 0
    manifest = json.loads((tmp_path / "s.txt.manifest.json").read_text())
    assert manifest["subcommand"] == "sample"
    assert manifest["seed"] == 3
    assert manifest["version"]
    digest = hashlib.sha256(f.read_bytes()).hexdigest()
    assert manifest["outputs"][str(f)] == digest


def test_estimate_record(capsys):
    code, out, _ = run_cli(["estimate", "--alg", "full", "--h", "3",
                            "--trials", "10", "--seed", "1"], capsys)
    assert code == 0
    rec = json.loads(out)
    assert rec["mean"] == 27.0 and rec["stddev"] == 0.0
    assert rec["seed"] == 1 and rec["alg"] == "full"


def test_estimate_range_growth(capsys):
    code, out, _ = run_cli(["estimate", "--alg", "naive", "--h", "1:2",
                            "--trials", "4000", "--seed", "2"], capsys)
    assert code == 0
    recs = json.loads(out)
    assert len(recs) == 2
    assert "growth_vs_previous_h" in recs[1]
    assert 2.0 < recs[1]["growth_vs_previous_h"] < 3.4


def test_estimate_naive_matches_closed_form(capsys):
    code, out, _ = run_cli(["estimate", "--alg", "naive", "--h", "4",
                            "--trials", "20000", "--seed", "3"], capsys)
    assert code == 0
    rec = json.loads(out)
    want = (8 / 3) ** 4
    half = 3 * rec["stddev"] / rec["trials"] ** 0.5
    assert abs(rec["mean"] - want) <= half


@pytest.mark.slow
def test_estimate_naive_h6(capsys):
    code, out, _ = run_cli(["estimate", "--alg", "naive", "--h", "6",
                            "--trials", "30000", "--seed", "3",
                            "--threads", "2"], capsys)
    assert code == 0
    rec = json.loads(out)
    want = (8 / 3) ** 6
    half = 3 * rec["stddev"] / rec["trials"] ** 0.5
    assert abs(rec["mean"] - want) <= half


def test_seed_env_default(tmp_path, monkeypatch):
    from recmaj import cli as cli_mod
    monkeypatch.setenv("RECMAJ_SEED", "99")
    parser = cli_mod.build_parser()
    args = parser.parse_args(["sample", "--h", "1"])
    assert args.seed == 99


def test_estimate_unknown_alg(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["estimate", "--alg", "bogus", "--h", "2"])
    assert exc.value.code == 3


def test_expect_root_and_contexts(capsys):
    code, out, _ = run_cli(["expect", "--alg", "depth2", "--bits", "010"], capsys)
    assert code == 0 and json.loads(out)["expected"] == "8/3"
    code, out, _ = run_cli(["expect", "--alg", "depth2", "--bits", "110100010",
                            "--context", "complete-minority"], capsys)
    assert code == 0 and json.loads(out)["expected"] == "16/3"
    code, out, _ = run_cli(["expect", "--alg", "depth2", "--bits", "000"],
                           capsys)
    assert code == 0 and json.loads(out)["expected"] == "2/1"


def test_recurrences_csv(capsys):
    code, out, _ = run_cli(["recurrences", "--max-h", "3", "--precision", "4"],
                           capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "h,T,S_M,S_m,T_decimal"
    assert lines[2].startswith("1,8/3,3/2,2/1,")
    assert lines[3].startswith("2,571/81,71/18,16/3,")


def test_alpha_json(capsys):
    code, out, _ = run_cli(["alpha", "--k", "2"], capsys)
    assert code == 0
    rec = json.loads(out)
    assert rec["alpha"] == "24/7" and rec["n_k"] == 7
    assert rec["iterations"][-1] == "24/7"
    assert rec["flagged_slow_convergence"] is False


def test_bounds_exact_base_k1(capsys):
    code, out, _ = run_cli(["bounds", "--k", "1", "--alpha", "2", "--delta",
                            "0", "--h", "1", "--precision", "6"], capsys)
    assert code == 0
    rec = json.loads(out)
    assert rec["base_interval"][0] == "5/2"


def test_bounds_k4_base(capsys):
    code, out, _ = run_cli(["bounds", "--k", "4", "--alpha", "2027349/216164",
                            "--delta", "0", "--h", "1", "--precision", "8"],
                           capsys)
    assert code == 0
    rec = json.loads(out)
    lo_num, lo_den = map(int, rec["base_interval"][0].split("/"))
    assert lo_num * 100000 > 257143 * lo_den


def test_dump_classes_fixture(capsys):
    code, out, _ = run_cli(["dump-classes", "--k", "2"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    expected = enumerate_stable(2)
    assert len(lines) == 7
    got = {tuple(ln.rsplit(" ", 2)) for ln in lines}
    want = {(c.key, str(c.member_count), str(c.completions)) for c in expected}
    assert got == want
    code, _, _ = run_cli(["dump-classes", "--k", "4"], capsys)
    assert code == 4


def test_verify_suites_pass(capsys):
    for suite in ("oracles", "ansatz"):
        code, out, _ = run_cli(["verify", "--suite", suite], capsys)
        assert code == 0, out
        assert "[FAIL]" not in out


def test_verify_tampered_expectations(tmp_path, capsys):
    bad = tmp_path / "expect.json"
    bad.write_text(json.dumps({"anchor_rho_const": "49/81"}))
    code, out, _ = run_cli(["verify", "--suite", "oracles",
                            "--expect", str(bad)], capsys)
    assert code == 2
    assert "[FAIL]" in out


@pytest.mark.slow
def test_verify_all_with_tampered_alpha2(tmp_path, capsys):
    bad = tmp_path / "expect.json"
    bad.write_text(json.dumps({"alpha": {
        "1": "2", "2": "25/7", "3": "12231/2203", "4": "2027349/216164"}}))
    code, out, _ = run_cli(["verify", "--suite", "all",
                            "--expect", str(bad)], capsys)
    assert code == 2
    fails = [ln for ln in out.splitlines() if ln.startswith("[FAIL]")]
    assert fails and any("alpha_2" in ln for ln in fails)


@pytest.mark.slow
def test_verify_all_passes(capsys):
    code, out, _ = run_cli(["verify", "--suite", "all"], capsys)
    assert code == 0
    assert "[FAIL]" not in out
