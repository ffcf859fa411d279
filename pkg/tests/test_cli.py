"""End-to-end tests for the command line interface and report verifier."""

import copy
import json
from fractions import Fraction
from pathlib import Path

import pytest

from expansive.cli import (
    VersionMismatch,
    case_id,
    chain_from_json,
    main,
    parse_action,
    parse_dual_module,
    verify_report,
)
from expansive.exact import ParseError

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def write_case(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


# --- case file parsing ---


def test_parse_action_reads_rationals_and_mode():
    case = {"n": 2, "generators": {"g": [["1/2", 0], [0, 2]]}, "mode": "semigroup"}
    action = parse_action(case)
    assert action.mode == "semigroup"
    assert action.mats[0][0, 0] == Fraction(1, 2)


def test_parse_action_rejects_dimension_mismatch():
    case = {"n": 3, "generators": {"g": [[2]]}, "mode": "group"}
    with pytest.raises(ParseError):
        parse_action(case)


def test_parse_dual_module_requires_module_generators():
    with pytest.raises(ParseError):
        parse_dual_module({"n": 1, "generators": {"g": [[2]]}, "mode": "group"})


def test_case_id_is_order_insensitive():
    a = {"n": 1, "generators": {"g": [[2]]}, "mode": "group"}
    b = {"mode": "group", "generators": {"g": [[2]]}, "n": 1}
    assert case_id(a) == case_id(b)


# --- analyze-matrix ---


def test_analyze_matrix_doubling(capsys):
    code, rep = run(capsys, "analyze-matrix", "--mode", "semigroup", FIXTURES / "doubling.json")
    assert code == 0
    assert rep["expansive"] is True
    assert rep["profile"] == {"at_zero": 0, "inside": 0, "on_circle": 0, "outside": 1}
    assert rep["certificate"]["kind"] == "word_spectrum"


def test_analyze_matrix_cat_group_vs_semigroup(capsys):
    code, rep = run(capsys, "analyze-matrix", FIXTURES / "cat_map.json")
    assert (code, rep["expansive"]) == (0, True)
    code, rep = run(capsys, "analyze-matrix", "--mode", "semigroup", FIXTURES / "cat_map.json")
    assert (code, rep["expansive"]) == (0, False)
    assert rep["profile"] == {"at_zero": 0, "inside": 1, "on_circle": 0, "outside": 1}


def test_analyze_matrix_rejects_two_generators(capsys):
    code, rep = run(capsys, "analyze-matrix", FIXTURES / "sl2_generators.json")
    assert code == 1
    assert "error" in rep


def test_analyze_matrix_group_mode_rejects_singular(capsys, tmp_path):
    case = write_case(tmp_path, "singular.json", {"n": 1, "generators": {"g": [[0]]}, "mode": "group"})
    code, rep = run(capsys, "analyze-matrix", case)
    assert code == 1 and "error" in rep


# --- engine subcommands ---


def test_analyze_semigroup_cat_expansive(capsys):
    code, rep = run(capsys, "analyze-semigroup", FIXTURES / "cat_map.json")
    assert code == 0
    assert rep["status"] == "Expansive"
    assert rep["certificate"]["kind"] == "word_spectrum"


def test_analyze_semigroup_rotation_not_expansive(capsys):
    code, rep = run(capsys, "analyze-semigroup", FIXTURES / "rotation.json")
    assert code == 0
    assert rep["status"] == "NotExpansive"
    assert rep["witness"] is not None


def test_analyze_semigroup_shallow_depth_is_unknown(capsys):
    # length-1 words of the two standard generators all have unit-circle
    # spectrum and the action is irreducible, so depth 1 cannot decide
    code, rep = run(capsys, "analyze-semigroup", "--depth", "1", FIXTURES / "sl2_generators.json")
    assert code == 2
    assert rep["status"] == "Unknown"
    assert "certificate" not in rep


def test_find_expansive_on_commuting_diagonals(capsys, tmp_path):
    case = write_case(
        tmp_path,
        "diag.json",
        {"n": 2, "generators": {"g1": [[2, 0], [0, 1]], "g2": [[1, 0], [0, 2]]}, "mode": "group"},
    )
    code, rep = run(capsys, "find-expansive", case)
    assert code == 0
    assert rep["found"] is True
    assert 1 <= len(rep["word"]) <= 64


def test_torus_check_cat_by_word_spectrum(capsys):
    code, rep = run(capsys, "torus-check", FIXTURES / "cat_map.json")
    assert code == 0
    assert rep["status"] == "Expansive"
    assert rep["certificate"]["kind"] == "word_spectrum"


def test_torus_check_sl2_fast_path(capsys):
    # two generators span the full matrix algebra, one word has infinite order
    code, rep = run(capsys, "torus-check", FIXTURES / "sl2_generators.json")
    assert code == 0
    assert rep["status"] == "Expansive"
    assert rep["evidence"]["route"] == "irreducible-fast-path"


def test_torus_check_optional_grid_oracle(capsys):
    code, rep = run(
        capsys, "torus-check", FIXTURES / "cat_map.json", "--radius", "5", "--epsilon", "1/4"
    )
    assert code == 0
    assert rep["evidence"]["grid_oracle"]["separated"] is True


def test_torus_check_rejects_fractional_entries(capsys, tmp_path):
    case = write_case(tmp_path, "frac.json", {"n": 1, "generators": {"g": [["1/2"]]}, "mode": "group"})
    code, rep = run(capsys, "torus-check", case)
    assert code == 1 and "error" in rep


def test_jsr_single_matrix_brackets_spectral_radius(capsys):
    code, rep = run(capsys, "jsr", "--mode", "semigroup", FIXTURES / "doubling.json")
    assert code == 0
    assert rep["bounds"]["lower"] <= rep["bounds"]["upper"]
    assert rep["bounds"]["lower"] == pytest.approx(2.0)


# --- solenoid subcommands ---


def test_solenoid_chain_dyadic(capsys):
    code, rep = run(capsys, "solenoid-chain", FIXTURES / "dyadic_solenoid.json")
    assert code == 0
    assert rep["k"] == 3
    assert rep["verified"] is True
    chain = chain_from_json(rep["chain"])
    assert chain.verify()


def dyadic_window(tmp_path, chain_rep, p):
    chars = sorted({tuple(c) for lvl in chain_rep["chain"]["levels"] for c in lvl})
    window = [{"character": list(c), "mid": str(Fraction(c[0]) * p)} for c in chars]
    path = tmp_path / "window.json"
    path.write_text(json.dumps(window))
    return path


def test_solenoid_lift_roundtrip(capsys, tmp_path):
    _, chain_rep = run(capsys, "solenoid-chain", FIXTURES / "dyadic_solenoid.json")
    window = dyadic_window(tmp_path, chain_rep, Fraction(1, 1024))
    code, rep = run(
        capsys,
        "solenoid-lift",
        FIXTURES / "dyadic_solenoid.json",
        "--window",
        window,
        "--radius",
        "3/10",
    )
    assert code == 0
    entry = rep["lifts"][0]
    assert entry["lifted"] is True
    values = {tuple(v["character"]): v for v in entry["values"]}
    for chi, v in values.items():
        assert Fraction(v["mid"]) == Fraction(chi[0]) * Fraction(1, 1024)
        assert Fraction(v["rad"]) < Fraction(1, 2**40)


def test_solenoid_lift_out_of_range_is_decisive(capsys, tmp_path):
    _, chain_rep = run(capsys, "solenoid-chain", FIXTURES / "dyadic_solenoid.json")
    window = dyadic_window(tmp_path, chain_rep, Fraction(3, 100))
    code, rep = run(
        capsys,
        "solenoid-lift",
        FIXTURES / "dyadic_solenoid.json",
        "--window",
        window,
        "--radius",
        "3/10",
    )
    assert code == 0
    assert rep["lifts"][0]["lifted"] is False


def test_solenoid_check_dyadic_expansive(capsys):
    code, rep = run(capsys, "solenoid-check", FIXTURES / "dyadic_solenoid.json")
    assert code == 0
    assert rep["status"] == "Expansive"
    assert rep["evidence"]["finitely_generated"] == "by presentation"


def test_solenoid_check_identity_not_expansive(capsys, tmp_path):
    case = write_case(
        tmp_path, "fixed.json", {"n": 1, "F": [[1]], "generators": {"g": [[1]]}, "mode": "group"}
    )
    code, rep = run(capsys, "solenoid-check", case)
    assert code == 0
    assert rep["status"] == "NotExpansive"
    assert rep["witness"] is not None


# --- the verifier ---


def report_for(capsys, tmp_path, *argv):
    out = tmp_path / "report.json"
    code = main([str(a) for a in argv] + ["--out", str(out)])
    capsys.readouterr()
    return code, json.loads(out.read_text()), out


def test_verify_accepts_engine_report(capsys, tmp_path):
    _, rep, path = report_for(capsys, tmp_path, "analyze-semigroup", FIXTURES / "cat_map.json")
    code, out = run(capsys, "verify", path, FIXTURES / "cat_map.json")
    assert code == 0
    assert out["verified"] is True


def test_verify_accepts_affine_obstruction(capsys, tmp_path):
    _, rep, path = report_for(
        capsys, tmp_path, "analyze-semigroup", "--depth", "8", FIXTURES / "affine_sl2.json"
    )
    assert rep["certificate"]["kind"] == "affine_obstruction"
    code, out = run(capsys, "verify", path, FIXTURES / "affine_sl2.json")
    assert code == 0 and out["verified"] is True


def test_verify_accepts_torus_fast_path(capsys, tmp_path):
    _, rep, path = report_for(capsys, tmp_path, "torus-check", FIXTURES / "sl2_generators.json")
    assert rep["certificate"]["kind"] == "irreducible_fast_path"
    code, out = run(capsys, "verify", path, FIXTURES / "sl2_generators.json")
    assert code == 0 and out["verified"] is True


def test_verify_accepts_solenoid_reports(capsys, tmp_path):
    for command, fixture in [
        ("solenoid-chain", "dyadic_solenoid.json"),
        ("solenoid-check", "dyadic_solenoid.json"),
    ]:
        _, rep, path = report_for(capsys, tmp_path, command, FIXTURES / fixture)
        code, out = run(capsys, "verify", path, FIXTURES / fixture)
        assert (code, out["verified"]) == (0, True), command


def test_verify_rejects_tampered_witness(capsys, tmp_path):
    case = write_case(
        tmp_path, "stretch.json", {"n": 2, "generators": {"g": [[2, 0], [0, 1]]}, "mode": "group"}
    )
    _, rep, path = report_for(capsys, tmp_path, "analyze-semigroup", case)
    assert rep["witness"] == ["0", "1"]
    bad = copy.deepcopy(rep)
    bad["witness"] = ["1", "0"]  # eigenvector of 2, not of the unit eigenvalue
    bad_path = tmp_path / "bad.json"
    bad_path.write_text(json.dumps(bad))
    code, out = run(capsys, "verify", bad_path, case)
    assert code == 1
    assert out["verified"] is False


def test_verify_rejects_tampered_relation(capsys, tmp_path):
    _, rep, path = report_for(capsys, tmp_path, "solenoid-chain", FIXTURES / "dyadic_solenoid.json")
    bad = copy.deepcopy(rep)
    bad["chain"]["relations"][0]["n0"] += 1
    bad_path = tmp_path / "bad_chain.json"
    bad_path.write_text(json.dumps(bad))
    code, out = run(capsys, "verify", bad_path, FIXTURES / "dyadic_solenoid.json")
    assert code == 1 and out["verified"] is False


def test_verify_rejects_wrong_case(capsys, tmp_path):
    _, rep, path = report_for(capsys, tmp_path, "analyze-semigroup", FIXTURES / "cat_map.json")
    code, out = run(capsys, "verify", path, FIXTURES / "rotation.json")
    assert code == 1 and out["verified"] is False


def test_verify_reports_version_mismatch(capsys, tmp_path):
    _, rep, path = report_for(capsys, tmp_path, "analyze-semigroup", FIXTURES / "cat_map.json")
    rep["tool"]["version"] = "9.9.9"
    path.write_text(json.dumps(rep))
    code, out = run(capsys, "verify", path, FIXTURES / "cat_map.json")
    assert code == 1
    assert out["error"]["type"] == "VersionMismatch"


def test_verify_report_function_raises_on_version(tmp_path):
    rep = {"tool": {"version": "0.0.0"}}
    with pytest.raises(VersionMismatch):
        verify_report(rep, {"n": 1, "generators": {"g": [[2]]}, "mode": "group"})


def test_unknown_report_carries_no_certificate_and_verifies(capsys, tmp_path):
    _, rep, path = report_for(
        capsys, tmp_path, "analyze-semigroup", "--depth", "1", FIXTURES / "sl2_generators.json"
    )
    assert "certificate" not in rep
    code, out = run(capsys, "verify", path, FIXTURES / "sl2_generators.json")
    assert code == 0 and out["verified"] is True


# --- plumbing ---


def test_missing_file_is_input_error(capsys):
    code, rep = run(capsys, "analyze-semigroup", "/nonexistent/case.json")
    assert code == 1 and "error" in rep


def test_malformed_json_is_input_error(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, rep = run(capsys, "analyze-semigroup", path)
    assert code == 1
    assert rep["error"]["type"] == "ParseError"


def test_out_flag_writes_file_and_keeps_stdout_clean(capsys, tmp_path):
    out = tmp_path / "rep.json"
    code = main(["analyze-matrix", "--mode", "semigroup", str(FIXTURES / "doubling.json"), "--out", str(out)])
    captured = capsys.readouterr()
    assert code == 0
    assert captured.out == ""
    assert json.loads(out.read_text())["status"] == "Expansive"
    assert "analyze-matrix" in captured.err


def test_reports_are_deterministic_modulo_timings(capsys, tmp_path):
    reps = []
    for _ in range(2):
        _, rep, _ = report_for(capsys, tmp_path, "analyze-semigroup", FIXTURES / "cat_map.json")
        rep.pop("timings", None)
        reps.append(rep)
    assert reps[0] == reps[1]


def test_lift_threads_flag_matches_sequential(capsys, tmp_path):
    _, chain_rep = run(capsys, "solenoid-chain", FIXTURES / "dyadic_solenoid.json")
    w1 = dyadic_window(tmp_path, chain_rep, Fraction(1, 1024))
    w2 = tmp_path / "w2.json"
    w2.write_text(
        json.dumps(
            [
                {"character": list(c), "mid": str(Fraction(c[0]) * Fraction(1, 4096))}
                for c in sorted({tuple(ch) for lvl in chain_rep["chain"]["levels"] for ch in lvl})
            ]
        )
    )
    outs = []
    for threads in ("1", "4"):
        code, rep = run(
            capsys,
            "solenoid-lift",
            FIXTURES / "dyadic_solenoid.json",
            "--window",
            w1,
            "--window",
            w2,
            "--radius",
            "3/10",
            "--threads",
            threads,
        )
        assert code == 0
        outs.append(rep["lifts"])
    assert outs[0] == outs[1]
