"""Tests for the command line interface: outputs, formats, exit codes."""

import json
import subprocess
import sys

import pytest

from varncode.cli import (
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_ORACLE,
    EXIT_PARSE,
    EXIT_VIOLATION,
    main,
    make_probs,
    parse_gen,
    read_probs_file,
)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_OK, err
    return json.loads(out)


# ---------------------------------------------------------------------------
# probability sources
# ---------------------------------------------------------------------------

def test_make_probs_families():
    for dist in ("uniform", "zipf:1.0", "zipf:2.0", "geom:0.7", "dyadic"):
        p = make_probs(dist, 50, 3)
        assert p.shape == (50,)
        assert abs(p.sum() - 1.0) < 1e-9
        assert (p > 0).all()
    z = make_probs("zipf:1.0", 4, 0)
    assert z[0] / z[1] == pytest.approx(2.0)
    g = make_probs("geom:0.5", 3, 0)
    assert g[0] / g[1] == pytest.approx(2.0)
    d = make_probs("dyadic", 5, 0)
    assert d[-1] == d[-2]


def test_make_probs_reproducible():
    a = make_probs("uniform", 20, 7)
    b = make_probs("uniform", 20, 7)
    c = make_probs("uniform", 20, 8)
    assert (a == b).all()
    assert not (a == c).all()


def test_parse_gen():
    assert parse_gen("uniform:12", 0).shape == (12,)
    assert parse_gen("zipf:1.5,9", 0).shape == (9,)
    assert parse_gen("geom:0.8,6", 0).shape == (6,)
    assert parse_gen("dyadic:4", 0).shape == (4,)
    from varncode import ProbInputError
    for bad in ("uniform", "zipf:9", "geom:0.5", "wat:3", "uniform:x"):
        with pytest.raises(ProbInputError):
            parse_gen(bad, 0)


def test_read_probs_file(tmp_path):
    lines = tmp_path / "p.txt"
    lines.write_text("# header\n0.5\n0.25  # tail comment\n\n0.25\n")
    assert read_probs_file(str(lines)) == [0.5, 0.25, 0.25]
    arr = tmp_path / "p.json"
    arr.write_text("[0.5, 0.5]")
    assert read_probs_file(str(arr)) == [0.5, 0.5]
    from varncode import ProbInputError
    bad = tmp_path / "bad.txt"
    bad.write_text("0.5\nnope\n")
    with pytest.raises(ProbInputError):
        read_probs_file(str(bad))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def test_root_text(capsys):
    code, out, err = run(capsys, "root", "--costs", "finite:1,2")
    assert code == EXIT_OK
    assert "c = 0.69424191363" in out
    assert "tail_convergent = True" in out


def test_root_json(capsys):
    d = run_json(capsys, "root", "--costs", "repeat:3", "--format", "json")
    assert d["kind"] == "IntegerProfile"
    assert d["c"] == pytest.approx(2.0)
    assert d["beta_finite"] is True
    assert d["tail_convergent"] is True


def test_root_json_infinite_beta(capsys):
    d = run_json(capsys, "root", "--costs", "balanced", "--format", "json")
    assert d["beta"] is None
    assert d["beta_finite"] is False
    assert d["tail_convergent"] is False


def test_code_text(capsys):
    code, out, err = run(
        capsys, "code", "--costs", "finite:1,1",
        "--inline", "0.25,0.25,0.25,0.25",
    )
    assert code == EXIT_OK
    body = [l for l in out.splitlines() if not l.startswith("#")]
    assert len(body) == 4
    assert "# cost = 2.0" in out


def test_code_json_structure(capsys):
    d = run_json(
        capsys, "code", "--costs", "finite:1,3",
        "--inline", "0.333333,0.333333,0.166667,0.166667", "--normalize",
        "--format", "json",
    )
    assert set(d.keys()) == {"root", "codewords", "report"}
    assert len(d["codewords"]) == 4
    for cw in d["codewords"]:
        assert set(cw.keys()) == {"index", "letters", "cost"}
    assert d["report"]["cost"] == pytest.approx(11.0 / 3.0, abs=1e-4)
    names = [b["name"] for b in d["report"]["bounds"]]
    assert "Mehlhorn_eqMbound" in names
    assert "Thm_first" in names


def test_code_json_trace_and_tree(capsys):
    d = run_json(
        capsys, "code", "--costs", "finite:1,2",
        "--inline", "0.5,0.3,0.2", "--format", "json", "--trace", "--tree",
    )
    assert "trace" in d
    assert "tree" in d
    assert d["tree"]["letter_index"] == 0
    ev = d["trace"][0]
    assert ev["range"] == [0, 2]
    assert ev["bins"][0]["letter"] == 1


def test_code_trace_text(capsys):
    code, out, err = run(
        capsys, "code", "--costs", "finite:1,5", "--inline", "0.5,0.5",
        "--trace",
    )
    assert code == EXIT_OK
    assert "right-shift@1" in out


def test_bounds_json_epsilon(capsys):
    d = run_json(
        capsys, "bounds", "--costs", "fib", "--gen", "uniform:20",
        "--epsilon", "0.5", "--format", "json",
    )
    rows = {b["name"]: b for b in d["bounds"]}
    assert not rows["Mehlhorn_eqMbound"]["applicable"]
    assert rows["Mehlhorn_eqMbound"]["reason"] == "infinite_alphabet"
    # Fibonacci multiplicities grow without bound, so the constant bounds
    # drop out and only the approximation row applies
    assert not rows["Thm_beta"]["applicable"]
    assert rows["Thm_beta"]["reason"] == "beta_infinite"
    assert rows["Lem_Kbound"]["reason"] == "unbounded_profile"
    approx = rows["Thm_approx(0.5)"]
    assert approx["applicable"]
    assert d["nr"] <= approx["value"] + 1e-7


def test_bounds_text_shows_f_constant(capsys):
    code, out, err = run(
        capsys, "bounds", "--costs", "linear", "--gen", "uniform:10",
        "--epsilon", "0.5",
    )
    assert code == EXIT_OK
    assert "N_eps=7" in out


def test_oracle_json(capsys):
    d = run_json(
        capsys, "oracle", "--costs", "finite:1,1",
        "--inline", "0.333333,0.333333,0.166667,0.166667", "--normalize",
        "--format", "json",
    )
    assert d["opt_cost"] == pytest.approx(2.0, abs=1e-6)
    assert d["codeword_costs"] == [2.0, 2.0, 2.0, 2.0]
    assert len(d["words"]) == 4
    assert d["cost_cap_used"] is None  # infinity serializes as null


def test_compare_clean(capsys):
    d = run_json(
        capsys, "compare", "--costs", "finite:1,3", "--gen", "uniform:7",
        "--format", "json",
    )
    assert d["violations"] == []
    assert d["opt_cost"] <= d["cost"] + 1e-9
    assert d["lower_bound"] <= d["opt_cost"] + 1e-9
    assert d["gap"] == pytest.approx(d["cost"] - d["opt_cost"], abs=1e-12)


def test_compare_flags_violations(capsys, monkeypatch):
    class FakeResult:
        opt_cost = 99.0
        nodes_explored = 1

    monkeypatch.setattr("varncode.cli.exact_opt", lambda *a, **k: FakeResult())
    code, out, err = run(
        capsys, "compare", "--costs", "finite:1,2", "--inline", "0.5,0.5",
    )
    assert code == EXIT_VIOLATION
    assert "VIOLATION" in out


def test_bench_csv(capsys):
    code, out, err = run(
        capsys, "bench", "--costs", "linear", "--sizes", "100,200",
        "--dist", "zipf:1.0", "--repeats", "2",
    )
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0] == "n,seconds,cost,nr"
    assert lines[1].startswith("100,")
    assert lines[2].startswith("200,")
    assert len(lines) == 3


# ---------------------------------------------------------------------------
# determinism
# ---------------------------------------------------------------------------

def test_json_output_is_byte_stable(capsys):
    argv = ("code", "--costs", "fib", "--gen", "zipf:1.0,40",
            "--epsilon", "0.25", "--format", "json")
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == EXIT_OK
    assert out1 == out2


def test_seeded_generator_stable_across_runs(capsys):
    argv = ("bounds", "--costs", "finite:1,2", "--gen", "uniform:30",
            "--seed", "5", "--format", "json")
    _, out1, _ = run(capsys, *argv)
    _, out2, _ = run(capsys, *argv)
    assert out1 == out2


# ---------------------------------------------------------------------------
# exit codes
# ---------------------------------------------------------------------------

def test_exit_parse_errors(capsys, tmp_path):
    code, _, err = run(capsys, "root", "--costs", "wat:1,2")
    assert code == EXIT_PARSE
    assert err.startswith("error parse:")

    code, _, err = run(capsys, "code", "--costs", "finite:1,2",
                       "--gen", "nope:4")
    assert code == EXIT_PARSE

    code, _, err = run(capsys, "code", "--costs", "finite:1,2",
                       "--probs", str(tmp_path / "missing.txt"))
    assert code == EXIT_PARSE

    # probabilities that do not sum to 1 without --normalize
    code, _, err = run(capsys, "code", "--costs", "finite:1,2",
                       "--inline", "0.5,0.2")
    assert code == EXIT_PARSE
    assert "normalize" in err


def test_exit_numeric_underflow(capsys):
    code, _, err = run(capsys, "code", "--costs", "finite:1,1",
                       "--gen", "dyadic:90")
    assert code == EXIT_NUMERIC
    assert err.startswith("error bin_underflow:")


def test_exit_oracle_errors(capsys):
    code, _, err = run(capsys, "oracle", "--costs", "finite:1,1",
                       "--gen", "uniform:11")
    assert code == EXIT_ORACLE
    assert err.startswith("error oracle_too_large:")

    code, _, err = run(capsys, "oracle", "--costs", "finite:1,1",
                       "--inline", "0.5,0.5", "--cap", "0.25")
    assert code == EXIT_ORACLE
    assert err.startswith("error cap_too_small:")


def test_epsilon_out_of_range(capsys):
    code, _, err = run(capsys, "bounds", "--costs", "fib",
                       "--gen", "uniform:5", "--epsilon", "0.9")
    assert code == EXIT_PARSE


# ---------------------------------------------------------------------------
# console entry point
# ---------------------------------------------------------------------------

def test_console_script_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "varncode.cli", "root", "--costs", "fib",
         "--format", "json"],
        capture_output=True, text=True,
    )
    assert proc.returncode == EXIT_OK
    d = json.loads(proc.stdout)
    assert d["c"] == pytest.approx(1.2715533031636117, abs=1e-9)
