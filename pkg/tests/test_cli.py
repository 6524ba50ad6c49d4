import io
import json
import random
import subprocess
import sys

import pytest

from chromem.cli import run
from chromem.memory import trivial_memory

from oracles import DATA, interesting_dfa, random_memory


def call(*argv):
    out = io.StringIO()
    code = run(["-q", *map(str, argv)], out=out)
    return code, json.loads(out.getvalue())


def without_seconds(report):
    """Drop every timing field, at any depth."""
    if isinstance(report, dict):
        return {k: without_seconds(v) for k, v in report.items() if k != "seconds"}
    if isinstance(report, list):
        return [without_seconds(v) for v in report]
    return report


def test_analyze_abcd():
    code, rep = call("analyze", DATA / "abcd.json")
    assert code == 0
    assert rep["max_antichain"] == ["q_a", "q_b"]
    assert len(rep["chain_cover"]) == 2
    assert {tuple(x["pair"]) for x in rep["incomparable_pairs"]} == {("q_a", "q_b"), ("q_c", "q_d")}
    assert rep["command"][:2] == ["-q", "analyze"]


def test_analyze_quotient():
    code, rep = call("analyze", "--quotient", DATA / "ab.json")
    assert code == 0 and rep["automaton"]["quotient_states"] == 3


def test_check_safe_abcd():
    code, rep = call("check", "--kind", "safe", DATA / "abcd.json", DATA / "abcd_mem3.json")
    assert code == 0 and rep["verdict"] == "strongly-monotone"
    assert rep["gamma"]["m1"] == ["q_init", "q_a"]


def test_check_reach_ab_trivial():
    code, rep = call("check", "--kind", "reach", DATA / "ab.json", DATA / "ab_mtriv.json")
    assert code == 1
    assert rep["verdict"] == "not-progress-consistent"
    assert rep["witness"]["type"] == "PcWitness"
    assert rep["witness"]["w2"] == ["a"]


def test_check_not_strongly_monotone(tmp_path):
    mem = tmp_path / "triv.json"
    mem.write_text(trivial_memory("abcd").dumps())
    code, rep = call("check", "--kind", "safe", DATA / "abcd.json", mem)
    assert code == 1 and rep["verdict"] == "not-strongly-monotone"
    assert rep["witness"]["type"] == "SmWitness"


def test_check_alphabet_mismatch():
    code, rep = call("check", "--kind", "safe", DATA / "abcd.json", DATA / "ab_mtriv.json")
    assert code == 2 and rep["error"]["code"] == "automaton.AlphabetMismatch"


def test_synth_round_trip(tmp_path):
    for kind in ("safe", "reach"):
        mem = tmp_path / f"{kind}.json"
        code, rep = call("synth", "--kind", kind, DATA / "abcd.json", "-o", mem)
        assert code == 0 and rep["k"] == {"safe": 3, "reach": 6}[kind]
        assert json.loads(mem.read_text()) == rep["memory"]
        code, rep = call("check", "--kind", kind, DATA / "abcd.json", mem)
        assert code == 0


def test_synth_max_k():
    code, rep = call("synth", "--kind", "safe", DATA / "abcd.json", "--max-k", "2")
    assert code == 1 and rep["verdict"] == "no-memory-within-bound"


def test_synth_dimacs(tmp_path):
    code, rep = call("synth", "--kind", "safe", DATA / "ab.json", "--dimacs", tmp_path)
    assert code == 0
    assert any(p.suffix == ".cnf" for p in tmp_path.iterdir())


def test_reduce_ham_and_synth(tmp_path):
    out = tmp_path / "dg.json"
    code, rep = call("reduce-ham", DATA / "chord_graph.json", "-o", out)
    assert code == 0 and rep["target_k"] == 10 and rep["states"] == 20
    code, rep = call("synth", "--kind", "safe", out)
    assert code == 0 and rep["k"] == 10


def test_verify(tmp_path):
    code, rep = call("verify", "--kind", "reach", DATA / "ab.json", DATA / "ab_mem2.json",
                     "--arenas", 30, "--from-witness")
    assert code == 0 and rep["random_refuted"] == 0
    code, rep = call("verify", "--kind", "reach", DATA / "ab.json", DATA / "ab_mtriv.json",
                     "--arenas", 10, "--from-witness")
    assert code == 1
    assert rep["witness_arenas"][0]["construction"] == "progress"
    assert not rep["witness_arenas"][0]["memory_suffices"]


def test_verify_jobs_do_not_change_the_report():
    args = ("verify", "--kind", "reach", DATA / "abcd.json", DATA / "abcd_mem3.json",
            "--arenas", 20, "--seed", 3)
    _, one = call(*args)
    _, two = call(*args, "--jobs", 2)
    one["command"] = two["command"] = None
    assert without_seconds(one) == without_seconds(two)


def test_reports_are_reproducible():
    args = ("synth", "--kind", "reach", DATA / "abcd.json")
    first, second = (json.dumps(without_seconds(call(*args)[1]), indent=2) for _ in range(2))
    assert first == second


def test_export_dot(tmp_path):
    code = run(["export-dot", str(DATA / "abcd.json"), "-o", str(tmp_path / "a.dot")], out=io.StringIO())
    assert code == 0
    assert (tmp_path / "a.dot").read_text().startswith("digraph dfa {")


@pytest.mark.parametrize("argv", [
    [],
    ["check", "--kind", "both", "a", "b"],
    ["synth", str(DATA / "abcd.json")],
    ["frobnicate"],
])
def test_usage_errors(argv):
    out = subprocess.run([sys.executable, "-m", "chromem", *argv], capture_output=True, text=True)
    assert out.returncode == 2
    assert "usage:" in out.stderr
    assert json.loads(out.stdout)["error"]["code"] == "cli.UsageError"


def test_missing_file():
    code, rep = call("analyze", "/nonexistent.json")
    assert code == 2 and rep["error"]["code"] == "cli.IOError"


def test_malformed_input(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    code, rep = call("analyze", bad)
    assert code == 2 and rep["error"]["code"] == "automaton.MalformedDocument"


def test_stdout_is_json_only():
    out = subprocess.run([sys.executable, "-m", "chromem", "check", "--kind", "reach",
                          str(DATA / "ab.json"), str(DATA / "ab_mtriv.json")],
                         capture_output=True, text=True)
    assert out.returncode == 1
    assert json.loads(out.stdout)["verdict"] == "not-progress-consistent"
    assert "refuted" in out.stderr


def test_exit_codes_match_verdicts(tmp_path):
    verdict_code = {"strongly-monotone": 0, "strongly-monotone-and-progress-consistent": 0,
                    "not-strongly-monotone": 1, "not-progress-consistent": 1}
    rng = random.Random(0)
    for i in range(100):
        d = interesting_dfa(8000 + i, max_colors=2)
        m = random_memory(d.alphabet, rng.randint(1, 3), rng)
        (tmp_path / "d.json").write_text(d.dumps())
        (tmp_path / "m.json").write_text(m.dumps())
        kind = rng.choice(("safe", "reach"))
        code, rep = call("check", "--kind", kind, tmp_path / "d.json", tmp_path / "m.json")
        assert code == verdict_code[rep["verdict"]]
