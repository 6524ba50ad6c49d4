import itertools
import random
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from chromem.sat import (
    CnfInstance,
    DimacsBridge,
    Solver,
    format_solution,
    luby,
    parse_dimacs,
    parse_solution,
)


def brute_sat(nvars, clauses):
    for bits in itertools.product((False, True), repeat=nvars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in clauses):
            return True
    return False


def satisfies(model, clauses):
    return all(any(l in model for l in c) for c in clauses)


def test_luby_prefix():
    assert [luby(i) for i in range(1, 16)] == [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]


def test_trivial_instances():
    s = Solver(1)
    assert s.solve()
    s = Solver(1)
    s.add_clause([1])
    s.add_clause([-1])
    assert not s.solve()
    s = Solver(0)
    assert not s.add_clause([]) or not s.solve()


def test_pigeonhole_unsat():
    n = 6
    cnf = CnfInstance()
    p = {(i, j): cnf.var((i, j), f"p[{i},{j}]") for i in range(n + 1) for j in range(n)}
    for i in range(n + 1):
        cnf.add([p[i, j] for j in range(n)])
    for j in range(n):
        for a, b in itertools.combinations(range(n + 1), 2):
            cnf.add([-p[a, j], -p[b, j]])
    assert not cnf.solver().solve()


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_random_cnf_matches_brute_force(seed):
    rng = random.Random(seed)
    nvars = rng.randint(1, 9)
    clauses = [tuple(rng.choice((1, -1)) * rng.randint(1, nvars) for _ in range(rng.randint(1, 3)))
               for _ in range(rng.randint(1, 5 * nvars))]
    s = Solver(nvars)
    ok = all(s.add_clause(c) for c in clauses)
    got = ok and s.solve()
    assert got == brute_sat(nvars, clauses)
    if got:
        assert satisfies(s.model(), clauses)


def test_incremental_clauses():
    s = Solver(3)
    s.add_clause([1, 2, 3])
    assert s.solve()
    blocked = 0
    while s.solve():
        model = s.model()
        s.add_clause([-l for l in model])
        blocked += 1
    assert blocked == 7


def test_dimacs_round_trip():
    cnf = CnfInstance()
    a = cnf.var("a", "x[q_init,0]")
    b = cnf.var("b", "z[0,a,1]")
    cnf.add([a, -b])
    cnf.add([b])
    text = cnf.to_dimacs()
    lines = text.splitlines()
    assert lines[0] == "c var 1 = x[q_init,0]"
    assert "p cnf 2 2" in lines
    back = parse_dimacs(text)
    assert back.nvars == 2
    assert back.clauses == cnf.clauses
    assert back.annotations == {1: "x[q_init,0]", 2: "z[0,a,1]"}


def test_solution_format():
    assert parse_solution(format_solution(True, {1, -2, 3})) == (True, {1, -2, 3})
    assert parse_solution(format_solution(False)) == (False, set())
    with pytest.raises(ValueError):
        parse_solution("v 1 0\n")


def test_bridge_writes_instances(tmp_path):
    cnf = CnfInstance()
    x = cnf.var("x", "x")
    cnf.add([x])
    bridge = DimacsBridge(str(tmp_path))
    sat, model = bridge.solve(cnf, "unit")
    assert sat and x in model
    assert sorted(p.name for p in tmp_path.iterdir()) == ["0001_unit.cnf", "0001_unit.sol"]


def test_bridge_external_command(tmp_path):
    cnf = CnfInstance()
    x = cnf.var("x", "x")
    cnf.add([x])
    cnf.add([-x])
    bridge = DimacsBridge(str(tmp_path), f"{sys.executable} -m chromem.sat")
    assert bridge.solve(cnf, "contradiction") == (False, set())


def test_module_entry_point(tmp_path):
    path = tmp_path / "f.cnf"
    path.write_text("p cnf 2 2\n1 2 0\n-1 0\n")
    out = subprocess.run([sys.executable, "-m", "chromem.sat", str(path)],
                         capture_output=True, text=True)
    assert out.returncode == 10
    assert parse_solution(out.stdout) == (True, {-1, 2})
