"""A small CDCL SAT solver and DIMACS plumbing.

The solver uses two watched literals, first-UIP learning, VSIDS with a lazy
heap, phase saving and Luby restarts.  Clauses may be added between calls to
``solve``, which is what the counterexample-guided loop relies on.

Run ``python -m chromem.sat file.cnf`` to solve a DIMACS file and print a
standard ``s``/``v`` answer.
"""
from __future__ import annotations

import heapq
import os
import shlex
import subprocess
import sys
from dataclasses import dataclass, field


def luby(i: int) -> int:
    """i-th term (1-based) of the Luby sequence 1 1 2 1 1 2 4 ..."""
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while (1 << k) - 1 != i:
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1
    return 1 << (k - 1)


class Solver:
    def __init__(self, nvars: int = 0):
        self.nvars = 0
        self.clauses = []
        self.watches = [[], []]
        self.assign = [0]
        self.level = [0]
        self.reason = [None]
        self.activity = [0.0]
        self.phase = [-1]
        self.trail = []
        self.trail_lim = []
        self.qhead = 0
        self.heap = []
        self.inc = 1.0
        self.ok = True
        self.conflicts = 0
        self.decisions = 0
        self._model = None
        self.ensure(nvars)

    # -- bookkeeping

    def ensure(self, n: int):
        while self.nvars < n:
            self.nvars += 1
            self.watches += [[], []]
            self.assign.append(0)
            self.level.append(0)
            self.reason.append(None)
            self.activity.append(0.0)
            self.phase.append(-1)
            heapq.heappush(self.heap, (0.0, self.nvars))

    @staticmethod
    def _w(lit):
        return 2 * lit if lit > 0 else -2 * lit + 1

    def value(self, lit) -> int:
        a = self.assign[abs(lit)]
        return a if lit > 0 else -a

    def _enqueue(self, lit, reason):
        v = abs(lit)
        self.assign[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _bump(self, v):
        self.activity[v] += self.inc
        if self.activity[v] > 1e100:
            self.activity = [a * 1e-100 for a in self.activity]
            self.inc *= 1e-100
            self.heap = [(-self.activity[u], u) for u in range(1, self.nvars + 1)
                         if not self.assign[u]]
            heapq.heapify(self.heap)
        if not self.assign[v]:
            heapq.heappush(self.heap, (-self.activity[v], v))

    # -- clauses

    def add_clause(self, lits) -> bool:
        """Add a clause at decision level 0; returns False once the formula is known UNSAT."""
        if not self.ok:
            return False
        self._backtrack(0)
        seen = set()
        out = []
        for lit in lits:
            if lit == 0:
                raise ValueError("zero literal in clause")
            self.ensure(abs(lit))
            if -lit in seen:
                return True
            if lit in seen:
                continue
            val = self.value(lit)
            if val > 0:
                return True
            seen.add(lit)
            if val == 0:
                out.append(lit)
        if not out:
            self.ok = False
        elif len(out) == 1:
            self._enqueue(out[0], None)
            if self._propagate() is not None:
                self.ok = False
        else:
            self._attach(out)
        return self.ok

    def _attach(self, lits):
        cref = len(self.clauses)
        self.clauses.append(lits)
        self.watches[self._w(lits[0])].append(cref)
        self.watches[self._w(lits[1])].append(cref)
        return cref

    # -- search

    def _propagate(self):
        clauses, watches, assign, trail = self.clauses, self.watches, self.assign, self.trail
        while self.qhead < len(trail):
            false_lit = -trail[self.qhead]
            self.qhead += 1
            ws = watches[2 * false_lit if false_lit > 0 else -2 * false_lit + 1]
            i = j = 0
            n = len(ws)
            while i < n:
                cref = ws[i]
                i += 1
                c = clauses[cref]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], false_lit
                first = c[0]
                val = assign[first] if first > 0 else -assign[-first]
                if val > 0:
                    ws[j] = cref
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lit = c[k]
                    if (assign[lit] if lit > 0 else -assign[-lit]) >= 0:
                        c[1], c[k] = lit, false_lit
                        watches[2 * lit if lit > 0 else -2 * lit + 1].append(cref)
                        break
                else:
                    ws[j] = cref
                    j += 1
                    if val < 0:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self.qhead = len(trail)
                        return cref
                    self._enqueue(first, cref)
            del ws[j:]
        return None

    def _analyze(self, confl):
        seen = set()
        learnt = [0]
        counter = 0
        lvl = len(self.trail_lim)
        idx = len(self.trail) - 1
        p = None
        while True:
            for q in self.clauses[confl]:
                v = abs(q)
                if p is not None and v == abs(p):
                    continue
                if v not in seen and self.level[v] > 0:
                    seen.add(v)
                    self._bump(v)
                    if self.level[v] == lvl:
                        counter += 1
                    else:
                        learnt.append(q)
            while abs(self.trail[idx]) not in seen:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            seen.discard(abs(p))
            counter -= 1
            if counter == 0:
                break
            confl = self.reason[abs(p)]
        learnt[0] = -p
        # drop literals implied by the rest of the clause
        in_clause = {abs(q) for q in learnt}
        kept = [learnt[0]]
        for q in learnt[1:]:
            r = self.reason[abs(q)]
            if r is None or any(abs(x) not in in_clause and self.level[abs(x)] > 0
                                for x in self.clauses[r] if abs(x) != abs(q)):
                kept.append(q)
        learnt = kept
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda i: self.level[abs(learnt[i])])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, self.level[abs(learnt[1])]

    def _backtrack(self, lvl):
        if len(self.trail_lim) <= lvl:
            return
        stop = self.trail_lim[lvl]
        for lit in self.trail[stop:]:
            v = abs(lit)
            self.phase[v] = 1 if lit > 0 else -1
            self.assign[v] = 0
            self.reason[v] = None
            heapq.heappush(self.heap, (-self.activity[v], v))
        del self.trail[stop:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    def _pick(self):
        while self.heap:
            _, v = heapq.heappop(self.heap)
            if not self.assign[v]:
                return v
        return None

    def solve(self) -> bool:
        self._model = None
        if not self.ok:
            return False
        self._backtrack(0)
        if self._propagate() is not None:
            self.ok = False
            return False
        restart = 1
        budget = 100 * luby(restart)
        since = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                since += 1
                if not self.trail_lim:
                    self.ok = False
                    return False
                learnt, back = self._analyze(confl)
                self._backtrack(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self._enqueue(learnt[0], self._attach(learnt))
                self.inc *= 1.05
                continue
            if since >= budget:
                restart += 1
                budget = 100 * luby(restart)
                since = 0
                self._backtrack(0)
                continue
            v = self._pick()
            if v is None:
                self._model = [0] + [self.assign[u] for u in range(1, self.nvars + 1)]
                self._backtrack(0)
                return True
            self.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(v * self.phase[v], None)

    def model(self) -> set:
        """True literals of the last satisfying assignment."""
        if self._model is None:
            raise RuntimeError("no model available")
        return {v if self._model[v] > 0 else -v for v in range(1, len(self._model))}


# ----------------------------------------------------------------- CNF instances

@dataclass
class CnfInstance:
    nvars: int = 0
    clauses: list = field(default_factory=list)
    annotations: dict = field(default_factory=dict)  # var -> tag string
    names: dict = field(default_factory=dict)        # key -> var

    def var(self, key, tag: str) -> int:
        """Variable for ``key``, created on first use."""
        v = self.names.get(key)
        if v is None:
            self.nvars += 1
            v = self.names[key] = self.nvars
            self.annotations[v] = tag
        return v

    def add(self, clause):
        clause = tuple(clause)
        if any(lit == 0 for lit in clause):
            raise ValueError("zero literal in clause")
        self.clauses.append(clause)

    def to_dimacs(self) -> str:
        lines = [f"c var {v} = {self.annotations[v]}" for v in sorted(self.annotations)]
        lines.append(f"p cnf {self.nvars} {len(self.clauses)}")
        lines += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"

    def solver(self) -> Solver:
        s = Solver(self.nvars)
        for c in self.clauses:
            s.add_clause(c)
        return s


def parse_dimacs(text: str) -> CnfInstance:
    cnf = CnfInstance()
    pending = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("%"):
            continue
        if line.startswith("c"):
            parts = line.split(None, 4)
            if len(parts) == 5 and parts[1] == "var" and parts[3] == "=":
                cnf.annotations[int(parts[2])] = parts[4]
            continue
        if line.startswith("p"):
            cnf.nvars = int(line.split()[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                cnf.clauses.append(tuple(pending))
                pending = []
            else:
                pending.append(lit)
    if pending:
        cnf.clauses.append(tuple(pending))
    return cnf


def format_solution(sat: bool, model=None) -> str:
    if not sat:
        return "s UNSATISFIABLE\n"
    lits = sorted(model, key=abs)
    return "s SATISFIABLE\nv " + " ".join(map(str, lits)) + " 0\n"


def parse_solution(text: str):
    """Returns (satisfiable, set of true literals); literals are empty when UNSAT."""
    status = None
    lits = set()
    for line in text.splitlines():
        if line.startswith("s "):
            status = line[2:].strip()
        elif line.startswith("v "):
            lits.update(int(t) for t in line[2:].split() if t != "0")
    if status not in ("SATISFIABLE", "UNSATISFIABLE"):
        raise ValueError("solution has no 's SATISFIABLE' or 's UNSATISFIABLE' line")
    return status == "SATISFIABLE", lits


class DimacsBridge:
    """Dumps every instance to a directory and reads the answer back from a solution file.

    With no ``command`` the built-in solver writes the solution file; otherwise
    ``command`` (a shell-style string) is run with the CNF path appended and its
    standard output is taken as the solution.
    """

    def __init__(self, directory: str, command: str | None = None):
        self.directory = directory
        self.command = command
        self.count = 0
        os.makedirs(directory, exist_ok=True)

    def solve(self, cnf: CnfInstance, name: str):
        self.count += 1
        stem = os.path.join(self.directory, f"{self.count:04d}_{name}")
        with open(stem + ".cnf", "w") as fh:
            fh.write(cnf.to_dimacs())
        if self.command:
            out = subprocess.run(shlex.split(self.command) + [stem + ".cnf"],
                                 capture_output=True, text=True, check=False).stdout
        else:
            s = cnf.solver()
            sat = s.solve()
            out = format_solution(sat, s.model() if sat else None)
        with open(stem + ".sol", "w") as fh:
            fh.write(out)
        with open(stem + ".sol") as fh:
            return parse_solution(fh.read())


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: python -m chromem.sat FILE.cnf", file=sys.stderr)
        return 2
    with open(argv[0]) as fh:
        cnf = parse_dimacs(fh.read())
    s = cnf.solver()
    sat = s.solve()
    sys.stdout.write(format_solution(sat, s.model() if sat else None))
    return 10 if sat else 20


if __name__ == "__main__":
    sys.exit(main())
