"""Monotonic simplification driver.

The reduced procedure runs a breadth-first search over horizontal Z3 moves
from the current diagram (deduplicating states by canonical code) until any
decreasing Z move appears; the horizontal prefix plus the decreasing move
are applied at once and the search restarts from the smaller diagram, so a
diagram is never revisited.  When the reduced procedure terminates on a
diagram with three or more crossings, the complete variant looks for a
connected-sum split (move C, then C-tilde) and recurses on both halves.

Everything is deterministic: candidate moves applied at a given diagram are
ordered by (delta_c, canonical code of the result), BFS visits states in
insertion order, and the first decreasing hit wins.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .diagram import Diagram, SplitDiagramError, canonical_code
from .zmoves import apply_move, find_moves


@dataclass(frozen=True)
class Budget:
    max_visited: int = 10000     # BFS states per reduce_step call
    c_max_len: int = 8           # dual cycle length cap for C search
    geodesic_cap: int = 64       # geodesics per arc/end-face choice
    use_ctilde: bool = True
    horizontal_z2: bool = False  # Z2 is always decreasing; flag kept to probe
                                 # reports of horizontal Z2 usage, a no-op here

    def __post_init__(self):
        if min(self.max_visited, self.c_max_len, self.geodesic_cap) <= 0:
            raise ValueError("budget fields must be positive")


@dataclass(frozen=True)
class TraceStep:
    move: str
    kind: str
    delta_c: int
    c_after: int
    code_after: bytes

    def to_json(self) -> dict:
        return {"move": self.move, "type": self.kind,
                "delta_c": self.delta_c, "c_after": self.c_after}


@dataclass
class Trace:
    steps: list[TraceStep]
    outcome: Diagram
    status: str  # reduced | stuck | budget-exhausted
    input_code: bytes = b""
    visited: int = 0

    def monotonic(self) -> bool:
        return all(s.delta_c <= 0 for s in self.steps)

    def strictly_monotonic(self) -> bool:
        return all(s.delta_c < 0 for s in self.steps)


@dataclass
class SumTree:
    node: Trace
    split_kind: str | None = None  # 'c' | 'ctilde' when children exist
    children: list["SumTree"] = field(default_factory=list)

    def leaves(self) -> list["SumTree"]:
        if not self.children:
            return [self]
        out = []
        for ch in self.children:
            out.extend(ch.leaves())
        return out

    def crossing_total(self) -> int:
        return sum(leaf.node.outcome.n_crossings for leaf in self.leaves())


def is_untangled(d: Diagram) -> bool:
    """A knot diagram with fewer than three crossings is trivial."""
    return d.n_crossings < 3


def _move_summary(m) -> str:
    if m.kind == "z1":
        return f"z1 collapse loop at crossing {m.alpha.base()} ({m.delta_c})"
    if m.kind == "z2":
        x = m.arc_u.walk[0] >> 2
        y = m.arc_u.walk[-1] >> 2
        return f"z2 pull apart crossings {x},{y} (-2)"
    if m.kind == "z3":
        return (f"z3 reroute {len(m.alpha.entries())}-crossing arc over "
                f"{len(m.steps)} edges ({m.delta_c:+d})")
    return m.kind


def _candidates(d: Diagram, budget: Budget):
    """Applied move candidates, deterministically ordered by
    (delta_c, canonical code of result, structural key)."""
    out = []
    for m in find_moves(d, budget.geodesic_cap):
        if m.delta_c > 0:
            continue
        r = apply_move(d, m)
        out.append((m.delta_c, canonical_code(r), m.sort_key(), m, r))
    out.sort(key=lambda t: t[:3])
    return [(m, r) for _, _, _, m, r in out]


def reduce_step(d: Diagram, budget: Budget = Budget()):
    """One round of Procedure P: a (possibly empty) chain of horizontal Z3
    moves ending in a decreasing Z move, found by BFS over horizontal
    states; None when no decreasing move is reachable.

    Returns (steps, visited, exhausted): steps is a list of (move, diagram)
    pairs or None; exhausted reports that the BFS hit the state budget.
    """
    if d.n_crossings == 0:
        return None, 0, False
    start_code = canonical_code(d)
    seen = {start_code}
    frontier = [(d, [])]
    visited = 0
    exhausted = False
    while frontier:
        nxt = []
        for cur, path in frontier:
            visited += 1
            if visited > budget.max_visited:
                return None, visited, True
            horizontals = []
            for m, r in _candidates(cur, budget):
                if m.delta_c < 0:
                    return path + [(m, r)], visited, False
                horizontals.append((m, r))
            for m, r in horizontals:
                code = canonical_code(r)
                if code in seen:
                    continue
                seen.add(code)
                nxt.append((r, path + [(m, r)]))
        frontier = nxt
    return None, visited, exhausted


def procedure_p(d: Diagram, budget: Budget = Budget()) -> Trace:
    """Greedy repetition of reduce_step until no decreasing move is
    reachable; the trace is monotonic by construction."""
    if d.n_crossings and (d.loops or not d.is_connected()):
        raise SplitDiagramError("simplification requires a connected diagram")
    steps: list[TraceStep] = []
    cur = d
    in_code = canonical_code(d)
    total_visited = 0
    while True:
        found, visited, exhausted = reduce_step(cur, budget)
        total_visited += visited
        if found is None:
            status = "budget-exhausted" if exhausted else "reduced"
            return Trace(steps, cur, status, in_code, total_visited)
        for m, r in found:
            steps.append(TraceStep(_move_summary(m), m.kind, m.delta_c,
                                   r.n_crossings, canonical_code(r)))
            cur = r


def complete_simplify(d: Diagram, budget: Budget = Budget()) -> SumTree:
    """Procedure P, falling back to the connected-sum moves when stuck with
    three or more crossings, recursing on both split halves."""
    from .cmoves import apply_c, apply_ctilde, find_c, find_ctilde

    trace = procedure_p(d, budget)
    final = trace.outcome
    tree = SumTree(trace)
    if trace.status != "reduced" or is_untangled(final):
        return tree
    pair = None
    moves = find_c(final, budget.c_max_len)
    if moves:
        pair = apply_c(final, moves[0])
        tree.split_kind = "c"
    elif budget.use_ctilde:
        tmoves = find_ctilde(final, budget.c_max_len)
        if tmoves:
            pair = apply_ctilde(final, tmoves[0])
            tree.split_kind = "ctilde"
    if pair is None:
        # Z-moves finished but the diagram is not untangled and no split
        # applies: report the leaf as stuck rather than claim minimality
        trace.status = "stuck"
        return tree
    tree.children = [complete_simplify(pair.d0, budget),
                     complete_simplify(pair.d1, budget)]
    return tree


# -- serialization -----------------------------------------------------------


def trace_to_json(t: Trace) -> dict:
    return {
        "input_code": t.input_code.decode(),
        "steps": [s.to_json() for s in t.steps],
        "status": t.status,
        "children": [],
    }


def sumtree_to_json(tree: SumTree) -> dict:
    out = trace_to_json(tree.node)
    out["children"] = [sumtree_to_json(ch) for ch in tree.children]
    if tree.split_kind:
        out["split"] = tree.split_kind
    return out


def dump_json(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)
