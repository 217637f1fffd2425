"""U/O labelling of strands inside a region.

A move region is admissible when every strand inside it can be marked U
(below the reference arc's level) or O (above it) such that arcs pinned by
their boundary crossings keep their forced letter and no U strand ever
passes over an O strand.  Each dominance pair (j over k) is the Horn
clause (k=O implies j=O), so fixed-point propagation of O from the forced
strands decides satisfiability; everything left undetermined is U, which
keeps results deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

U = "U"
O = "O"
CONFLICT = "conflict"
UNSAT = None


@dataclass
class LabelProblem:
    strands: list[int]
    forced: dict[int, str] = field(default_factory=dict)
    dominance: list[tuple[int, int]] = field(default_factory=list)  # (over, under)

    def add_meeting(self, strand: int, is_over: bool) -> None:
        """Record one boundary meeting of `strand` with the reference arc."""
        want = O if is_over else U
        have = self.forced.get(strand)
        if have is None:
            self.forced[strand] = want
        elif have != want:
            self.forced[strand] = CONFLICT


def forced_label(meetings: list[bool]) -> str | None:
    """Label forced by the over/under pattern of an arc's boundary meetings:
    O if over everywhere, U if under everywhere, conflict when mixed, None
    when the strand never meets the reference arc (a free circle)."""
    if not meetings:
        return None
    if all(meetings):
        return O
    if not any(meetings):
        return U
    return CONFLICT


def solve(p: LabelProblem) -> dict[int, str] | None:
    """Satisfying assignment extending the forced labels, or UNSAT (None)."""
    if any(v == CONFLICT for v in p.forced.values()):
        return UNSAT
    above: dict[int, list[int]] = {s: [] for s in p.strands}
    for j, k in p.dominance:
        if j == k:
            continue  # self-crossings never constrain
        above[k].append(j)  # k=O forces j=O
    is_o: set[int] = {s for s, v in p.forced.items() if v == O}
    stack = list(is_o)
    while stack:
        k = stack.pop()
        for j in above[k]:
            if j not in is_o:
                is_o.add(j)
                stack.append(j)
    for s, v in p.forced.items():
        if v == U and s in is_o:
            return UNSAT
    return {s: (O if s in is_o else U) for s in p.strands}
