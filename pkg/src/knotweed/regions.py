"""Side computation for closed curves drawn on a diagram.

A candidate move region is bounded by a simple closed curve made of whole
diagram edges (Z1 loops, Z2 bigon curves).  Faces on the two sides of the
curve are separated exactly by its edges, so a union-find over faces that
merges across every non-curve edge yields the two components of the
complement.  The strands inside the chosen side are then walked off the
curve's interior crossings.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagram import Diagram, FaceMap, opposite
from .labeling import CONFLICT, LabelProblem, forced_label, solve


class _UF:
    def __init__(self, n: int):
        self.p = list(range(n))

    def find(self, x: int) -> int:
        while self.p[x] != x:
            self.p[x] = self.p[self.p[x]]
            x = self.p[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.p[ra] = rb


def face_sides(d: Diagram, fm: FaceMap, curve_edges: set[int]) -> tuple[list[int], int]:
    """Classify faces by the side of the closed curve covering `curve_edges`
    (edge ids).  Returns (side index per face, number of sides);  a simple
    closed curve always yields exactly two sides.
    """
    uf = _UF(len(fm.faces))
    for a, b in d.edges():
        if d.edge_id(a) in curve_edges:
            continue
        uf.union(fm.face_of[a], fm.face_of[b])
    roots: dict[int, int] = {}
    side = []
    for f in range(len(fm.faces)):
        r = uf.find(f)
        side.append(roots.setdefault(r, len(roots)))
    return side, len(roots)


def edge_side(d: Diagram, fm: FaceMap, side: list[int], dart: int) -> int:
    """Side of a non-curve edge (both of its faces agree)."""
    return side[fm.face_of[dart]]


@dataclass
class RegionStrand:
    """One component of the region preimage: an arc pinned to the curve at
    both ends, or a circle floating inside."""

    sid: int
    darts: set[int] = field(default_factory=set)
    meetings: list[bool] = field(default_factory=list)  # True = over the curve
    is_circle: bool = False


@dataclass
class RegionAnalysis:
    strands: list[RegionStrand]
    problem: LabelProblem
    labeling: dict[int, str] | None  # None = unsolvable


def analyze_region(d: Diagram, fm: FaceMap, side: list[int], omega: int,
                   interior_entries: list[int],
                   curve_crossings: set[int]) -> RegionAnalysis:
    """Enumerate the strand components inside side `omega` and solve their
    U/O labelling.

    interior_entries: entry darts of the curve's full passages (one per
    crossing where another strand crosses the curve transversally).
    curve_crossings: every crossing lying on the curve (interior passages
    plus base crossings); region walks must stop there.
    """
    strands: list[RegionStrand] = []
    piece_of: dict[int, int] = {}

    def walk_arc(start: int) -> RegionStrand:
        st = RegionStrand(len(strands))
        st.meetings.append(d.over_dart(start))
        t = start
        while True:
            st.darts.add(t)
            a = d.pair[t]
            st.darts.add(a)
            c = a >> 2
            if c in curve_crossings:
                st.meetings.append(d.over_dart(a))
                return st
            t = opposite(a)

    for e in interior_entries:
        c = e >> 2
        others = [4 * c + ((e & 3) + 1) % 4, 4 * c + ((e & 3) + 3) % 4]
        inside = [t for t in others if side[fm.face_of[t]] == omega]
        if len(inside) != 1:
            raise AssertionError("transversal strand must cross into the region once")
        t = inside[0]
        if t in piece_of:
            continue
        st = walk_arc(t)
        strands.append(st)
        for dd in st.darts:
            piece_of[dd] = st.sid

    # floating circles: region edges not reached by any arc walk
    for a, b in d.edges():
        if a in piece_of or (a >> 2) in curve_crossings or (b >> 2) in curve_crossings:
            continue
        if side[fm.face_of[a]] != omega or side[fm.face_of[b]] != omega:
            continue
        st = RegionStrand(len(strands), is_circle=True)
        t = a
        while t not in st.darts:
            st.darts.add(t)
            st.darts.add(d.pair[t])
            t = opposite(d.pair[t])
        strands.append(st)
        for dd in st.darts:
            piece_of[dd] = st.sid

    prob = LabelProblem(strands=[s.sid for s in strands])
    for s in strands:
        f = forced_label(s.meetings)
        if f == CONFLICT:
            return RegionAnalysis(strands, prob, None)
        if f is not None:
            prob.forced[s.sid] = f
    for c in range(d.n_crossings):
        if c in curve_crossings:
            continue
        d0 = 4 * c
        if side[fm.face_of[d0]] != omega:
            continue
        over_dart = 4 * c + d.over[c]
        under_dart = 4 * c + 1 - d.over[c]
        j = piece_of[over_dart]
        k = piece_of[under_dart]
        if j != k:
            prob.dominance.append((j, k))

    return RegionAnalysis(strands, prob, solve(prob))
