"""The generalized Reidemeister moves Z1, Z2, Z3.

Z1 collapses a simple loop whose enclosed region admits a U/O labelling;
it removes the base crossing plus two crossings per arc trapped inside.
Z2 pulls apart two arcs sharing their end crossings, one passing under the
other at both, again subject to a labelling of the enclosed region; it
always removes exactly two crossings.  Z3 reroutes a maximal all-over or
all-under arc along a shortest path in the dual graph, the new arc staying
at the same level everywhere; its crossing change is the path length minus
the number of crossings on the old arc.

Moves are detected as validated descriptors and applied as pure functions
returning new diagrams.  Detection output is sorted by (delta_c, structural
key); the search layer re-sorts applied results by canonical code so traces
do not depend on crossing numbering.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .diagram import (ArcRef, Diagram, FaceMap, SplitDiagramError, ccw_next,
                      maximal_arcs, opposite, trace_faces)
from .regions import analyze_region, face_sides
from .surgery import BARE, Surgery


@dataclass(frozen=True)
class Z1Move:
    alpha: ArcRef                       # loop walk, kind 'loop'
    omega: frozenset[int]               # faces on the collapsed side
    labeling: tuple[tuple[int, str], ...]
    delta_c: int

    kind = "z1"

    def sort_key(self):
        return (self.delta_c, self.kind, self.alpha.walk)


@dataclass(frozen=True)
class Z2Move:
    arc_u: ArcRef                       # kind 'span', under at both ends
    arc_o: ArcRef                       # kind 'span', over at both ends
    omega: frozenset[int]
    labeling: tuple[tuple[int, str], ...]
    delta_c: int = -2

    kind = "z2"

    def sort_key(self):
        return (self.delta_c, self.kind, self.arc_u.walk, self.arc_o.walk)


@dataclass(frozen=True)
class Z3Move:
    alpha: ArcRef                       # kind 'open', maximal at one level
    steps: tuple[tuple[int, bool], ...]  # (via_dart, new_strand_over)
    end_faces: tuple[int, int]
    delta_c: int

    kind = "z3"

    def sort_key(self):
        return (self.delta_c, self.kind, self.alpha.walk, self.steps)


Move = Z1Move | Z2Move | Z3Move


def move_class(m) -> str:
    if m.delta_c < 0:
        return "decreasing"
    if m.delta_c == 0:
        return "horizontal"
    return "increasing"


def _require_connected(d: Diagram) -> None:
    if d.n_crossings and (d.loops or not d.is_connected()):
        raise SplitDiagramError("move search requires a connected diagram")


def _labeling_tuple(analysis) -> tuple[tuple[int, str], ...]:
    return tuple(sorted(analysis.labeling.items()))


# -- Z1 ---------------------------------------------------------------------


def find_z1(d: Diagram) -> list[Z1Move]:
    """All valid loop collapses, one candidate per (crossing, side)."""
    _require_connected(d)
    if d.n_crossings == 0:
        return []
    fm = trace_faces(d)
    out = []
    from .diagram import arc_edges, loop_arc
    for c in range(d.n_crossings):
        for entry_slot in (d.in0[c], d.in1[c]):
            exit_dart = opposite(4 * c + entry_slot)
            loop = loop_arc(d, exit_dart)
            if loop is None or not loop.is_simple():
                continue
            d1, d2 = loop.walk[0], loop.walk[-1]
            curve = arc_edges(d, loop)
            side, nsides = face_sides(d, fm, curve)
            if nsides != 2:
                raise AssertionError("simple loop must have two sides")
            if (d2 & 3) == ((d1 & 3) + 1) % 4:
                omega_face = fm.face_of[d2]
            else:
                omega_face = fm.face_of[d1]
            omega = side[omega_face]
            germ = side[fm.face_of[opposite(d1)]]
            if omega == germ:
                raise AssertionError("loop region must avoid the extension germs")
            interior = list(loop.walk[1:-1:2])
            analysis = analyze_region(d, fm, side, omega, interior,
                                      set(loop.crossings()) | {loop.base()})
            if analysis.labeling is None:
                continue
            omega_faces = frozenset(f for f in range(len(fm.faces)) if side[f] == omega)
            out.append(Z1Move(loop, omega_faces, _labeling_tuple(analysis),
                              -(1 + len(interior))))
    out.sort(key=Z1Move.sort_key)
    return out


def apply_z1(d: Diagram, m: Z1Move) -> Diagram:
    s = Surgery(d)
    ends = s.remove(set(m.alpha.walk))
    if ends:
        raise AssertionError("loop collapse left loose ends")
    return s.freeze()


# -- Z2 ---------------------------------------------------------------------


def _span_arcs(d: Diagram) -> list[ArcRef]:
    """Simple strand arcs with both ends at crossings, walked forward."""
    out = []
    for c in range(d.n_crossings):
        for entry_slot in (d.in0[c], d.in1[c]):
            exit_dart = opposite(4 * c + entry_slot)
            walk = [exit_dart]
            seen = {c}
            e = d.pair[exit_dart]
            while True:
                c2 = e >> 2
                out.append(ArcRef(tuple(walk + [e]), "span"))
                if c2 in seen:
                    break
                seen.add(c2)
                walk.append(e)
                walk.append(opposite(e))
                e = d.pair[opposite(e)]
    return out


def _span_ends(arc: ArcRef) -> tuple[int, int]:
    return arc.walk[0], arc.walk[-1]


def find_z2(d: Diagram) -> list[Z2Move]:
    """All valid pull-apart moves on arc pairs with shared end crossings."""
    _require_connected(d)
    if d.n_crossings < 2:
        return []
    fm = trace_faces(d)
    from .diagram import arc_edges

    by_ends: dict[frozenset[int], dict[str, list[ArcRef]]] = {}
    for arc in _span_arcs(d):
        a, b = _span_ends(arc)
        x, y = a >> 2, b >> 2
        if x == y:
            continue
        inter = set(arc.crossings())
        if x in inter or y in inter or len(inter) != len(arc.crossings()):
            continue
        a_over = d.over_dart(a)
        b_over = d.over_dart(b)
        if a_over != b_over:
            continue
        key = frozenset((x, y))
        by_ends.setdefault(key, {"O": [], "U": []})["O" if a_over else "U"].append(arc)

    out = []
    for key, groups in sorted(by_ends.items(), key=lambda kv: sorted(kv[0])):
        for arc_u in groups["U"]:
            iu = set(arc_u.crossings())
            eu = arc_edges(d, arc_u)
            for arc_o in groups["O"]:
                if iu & set(arc_o.crossings()):
                    continue
                curve = eu | arc_edges(d, arc_o)
                side, nsides = face_sides(d, fm, curve)
                if nsides != 2:
                    raise AssertionError("bigon curve must have two sides")
                germs = {side[fm.face_of[opposite(t)]]
                         for t in (*_span_ends(arc_u), *_span_ends(arc_o))}
                if len(germs) != 1:
                    continue  # every putative region contains an extension germ
                omega = 1 - germs.pop()
                interior = list(arc_u.walk[1:-1:2]) + list(arc_o.walk[1:-1:2])
                curve_xs = iu | set(arc_o.crossings()) | {w >> 2 for w in
                                                          (*_span_ends(arc_u),)}
                analysis = analyze_region(d, fm, side, omega, interior, curve_xs)
                if analysis.labeling is None:
                    continue
                omega_faces = frozenset(
                    f for f in range(len(fm.faces)) if side[f] == omega)
                out.append(Z2Move(arc_u, arc_o, omega_faces,
                                  _labeling_tuple(analysis)))
    out.sort(key=Z2Move.sort_key)
    return out


def apply_z2(d: Diagram, m: Z2Move) -> Diagram:
    """Remove the two shared crossings, each extension re-joined to the
    other arc's track (the pull-apart splice)."""
    s = Surgery(d)
    u0, u1 = _span_ends(m.arc_u)
    o0, o1 = _span_ends(m.arc_o)
    rays = {u0 >> 2: [u0], u1 >> 2: [u1]}
    rays[o0 >> 2].append(o0)
    rays[o1 >> 2].append(o1)
    splice = []
    for u_ray, o_ray in rays.values():
        splice.append((opposite(u_ray), o_ray))
        splice.append((opposite(o_ray), u_ray))
    ends = s.remove(set(), splice)
    if ends:
        raise AssertionError("pull-apart left loose ends")
    return s.freeze()


# -- Z3 ---------------------------------------------------------------------


def _geodesics(adj, src: int, dst: int, cap: int):
    """All shortest src->dst paths as dart-step lists, up to cap paths."""
    dist = {src: 0}
    q = deque([src])
    while q:
        f = q.popleft()
        for g, _e in adj[f]:
            if g not in dist:
                dist[g] = dist[f] + 1
                q.append(g)
    if dst not in dist:
        return None, []
    paths: list[list[int]] = []

    def back(f: int, acc: list[int]) -> None:
        if len(paths) >= cap:
            return
        if f == src:
            paths.append(list(reversed(acc)))
            return
        for g, e in adj[f]:
            if dist.get(g) == dist[f] - 1:
                acc.append(e)
                back(g, acc)
                acc.pop()
                if len(paths) >= cap:
                    return

    back(dst, [])
    return dist[dst], paths


def find_z3(d: Diagram, geodesic_cap: int = 64) -> list[Z3Move]:
    """Non-increasing reroutes of maximal one-level arcs along dual geodesics.

    Both side faces are tried at each arc endpoint; for every face pair the
    shortest dual walks avoiding the arc's own edges are enumerated (up to
    geodesic_cap), and only candidates with delta_c <= 0 are materialized.
    """
    _require_connected(d)
    if d.n_crossings == 0:
        return []
    fm = trace_faces(d)
    dual = d.dual(fm)
    from .diagram import arc_edges
    out = []
    for level in ("over", "under"):
        new_over = level == "over"
        for arc in maximal_arcs(d, level):
            m = len(arc.entries())
            h = arc.walk[0]
            g = arc.walk[-1]
            t0 = d.pair[h]
            t1 = d.pair[g]
            forbidden = set(arc_edges(d, arc))
            if d.edge_id(h) == d.edge_id(g):
                # both arc ends on one edge: crossing it is ambiguous, skip
                forbidden.add(d.edge_id(h))
            adj = dual.adjacency(frozenset(forbidden))
            starts = sorted({fm.face_of[h], fm.face_of[t0]})
            targets = sorted({fm.face_of[g], fm.face_of[t1]})
            for f0 in starts:
                for f1 in targets:
                    length, paths = _geodesics(adj, f0, f1, geodesic_cap)
                    if length is None or length > m:
                        continue
                    for path in paths:
                        steps = []
                        cur = f0
                        ok = True
                        for e in path:
                            a, b = e, d.pair[e]
                            if fm.face_of[a] == cur:
                                steps.append((a, new_over))
                                cur = fm.face_of[b]
                            elif fm.face_of[b] == cur:
                                steps.append((b, new_over))
                                cur = fm.face_of[a]
                            else:
                                ok = False
                                break
                        if ok and cur == f1:
                            out.append(Z3Move(arc, tuple(steps), (f0, f1),
                                              length - m))
    out.sort(key=Z3Move.sort_key)
    return out


def apply_z3(d: Diagram, m: Z3Move) -> Diagram:
    """Delete the arc and lay the rerouted strand along the recorded steps;
    the new arc keeps the old arc's level at every crossing it makes."""
    s = Surgery(d)
    gamma: list[int] = []
    for via, over in m.steps:
        cid = s.insert_on_edge(via, over)
        gamma.append(4 * cid + 3)
        gamma.append(4 * cid + 1)
    removal = set(m.alpha.walk)
    ends = s.remove(removal)
    a = ends.pop(m.alpha.walk[0], BARE)
    b = ends.pop(m.alpha.walk[-1], BARE)
    if a == BARE and b == BARE:
        if not gamma:
            s.loops += 1
        else:
            s.chain(gamma[1:-1])
            s.close(gamma[-1], gamma[0])
    elif not gamma:
        s.close(a, b)
    else:
        s.close(a, gamma[0])
        s.chain(gamma[1:-1])
        s.close(gamma[-1], b)
    return s.freeze()


def find_moves(d: Diagram, geodesic_cap: int = 64) -> list[Move]:
    """All Z-moves of the diagram, deterministically ordered."""
    moves: list[Move] = []
    moves.extend(find_z1(d))
    moves.extend(find_z2(d))
    moves.extend(find_z3(d, geodesic_cap))
    moves.sort(key=lambda m: m.sort_key())
    return moves


def apply_move(d: Diagram, m: Move) -> Diagram:
    if m.kind == "z1":
        return apply_z1(d, m)
    if m.kind == "z2":
        return apply_z2(d, m)
    if m.kind == "z3":
        return apply_z3(d, m)
    raise ValueError(f"unknown move kind {m.kind!r}")
