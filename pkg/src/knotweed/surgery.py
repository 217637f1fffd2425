"""Low-level diagram surgery: dart removal with 2-valent dissolution,
strand re-splicing, and transversal arc insertion.

Every move (Z1/Z2/Z3, C, C-tilde) and every generator is built from the
same three primitives on a mutable scratch copy of a diagram:

  * insert a new crossing in the middle of an edge ("cross edge E entering
    from the side of dart u"), used to lay a rerouted strand;
  * remove a set of darts; crossings left with two darts dissolve (the
    survivors' edges are spliced), crossings losing all four vanish;
  * remove a whole crossing with an explicit re-pairing of its four edge
    ends (the Z2 pull-apart).

Freezing re-derives strand orientation globally and re-validates the
Euler count, so an invalid splice can never escape silently.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagram import (ArcRef, Diagram, DiagramError, EmbeddingError, opposite)

BARE = -1  # sentinel anchor: the loose end sits on a crossing-free strand


@dataclass
class _Cross:
    over: int
    in0: int
    in1: int


class Surgery:
    """Mutable scratch copy of a diagram; darts stay 4*cid+slot with new
    crossing ids allocated past the original range."""

    def __init__(self, d: Diagram):
        self.pair: dict[int, int] = {i: p for i, p in enumerate(d.pair)}
        self.cross: dict[int, _Cross] = {
            c: _Cross(d.over[c], d.in0[c], d.in1[c]) for c in range(d.n_crossings)}
        self.next_cid = d.n_crossings
        self.loops = d.loops

    def is_incoming(self, dart: int) -> bool:
        c, s = dart >> 2, dart & 3
        rec = self.cross[c]
        return s == (rec.in0 if s % 2 == 0 else rec.in1)

    # -- insertion -------------------------------------------------------

    def insert_on_edge(self, u: int, new_over: bool) -> int:
        """Add a crossing in the middle of u's edge; the new strand runs
        perpendicular, entering from the region to the right of u directed
        out of its crossing.  Returns the new crossing id; its slot 3 is
        the incoming dart of the new strand and slot 1 the outgoing one,
        both left unpaired for the caller to chain.
        """
        v = self.pair[u]
        cid = self.next_cid
        self.next_cid += 1
        base = 4 * cid
        # slot 0 continues to v's side, slot 2 to u's side
        self.pair[base + 0] = v
        self.pair[v] = base + 0
        self.pair[base + 2] = u
        self.pair[u] = base + 2
        in0 = 0 if self.is_incoming(u) else 2
        self.cross[cid] = _Cross(1 if new_over else 0, in0, 3)
        return cid

    def chain(self, darts: list[int]) -> None:
        """Pair up consecutive darts: darts[0]<->darts[1], darts[2]<->darts[3]..."""
        for a, b in zip(darts[0::2], darts[1::2]):
            self.pair[a] = b
            self.pair[b] = a

    # -- removal ----------------------------------------------------------

    def remove(self, removal: set[int],
               splice_pairs: list[tuple[int, int]] = ()) -> dict[int, int]:
        """Remove darts; dissolve crossings left 2-valent; apply explicit
        re-pairings of fully-removed crossings' edge ends.

        Returns {removed_cut_dart: anchor} for every edge that lost exactly
        one endpoint: anchor is the surviving dart whose (new) edge now ends
        loose there, or BARE when the loose strand carries no crossing. The
        caller must re-close all loose ends before freezing.
        """
        junction: dict[int, int] = {}
        for a, b in splice_pairs:
            junction[a] = b
            junction[b] = a
            self.cross.pop(a >> 2, None)
            self.cross.pop(b >> 2, None)

        by_crossing: dict[int, list[int]] = {}
        for r in removal:
            by_crossing.setdefault(r >> 2, []).append(r)
        for c, rs in by_crossing.items():
            if len(rs) == 4:
                del self.cross[c]
            elif len(rs) == 2:
                rest = [4 * c + s for s in range(4) if 4 * c + s not in removal]
                junction[rest[0]] = rest[1]
                junction[rest[1]] = rest[0]
                del self.cross[c]
            else:
                raise DiagramError("arc removal touched a crossing an odd number of times")

        old_pair = dict(self.pair)

        def resolve(start: int) -> int:
            x = old_pair[start]
            while x in junction:
                x = old_pair[junction[x]]
            return x

        cut_anchor: dict[int, int] = {}
        live = [d for d in old_pair
                if (d >> 2) in self.cross and d not in removal]
        visited_ports: set[int] = set()

        new_pair: dict[int, int] = {}
        for d in live:
            x = old_pair[d]
            while x in junction:
                visited_ports.add(x)
                x = junction[x]
                visited_ports.add(x)
                x = old_pair[x]
            if x in removal:
                cut_anchor[x] = d
            else:
                new_pair[d] = x

        # chains that run from one cut straight to another (no surviving
        # crossing in between): both ends report BARE
        for r in list(removal):
            far = old_pair.get(r)
            if far is None or far in removal:
                continue
            if far in junction:
                x = far
                while x in junction:
                    visited_ports.add(x)
                    x = junction[x]
                    visited_ports.add(x)
                    x = old_pair[x]
                if x in removal and r not in cut_anchor:
                    cut_anchor[r] = BARE
                    cut_anchor[x] = BARE

        # junction cycles never reached from a live dart are free circles
        for port in list(junction):
            if port in visited_ports:
                continue
            x = port
            while x not in visited_ports:
                visited_ports.add(x)
                y = junction[x]
                visited_ports.add(y)
                x = old_pair[y]
            self.loops += 1

        self.pair = new_pair
        return cut_anchor

    def close(self, a: int, b: int) -> None:
        """Join two loose ends (anchor darts, or BARE twice for a free circle)."""
        if a == BARE and b == BARE:
            self.loops += 1
            return
        if a == BARE or b == BARE:
            raise DiagramError("cannot join an anchored end to a bare strand")
        self.pair[a] = b
        self.pair[b] = a

    # -- freeze ------------------------------------------------------------

    def freeze(self) -> Diagram:
        cids = sorted(self.cross)
        renum = {c: i for i, c in enumerate(cids)}
        n = len(cids)
        pair = [-1] * (4 * n)
        for d, p in self.pair.items():
            pair[4 * renum[d >> 2] + (d & 3)] = 4 * renum[p >> 2] + (p & 3)
        if any(p < 0 for p in pair):
            raise DiagramError("freeze with unclosed loose ends")
        over = [self.cross[c].over for c in cids]

        # re-derive a consistent strand orientation; the lowest dart of each
        # component keeps its stored direction so untouched parts are stable
        in0 = [-1] * n
        in1 = [-1] * n
        old_in = {renum[c]: (rec.in0, rec.in1) for c, rec in self.cross.items()}
        done: set[int] = set()
        for d0 in range(4 * n):
            if d0 in done:
                continue
            c0, s0 = d0 >> 2, d0 & 3
            stored = old_in[c0][0] if s0 % 2 == 0 else old_in[c0][1]
            e = d0 if s0 == stored else opposite(d0)
            start = e
            while True:
                c, s = e >> 2, e & 3
                if s % 2 == 0:
                    in0[c] = s
                else:
                    in1[c] = s
                done.add(e)
                done.add(opposite(e))
                e = pair[opposite(e)]
                if e == start:
                    break
        d = Diagram(tuple(pair), tuple(over), tuple(in0), tuple(in1), self.loops)
        d.validate()
        return d


# -- public wrappers ----------------------------------------------------------


@dataclass
class OpenDiagram:
    """Intermediate state after deleting an open arc: a diagram with one
    strand cut, carrying two loose ends awaiting re-insertion."""

    surgery: Surgery
    end_start: int  # anchor dart for the arc's start side, or BARE
    end_end: int


def delete_arc(d: Diagram, arc: ArcRef):
    """Remove an embedded arc or loop.

    Loops and whole circle components return a closed Diagram (crossings
    where only the other strand remains dissolve).  Open arcs return an
    OpenDiagram with two loose ends for insert_arc.
    """
    if arc.kind != "circle" and not arc.is_simple():
        raise DiagramError("delete_arc requires an embedded arc")
    s = Surgery(d)
    removal = set(arc.walk)
    if arc.kind == "open" and d.pair[arc.walk[0]] == arc.walk[-1]:
        # the arc plus one edge is the whole component; the remainder is a
        # bare strand with both cut points on it
        s.remove(removal)
        return OpenDiagram(s, BARE, BARE)
    ends = s.remove(removal)
    if arc.kind in ("loop", "circle"):
        if ends:
            raise DiagramError("closed arc deletion left loose ends")
        return s.freeze()
    a = ends.pop(arc.walk[0])
    b = ends.pop(arc.walk[-1])
    return OpenDiagram(s, a, b)


def insert_arc(od: OpenDiagram, steps: list[tuple[int, bool]]) -> Diagram:
    """Re-connect the loose ends of an open diagram with a transversal arc.

    steps: [(via_dart, over)] in travel order from the start end; each step
    crosses the edge of via_dart entering from the region to its right,
    with the new strand over (True) or under (False) there.  An empty list
    joins the two ends directly (only valid when they share a region, which
    the Euler check enforces).
    """
    s = od.surgery
    gamma: list[int] = []
    for via, over in steps:
        cid = s.insert_on_edge(via, over)
        gamma.append(4 * cid + 3)
        gamma.append(4 * cid + 1)
    if od.end_start == BARE and od.end_end == BARE:
        # the cut strand carries no crossing: the inserted arc closes on it
        if not gamma:
            s.loops += 1
        else:
            s.chain(gamma[1:-1])
            s.close(gamma[-1], gamma[0])
    elif not gamma:
        s.close(od.end_start, od.end_end)
    else:
        s.close(od.end_start, gamma[0])
        s.chain(gamma[1:-1])
        s.close(gamma[-1], od.end_end)
    return s.freeze()


def straighten_visits(visits: list[tuple[int, int]]):
    """Erase curls from a strand walk as soon as they are born.

    visits: (entry_dart, exit_dart) per crossing passage, in walk order.
    On returning to a crossing already on the surviving walk, the loop since
    the first visit is dropped and the basepoint becomes a single turned
    visit (entry of the first passage, exit of the second), which is no
    longer a self-crossing of the curve.

    Returns (surviving visits, erased darts).
    """
    out: list[list[int]] = []  # [crossing, entry, exit]
    pos: dict[int, int] = {}
    erased: set[int] = set()
    for e, x in visits:
        c = e >> 2
        if c in pos:
            i = pos[c]
            for rec in out[i + 1:]:
                pos.pop(rec[0])
                erased.add(rec[1])
                erased.add(rec[2])
            erased.add(out[i][2])
            erased.add(e)
            out[i][2] = x
            del out[i + 1:]
        else:
            pos[c] = len(out)
            out.append([c, e, x])
    return [(rec[1], rec[2]) for rec in out], erased


def subdiagram_from_visits(d: Diagram, visits: list[tuple[int, int]]) -> Diagram:
    """Closed diagram carrying exactly the walk through `visits`, keeping a
    crossing only where two visits cover all four of its darts; other visits
    pass straight (or turn) through.  The walk is closed up directly at the
    end, which is only valid when its two ends share a region (the Euler
    check enforces this).
    """
    cover: dict[int, set[int]] = {}
    for e, x in visits:
        cover.setdefault(e >> 2, set()).update((e, x))
    kept = {c for c, s in cover.items() if len(s) == 4}
    seq = [(e, x) for e, x in visits if (e >> 2) in kept]
    if not seq:
        return Diagram((), (), (), (), 1)
    renum = {c: i for i, c in enumerate(sorted(kept))}
    n = len(kept)
    pair = [-1] * (4 * n)

    def nd(dart: int) -> int:
        return 4 * renum[dart >> 2] + (dart & 3)

    for k in range(len(seq)):
        x_prev = seq[k][1]
        e_next = seq[(k + 1) % len(seq)][0]
        pair[nd(x_prev)] = nd(e_next)
        pair[nd(e_next)] = nd(x_prev)
    over = [0] * n
    in0 = [0] * n
    in1 = [1] * n
    for c in kept:
        over[renum[c]] = d.over[c]
    for e, _x in seq:
        c, s = renum[e >> 2], e & 3
        if s % 2 == 0:
            in0[c] = s
        else:
            in1[c] = s
    out = Diagram(tuple(pair), tuple(over), tuple(in0), tuple(in1), 0)
    out.validate()
    return out


def connected_sum(d1: Diagram, d2: Diagram) -> Diagram:
    """Join two diagrams along their lowest edges, respecting orientation."""
    if d1.n_crossings == 0 or d2.n_crossings == 0:
        base = d2 if d1.n_crossings == 0 else d1
        extra = d1.loops + d2.loops - base.loops - 1  # one circle is consumed
        return Diagram(base.pair, base.over, base.in0, base.in1,
                       base.loops + extra)
    off = 4 * d1.n_crossings
    pair = list(d1.pair) + [p + off for p in d2.pair]
    p, q = 0, d1.pair[0]
    if not d1.is_incoming(q):
        p, q = q, p
    r, s = off, d2.pair[0] + off
    if not d2.is_incoming(s - off):
        r, s = s, r
    # strand flows p -> (into d2 at its head s) ... (out of d2 at tail r) -> q
    pair[p] = s
    pair[s] = p
    pair[r] = q
    pair[q] = r
    out = Diagram(tuple(pair), d1.over + d2.over, d1.in0 + d2.in0,
                  d1.in1 + d2.in1, d1.loops + d2.loops)
    out.validate()
    return out
