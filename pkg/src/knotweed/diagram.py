"""Knot/link diagrams as rotation systems on the sphere.

A diagram is stored as a combinatorial map: every crossing carries four
darts (edge-ends) in counterclockwise order, an involution pairs darts
into edges, and per-crossing flags record which through-strand is the
overstrand and where the strand directions point.  All move conditions
downstream are face/region conditions, so no coordinates are kept.

Dart encoding: dart = 4*crossing + slot, slot in 0..3 counterclockwise.
Slots {0,2} and {1,3} are the two through-strands ("axis 0" / "axis 1").
PD convention: slot 0 is the incoming understrand, so freshly parsed
crossings always have the overstrand on axis 1; surgeries may produce
either.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


class DiagramError(Exception):
    """Base class for diagram construction/validation failures."""


class PDSyntaxError(DiagramError):
    """Malformed PD text."""


class PDLabelError(DiagramError):
    """Edge labels do not form a valid PD labelling."""


class EmbeddingError(DiagramError):
    """Rotation system is not a genus-0 (sphere) embedding."""


class SplitDiagramError(DiagramError):
    """Operation requires a connected diagram."""


def crossing_of(dart: int) -> int:
    return dart >> 2


def slot_of(dart: int) -> int:
    return dart & 3


def opposite(dart: int) -> int:
    """Dart on the same through-strand at the same crossing."""
    return dart ^ 2


def ccw_next(dart: int) -> int:
    """Next dart counterclockwise around the same crossing."""
    return (dart & ~3) | ((dart + 1) & 3)


@dataclass(frozen=True)
class Diagram:
    """Immutable link diagram.

    pair:  fixed-point-free involution on darts (edge pairing).
    over:  per crossing, 0 if slots {0,2} carry the overstrand, else 1.
    in0:   per crossing, the incoming dart slot on axis 0 (0 or 2).
    in1:   per crossing, the incoming dart slot on axis 1 (1 or 3).
    loops: number of crossing-free circle components.
    """

    pair: tuple[int, ...]
    over: tuple[int, ...]
    in0: tuple[int, ...]
    in1: tuple[int, ...]
    loops: int = 0

    # -- basic accessors ------------------------------------------------

    @property
    def n_crossings(self) -> int:
        return len(self.over)

    @property
    def n_darts(self) -> int:
        return len(self.pair)

    def darts(self) -> range:
        return range(self.n_darts)

    def edges(self) -> list[tuple[int, int]]:
        """Edges as (dart, pair[dart]) with the smaller dart first."""
        return [(d, self.pair[d]) for d in self.darts() if d < self.pair[d]]

    def edge_id(self, dart: int) -> int:
        """Canonical id of the edge containing `dart` (its smaller dart)."""
        return min(dart, self.pair[dart])

    def is_incoming(self, dart: int) -> bool:
        c, s = dart >> 2, dart & 3
        return s == (self.in0[c] if s % 2 == 0 else self.in1[c])

    def over_dart(self, dart: int) -> bool:
        """True if `dart` lies on the overstrand of its crossing."""
        return (dart & 1) == self.over[dart >> 2]

    def entry_darts(self) -> Iterator[int]:
        """The two incoming darts per crossing (one per through-strand)."""
        for c in range(self.n_crossings):
            yield 4 * c + self.in0[c]
            yield 4 * c + self.in1[c]

    # -- strand traversal ----------------------------------------------

    def strand_next(self, entry: int) -> int:
        """From one entry dart to the entry dart of the next crossing."""
        return self.pair[opposite(entry)]

    def component_of(self, entry: int) -> list[int]:
        """Entry darts of the component through `entry`, in strand order."""
        out = [entry]
        d = self.strand_next(entry)
        while d != entry:
            out.append(d)
            d = self.strand_next(d)
        return out

    def components(self) -> list[list[int]]:
        """All closed strand components (lists of entry darts, in order)."""
        seen: set[int] = set()
        comps = []
        for e in self.entry_darts():
            if e in seen:
                continue
            comp = self.component_of(e)
            seen.update(comp)
            comps.append(comp)
        return comps

    def n_components(self) -> int:
        return len(self.components()) + self.loops

    # -- faces and dual graph --------------------------------------------

    def faces(self) -> "FaceMap":
        return trace_faces(self)

    def dual(self, fm: "FaceMap | None" = None) -> "DualGraph":
        return dual_graph(self, fm if fm is not None else self.faces())

    def is_connected(self) -> bool:
        """Connectivity of the 4-valent graph (crossing-free circles aside)."""
        n = self.n_crossings
        if n == 0:
            return self.loops <= 1
        if self.loops:
            return False
        seen = {0}
        stack = [0]
        while stack:
            c = stack.pop()
            for s in range(4):
                c2 = self.pair[4 * c + s] >> 2
                if c2 not in seen:
                    seen.add(c2)
                    stack.append(c2)
        return len(seen) == n

    def validate(self) -> None:
        """Structural checks plus the genus-0 Euler test."""
        n = self.n_crossings
        if len(self.pair) != 4 * n:
            raise DiagramError("dart table size mismatch")
        for d in self.darts():
            p = self.pair[d]
            if p == d or self.pair[p] != d:
                raise DiagramError("pairing is not a fixed-point-free involution")
        for c in range(n):
            if self.in0[c] not in (0, 2) or self.in1[c] not in (1, 3):
                raise DiagramError("orientation marks out of range")
            if self.over[c] not in (0, 1):
                raise DiagramError("over-axis flag out of range")
        for d, e in self.edges():
            if self.is_incoming(d) == self.is_incoming(e):
                raise DiagramError("edge direction inconsistent (two heads or two tails)")
        if n:
            ncomp = _graph_components(self)
            fm = trace_faces(self)
            if len(fm.faces) != n + 2 * ncomp:
                raise EmbeddingError(
                    f"Euler check failed: {len(fm.faces)} faces for {n} crossings "
                    f"({ncomp} component(s)); rotation system is not planar")


def _graph_components(d: Diagram) -> int:
    n = d.n_crossings
    seen: set[int] = set()
    count = 0
    for start in range(n):
        if start in seen:
            continue
        count += 1
        seen.add(start)
        stack = [start]
        while stack:
            c = stack.pop()
            for s in range(4):
                c2 = d.pair[4 * c + s] >> 2
                if c2 not in seen:
                    seen.add(c2)
                    stack.append(c2)
    return count


@dataclass(frozen=True)
class FaceMap:
    """Faces of the sphere complement, one dart cycle per face.

    Convention: face_of[d] is the region to the right of dart d when d is
    directed out of its crossing.  The next dart along a face cycle is
    ccw_next(pair[d]), which walks each face boundary with the region on
    the right.
    """

    faces: tuple[tuple[int, ...], ...]
    face_of: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.faces)

    def corner_face(self, dart: int) -> int:
        """Face occupying the corner from `dart` to ccw_next(dart)."""
        return self.face_of[ccw_next(dart)]


def trace_faces(d: Diagram) -> FaceMap:
    if d.n_crossings == 0:
        # A bare circle splits the sphere into two synthetic faces.
        return FaceMap(((), ()), ())
    nd = d.n_darts
    face_of = [-1] * nd
    faces: list[tuple[int, ...]] = []
    for start in range(nd):
        if face_of[start] >= 0:
            continue
        cyc = []
        x = start
        while face_of[x] < 0:
            face_of[x] = len(faces)
            cyc.append(x)
            x = ccw_next(d.pair[x])
        if x != start:
            raise EmbeddingError("face tracing did not close up")
        faces.append(tuple(cyc))
    return FaceMap(tuple(faces), tuple(face_of))


@dataclass(frozen=True)
class DualGraph:
    """One node per face, one edge per diagram edge (self-loops allowed)."""

    n_nodes: int
    edges: tuple[tuple[int, int, int], ...]  # (face_a, face_b, edge_dart_id)

    def adjacency(self, forbidden: frozenset[int] = frozenset()) -> list[list[tuple[int, int]]]:
        """face -> [(neighbour_face, edge_id)], skipping forbidden edge ids."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n_nodes)]
        for a, b, e in self.edges:
            if e in forbidden:
                continue
            adj[a].append((b, e))
            adj[b].append((a, e))
        for lst in adj:
            lst.sort()
        return adj


def dual_graph(d: Diagram, fm: FaceMap) -> DualGraph:
    if d.n_crossings == 0:
        return DualGraph(2, ())
    out = []
    for a, b in d.edges():
        out.append((fm.face_of[a], fm.face_of[b], a))
    return DualGraph(len(fm.faces), tuple(out))


# -- PD text ---------------------------------------------------------------


def parse_pd(text: str) -> Diagram:
    """Parse PD text: `X[a,b,c,d]` tokens, optional `unknots: m` header.

    Slot 0 is the incoming understrand; orientation is recovered from the
    increasing edge numbering along each component.  Raises PDSyntaxError,
    PDLabelError or EmbeddingError.
    """
    loops = 0
    tokens: list[tuple[int, int, int, int]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("unknots:"):
            try:
                loops += int(line.split(":", 1)[1])
            except ValueError:
                raise PDSyntaxError(f"bad unknots header: {raw!r}")
            continue
        for tok in line.split():
            if not (tok.startswith("X[") and tok.endswith("]")):
                raise PDSyntaxError(f"bad token: {tok!r}")
            parts = tok[2:-1].split(",")
            if len(parts) != 4:
                raise PDSyntaxError(f"crossing needs 4 labels: {tok!r}")
            try:
                a, b, c, dd = (int(p) for p in parts)
            except ValueError:
                raise PDSyntaxError(f"non-integer label in {tok!r}")
            if min(a, b, c, dd) < 1:
                raise PDSyntaxError(f"labels must be positive: {tok!r}")
            tokens.append((a, b, c, dd))

    n = len(tokens)
    if n == 0:
        return Diagram((), (), (), (), loops)

    counts: dict[int, int] = {}
    for quad in tokens:
        for lab in quad:
            counts[lab] = counts.get(lab, 0) + 1
    if sorted(counts) != list(range(1, 2 * n + 1)) or any(v != 2 for v in counts.values()):
        raise PDLabelError("edge labels must be 1..2n, each appearing exactly twice")

    # endpoint darts per label
    ends: dict[int, list[int]] = {lab: [] for lab in counts}
    for ci, quad in enumerate(tokens):
        for s, lab in enumerate(quad):
            ends[lab].append(4 * ci + s)

    # components: labels linked by passages (a,c) and (b,d)
    succ_pairs: dict[int, list[int]] = {lab: [] for lab in counts}
    for a, b, c, dd in tokens:
        succ_pairs[a].append(c)
        succ_pairs[c].append(a)
        succ_pairs[b].append(dd)
        succ_pairs[dd].append(b)
    comp_of: dict[int, int] = {}
    comp_labels: list[set[int]] = []
    for lab in counts:
        if lab in comp_of:
            continue
        comp = {lab}
        stack = [lab]
        while stack:
            x = stack.pop()
            for y in succ_pairs[x]:
                if y not in comp:
                    comp.add(y)
                    stack.append(y)
        for x in comp:
            comp_of[x] = len(comp_labels)
        comp_labels.append(comp)
    succ: dict[int, int] = {}
    for comp in comp_labels:
        lo, hi = min(comp), max(comp)
        if comp != set(range(lo, hi + 1)):
            raise PDLabelError("component labels must be consecutive integers")
        for x in comp:
            succ[x] = lo if x == hi else x + 1

    in1 = []
    ambiguous = []
    for ci, (a, b, c, dd) in enumerate(tokens):
        if succ[a] != c:
            raise PDLabelError(
                f"crossing X[{a},{b},{c},{dd}]: understrand labels must increase (slot 0 incoming)")
        fwd = succ[b] == dd   # over flows b -> d, incoming at slot 1
        bwd = succ[dd] == b   # over flows d -> b, incoming at slot 3
        if fwd and bwd:
            in1.append(1)
            ambiguous.append(ci)
        elif fwd:
            in1.append(1)
        elif bwd:
            in1.append(3)
        else:
            raise PDLabelError(
                f"crossing X[{a},{b},{c},{dd}]: overstrand labels not consecutive")

    pair = [-1] * (4 * n)
    for lab, (d1, d2) in ends.items():
        pair[d1], pair[d2] = d2, d1

    def heads_ok(in1v: Sequence[int]) -> bool:
        for d1, d2 in ends.values():
            h1 = _is_head(tokens, in1v, d1)
            h2 = _is_head(tokens, in1v, d2)
            if h1 == h2:
                return False
        return True

    in1_final = list(in1)
    if not heads_ok(in1_final):
        fixed = False
        # 2-label components leave the over direction locally ambiguous;
        # try flipping those crossings until every edge has one head.
        for mask in range(1, 1 << len(ambiguous)):
            trial = list(in1)
            for k, ci in enumerate(ambiguous):
                if mask >> k & 1:
                    trial[ci] = 3
            if heads_ok(trial):
                in1_final = trial
                fixed = True
                break
        if not fixed:
            raise PDLabelError("inconsistent strand orientation in PD code")

    d = Diagram(tuple(pair), (1,) * n, (0,) * n, tuple(in1_final), loops)
    d.validate()
    return d


def _is_head(tokens, in1v, dart: int) -> bool:
    c, s = dart >> 2, dart & 3
    return s == (0 if s % 2 == 0 else in1v[c])


def emit_pd(d: Diagram) -> str:
    """Serialize a diagram to PD text; inverse of parse_pd up to canonical code."""
    parts = []
    if d.loops:
        parts.append(f"unknots: {d.loops}")
    if d.n_crossings == 0:
        return "\n".join(parts) + ("\n" if parts else "")
    label: dict[int, int] = {}  # entry dart -> label of the edge entering it
    nxt = 1
    seen: set[int] = set()
    for e0 in sorted(d.entry_darts()):
        if e0 in seen:
            continue
        for e in d.component_of(e0):
            seen.add(e)
            label[e] = nxt
            nxt += 1
    toks = []
    for c in range(d.n_crossings):
        under_in = 4 * c + (d.in0[c] if d.over[c] == 1 else d.in1[c])
        quad = []
        for k in range(4):
            dd = (under_in & ~3) | ((under_in + k) & 3)
            # label of the edge at dart dd: the edge's head carries the label
            head = dd if d.is_incoming(dd) else d.pair[dd]
            quad.append(label[head])
        toks.append("X[{},{},{},{}]".format(*quad))
    parts.append(" ".join(toks))
    return "\n".join(parts) + "\n"


# -- canonical code --------------------------------------------------------


def canonical_code(d: Diagram) -> bytes:
    """Relabelling-invariant encoding of the rotation system with over/under
    and orientation data.  Reflection is not quotiented.  O(V^2).
    """
    n = d.n_crossings
    if n == 0:
        return b"O%d" % d.loops
    comps = _map_components(d)
    blobs = []
    for comp in comps:
        best = None
        for c in comp:
            for s in range(4):
                enc = _encode_from(d, 4 * c + s)
                if best is None or enc < best:
                    best = enc
        blobs.append(best)
    blobs.sort()
    body = b"|".join(blobs)
    return b"O%d|" % d.loops + body if d.loops else body


def _map_components(d: Diagram) -> list[list[int]]:
    seen: set[int] = set()
    comps = []
    for start in range(d.n_crossings):
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        stack = [start]
        while stack:
            c = stack.pop()
            for s in range(4):
                c2 = d.pair[4 * c + s] >> 2
                if c2 not in seen:
                    seen.add(c2)
                    comp.append(c2)
                    stack.append(c2)
        comps.append(comp)
    return comps


def _encode_from(d: Diagram, start: int) -> bytes:
    """Breadth-first relabelling seeded at `start` (crossing 0, base slot)."""
    base: dict[int, int] = {start >> 2: start & 3}
    order = [start >> 2]
    new_id = {start >> 2: 0}
    i = 0
    out = []
    while i < len(order):
        c = order[i]
        b = base[c]
        i += 1
        rec = []
        for k in range(4):
            dart = 4 * c + ((b + k) & 3)
            t = d.pair[dart]
            tc = t >> 2
            if tc not in new_id:
                new_id[tc] = len(order)
                base[tc] = t & 3
                order.append(tc)
            rec.append(new_id[tc] * 4 + ((t - base[tc]) & 3))
        over_bit = 1 if (b & 1) == d.over[c] else 0
        i0 = 1 if d.is_incoming(4 * c + (b & 3)) else 0
        i1 = 1 if d.is_incoming(4 * c + ((b + 1) & 3)) else 0
        rec.append(over_bit << 2 | i0 << 1 | i1)
        out.append(",".join(map(str, rec)))
    return ";".join(out).encode()


# -- strand pieces -----------------------------------------------------------



@dataclass(frozen=True)
class ArcRef:
    """A contiguous piece of strand, given by the darts it traverses in order.

    kind 'open':   walk = (in_1, out_1, ..., in_k, out_k), full passages only;
                   the endpoints sit in the interiors of the edge entering
                   in_1 and the edge leaving out_k.
    kind 'loop':   walk = (exit_at_base, in_1, out_1, ..., in_k, out_k,
                   entry_at_base); the image is a closed curve based at the
                   crossing of the first/last dart.
    kind 'span':   like 'loop' but the first and last dart sit at two
                   different crossings (an arc pinned at both ends).
    kind 'circle': like 'open' but the strand closes up (whole component).
    """

    walk: tuple[int, ...]
    kind: str = "open"

    def entries(self) -> tuple[int, ...]:
        """Entry darts of the full passages traversed."""
        if self.kind in ("loop", "span"):
            return self.walk[1:-1:2]
        return self.walk[0::2]

    def crossings(self) -> list[int]:
        return [e >> 2 for e in self.entries()]

    def base(self) -> int:
        if self.kind != "loop":
            raise ValueError("not a loop arc")
        return self.walk[0] >> 2

    def is_simple(self) -> bool:
        cs = self.crossings()
        if self.kind == "loop":
            return len(set(cs)) == len(cs) and self.base() not in cs
        if self.kind == "span":
            ends = {self.walk[0] >> 2, self.walk[-1] >> 2}
            return len(set(cs)) == len(cs) and not (set(cs) & ends)
        return len(set(cs)) == len(cs)


def arc_of_passages(d: Diagram, entries: Sequence[int]) -> ArcRef:
    """Open arc through the given consecutive passage entry darts."""
    walk = []
    for e in entries:
        walk.append(e)
        walk.append(opposite(e))
    return ArcRef(tuple(walk), "open")


def loop_arc(d: Diagram, exit_dart: int) -> ArcRef | None:
    """The loop leaving the crossing of `exit_dart` via that dart.

    Walks the strand until it first re-enters the base crossing; returns
    None if the walk returns to its own start first (multi-component case
    where the strand never comes back through the base).
    """
    base = exit_dart >> 2
    walk = [exit_dart]
    e = d.pair[exit_dart]
    first = e
    while True:
        if e >> 2 == base:
            walk.append(e)
            return ArcRef(tuple(walk), "loop")
        walk.append(e)
        walk.append(opposite(e))
        e = d.pair[opposite(e)]
        if e == first:
            return None


def maximal_arcs(d: Diagram, kind: str) -> list[ArcRef]:
    """Maximal all-over (kind='over') or all-under arcs, ends between crossings.

    Components running entirely at one level contribute nothing (their image
    is a circle, not an arc); for a knot diagram with c >= 1 this never
    happens since each crossing has one over- and one under-passage of the
    same strand.
    """
    want_over = kind == "over"
    out = []
    for comp in d.components():
        flags = [d.over_dart(e) == want_over for e in comp]
        m = len(comp)
        if all(flags):
            continue
        starts = [i for i in range(m) if flags[i] and not flags[i - 1]]
        for i in starts:
            run = [comp[i]]
            j = (i + 1) % m
            while flags[j]:
                run.append(comp[j])
                j = (j + 1) % m
            out.append(arc_of_passages(d, run))
    out.sort(key=lambda a: a.walk)
    return out


def arc_edges(d: Diagram, arc: ArcRef) -> set[int]:
    """Edge ids fully covered by the arc (open-arc end edges excluded)."""
    ids = set()
    w = arc.walk
    for k in range(len(w)):
        if k + 1 < len(w) and (w[k + 1] == d.pair[w[k]]):
            ids.add(d.edge_id(w[k]))
    if arc.kind == "circle":
        ids.add(d.edge_id(w[-1]))
    return ids


# re-exported here so the low-level surgeries live beside the data model
from .surgery import OpenDiagram, delete_arc, insert_arc  # noqa: E402,F401
