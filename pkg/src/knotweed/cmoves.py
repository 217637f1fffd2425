"""Connected-sum detection: the splitting moves C and C-tilde.

A move C is supported on a disc whose transverse boundary circle crosses
the diagram through distinct edges.  One strand piece inside the disc is
distinguished (alpha); when the remaining pieces admit a U/O labelling
relative to alpha, the diagram splits into the closure of alpha (D0) and
the rest with alpha replaced by a boundary-parallel arc (D1), realizing the
knot as a connected sum.  C-tilde is the annular variant: alpha crosses an
annulus between two nested discs once, and the tail of its own strand
(beta_0) participates in the labelling; both factors are assembled with
curl-erased straightenings.

The boundary-circle search enumerates simple dual cycles visiting each face
at most once, up to a length cap; this is a restriction of the move's full
generality but keeps the search polynomial per length.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagram import (ArcRef, Diagram, FaceMap, SplitDiagramError, ccw_next,
                      canonical_code, opposite, trace_faces)
from .labeling import CONFLICT, LabelProblem, forced_label, solve
from .surgery import Surgery, straighten_visits, subdiagram_from_visits


@dataclass(frozen=True)
class TransverseCircle:
    """Simple closed curve crossing the diagram transversally: one crossing
    per listed edge, never at a crossing of the diagram.

    steps[i] = (edge_id, via_dart): the circle crosses that edge leaving the
    face of via_dart; faces[i] is the face entered by step i (so the chord
    inside faces[i] runs from steps[i] to steps[i+1]).
    """

    steps: tuple[tuple[int, int], ...]
    faces: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.steps)

    def edge_ids(self) -> tuple[int, ...]:
        return tuple(e for e, _ in self.steps)


def enumerate_transverse_circles(d: Diagram, max_len: int,
                                 max_circles: int = 20000) -> list[TransverseCircle]:
    """All simple dual cycles of length 2..max_len, each face visited at
    most once, deduplicated up to rotation and reflection."""
    if d.n_crossings == 0 or max_len < 2:
        return []
    fm = trace_faces(d)
    adj = d.dual(fm).adjacency()
    seen: set[tuple[int, ...]] = set()
    out: list[TransverseCircle] = []

    def canon(edges: tuple[int, ...]) -> tuple[int, ...]:
        best = None
        k = len(edges)
        for seq in (edges, tuple(reversed(edges))):
            for r in range(k):
                rot = seq[r:] + seq[:r]
                if best is None or rot < best:
                    best = rot
        return best

    def dfs(path_faces: list[int], path_steps: list[tuple[int, int]],
            used: set[int]):
        if len(out) >= max_circles:
            return
        cur = path_faces[-1]
        start = path_faces[0]
        for g, e in adj[cur]:
            if len(path_steps) + 1 > max_len:
                break
            if e in used:
                continue
            if g == start and len(path_steps) >= 1:
                edges = tuple(x for x, _ in path_steps) + (e,)
                key = canon(edges)
                if key not in seen:
                    seen.add(key)
                    via = e if fm.face_of[e] == cur else d.pair[e]
                    steps = tuple(path_steps) + ((e, via),)
                    out.append(TransverseCircle(
                        steps, tuple(path_faces[1:]) + (start,)))
            if g in path_faces or g < start:
                continue
            via = e if fm.face_of[e] == cur else d.pair[e]
            path_faces.append(g)
            path_steps.append((e, via))
            used.add(e)
            dfs(path_faces, path_steps, used)
            used.discard(e)
            path_faces.pop()
            path_steps.pop()

    def dfs_entry(f0: int):
        dfs([f0], [], set())

    for f0 in range(len(fm.faces)):
        dfs_entry(f0)
    out.sort(key=lambda c: c.steps)
    return out


# -- sides of a transverse circle --------------------------------------------


class _DartUF:
    def __init__(self, n: int):
        self.p = list(range(n + 2))
        self.left = n
        self.right = n + 1

    def find(self, x: int) -> int:
        while self.p[x] != x:
            self.p[x] = self.p[self.p[x]]
            x = self.p[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.p[ra] = rb


def circle_sides(d: Diagram, fm: FaceMap, circ: TransverseCircle) -> list[int]:
    """Side of the circle per dart: 0 = left of its travel direction,
    1 = right.  Crossed-edge darts carry the side of their near half."""
    uf = _DartUF(d.n_darts)
    crossed = set(circ.edge_ids())
    for c in range(d.n_crossings):
        uf.union(4 * c, 4 * c + 1)
        uf.union(4 * c, 4 * c + 2)
        uf.union(4 * c, 4 * c + 3)
    for a, b in d.edges():
        if d.edge_id(a) not in crossed:
            uf.union(a, b)
    k = len(circ.steps)
    cycles = {}
    for f in set(circ.faces):
        cyc = fm.faces[f]
        cycles[f] = {dart: i for i, dart in enumerate(cyc)}
    for i in range(k):
        e_in, via_in = circ.steps[i]
        e_out, via_out = circ.steps[(i + 1) % k]
        f = circ.faces[i]
        # near half of the via dart is left; the far dart's near half right
        uf.union(via_in, uf.left)
        uf.union(d.pair[via_in], uf.right)
        # walk the face cycle from the entry dart to the exit dart: that
        # boundary stretch lies left of the chord, the rest right
        cyc = fm.faces[f]
        idx = cycles[f]
        v_in = d.pair[via_in]        # dart of the entry edge inside f
        u_out = via_out              # dart of the exit edge inside f
        if fm.face_of[v_in] != f or fm.face_of[u_out] != f:
            raise AssertionError("circle step darts not on the face")
        j = (idx[v_in] + 1) % len(cyc)
        while cyc[j] != u_out:
            uf.union(cyc[j], uf.left)
            j = (j + 1) % len(cyc)
        j = (idx[u_out] + 1) % len(cyc)
        while cyc[j] != v_in:
            uf.union(cyc[j], uf.right)
            j = (j + 1) % len(cyc)
    lroot = uf.find(uf.left)
    rroot = uf.find(uf.right)
    if lroot == rroot:
        raise AssertionError("circle does not separate the sphere")
    side = []
    for dart in range(d.n_darts):
        r = uf.find(dart)
        if r == lroot:
            side.append(0)
        elif r == rroot:
            side.append(1)
        else:
            raise AssertionError("dart on neither side of the circle")
    return side


@dataclass
class _Piece:
    pid: int
    entries: list[int]           # full passages, walk order
    start_cut: int               # circle step index crossed just before
    end_cut: int                 # step index crossed just after
    side: int
    is_circle: bool = False


def knot_pieces(d: Diagram, circ: TransverseCircle, side: list[int]):
    """Strand pieces cut by the circle, plus un-cut whole components.

    Returns (pieces, piece_of_entry: entry dart -> pid)."""
    cut_of_edge = {e: i for i, (e, _v) in enumerate(circ.steps)}
    pieces: list[_Piece] = []
    piece_of: dict[int, int] = {}
    for comp in d.components():
        m = len(comp)
        cut_positions = [i for i in range(m)
                         if d.edge_id(opposite(comp[i])) in cut_of_edge]
        if not cut_positions:
            p = _Piece(len(pieces), list(comp), -1, -1,
                       side[comp[0]], is_circle=True)
            pieces.append(p)
            for e in comp:
                piece_of[e] = p.pid
            continue
        for k, pos in enumerate(cut_positions):
            nxt = cut_positions[(k + 1) % len(cut_positions)]
            entries = []
            i = (pos + 1) % m
            while True:
                entries.append(comp[i])
                if i == nxt:
                    break
                i = (i + 1) % m
            start_cut = cut_of_edge[d.edge_id(opposite(comp[pos]))]
            end_cut = cut_of_edge[d.edge_id(opposite(comp[nxt]))]
            p = _Piece(len(pieces), entries, start_cut, end_cut,
                       side[entries[0]])
            pieces.append(p)
            for e in entries:
                piece_of[e] = p.pid
    return pieces, piece_of


def _entry_of(d: Diagram, c: int, axis: int) -> int:
    return 4 * c + (d.in0[c] if axis == 0 else d.in1[c])


def _crossing_pieces(d: Diagram, piece_of: dict[int, int], c: int):
    """(piece of the over passage, piece of the under passage) at crossing c."""
    po = piece_of[_entry_of(d, c, d.over[c])]
    pu = piece_of[_entry_of(d, c, 1 - d.over[c])]
    return po, pu


@dataclass(frozen=True)
class CMove:
    circle: TransverseCircle
    omega: int                       # side index serving as the disc
    alpha_pid: int
    alpha: ArcRef                    # open arc (full passages of alpha)
    labels: tuple[tuple[int, str], ...]
    gamma_steps: tuple[tuple[int, bool], ...]   # (via_dart, gamma_over)
    split_circle: bool = False       # alpha is a whole component

    kind = "c"

    @property
    def delta_c(self) -> int:
        return 0

    def sort_key(self):
        return (len(self.circle.steps), self.circle.steps, self.omega,
                self.alpha.walk)


@dataclass(frozen=True)
class SplitPair:
    d0: Diagram
    d1: Diagram


def _meetings_and_dominance(d: Diagram, pieces, piece_of, alpha_pid: int,
                            scope_pids: set[int]):
    """Forced labels and dominance pairs for the pieces in scope, relative
    to the alpha piece.  Returns (problem, meeting count per pid) or None
    when some piece meets alpha both over and under."""
    prob = LabelProblem(strands=sorted(scope_pids - {alpha_pid}))
    meet_count: dict[int, int] = {}
    meetings: dict[int, list[bool]] = {p: [] for p in prob.strands}
    for c in range(d.n_crossings):
        e0 = _entry_of(d, c, 0)
        if e0 not in piece_of:
            continue
        po, pu = _crossing_pieces(d, piece_of, c)
        if po not in scope_pids or pu not in scope_pids:
            continue
        if alpha_pid in (po, pu):
            other = pu if po == alpha_pid else po
            if other == alpha_pid:
                continue  # self-crossing of alpha
            meetings[other].append(po == other)
            meet_count[other] = meet_count.get(other, 0) + 1
        else:
            if po != pu:
                prob.dominance.append((po, pu))
    for pid, ms in meetings.items():
        f = forced_label(ms)
        if f == CONFLICT:
            return None, None
        if f is not None:
            prob.forced[pid] = f
    return prob, meet_count


def _separates(circ_len: int, a1: int, a2: int, b1: int, b2: int) -> bool:
    """Do cuts {b1,b2} separate cuts {a1,a2} on the circle?"""
    def between(x, lo, hi):
        if lo <= hi:
            return lo < x < hi
        return x > lo or x < hi
    return between(b1, a1, a2) != between(b2, a1, a2)


def find_c(d: Diagram, max_len: int = 8) -> list[CMove]:
    """All valid C moves over boundary circles of dual length <= max_len."""
    if d.n_crossings and not d.is_connected():
        raise SplitDiagramError("C-move search requires a connected diagram")
    if d.n_crossings < 2:
        return []
    fm = trace_faces(d)
    out = []
    for circ in enumerate_transverse_circles(d, max_len):
        try:
            side = circle_sides(d, fm, circ)
        except AssertionError:
            continue
        pieces, piece_of = knot_pieces(d, circ, side)
        for omega in (0, 1):
            inside = [p for p in pieces if p.side == omega]
            pids = {p.pid for p in inside}
            for alpha in inside:
                if alpha.is_circle and len(d.components()) == 1:
                    continue
                prob, meet_count = _meetings_and_dominance(
                    d, pieces, piece_of, alpha.pid, pids)
                if prob is None:
                    continue
                if not alpha.is_circle:
                    ok = True
                    for p in inside:
                        if p.pid == alpha.pid or p.is_circle:
                            continue
                        if not _separates(len(circ), alpha.start_cut,
                                          alpha.end_cut, p.start_cut, p.end_cut):
                            if meet_count.get(p.pid, 0) < 2:
                                ok = False
                                break
                    if not ok:
                        continue
                labels = solve(prob)
                if labels is None:
                    continue
                move = _build_cmove(d, circ, omega, alpha, labels, pieces)
                if move is None:
                    continue
                d0, d1 = _construct_split(d, move)
                if (d0.n_crossings >= d.n_crossings
                        or d1.n_crossings >= d.n_crossings):
                    continue
                if d0.n_crossings + d1.n_crossings > d.n_crossings:
                    raise AssertionError("split must not grow the diagram")
                out.append(move)
    out.sort(key=CMove.sort_key)
    return out


def _build_cmove(d: Diagram, circ: TransverseCircle, omega: int,
                 alpha: "_Piece", labels: dict[int, str], pieces) -> CMove | None:
    label_of_cut = {}
    for p in pieces:
        if p.side == omega and not p.is_circle and p.pid != alpha.pid:
            label_of_cut[p.start_cut] = labels[p.pid]
            label_of_cut[p.end_cut] = labels[p.pid]
    if alpha.is_circle:
        arc = ArcRef(tuple(x for e in alpha.entries
                           for x in (e, opposite(e))), "circle")
        return CMove(circ, omega, alpha.pid, arc, tuple(sorted(labels.items())),
                     (), split_circle=True)
    # gamma runs along a boundary half from alpha's entry cut to its exit
    # cut; both halves are tried and the one crossing fewer strands (ties by
    # step tuple) is kept
    k = len(circ)
    s, t = alpha.start_cut, alpha.end_cut
    best = None
    for direction in (1, -1):
        cuts = []
        i = (s + direction) % k
        while i != t:
            cuts.append(i)
            i = (i + direction) % k
        if any(c not in label_of_cut for c in cuts):
            continue
        steps = []
        for i in cuts:
            e, via = circ.steps[i]
            via_dir = via if direction == 1 else d.pair[via]
            gamma_over = label_of_cut[i] == "U"
            steps.append((via_dir, gamma_over))
        cand = (len(cuts), tuple(steps))
        if best is None or cand < best:
            best = cand
    if best is None:
        return None
    return CMove(circ, omega, alpha.pid,
                 ArcRef(tuple(x for e in alpha.entries
                              for x in (e, opposite(e))), "open"),
                 tuple(sorted(labels.items())), best[1])


def _construct_split(d: Diagram, m: CMove) -> tuple[Diagram, Diagram]:
    # factor 0: alpha closed up on its own
    visits0 = [(e, opposite(e)) for e in m.alpha.walk[0::2]]
    d0 = subdiagram_from_visits(d, visits0)
    # factor 1: the rest, with gamma laid along the boundary half
    s = Surgery(d)
    gamma: list[int] = []
    for via, over in m.gamma_steps:
        cid = s.insert_on_edge(via, over)
        gamma.append(4 * cid + 3)
        gamma.append(4 * cid + 1)
    ends = s.remove(set(m.alpha.walk))
    if m.split_circle:
        if ends or gamma:
            raise AssertionError("component removal must not cut strands")
        d1 = s.freeze()
        return d0, d1
    from .surgery import BARE
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
    return d0, s.freeze()


def apply_c(d: Diagram, m: CMove) -> SplitPair:
    d0, d1 = _construct_split(d, m)
    if d0.n_crossings + d1.n_crossings > d.n_crossings:
        raise AssertionError("C move grew the diagram")
    return SplitPair(d0, d1)


# -- C-tilde ------------------------------------------------------------------


@dataclass(frozen=True)
class CTildeMove:
    outer: TransverseCircle
    inner: TransverseCircle
    alpha_entries: tuple[int, ...]    # fine piece crossing the annulus once
    beta0_entries: tuple[int, ...]    # rest of alpha's outer piece
    labels: tuple[tuple[int, str], ...]

    kind = "ctilde"

    @property
    def delta_c(self) -> int:
        return 0

    def sort_key(self):
        return (len(self.outer.steps) + len(self.inner.steps),
                self.outer.steps, self.inner.steps, self.alpha_entries)


def find_ctilde(d: Diagram, max_len: int = 8) -> list[CTildeMove]:
    """Annular splits: alpha crosses between two nested face-disjoint
    boundary circles; its own strand tail takes part in the labelling."""
    if d.n_crossings and not d.is_connected():
        raise SplitDiagramError("C-move search requires a connected diagram")
    if d.n_crossings < 2:
        return []
    fm = trace_faces(d)
    circles = enumerate_transverse_circles(d, max_len)
    out = []
    for outer in circles:
        try:
            side_o = circle_sides(d, fm, outer)
        except AssertionError:
            continue
        pieces_o, piece_of_o = knot_pieces(d, outer, side_o)
        ofaces = set(outer.faces)
        for inner in circles:
            if inner is outer or set(inner.faces) & ofaces:
                continue
            if set(inner.edge_ids()) & set(outer.edge_ids()):
                continue
            try:
                side_i = circle_sides(d, fm, inner)
            except AssertionError:
                continue
            # the inner circle must lie on one side of the outer one
            isides = {side_o[v] for _e, v in inner.steps}
            isides |= {side_o[d.pair[v]] for _e, v in inner.steps}
            if len(isides) != 1:
                continue
            omega_tilde = isides.pop()
            osides = {side_i[v] for _e, v in outer.steps}
            osides |= {side_i[d.pair[v]] for _e, v in outer.steps}
            if len(osides) != 1:
                continue
            not_omega = osides.pop()
            both_cuts = set(outer.edge_ids()) | set(inner.edge_ids())
            fine = _fine_pieces(d, both_cuts)
            for fp in fine:
                cuts_i = [e for e in fp["cut_edges"] if e in set(inner.edge_ids())]
                cuts_o = [e for e in fp["cut_edges"] if e in set(outer.edge_ids())]
                if len(cuts_i) != 1 or len(cuts_o) != 1:
                    continue
                # alpha must live between the circles: inside the outer disc
                # and on the inner circle's annulus side
                if any(side_o[e] != omega_tilde or side_i[e] != not_omega
                       for e in fp["entries"]):
                    continue
                move = _build_ctilde(d, outer, inner, side_o, side_i,
                                     omega_tilde, not_omega,
                                     pieces_o, piece_of_o, fp)
                if move is None:
                    continue
                try:
                    pair = apply_ctilde(d, move)
                except AssertionError:
                    continue
                if (pair.d0.n_crossings >= d.n_crossings
                        or pair.d1.n_crossings >= d.n_crossings):
                    continue
                out.append(move)
    out.sort(key=CTildeMove.sort_key)
    return out


def _fine_pieces(d: Diagram, cut_edges: set[int]):
    out = []
    for comp in d.components():
        m = len(comp)
        cut_positions = [i for i in range(m)
                         if d.edge_id(opposite(comp[i])) in cut_edges]
        if not cut_positions:
            continue
        for k, pos in enumerate(cut_positions):
            nxt = cut_positions[(k + 1) % len(cut_positions)]
            entries = []
            i = (pos + 1) % m
            while True:
                entries.append(comp[i])
                if i == nxt:
                    break
                i = (i + 1) % m
            out.append({
                "entries": entries,
                "cut_edges": [d.edge_id(opposite(comp[pos])),
                              d.edge_id(opposite(comp[nxt]))],
            })
    return out


def _build_ctilde(d, outer, inner, side_o, side_i, omega_tilde, not_omega,
                  pieces_o, piece_of_o, fp) -> CTildeMove | None:
    alpha_entries = list(fp["entries"])
    host = piece_of_o.get(alpha_entries[0])
    if host is None:
        return None
    host_piece = pieces_o[host]
    if host_piece.is_circle or host_piece.side != omega_tilde:
        return None
    aset = set(alpha_entries)
    if not aset <= set(host_piece.entries):
        return None
    beta0 = [e for e in host_piece.entries if e not in aset]
    # labelling: beta0 plus the other omega-tilde pieces, relative to alpha
    scope = {p.pid for p in pieces_o if p.side == omega_tilde}
    if host not in scope:
        return None
    beta0_id = -2
    owner: dict[int, int] = {}
    for p in pieces_o:
        if p.side != omega_tilde:
            continue
        for e in p.entries:
            owner[e] = p.pid
    for e in beta0:
        owner[e] = beta0_id
    for e in alpha_entries:
        owner[e] = -1  # alpha proper
    strand_ids = sorted({v for v in owner.values() if v >= 0})
    if beta0:
        strand_ids.append(beta0_id)
    prob = LabelProblem(strands=strand_ids)
    meetings: dict[int, list[bool]] = {}
    for c in range(d.n_crossings):
        e0 = _entry_of(d, c, 0)
        if e0 not in owner:
            continue
        po = owner[_entry_of(d, c, d.over[c])]
        pu = owner[_entry_of(d, c, 1 - d.over[c])]
        if -1 in (po, pu):
            other = pu if po == -1 else po
            if other == -1:
                continue
            meetings.setdefault(other, []).append(po == other)
        elif po != pu:
            prob.dominance.append((po, pu))
    for pid, ms in meetings.items():
        f = forced_label(ms)
        if f == CONFLICT:
            return None
        if f is not None:
            prob.forced[pid] = f
    labels = solve(prob)
    if labels is None:
        return None
    return CTildeMove(outer, inner, tuple(alpha_entries), tuple(beta0),
                      tuple(sorted(labels.items())))


def apply_ctilde(d: Diagram, m: CTildeMove) -> SplitPair:
    # factor 1: the diagram with alpha replaced by its straightening
    visits_a = [(e, opposite(e)) for e in m.alpha_entries]
    _, erased = straighten_visits(visits_a)
    s = Surgery(d)
    ends = s.remove(erased)
    if ends:
        raise AssertionError("straightening must not cut the strand")
    d1 = s.freeze()
    # factor 0: alpha with its self-crossings, the straightened tail, and a
    # boundary arc closing them up
    visits_b0, _ = straighten_visits([(e, opposite(e)) for e in m.beta0_entries])
    d0 = subdiagram_from_visits(d, visits_a + visits_b0)
    if d0.n_crossings + d1.n_crossings > d.n_crossings:
        raise AssertionError("C-tilde move grew the diagram")
    return SplitPair(d0, d1)
