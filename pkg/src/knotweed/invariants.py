"""Knot invariants used as move-soundness oracles.

The Goeritz determinant (fast, from a checkerboard colouring of the faces)
and the Alexander polynomial (stronger, from the crossing/overpass relation
matrix with exact integer arithmetic) must be unchanged by every Z move and
multiplicative across every C split.  Neither certifies knot type, but a
single violation proves a move implementation wrong, which is what they
are here for.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .diagram import Diagram, ccw_next, trace_faces


class MultiComponentError(Exception):
    """Invariant oracle is restricted to knots (one component)."""


@dataclass(frozen=True)
class IntPoly:
    """Integer Laurent polynomial in one variable, normalized so the lowest
    exponent is 0 and the leading coefficient is positive (units +-t^k are
    quotiented away)."""

    coeffs: tuple[int, ...]  # coeffs[i] multiplies t^i; () is the zero poly

    @staticmethod
    def from_map(m: dict[int, int]) -> "IntPoly":
        m = {e: c for e, c in m.items() if c}
        if not m:
            return IntPoly(())
        lo, hi = min(m), max(m)
        cs = [m.get(e, 0) for e in range(lo, hi + 1)]
        if cs[-1] < 0:
            cs = [-c for c in cs]
        return IntPoly(tuple(cs))

    def __call__(self, x: int) -> int:
        v = 0
        for c in reversed(self.coeffs):
            v = v * x + c
        return v

    def __mul__(self, other: "IntPoly") -> "IntPoly":
        if not self.coeffs or not other.coeffs:
            return IntPoly(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPoly.from_map(dict(enumerate(out)))

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for e, c in enumerate(self.coeffs):
            if not c:
                continue
            if e == 0:
                terms.append(str(c))
            else:
                t = "t" if e == 1 else f"t^{e}"
                if c == 1:
                    terms.append(t)
                elif c == -1:
                    terms.append(f"-{t}")
                else:
                    terms.append(f"{c}{t}")
        return " + ".join(terms).replace("+ -", "- ")


def _require_knot(d: Diagram) -> None:
    if d.n_crossings == 0:
        if d.loops != 1:
            raise MultiComponentError("expected a single circle")
        return
    if d.loops or len(d.components()) != 1:
        raise MultiComponentError("invariant oracle needs a one-component diagram")


def crossing_sign(d: Diagram, c: int) -> int:
    """+1 where rotating the over direction counterclockwise by a quarter
    turn gives the under direction, else -1."""
    over_in = d.in0[c] if d.over[c] == 0 else d.in1[c]
    under_in = d.in1[c] if d.over[c] == 0 else d.in0[c]
    return 1 if (under_in - over_in) % 4 == 1 else -1


def writhe(d: Diagram) -> int:
    return sum(crossing_sign(d, c) for c in range(d.n_crossings))


def _bareiss_det(m: list[list[int]]) -> int:
    """Exact determinant of an integer matrix (fraction-free elimination)."""
    n = len(m)
    if n == 0:
        return 1
    a = [row[:] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _checkerboard(d: Diagram) -> list[int]:
    """2-colouring of faces, adjacent across every edge; colour of face 0 is 0."""
    fm = trace_faces(d)
    colour = [-1] * len(fm.faces)
    colour[0] = 0
    stack = [0]
    adj: list[list[int]] = [[] for _ in fm.faces]
    for a, b in d.edges():
        fa, fb = fm.face_of[a], fm.face_of[b]
        adj[fa].append(fb)
        adj[fb].append(fa)
    while stack:
        f = stack.pop()
        for g in adj[f]:
            if colour[g] < 0:
                colour[g] = 1 - colour[f]
                stack.append(g)
            elif colour[g] == colour[f]:
                raise AssertionError("checkerboard colouring failed")
    return colour


def determinant(d: Diagram) -> int:
    """|Alexander at -1| via the Goeritz matrix of the white faces."""
    _require_knot(d)
    if d.n_crossings == 0:
        return 1
    fm = trace_faces(d)
    colour = _checkerboard(d)
    white = [f for f in range(len(fm.faces)) if colour[f] == 0]
    widx = {f: i for i, f in enumerate(white)}
    g = [[0] * len(white) for _ in white]
    for c in range(d.n_crossings):
        # corner between slots s and s+1 lies in face_of(dart s+1)
        f0 = fm.face_of[4 * c + 1]  # corner 0-1
        f1 = fm.face_of[4 * c + 2]  # corner 1-2
        if colour[f0] == 0:
            wa, wb = f0, fm.face_of[4 * c + 3]  # corners 0-1 and 2-3
            eta = 1 if d.over[c] == 0 else -1
        else:
            wa, wb = f1, fm.face_of[4 * c + 0]  # corners 1-2 and 3-0
            eta = 1 if d.over[c] == 1 else -1
        if wa == wb:
            continue
        i, j = widx[wa], widx[wb]
        g[i][j] -= eta
        g[j][i] -= eta
        g[i][i] += eta
        g[j][j] += eta
    minor = [row[1:] for row in g[1:]]
    return abs(_bareiss_det(minor))


def _overpass_arcs(d: Diagram) -> tuple[dict[int, int], dict[int, tuple[int, int, int]]]:
    """Wirtinger arcs: strand pieces between consecutive under-passages.

    Returns (arc id per entry dart of each passage, and per crossing the
    triple (under_in_arc, under_out_arc, over_arc))."""
    comp = d.components()[0]
    m = len(comp)
    under_pos = [i for i, e in enumerate(comp) if not d.over_dart(e)]
    arc_of_pos: dict[int, int] = {}
    for k, start in enumerate(under_pos):
        # the arc starting at this under-exit runs to the next under-entry
        i = (start + 1) % m
        while d.over_dart(comp[i]):
            arc_of_pos[i] = k
            i = (i + 1) % m
        arc_of_pos[i] = k  # position of the terminating under-passage entry
    rel: dict[int, tuple[int, int, int]] = {}
    pos_of_entry = {e: i for i, e in enumerate(comp)}
    for c in range(d.n_crossings):
        under_entry = 4 * c + (d.in0[c] if d.over[c] == 1 else d.in1[c])
        over_entry = 4 * c + (d.in1[c] if d.over[c] == 1 else d.in0[c])
        pu = pos_of_entry[under_entry]
        po = pos_of_entry[over_entry]
        in_arc = arc_of_pos[pu]
        out_arc = under_pos.index(pu)
        rel[c] = (in_arc, out_arc, arc_of_pos[po])
    return arc_of_pos, rel


def alexander(d: Diagram) -> IntPoly:
    """Alexander polynomial up to units, by exact interpolation of the
    overpass-relation matrix minor."""
    _require_knot(d)
    n = d.n_crossings
    if n == 0:
        return IntPoly((1,))
    _, rel = _overpass_arcs(d)

    def minor_at(t: int) -> int:
        m = [[0] * n for _ in range(n)]
        for c in range(n):
            in_arc, out_arc, over_arc = rel[c]
            if crossing_sign(d, c) > 0:
                m[c][over_arc] += 1 - t
                m[c][in_arc] += t
                m[c][out_arc] += -1
            else:
                m[c][over_arc] += t - 1
                m[c][in_arc] += 1
                m[c][out_arc] += -t
        sub = [row[1:] for row in m[1:]]
        return _bareiss_det(sub)

    pts = list(range(2, 2 + n))
    vals = [minor_at(t) for t in pts]
    # exact Lagrange interpolation; the minor's degree is at most n-1
    coeffs = [Fraction(0)] * n
    for xi, yi in zip(pts, vals):
        base = [Fraction(1)]  # prod over the other points of (t - xj)
        denom = 1
        for xj in pts:
            if xj == xi:
                continue
            new = [Fraction(0)] * (len(base) + 1)
            for k, bk in enumerate(base):
                new[k] += bk * (-xj)
                new[k + 1] += bk
            base = new
            denom *= xi - xj
        w = Fraction(yi, denom)
        for k, bk in enumerate(base):
            coeffs[k] += bk * w
    out: dict[int, int] = {}
    for e, c in enumerate(coeffs):
        if c.denominator != 1:
            raise AssertionError("interpolation produced a non-integer coefficient")
        out[e] = int(c)
    return IntPoly.from_map(out)
