"""Peeling samplers for the PSHT family, free Boltzmann polygons, and the
two degenerate triangulations.

Step laws.  From a hole of perimeter ``p`` bounding the infinite part, peeling
a side reveals a triangle whose apex is

* a new vertex, with probability ``C_{p+1} / C_p``;
* a boundary vertex, splitting off a finite ``(i+1)``-gon on either side of the
  triangle, each with probability ``Z_{i+1} C_{p-i} / C_p``  (``0 <= i < p``).

This is the gamma = 0 peeling equation divided by ``a_v^p``.  Inside a finite
hole of perimeter ``q`` filled by a free Boltzmann triangulation the
probabilities are ``Z_{q+1}/Z_q`` (new vertex), ``Z_{i+1} Z_{q-i}/Z_q`` (split)
and, when ``q = 2``, ``lambda/Z_2`` for gluing the two sides together.  All
probabilities are exact and summed exactly; every table is checked to add up
to 1 before use.

Finite holes are filled lazily: they are peeled only when the exploration
needs a face inside them, which gives the same law as filling eagerly.
"""

from __future__ import annotations

import bisect
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import mapcore
from .coeffs import c_psht
from .mapcore import FREE, TriComplex
from .series import OutOfRange, QuadNum, Z_p_at, check_h, lambda_of_h

TWO64 = 1 << 64
_MARGIN = 1e-9


class SamplerError(RuntimeError):
    pass


class CapExhausted(SamplerError):
    pass


class UndecidableRadius(SamplerError):
    pass


class StepLawError(SamplerError):
    """A step distribution failed to sum to exactly 1."""


def rng_for(seed: int, stream: int = 0) -> random.Random:
    """Independent reproducible generator for a ``(seed, stream)`` pair."""
    return random.Random(f"peeltri:{int(seed)}:{int(stream)}")


# ---------------------------------------------------------------------------
# exact categorical draws
# ---------------------------------------------------------------------------


class StepTable:
    """Outcomes with exact cumulative thresholds."""

    __slots__ = ("outcomes", "probs", "cum", "cum_float")

    def __init__(self, outcomes: list, probs: list):
        keep = [(o, p) for o, p in zip(outcomes, probs) if p]
        self.outcomes = [o for o, _ in keep]
        self.probs = [p for _, p in keep]
        cum, acc = [], QuadNum(0)
        for p in self.probs:
            if p.sign() < 0:
                raise StepLawError(f"negative step probability {p}")
            acc = acc + p
            cum.append(acc)
        if not cum or cum[-1] != 1:
            raise StepLawError(f"step probabilities sum to {acc}, not 1")
        self.cum = cum
        self.cum_float = [float(c) for c in cum[:-1]]

    def draw(self, rng: random.Random):
        """Inverse transform against a uniform dyadic rational, refined lazily."""
        if len(self.outcomes) == 1:
            return self.outcomes[0]
        k = rng.getrandbits(64)
        u = k / TWO64
        j = bisect.bisect_right(self.cum_float, u)
        near = [t for t in self.cum_float[max(0, j - 1):j + 1] if abs(u - t) <= _MARGIN]
        if not near:
            return self.outcomes[j]
        lo, width = Fraction(k, TWO64), Fraction(1, TWO64)
        # thresholds cum[0..n-2]; find the number of thresholds <= U exactly
        lo_idx = max(0, j - 3)
        hi_idx = min(len(self.cum) - 1, j + 3)
        while True:
            decided = True
            count = lo_idx
            for t in self.cum[lo_idx:hi_idx]:
                if (t - lo).sign() <= 0:
                    count += 1
                elif (t - (lo + width)).sign() >= 0:
                    break
                else:
                    decided = False
                    break
            if decided:
                return self.outcomes[count]
            lo += Fraction(rng.getrandbits(64), TWO64) * width
            width /= TWO64


# ---------------------------------------------------------------------------
# step laws
# ---------------------------------------------------------------------------


class StepLaws:
    """Exact peeling step tables for one value of ``h`` (built on demand)."""

    def __init__(self, h, p_max: int = 50):
        self.h = check_h(h)
        self.lam = lambda_of_h(self.h)
        self._inf: dict[int, StepTable] = {}
        self._fin: dict[int, StepTable] = {}
        self._root = None
        for p in range(1, p_max + 1):
            self.infinite(p)
            if self.h:
                self.finite(p)

    def C(self, p: int) -> QuadNum:
        return c_psht(p, self.h)

    def Z(self, p: int) -> QuadNum:
        return Z_p_at(self.h, p)

    def infinite(self, p: int) -> StepTable:
        tab = self._inf.get(p)
        if tab is None:
            cp = self.C(p)
            outs = [("new",)]
            probs = [self.C(p + 1) / cp]
            for i in range(p):
                # finite part in the piece containing the triangle's second side
                outs.append(("split", i, "B"))
                probs.append(self.Z(i + 1) * self.C(p - i) / cp)
                # finite part in the piece containing the triangle's first side
                outs.append(("split", i, "A"))
                probs.append(self.Z(p - i) * self.C(i + 1) / cp)
            tab = self._inf[p] = StepTable(outs, probs)
        return tab

    def finite(self, q: int) -> StepTable:
        if not self.h:
            raise OutOfRange("free Boltzmann triangulations need h > 0")
        tab = self._fin.get(q)
        if tab is None:
            zq = self.Z(q)
            outs = [("new",)]
            probs = [self.Z(q + 1) / zq]
            for i in range(q):
                outs.append(("split", i, "AB"))
                probs.append(self.Z(i + 1) * self.Z(q - i) / zq)
            if q == 2:
                outs.append(("close",))
                probs.append(self.lam / zq)
            tab = self._fin[q] = StepTable(outs, probs)
        return tab

    def root(self) -> StepTable:
        """Whether the root edge is a loop, and on which side the finite part lies."""
        if self._root is None:
            z1 = self.Z(1)
            self._root = StepTable(["edge", "loop_root_finite", "loop_root_infinite"],
                                   [self.C(2), z1, z1])
        return self._root


_LAWS: dict = {}


def step_laws(h, p_max: int = 50) -> StepLaws:
    h = check_h(h)
    laws = _LAWS.get(h)
    if laws is None:
        laws = _LAWS[h] = StepLaws(h, p_max)
    return laws


# ---------------------------------------------------------------------------
# exploration state
# ---------------------------------------------------------------------------


@dataclass
class _Hole:
    sides: list
    finite: bool


class Explorer:
    """Partially explored triangulation grown by peeling.

    Hole entries are free sides of explored faces (hole on their right) or
    negative ids for bare edges that no face borders yet.  A bare root edge has
    a twin: the same edge seen from the other side.
    """

    def __init__(self, laws: StepLaws, rng: random.Random, face_cap: int | None = None):
        self.laws = laws
        self.rng = rng
        self.glue: list[int] = []
        self.dist: list[int] = []
        self.holes: dict[int, _Hole] = {}
        self.hole_of: dict[int, int] = {}
        self.twin: dict[int, int] = {}
        self.bare_ref: dict[int, int] = {}
        self._next_hole = 0
        self.volume = 0
        self.steps = 0
        self.face_cap = face_cap
        self.edge_only = False
        self.trace: Callable | None = None
        self.root_kind = None

    # bookkeeping ----------------------------------------------------------
    @property
    def face_count(self) -> int:
        return len(self.dist)

    def _add_hole(self, sides: list, finite: bool) -> int:
        hid = self._next_hole
        self._next_hole += 1
        self.holes[hid] = _Hole(sides, finite)
        for x in sides:
            self.hole_of[x] = hid
        return hid

    def _drop_hole(self, hid: int) -> None:
        for x in self.holes.pop(hid).sides:
            if self.hole_of.get(x) == hid:
                del self.hole_of[x]

    def _new_face(self, dist: int) -> int:
        if self.face_cap is not None and len(self.dist) >= self.face_cap:
            raise CapExhausted("face cap reached")
        g = len(self.dist)
        self.dist.append(dist)
        self.glue.extend((FREE, FREE, FREE))
        return g

    def infinite_perimeter(self) -> int | None:
        for hole in self.holes.values():
            if not hole.finite:
                return len(hole.sides)
        return None

    # peeling ----------------------------------------------------------------
    def _attach(self, x: int, g0: int) -> None:
        if x >= 0:
            self.glue[x] = g0
            self.glue[g0] = x
            return
        tw = self.twin.pop(x, None)
        if tw is not None:
            self.twin.pop(tw, None)
            hid = self.hole_of.pop(tw)
            sides = self.holes[hid].sides
            sides[sides.index(tw)] = g0
            self.hole_of[g0] = hid
        else:
            self.bare_ref[x] = g0

    def _join(self, x: int, y: int) -> None:
        if x >= 0 and y >= 0:
            self.glue[x] = y
            self.glue[y] = x
        elif x >= 0:
            self.bare_ref[y] = x
        elif y >= 0:
            self.bare_ref[x] = y
        else:
            self.edge_only = True

    def table_for(self, x: int) -> StepTable:
        hole = self.holes[self.hole_of[x]]
        p = len(hole.sides)
        return self.laws.finite(p) if hole.finite else self.laws.infinite(p)

    def peel(self, x: int):
        outcome = self.table_for(x).draw(self.rng)
        self.apply(x, outcome)
        return outcome

    def apply(self, x: int, outcome: tuple) -> None:
        """Carry out one peeling step on side ``x`` with a given outcome."""
        hid = self.hole_of[x]
        hole = self.holes[hid]
        self.steps += 1
        if outcome[0] == "close":
            if len(hole.sides) != 2:
                raise SamplerError("only a 2-gon can be closed")
            k = hole.sides.index(x)
            y = hole.sides[1 - k]
            self._drop_hole(hid)
            self._join(x, y)
            self.volume += 1
        else:
            parent = self.dist[x // 3] + 1 if x >= 0 else 0
            g = self._new_face(parent)
            g0, g1, g2 = 3 * g, 3 * g + 1, 3 * g + 2
            self._attach(x, g0)
            sides = hole.sides
            k = sides.index(x)
            rest = sides[k + 1:] + sides[:k]
            finite = hole.finite
            self._drop_hole(hid)
            if outcome[0] == "new":
                self._add_hole(rest + [g1, g2], finite)
            else:
                _, i, fin = outcome
                piece_b = rest[:i] + [g2]
                piece_a = rest[i:] + [g1]
                self._add_hole(piece_a, finite or fin != "B")
                self._add_hole(piece_b, finite or fin != "A")
        if self.trace:
            self.trace(self, outcome)

    def copy(self) -> "Explorer":
        ex = Explorer.__new__(Explorer)
        ex.__dict__.update(self.__dict__)
        ex.glue = list(self.glue)
        ex.dist = list(self.dist)
        ex.holes = {k: _Hole(list(h.sides), h.finite) for k, h in self.holes.items()}
        ex.hole_of = dict(self.hole_of)
        ex.twin = dict(self.twin)
        ex.bare_ref = dict(self.bare_ref)
        return ex

    # export -------------------------------------------------------------------
    def hole_next(self) -> list[int]:
        nxt = [FREE] * len(self.glue)
        for hole in self.holes.values():
            s = hole.sides
            for a, b in zip(s, s[1:] + s[:1]):
                if a < 0 or b < 0:
                    raise SamplerError("bare edges remain on a hole")
                nxt[a] = b
        return nxt

    def to_complex(self, root: int = 0, extra_next: dict | None = None,
                   check: bool = False) -> TriComplex:
        nxt = self.hole_next()
        if extra_next:
            for a, b in extra_next.items():
                nxt[a] = b
        return mapcore.from_arrays(self.face_count, self.glue, root, nxt, check=check)

    def tracked_state(self) -> tuple[int | None, int]:
        return self.infinite_perimeter(), self.volume


# ---------------------------------------------------------------------------
# PSHT dual balls
# ---------------------------------------------------------------------------

_R, _L = -1, -2


def start_psht(laws: StepLaws, rng: random.Random) -> Explorer:
    """Reveal whether the root edge is a loop, then the root face."""
    ex = Explorer(laws, rng)
    kind = laws.root().draw(rng)
    ex.twin = {_R: _L, _L: _R}
    if kind == "edge":
        ex._add_hole([_R, _L], finite=False)
    else:
        ex._add_hole([_R], finite=(kind == "loop_root_finite"))
        ex._add_hole([_L], finite=(kind != "loop_root_finite"))
    ex.root_kind = kind
    ex.peel(_R)
    return ex


def explore_ball(ex: Explorer, r: int, order: str = "bfs") -> None:
    """Peel every free side of every face at dual distance <= r.

    ``order="reverse"`` visits the sides of each face (and the faces of each
    level) in the opposite order; the law of the ball does not depend on it.
    """
    level = 0
    while level <= r:
        faces = [f for f in range(ex.face_count) if ex.dist[f] == level]
        if not faces:
            break
        sides = (0, 1, 2)
        if order == "reverse":
            faces.reverse()
            sides = (2, 1, 0)
        for f in faces:
            for s in sides:
                x = 3 * f + s
                while ex.glue[x] == FREE and x in ex.hole_of:
                    ex.peel(x)
        level += 1


def sample_psht_explorer(h, r: int, seed: int = 0, stream: int = 0, order: str = "bfs") -> Explorer:
    laws = step_laws(h)
    ex = start_psht(laws, rng_for(seed, stream))
    explore_ball(ex, r, order)
    return ex


def sample_psht_dual_ball(h, r: int, seed: int = 0, stream: int = 0,
                          order: str = "bfs") -> TriComplex:
    """Root dual ball ``B_r^*`` of the PSHT with parameter ``h`` (UIPT at 1/4)."""
    if r < 0:
        raise ValueError("radius must be >= 0")
    ex = sample_psht_explorer(h, r, seed, stream, order)
    full = ex.to_complex()
    return mapcore.restrict(full, [f for f in range(ex.face_count) if ex.dist[f] <= r])


def _batch_codes(args) -> Counter:
    h, r, seed, lo, hi, order = args
    out: Counter = Counter()
    for stream in range(lo, hi):
        out[sample_psht_dual_ball(h, r, seed, stream, order).canonical_code()] += 1
    return out


def psht_ball_counts(h, r: int, n: int, seed: int = 0, jobs: int = 1,
                     order: str = "bfs", first_stream: int = 0) -> Counter:
    """Frequencies of canonical codes of ``n`` sampled balls (streams are independent)."""
    h = check_h(h)
    if jobs <= 1 or n < 1000:
        return _batch_codes((h, r, seed, first_stream, first_stream + n, order))
    chunk = -(-n // (4 * jobs))
    tasks = []
    for lo in range(first_stream, first_stream + n, chunk):
        tasks.append((h, r, seed, lo, min(lo + chunk, first_stream + n), order))
    total: Counter = Counter()
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for c in pool.map(_batch_codes, tasks):
            total.update(c)
    return total


@dataclass(frozen=True)
class InclusionEstimate:
    hits: int
    n: int
    low: float
    high: float
    radius: int

    @property
    def estimate(self) -> float:
        return self.hits / self.n


def empirical_inclusion_prob(t: TriComplex, h, n: int, seed: int = 0,
                             radius: int | None = None, confidence: float = 0.997) -> InclusionEstimate:
    """Fraction of sampled balls containing ``t`` with a Wilson interval."""
    from scipy.stats import binomtest

    if n < 1:
        raise ValueError("n must be >= 1")
    need = 0 if t.degenerate else t.dual_eccentricity() + 1
    r = need if radius is None else radius
    hits = 0
    for stream in range(n):
        ball = sample_psht_dual_ball(h, max(r, 0), seed, stream)
        try:
            hits += mapcore.includes(t, ball)
        except mapcore.Undetermined as exc:
            raise UndecidableRadius(f"radius {r} cannot decide inclusion (need {need})") from exc
    ci = binomtest(hits, n).proportion_ci(confidence_level=confidence, method="wilson")
    return InclusionEstimate(hits, n, float(ci.low), float(ci.high), r)


# ---------------------------------------------------------------------------
# free Boltzmann polygons
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolygonSample:
    complex: TriComplex
    volume: int
    retries: int


def _fill_polygon(laws: StepLaws, p: int, rng: random.Random, cap: int) -> tuple[TriComplex, int]:
    ex = Explorer(laws, rng, face_cap=cap)
    bare = [-1 - j for j in range(p)]
    ex._add_hole(list(bare), finite=True)
    while ex.holes:
        hole = ex.holes[max(ex.holes)]
        ex.peel(hole.sides[0])
    if ex.edge_only:
        return mapcore.T2, 1
    refs = [ex.bare_ref[b] for b in bare]
    outer = {refs[k]: refs[k - 1] for k in range(p)}
    t = ex.to_complex(root=refs[0], extra_next=outer)
    return t, t.vertex_count - 1


def sample_boltzmann_polygon(p: int, h, cap: int = 10 ** 6, seed: int = 0, stream: int = 0,
                             retries: int = 10) -> PolygonSample:
    """Free Boltzmann triangulation of the ``p``-gon: ``P(t)`` proportional to ``lambda^n``.

    ``n`` is the number of vertices minus one.  Attempts reaching ``cap`` faces
    are discarded and redrawn from the same stream; the number of discarded
    attempts is reported.
    """
    h = check_h(h)
    if h == 0:
        raise OutOfRange("no triangulation has positive weight at h = 0")
    if p < 1:
        raise ValueError("perimeter must be >= 1")
    laws = step_laws(h)
    rng = rng_for(seed, stream)
    for attempt in range(retries + 1):
        try:
            t, n = _fill_polygon(laws, p, rng, cap)
        except CapExhausted:
            continue
        return PolygonSample(t, n, attempt)
    raise CapExhausted(f"{retries + 1} attempts all exceeded {cap} faces")


# ---------------------------------------------------------------------------
# degenerate triangulations
# ---------------------------------------------------------------------------


class TreeSource:
    """Faces of the 3-regular tree: the root face has three children, every
    other face a parent (side 0) and two children (sides 1, 2)."""

    def root_side(self):
        return (), 0

    def neighbors(self, face: tuple):
        if not face:
            return tuple(((s,), 0) for s in range(3))
        return (face[:-1], face[-1]), (face + (1,), 0), (face + (2,), 0)

    def hole_successor(self, face, side):
        raise mapcore.Undetermined("the tree has no holes")


class T0Source(TreeSource):
    """Dual of the complete binary tree with all vertices distinct."""

    def ball_successor(self, ball: dict, face, side: int):
        cand = (face, (side + 1) % 3)
        while True:
            g, t = self.neighbors(cand[0])[cand[1]]
            if g not in ball:
                return cand
            cand = (g, (t + 1) % 3)


class TstarSource(TreeSource):
    """One vertex; every free side of a ball bounds its own loop hole."""

    def ball_successor(self, ball: dict, face, side: int):
        return face, side


def build_T0_dual_ball(r: int) -> TriComplex:
    return mapcore.dual_ball(T0Source(), r)


def build_Tstar_dual_ball(r: int) -> TriComplex:
    return mapcore.dual_ball(TstarSource(), r)
