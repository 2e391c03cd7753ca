"""Exhaustive generation of small rooted triangulations and exact statistics.

Two independent generators of rooted sphere triangulations with ``2n`` faces:

* strategy ``a`` glues triangles side by side in canonical breadth-first
  order, so every rooted map is produced once.  A partial gluing is a disk
  with holes; joining two sides of different boundary cycles adds a handle,
  so such joins are pruned;
* strategy ``b`` enumerates all decision sequences of a fixed-order peeling
  exploration (new vertex, split, or close a 2-gon).

Both are cross-checked by canonical code, and counts agree with Tutte's
formula for rooted type-I triangulations.
"""

from __future__ import annotations

import hashlib
import math
from collections import Counter
from fractions import Fraction
from typing import Iterator

from . import mapcore
from .mapcore import FREE, TriComplex

DEFAULT_MAX_N = 6


class BudgetExceeded(RuntimeError):
    pass


def check_budget(n: int, max_n: int = DEFAULT_MAX_N) -> None:
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > max_n:
        raise BudgetExceeded(f"n={n} exceeds the budget n <= {max_n}")


def tutte_count(n: int) -> int:
    """Rooted type-I sphere triangulations with ``2n`` faces."""
    def dfact(k):
        return math.prod(range(k, 0, -2))
    return 2 ** (2 * n + 1) * dfact(3 * n) // (math.factorial(n + 2) * dfact(n))


# ---------------------------------------------------------------------------
# strategy a: canonical gluing search
# ---------------------------------------------------------------------------


class _GluingSearch:
    """Depth-first search over canonical gluing codes.

    ``boundary`` maps a cycle id to its list of open sides in boundary order.
    """

    def __init__(self, faces: int, allow_free: bool):
        self.faces = faces
        self.allow_free = allow_free
        self.glue = [FREE] * (3 * faces)
        self.kept_free: set[int] = set()
        self.count = 1
        self.cycles: dict[int, list[int]] = {0: [0, 1, 2]}
        self.cycle_of = {0: 0, 1: 0, 2: 0}
        self.next_cycle = 1

    def run(self) -> Iterator[tuple[list[int], set[int]]]:
        yield from self._step(0)

    def _step(self, j: int):
        n3 = 3 * self.count
        while j < n3 and (self.glue[j] != FREE or j in self.kept_free):
            j += 1
        if j == n3:
            if self.count == self.faces:
                yield self.glue, self.kept_free
            return
        cid = self.cycle_of[j]
        cyc = self.cycles[cid]
        k = cyc.index(j)
        # a new face on side j
        if self.count < self.faces:
            g = self.count
            self.count += 1
            self.glue[j], self.glue[3 * g] = 3 * g, j
            new = cyc[:k] + [3 * g + 1, 3 * g + 2] + cyc[k + 1:]
            self.cycles[cid] = new
            del self.cycle_of[j]
            self.cycle_of[3 * g + 1] = self.cycle_of[3 * g + 2] = cid
            yield from self._step(j + 1)
            del self.cycle_of[3 * g + 1], self.cycle_of[3 * g + 2]
            self.cycle_of[j] = cid
            self.cycles[cid] = cyc
            self.glue[j] = self.glue[3 * g] = FREE
            self.count -= 1
        # glue j to a later open side on the same boundary cycle
        L = len(cyc)
        for m in range(1, L):
            y = cyc[(k + m) % L]
            if y < j or y in self.kept_free:
                continue
            inner = [cyc[(k + t) % L] for t in range(1, m)]
            outer = [cyc[(k + t) % L] for t in range(m + 1, L)]
            if not self.allow_free and (len(inner) % 2 or len(outer) % 2):
                # an odd cycle would need a new face; still allowed while faces remain
                if self.count == self.faces:
                    continue
            self.glue[j], self.glue[y] = y, j
            del self.cycles[cid]
            added = []
            for part in (inner, outer):
                if part:
                    c = self.next_cycle
                    self.next_cycle += 1
                    self.cycles[c] = part
                    for x in part:
                        self.cycle_of[x] = c
                    added.append(c)
            del self.cycle_of[j], self.cycle_of[y]
            yield from self._step(j + 1)
            self.cycle_of[j] = self.cycle_of[y] = cid
            for c in added:
                del self.cycles[c]
            self.cycles[cid] = cyc
            for x in cyc:
                self.cycle_of[x] = cid
            self.glue[j] = self.glue[y] = FREE
        # leave j on the final boundary
        if self.allow_free:
            self.kept_free.add(j)
            yield from self._step(j + 1)
            self.kept_free.discard(j)


def _spheres_a(n: int) -> Iterator[TriComplex]:
    search = _GluingSearch(2 * n, allow_free=False)
    for glue, _ in search.run():
        yield mapcore.from_arrays(2 * n, glue, 0, [FREE] * (6 * n), check=False)


# ---------------------------------------------------------------------------
# strategy b: peeling decision sequences
# ---------------------------------------------------------------------------


class _NoLaws:
    pass


def _peel_outcomes(q: int):
    yield ("new",)
    for i in range(q):
        yield ("split", i, "AB")
    if q == 2:
        yield ("close",)


def _spheres_b(n: int) -> Iterator[TriComplex]:
    from .sampler import Explorer, _L, _R

    faces = 2 * n
    for kind in ("edge", "loop"):
        ex = Explorer(_NoLaws(), None)
        ex.twin = {_R: _L, _L: _R}
        if kind == "edge":
            ex._add_hole([_R, _L], finite=True)
            verts = 2
        else:
            ex._add_hole([_R], finite=True)
            ex._add_hole([_L], finite=True)
            verts = 1
        yield from _peel_tree(ex, _R, faces, n + 2 - verts)


def _peel_tree(ex, x: int, faces: int, new_left: int):
    q = len(ex.holes[ex.hole_of[x]].sides)
    for out in _peel_outcomes(q):
        if out[0] == "new" and new_left == 0:
            continue
        if out[0] != "close" and ex.face_count >= faces:
            continue
        if out[0] == "close" and x < 0 and ex.hole_of.get(x) is not None and not ex.face_count:
            continue  # the bare edge alone is not a triangulation with faces
        child = ex.copy()
        child.apply(x, out)
        left = new_left - (out[0] == "new")
        if not child.holes:
            if child.face_count == faces and left == 0:
                yield child.to_complex()
            continue
        # remaining budget: each hole needs at least one more step
        hid = max(child.holes)
        yield from _peel_tree(child, child.holes[hid].sides[0], faces, left)


def enumerate_sphere(n: int, strategy: str = "a", max_n: int = DEFAULT_MAX_N) -> Iterator[TriComplex]:
    """Every rooted sphere triangulation with ``2n`` faces, once each."""
    check_budget(n, max_n)
    if strategy == "a":
        yield from _spheres_a(n)
    elif strategy == "b":
        yield from _spheres_b(n)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")


_cache: dict = {}


def sphere_list(n: int, strategy: str = "a", max_n: int = DEFAULT_MAX_N) -> list[TriComplex]:
    key = (n, strategy)
    if key not in _cache:
        _cache[key] = list(enumerate_sphere(n, strategy, max_n))
    return _cache[key]


def code_digest(maps) -> str:
    h = hashlib.sha256()
    for code in sorted(t.canonical_code() for t in maps):
        h.update(code.encode())
        h.update(b"\n")
    return h.hexdigest()


# ---------------------------------------------------------------------------
# triangulations of polygons (brute-force oracle for tau)
# ---------------------------------------------------------------------------


def polygon_triangulations(n: int, p: int) -> list[TriComplex]:
    """Rooted triangulations of the ``p``-gon with ``n + 1`` vertices.

    The root is a boundary side with an internal face on its left; the
    boundary is one simple cycle.  The bare edge counts as the unique
    triangulation of the 2-gon with two vertices.
    """
    if n < 0 or p < 1:
        raise ValueError("need n >= 0 and p >= 1")
    faces = 2 * n - p
    if faces < 0:
        return []
    if faces == 0:
        return [mapcore.T2] if (n, p) == (1, 2) else []
    out = []
    search = _GluingSearch(faces, allow_free=True)
    for glue, kept in search.run():
        if 0 not in kept or len(kept) != p:
            continue
        t = mapcore.from_arrays(faces, list(glue), 0, check=False)
        if t.hole_count != 1 or t.vertex_count != n + 1 or mapcore.genus_of(t) != 0:
            continue
        if t.inner_volume() != n - p + 1:
            continue
        out.append(t)
    return out


def tau_bruteforce(n: int, p: int) -> int:
    return len(polygon_triangulations(n, p))


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------


def occ_distribution(pattern: TriComplex, n: int, max_n: int = DEFAULT_MAX_N) -> Counter:
    """Histogram ``{occ value: number of rooted triangulations}``."""
    check_budget(n, max_n)
    hist: Counter = Counter()
    for t in sphere_list(n, "a", max_n):
        hist[mapcore.occ_count(pattern, t)] += 1
    return hist


def mean_occ_ratio(pattern: TriComplex, n: int, max_n: int = DEFAULT_MAX_N) -> Fraction:
    """``E[occ] / 6n`` under the uniform law on rooted triangulations."""
    hist = occ_distribution(pattern, n, max_n)
    total = sum(hist.values())
    return Fraction(sum(k * c for k, c in hist.items()), 6 * n * total)


def inclusion_fraction(pattern: TriComplex, n: int, max_n: int = DEFAULT_MAX_N) -> Fraction:
    """Fraction of rooted triangulations whose root neighbourhood contains ``pattern``."""
    maps = sphere_list(n, "a", max_n)
    return Fraction(sum(mapcore.includes(pattern, t) for t in maps), len(maps))


def mean_inverse_degree(n: int, max_n: int = DEFAULT_MAX_N) -> Fraction:
    """``E[1 / deg(root vertex)]``; equals ``(n + 2) / 6n``."""
    check_budget(n, max_n)
    maps = sphere_list(n, "a", max_n)
    total = Fraction(0)
    for t in maps:
        deg = t.vertex_degrees()
        total += Fraction(1, deg[t.start_vertex(t.root)])
    return total / len(maps)


def coefficient_of_variation(hist: Counter) -> float:
    total = sum(hist.values())
    mean = sum(k * c for k, c in hist.items()) / total
    var = sum(c * (k - mean) ** 2 for k, c in hist.items()) / total
    return math.sqrt(var) / mean if mean else float("inf")
