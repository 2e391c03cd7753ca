"""Rooted planar triangulations with holes, stored as edge-glued triangles.

A complex is a set of triangles ``0..F-1``.  Side ``s`` of triangle ``f`` is
the oriented edge from corner ``s`` to corner ``s+1`` (mod 3) with ``f`` on
its left; sides are addressed by the flat index ``3*f + s``.  Each side is
either glued to another side (reversing orientation) or free.  Free sides
carry the hole on their right, and the boundary of the holes is given by a
successor permutation ``hole_next`` on free sides: the successor starts at the
vertex where its predecessor ends.  Vertices are the classes of corners under
both identifications, which lets a patch record vertex pinches that pure side
gluing cannot express (two holes meeting at a vertex, or the single vertex of
the one-vertex triangulation).

The three degenerate triangulations with no internal face are sentinels:
``T1`` (a lone vertex), ``T2`` (a single edge) and ``T11`` (a single loop).
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Protocol, Sequence

FREE = -1


class MapError(ValueError):
    pass


class InvalidGluing(MapError):
    pass


class NonPlanar(MapError):
    pass


class Disconnected(MapError):
    pass


class EdgeNotIncidentToInternalFace(MapError):
    pass


class GeneratorInconsistent(MapError):
    pass


class Undetermined(MapError):
    """The host is too small to decide an inclusion."""


class Unsupported(MapError):
    pass


def face_of(side: int) -> int:
    return side // 3


def next_side(side: int) -> int:
    return side - side % 3 + (side + 1) % 3


def prev_side(side: int) -> int:
    return side - side % 3 + (side + 2) % 3


def end_corner(side: int) -> int:
    return next_side(side)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def default_hole_next(glue: Sequence[int]) -> list[int]:
    """Boundary successor obtained by walking around the fan at each end vertex."""
    out = [FREE] * len(glue)
    for x, partner in enumerate(glue):
        if partner != FREE:
            continue
        cand = next_side(x)
        steps = 0
        while glue[cand] != FREE:
            cand = next_side(glue[cand])
            steps += 1
            if steps > len(glue):
                raise InvalidGluing("fan traversal does not terminate")
        out[x] = cand
    return out


DEGENERATE = {"T1": ((1,), 1), "T2": ((2,), 2), "T11": ((1, 1), 1)}


@dataclass(frozen=True, eq=False)
class TriComplex:
    """Immutable rooted triangle complex; build instances with :func:`build`."""

    face_count: int
    glue: tuple[int, ...]
    hole_next: tuple[int, ...]
    root: int
    degenerate: str | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    # --- structure -------------------------------------------------------
    @property
    def side_count(self) -> int:
        return 3 * self.face_count

    def is_free(self, side: int) -> bool:
        return self.glue[side] == FREE

    def free_sides(self) -> list[int]:
        return [x for x, p in enumerate(self.glue) if p == FREE]

    @cached_property
    def corner_vertex(self) -> tuple[int, ...]:
        """Vertex label (0-based, in order of first corner) of every corner."""
        n = self.side_count
        uf = _UnionFind(n)
        for x, p in enumerate(self.glue):
            if p == FREE:
                uf.union(end_corner(x), self.hole_next[x])
            elif x < p:
                uf.union(x, end_corner(p))
                uf.union(end_corner(x), p)
        labels: dict[int, int] = {}
        out = []
        for c in range(n):
            r = uf.find(c)
            out.append(labels.setdefault(r, len(labels)))
        return tuple(out)

    @property
    def vertex_count(self) -> int:
        if self.degenerate:
            return DEGENERATE[self.degenerate][1]
        return len(set(self.corner_vertex))

    @property
    def edge_count(self) -> int:
        if self.degenerate:
            return 0 if self.degenerate == "T1" else 1
        free = len(self.free_sides())
        return (self.side_count + free) // 2

    def start_vertex(self, side: int) -> int:
        return self.corner_vertex[side]

    def end_vertex(self, side: int) -> int:
        return self.corner_vertex[end_corner(side)]

    @cached_property
    def hole_cycles(self) -> tuple[tuple[int, ...], ...]:
        """Boundary cycles ordered by first appearance in the canonical BFS."""
        if self.degenerate:
            return ()
        order = self._bfs_side_order()
        seen: set[int] = set()
        cycles = []
        for x in order:
            if self.glue[x] != FREE or x in seen:
                continue
            cyc = [x]
            seen.add(x)
            y = self.hole_next[x]
            while y != x:
                cyc.append(y)
                seen.add(y)
                y = self.hole_next[y]
            cycles.append(tuple(cyc))
        return tuple(cycles)

    def perimeters(self) -> tuple[int, ...]:
        if self.degenerate:
            return DEGENERATE[self.degenerate][0]
        return tuple(sorted(len(c) for c in self.hole_cycles))

    def hole_perimeters_in_order(self) -> tuple[int, ...]:
        if self.degenerate:
            return DEGENERATE[self.degenerate][0]
        return tuple(len(c) for c in self.hole_cycles)

    @property
    def hole_count(self) -> int:
        return len(self.perimeters())

    def is_sphere(self) -> bool:
        return not self.degenerate and not self.free_sides()

    def inner_volume(self) -> int:
        if self.degenerate:
            return 0
        perims = self.perimeters()
        return self.vertex_count - 1 - sum(p - 1 for p in perims)

    def face_distances(self) -> list[int]:
        """Dual-graph distance from the root face to every face."""
        dist = [-1] * self.face_count
        if not self.face_count:
            return dist
        r = face_of(self.root)
        dist[r] = 0
        queue = deque([r])
        while queue:
            f = queue.popleft()
            for s in range(3):
                p = self.glue[3 * f + s]
                if p != FREE and dist[face_of(p)] < 0:
                    dist[face_of(p)] = dist[f] + 1
                    queue.append(face_of(p))
        return dist

    def dual_eccentricity(self) -> int:
        d = self.face_distances()
        return max(d) if d else 0

    def vertex_degrees(self) -> list[int]:
        """Degree of each vertex, counting loops twice (corners per vertex)."""
        deg = [0] * self.vertex_count
        for v in self.corner_vertex:
            deg[v] += 1
        return deg

    def is_loop(self, side: int) -> bool:
        return self.start_vertex(side) == self.end_vertex(side)

    def rerooted(self, side: int) -> "TriComplex":
        if self.degenerate:
            raise Unsupported("degenerate complexes have no sides to reroot at")
        if not 0 <= side < self.side_count:
            raise InvalidGluing(f"root side {side} out of range")
        t = TriComplex(self.face_count, self.glue, self.hole_next, side)
        t.__dict__["corner_vertex"] = self.corner_vertex
        return t

    # --- canonical traversal --------------------------------------------
    def _bfs(self) -> tuple[list[int], list[int]]:
        """Faces in BFS order from the root and the entry side of each."""
        entry = {face_of(self.root): self.root % 3}
        order = [face_of(self.root)]
        i = 0
        while i < len(order):
            f = order[i]
            e = entry[f]
            for k in range(3):
                x = 3 * f + (e + k) % 3
                p = self.glue[x]
                if p != FREE and face_of(p) not in entry:
                    entry[face_of(p)] = p % 3
                    order.append(face_of(p))
            i += 1
        return order, [entry[f] for f in order]

    def _bfs_side_order(self) -> list[int]:
        if "bfs_sides" not in self._cache:
            order, entries = self._bfs()
            sides = []
            for f, e in zip(order, entries):
                sides.extend(3 * f + (e + k) % 3 for k in range(3))
            self._cache["bfs_sides"] = sides
        return self._cache["bfs_sides"]

    def canonical_code(self) -> str:
        return canonical_code(self)

    # --- export -----------------------------------------------------------
    def to_patch(self) -> dict:
        return to_patch(self)

    def __eq__(self, other):
        if not isinstance(other, TriComplex):
            return NotImplemented
        return canonical_code(self) == canonical_code(other)

    def __hash__(self):
        return hash(canonical_code(self))

    def __repr__(self):
        if self.degenerate:
            return f"TriComplex<{self.degenerate}>"
        return (f"TriComplex(faces={self.face_count}, perimeters={self.perimeters()}, "
                f"vertices={self.vertex_count})")


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

T1 = TriComplex(0, (), (), -1, "T1")
T2 = TriComplex(0, (), (), -1, "T2")
T11 = TriComplex(0, (), (), -1, "T11")


def degenerate(name: str) -> TriComplex:
    return {"T1": T1, "T2": T2, "T11": T11}[name]


def _side_index(face_count: int, ref) -> int:
    try:
        f, s = int(ref[0]), int(ref[1])
    except (TypeError, ValueError, IndexError) as exc:
        raise InvalidGluing(f"bad side reference {ref!r}") from exc
    if not (0 <= f < face_count and 0 <= s < 3):
        raise InvalidGluing(f"side {ref!r} out of range")
    return 3 * f + s


def from_arrays(face_count: int, glue: Sequence[int], root: int,
                hole_next: Sequence[int] | None = None, *, check: bool = True) -> TriComplex:
    """Build from flat side arrays (``FREE`` marks an unglued side)."""
    if face_count < 1:
        raise EdgeNotIncidentToInternalFace(
            "a complex without triangles must be one of the sentinels T1/T2/T11")
    glue = tuple(glue)
    n = 3 * face_count
    if len(glue) != n:
        raise InvalidGluing("gluing array has the wrong length")
    if check:
        for x, p in enumerate(glue):
            if p == FREE:
                continue
            if not 0 <= p < n or p == x or glue[p] != x:
                raise InvalidGluing(f"side {x} is not part of a proper gluing pair")
    if hole_next is None:
        hn = tuple(default_hole_next(glue))
    else:
        hn = tuple(hole_next)
    t = TriComplex(face_count, glue, hn, root)
    if check:
        validate(t)
    return t


def build(face_count: int, gluings: Iterable, root, holes: Iterable | None = None) -> TriComplex:
    """Construct and validate a complex.

    ``gluings`` is a list of side pairs ``((f, s), (g, t))``; ``root`` is
    ``(f, s)`` or ``(f, s, orient)``.  With ``orient == 1`` the root is the
    reverse of side ``(f, s)``, which must then be glued.  ``holes`` optionally
    lists the boundary cycles explicitly as sequences of free sides; omitted,
    they follow from the gluing alone.
    """
    glue = [FREE] * (3 * face_count)
    for pair in gluings:
        a, b = (_side_index(face_count, r) for r in pair)
        if a == b or glue[a] != FREE or glue[b] != FREE:
            raise InvalidGluing(f"side reused or self-glued in {pair!r}")
        glue[a], glue[b] = b, a
    if face_count < 1:
        raise EdgeNotIncidentToInternalFace(
            "a complex without triangles must be one of the sentinels T1/T2/T11")
    root = list(root)
    orient = int(root[2]) if len(root) > 2 else 0
    r = _side_index(face_count, root[:2])
    if orient:
        if glue[r] == FREE:
            raise InvalidGluing("reversed root on a free side would put a hole on the left")
        r = glue[r]
    hole_next = None
    if holes is not None:
        hole_next = [FREE] * (3 * face_count)
        for cyc in holes:
            idx = [_side_index(face_count, ref) for ref in cyc]
            for i, x in enumerate(idx):
                if glue[x] != FREE or hole_next[x] != FREE:
                    raise InvalidGluing(f"side {x} listed on a hole but glued or repeated")
                hole_next[x] = idx[(i + 1) % len(idx)]
        missing = [x for x in range(3 * face_count) if glue[x] == FREE and hole_next[x] == FREE]
        if missing:
            raise InvalidGluing(f"free sides {missing} are not on any listed hole")
    return from_arrays(face_count, glue, r, hole_next)


def validate(t: TriComplex) -> None:
    if t.degenerate:
        return
    n = t.side_count
    if not 0 <= t.root < n:
        raise InvalidGluing("root side out of range")
    free = [x for x in range(n) if t.glue[x] == FREE]
    targets = sorted(t.hole_next[x] for x in free)
    if targets != free or any(t.hole_next[x] != FREE for x in range(n) if t.glue[x] != FREE):
        raise InvalidGluing("hole successor is not a permutation of the free sides")
    if any(d < 0 for d in t.face_distances()):
        raise Disconnected("internal faces are not connected in the dual graph")
    chi = t.vertex_count - t.edge_count + t.face_count + len(t.hole_cycles)
    if chi != 2:
        raise NonPlanar(f"Euler characteristic {chi} != 2")
    if t.inner_volume() < 0:
        raise NonPlanar("negative inner volume: a hole touches itself")


def genus_of(t: TriComplex) -> int:
    """Genus from the corner-orbit Euler count, independent of validation."""
    chi = t.vertex_count - t.edge_count + t.face_count + len(t.hole_cycles)
    return (2 - chi) // 2


def inner_volume(t: TriComplex) -> int:
    return t.inner_volume()


def perimeters(t: TriComplex) -> tuple[int, ...]:
    return t.perimeters()


# ---------------------------------------------------------------------------
# canonical code
# ---------------------------------------------------------------------------


def canonical_code(t: TriComplex) -> str:
    """BFS code; ``N`` new face, ``Bk`` glued to canonical side ``k``, ``Hk`` free
    side whose boundary successor is canonical side ``k``."""
    if t.degenerate:
        return t.degenerate
    cached = t._cache.get("code")
    if cached is not None:
        return cached
    order, entries = t._bfs()
    canon = {}
    for i, (f, e) in enumerate(zip(order, entries)):
        for k in range(3):
            canon[3 * f + (e + k) % 3] = 3 * i + k
    seen = 1
    tokens = []
    for i, (f, e) in enumerate(zip(order, entries)):
        for k in range(3):
            x = 3 * f + (e + k) % 3
            p = t.glue[x]
            if p == FREE:
                tokens.append(f"H{canon[t.hole_next[x]]}")
            elif canon[p] // 3 >= seen:
                tokens.append("N")
                seen += 1
            else:
                tokens.append(f"B{canon[p]}")
    code = ".".join(tokens)
    t._cache["code"] = code
    return code


def decode(code: str) -> TriComplex:
    """Inverse of :func:`canonical_code`."""
    if code in DEGENERATE:
        return degenerate(code)
    tokens = code.split(".")
    if len(tokens) % 3:
        raise InvalidGluing("code length is not a multiple of 3")
    nf = len(tokens) // 3
    glue = [FREE] * (3 * nf)
    hole_next = [FREE] * (3 * nf)
    created = 1
    for x, tok in enumerate(tokens):
        if tok == "N":
            if created >= nf:
                raise InvalidGluing("code references too many faces")
            y = 3 * created
            created += 1
            glue[x], glue[y] = y, x
        elif tok[0] == "B":
            y = int(tok[1:])
            if glue[x] == FREE:
                glue[x], glue[y] = y, x
            elif glue[x] != y:
                raise InvalidGluing("inconsistent back-reference")
        elif tok[0] == "H":
            hole_next[x] = int(tok[1:])
        else:
            raise InvalidGluing(f"unknown token {tok!r}")
    return from_arrays(nf, glue, 0, hole_next)


# ---------------------------------------------------------------------------
# JSON patch format
# ---------------------------------------------------------------------------


def to_patch(t: TriComplex) -> dict:
    if t.degenerate:
        return {"faces": 0, "gluings": [], "root": None, "degenerate": t.degenerate}
    gl = []
    for x, p in enumerate(t.glue):
        if p != FREE and x < p:
            gl.append([[x // 3, x % 3], [p // 3, p % 3]])
    patch = {"faces": t.face_count, "gluings": gl, "root": [t.root // 3, t.root % 3, 0]}
    if tuple(default_hole_next(t.glue)) != t.hole_next:
        patch["holes"] = [[[x // 3, x % 3] for x in cyc] for cyc in t.hole_cycles]
    return patch


def from_patch(patch: dict | str) -> TriComplex:
    if isinstance(patch, str):
        patch = json.loads(patch)
    if patch.get("degenerate"):
        return degenerate(patch["degenerate"])
    return build(int(patch["faces"]), patch.get("gluings", []), patch["root"],
                 patch.get("holes"))


# ---------------------------------------------------------------------------
# sub-complexes, dual balls and primal balls
# ---------------------------------------------------------------------------


class FaceSource(Protocol):
    """Lazy description of a (possibly infinite) triangulation.

    ``neighbors(face)`` returns three entries ``(face', side')`` or ``None``
    when the side borders a hole of the source; ``hole_successor(face, side)``
    gives the boundary successor of such a side.
    """

    def root_side(self) -> tuple: ...

    def neighbors(self, face) -> tuple: ...

    def hole_successor(self, face, side: int) -> tuple: ...


class ComplexSource:
    """A finite :class:`TriComplex` viewed as a face source."""

    def __init__(self, t: TriComplex):
        if t.degenerate:
            raise Unsupported("degenerate complexes have no faces")
        self.t = t

    def root_side(self):
        return face_of(self.t.root), self.t.root % 3

    def neighbors(self, face):
        out = []
        for s in range(3):
            p = self.t.glue[3 * face + s]
            out.append(None if p == FREE else (face_of(p), p % 3))
        return tuple(out)

    def hole_successor(self, face, side):
        y = self.t.hole_next[3 * face + side]
        return face_of(y), y % 3


def _rotate_to_ball(source, ball: dict, face, side: int, limit: int):
    """Boundary successor in the ball of free side ``(face, side)``.

    Rotates around the end vertex through faces outside the ball.
    """
    inc = (face, side)
    for _ in range(limit):
        nb = source.neighbors(inc[0])[inc[1]]
        nxt = source.hole_successor(*inc) if nb is None else nb
        if nxt[0] in ball:
            return nxt
        inc = (nxt[0], (nxt[1] + 2) % 3)
    raise Undetermined("vertex rotation exceeded the step limit (infinite degree?)")


def dual_ball(source, r: int, *, rotation_limit: int = 100000) -> TriComplex:
    """All faces within dual distance ``r`` of the root face, as a complex."""
    if r < 0:
        raise ValueError("radius must be >= 0")
    if isinstance(source, TriComplex):
        source = ComplexSource(source)
    root_face, root_s = source.root_side()
    index = {root_face: 0}
    faces = [root_face]
    dist = {root_face: 0}
    nbrs: dict = {}
    i = 0
    while i < len(faces):
        f = faces[i]
        nb = source.neighbors(f)
        if len(nb) != 3:
            raise GeneratorInconsistent("a face must have exactly three sides")
        nbrs[f] = nb
        for s, entry in enumerate(nb):
            if entry is None:
                continue
            g, t = entry
            back = source.neighbors(g)[t]
            if back != (f, s):
                raise GeneratorInconsistent(f"neighbor relation not symmetric at {(f, s)}")
            if g not in dist and dist[f] < r:
                dist[g] = dist[f] + 1
                index[g] = len(faces)
                faces.append(g)
        i += 1
    nf = len(faces)
    glue = [FREE] * (3 * nf)
    for f in faces:
        for s, entry in enumerate(nbrs[f]):
            if entry is not None and entry[0] in index:
                glue[3 * index[f] + s] = 3 * index[entry[0]] + entry[1]
    hole_next = [FREE] * (3 * nf)
    custom = getattr(source, "ball_successor", None)
    for f in faces:
        for s in range(3):
            x = 3 * index[f] + s
            if glue[x] != FREE:
                continue
            if custom is not None:
                g, t = custom(index, f, s)
            else:
                g, t = _rotate_to_ball(source, index, f, s, rotation_limit)
            hole_next[x] = 3 * index[g] + t
    return from_arrays(nf, glue, 3 * 0 + root_s, hole_next)


def restrict(t: TriComplex, faces: Iterable[int]) -> TriComplex:
    """Sub-complex on a connected set of faces containing the root face."""
    faces = set(faces)
    if face_of(t.root) not in faces:
        raise ValueError("restricted face set must contain the root face")
    src = ComplexSource(t)
    order, _ = t._bfs()
    kept = [f for f in order if f in faces]
    index = {f: i for i, f in enumerate(kept)}
    nf = len(kept)
    glue = [FREE] * (3 * nf)
    hole_next = [FREE] * (3 * nf)
    for f in kept:
        for s in range(3):
            p = t.glue[3 * f + s]
            if p != FREE and face_of(p) in index:
                glue[3 * index[f] + s] = 3 * index[face_of(p)] + p % 3
    for f in kept:
        for s in range(3):
            x = 3 * index[f] + s
            if glue[x] == FREE:
                g, u = _rotate_to_ball(src, index, f, s, 3 * t.face_count + 3)
                hole_next[x] = 3 * index[g] + u
    return from_arrays(nf, glue, 3 * index[face_of(t.root)] + t.root % 3, hole_next)


def vertex_distances(t: TriComplex, start: int) -> list[int]:
    nv = t.vertex_count
    adj: list[set[int]] = [set() for _ in range(nv)]
    cv = t.corner_vertex
    for x in range(t.side_count):
        a, b = cv[x], cv[end_corner(x)]
        adj[a].add(b)
        adj[b].add(a)
    dist = [-1] * nv
    dist[start] = 0
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def ball(t, r: int) -> TriComplex:
    """Faces incident to a vertex within graph distance ``r - 1`` of the root vertex.

    Only finite complexes are supported; ``ball(t, 0)`` is the lone vertex ``T1``.
    """
    if not isinstance(t, TriComplex):
        raise Unsupported("primal balls need a finite complex with finite degrees")
    if r < 0:
        raise ValueError("radius must be >= 0")
    if r == 0 or t.degenerate:
        return T1
    dist = vertex_distances(t, t.start_vertex(t.root))
    cv = t.corner_vertex
    keep = [f for f in range(t.face_count)
            if any(0 <= dist[cv[3 * f + c]] <= r - 1 for c in range(3))]
    return restrict(t, keep)


# ---------------------------------------------------------------------------
# inclusion and occurrences
# ---------------------------------------------------------------------------


def includes(pattern: TriComplex, host: TriComplex) -> bool:
    """Whether ``pattern`` is the root neighbourhood of ``host`` up to filling holes.

    ``host`` is a sphere triangulation or a dual ball; in the latter case its
    free sides are treated as unexplored and :class:`Undetermined` is raised
    when the answer depends on what lies beyond them.
    """
    if host.degenerate:
        raise Unsupported("host must contain at least one triangle")
    if pattern.degenerate == "T1":
        return True
    if pattern.degenerate is not None:
        loop = host.is_loop(host.root)
        return loop if pattern.degenerate == "T11" else not loop
    partial = bool(host.free_sides())
    pg, hg = pattern.glue, host.glue
    offset = {face_of(pattern.root): (face_of(host.root), (host.root - pattern.root) % 3)}
    image_faces = {face_of(host.root): face_of(pattern.root)}

    def img(x: int) -> int:
        hf, off = offset[face_of(x)]
        return 3 * hf + (x + off) % 3

    queue = deque([face_of(pattern.root)])
    while queue:
        f = queue.popleft()
        for s in range(3):
            x = 3 * f + s
            y = pg[x]
            if y == FREE:
                continue
            hx = img(x)
            hy = hg[hx]
            if hy == FREE:
                if partial:
                    raise Undetermined("pattern extends beyond the host ball")
                return False
            g = face_of(y)
            want = (face_of(hy), (hy - y) % 3)
            if g in offset:
                if offset[g] != want:
                    return False
                continue
            if want[0] in image_faces:
                return False
            offset[g] = want
            image_faces[want[0]] = g
            queue.append(g)
    limit = 3 * host.face_count + 3
    for x in pattern.free_sides():
        inc = img(x)
        target = img(pattern.hole_next[x])
        for _ in range(limit):
            p = hg[inc]
            nxt = host.hole_next[inc] if p == FREE else p
            if face_of(nxt) in image_faces:
                break
            inc = prev_side(nxt)
        else:
            raise Undetermined("rotation in the host did not close")
        if nxt != target:
            return False
    return True


def occ_count(pattern: TriComplex, host: TriComplex) -> int:
    """Number of oriented edges of the sphere ``host`` at which ``pattern`` occurs."""
    if not host.is_sphere():
        raise ValueError("occurrence counting needs a sphere triangulation")
    return sum(includes(pattern, host.rerooted(e)) for e in range(host.side_count))


def inverse_degree_sum(host: TriComplex) -> Fraction:
    """Sum over oriented edges of ``1 / deg(origin)``; equals the vertex count."""
    deg = host.vertex_degrees()
    cv = host.corner_vertex
    return sum((Fraction(1, deg[cv[e]]) for e in range(host.side_count)), Fraction(0))


# ---------------------------------------------------------------------------
# small fixtures
# ---------------------------------------------------------------------------


def single_triangle() -> TriComplex:
    return build(1, [], (0, 0))


def pillow() -> TriComplex:
    """Two triangles glued along all three sides."""
    return build(2, [((0, 0), (1, 0)), ((0, 1), (1, 2)), ((0, 2), (1, 1))], (0, 0))


def tetrahedron() -> TriComplex:
    # faces are the four triples of {0,1,2,3}, consistently oriented
    tris = [(0, 1, 2), (0, 2, 3), (0, 3, 1), (1, 3, 2)]
    return from_vertex_triples(tris)


def from_vertex_triples(tris: Sequence[Sequence[int]], root: tuple = (0, 0)) -> TriComplex:
    """Glue oriented vertex triples along matching edges (each edge used twice)."""
    where = {}
    for f, tri in enumerate(tris):
        for s in range(3):
            where[(tri[s], tri[(s + 1) % 3])] = (f, s)
    pairs = []
    for (a, b), ref in where.items():
        other = where.get((b, a))
        if other is None:
            continue
        if ref < other:
            pairs.append((ref, other))
    return build(len(tris), pairs, root)
