from fractions import Fraction as F
from itertools import permutations, product
import random

import pytest
from hypothesis import given, settings, strategies as st

from peeltri import mapcore
from peeltri.enumerator import sphere_list
from peeltri.mapcore import (
    FREE,
    T1,
    T2,
    T11,
    ball,
    build,
    canonical_code,
    decode,
    dual_ball,
    includes,
    occ_count,
    pillow,
    single_triangle,
    tetrahedron,
)
from peeltri.sampler import build_T0_dual_ball, build_Tstar_dual_ball


# --- independent helpers ------------------------------------------------------------

def orbit_euler(F_: int, glue: list[int]) -> tuple[int, bool]:
    """Euler characteristic and connectivity computed from scratch."""
    n = 3 * F_
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    def union(a, b):
        parent[find(a)] = find(b)

    def nxt(x):
        return 3 * (x // 3) + (x % 3 + 1) % 3

    for x, y in enumerate(glue):
        if y >= 0:
            union(x, nxt(y))
    # boundary: walk fans at the end of each free side
    free = [x for x in range(n) if glue[x] < 0]
    succ = {}
    for x in free:
        c = nxt(x)
        while glue[c] >= 0:
            c = nxt(glue[c])
        succ[x] = c
        union(nxt(x), c)
    V = len({find(c) for c in range(n)})
    holes, seen = 0, set()
    for x in free:
        if x not in seen:
            holes += 1
            while x not in seen:
                seen.add(x)
                x = succ[x]
    E = (n + len(free)) // 2
    comp = {0}
    stack = [0]
    while stack:
        f = stack.pop()
        for s in range(3):
            y = glue[3 * f + s]
            if y >= 0 and y // 3 not in comp:
                comp.add(y // 3)
                stack.append(y // 3)
    return V - E + F_ + holes, len(comp) == F_


def random_gluing(rng: random.Random, F_: int, p_glue: float) -> list[int]:
    sides = list(range(3 * F_))
    rng.shuffle(sides)
    glue = [FREE] * (3 * F_)
    while len(sides) >= 2:
        a = sides.pop()
        if rng.random() < p_glue:
            b = sides.pop()
            glue[a], glue[b] = b, a
    return glue


def rooted_isomorphic(s: mapcore.TriComplex, t: mapcore.TriComplex) -> bool:
    """Brute force over face bijections and rotations."""
    if s.face_count != t.face_count:
        return False
    n = s.face_count
    for perm in permutations(range(n)):
        if perm[s.root // 3] != t.root // 3:
            continue
        for rots in product(range(3), repeat=n):
            def m(x):
                f = x // 3
                return 3 * perm[f] + (x % 3 + rots[f]) % 3
            if m(s.root) != t.root:
                continue
            ok = all((s.glue[x] == FREE and t.glue[m(x)] == FREE) or
                     (s.glue[x] != FREE and t.glue[m(x)] == m(s.glue[x]))
                     for x in range(3 * n))
            ok = ok and all(s.glue[x] != FREE or t.hole_next[m(x)] == m(s.hole_next[x])
                            for x in range(3 * n))
            if ok:
                return True
    return False


# --- build ----------------------------------------------------------------------------

def test_single_triangle():
    t = build(1, [], (0, 0))
    assert t.perimeters() == (3,)
    assert t.inner_volume() == 0


def test_pillow():
    t = pillow()
    assert t.is_sphere()
    assert (t.vertex_count, t.edge_count) == (3, 3)
    assert t.perimeters() == ()


def test_nonplanar_two_triangle_gluing_rejected():
    # brute force over all perfect gluings of two triangles
    found = 0
    for glue_pairs in _perfect_matchings(list(range(6))):
        glue = [FREE] * 6
        for a, b in glue_pairs:
            glue[a], glue[b] = b, a
        chi, conn = orbit_euler(2, glue)
        if chi != 2:
            found += 1
            pairs = [((a // 3, a % 3), (b // 3, b % 3)) for a, b in glue_pairs]
            with pytest.raises(mapcore.NonPlanar):
                build(2, pairs, (0, 0))
    assert found > 0


def _perfect_matchings(items):
    if not items:
        yield []
        return
    a = items[0]
    for i in range(1, len(items)):
        rest = items[1:i] + items[i + 1:]
        for m in _perfect_matchings(rest):
            yield [(a, items[i])] + m


def test_build_errors():
    with pytest.raises(mapcore.InvalidGluing):
        build(1, [((0, 0), (0, 0))], (0, 0))
    with pytest.raises(mapcore.InvalidGluing):
        build(2, [((0, 0), (1, 0)), ((0, 0), (1, 1))], (0, 0))
    with pytest.raises(mapcore.InvalidGluing):
        build(1, [], (0, 3))
    with pytest.raises(mapcore.Disconnected):
        build(2, [], (0, 0))
    with pytest.raises(mapcore.EdgeNotIncidentToInternalFace):
        build(0, [], (0, 0))
    with pytest.raises(mapcore.InvalidGluing):
        build(1, [], (0, 0, 1))


def test_reversed_root_normalizes():
    t = build(2, [((0, 0), (1, 0)), ((0, 1), (1, 2)), ((0, 2), (1, 1))], (0, 1, 1))
    assert t.root == 3 + 2


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 5), st.floats(0.3, 1.0), st.integers(0, 10 ** 6))
def test_accepts_exactly_planar_gluings(faces, p_glue, seed):
    glue = random_gluing(random.Random(seed), faces, p_glue)
    chi, connected = orbit_euler(faces, glue)
    try:
        t = mapcore.from_arrays(faces, glue, 0)
    except mapcore.Disconnected:
        assert not connected
        return
    except mapcore.NonPlanar:
        assert connected and chi != 2
        return
    assert connected and chi == 2
    assert t.inner_volume() >= 0
    assert mapcore.genus_of(t) == 0


# --- volume and perimeters ----------------------------------------------------------------

def test_degenerate_values():
    assert T1.inner_volume() == 0 and T1.perimeters() == (1,)
    assert T11.inner_volume() == 0 and T11.perimeters() == (1, 1)
    assert T2.perimeters() == (2,)


def test_sphere_volume_is_vertices_minus_one():
    t = tetrahedron()
    assert t.inner_volume() == 3


def test_one_gon_volume():
    # a triangle with two sides glued: a 1-gon with an inner vertex
    t = build(1, [((0, 1), (0, 2))], (0, 0))
    assert t.perimeters() == (1,)
    assert t.vertex_count == 2 and t.inner_volume() == 1


# --- balls --------------------------------------------------------------------------------

def test_dual_ball_radius_zero():
    t = dual_ball(pillow(), 0)
    assert t.face_count == 1 and t.perimeters() == (3,)
    folded = build(1, [((0, 1), (0, 2))], (0, 0))
    assert dual_ball(folded, 0) == folded


def test_dual_ball_of_tree():
    assert build_T0_dual_ball(2).face_count == 10
    assert build_Tstar_dual_ball(2).face_count == 10


def test_dual_ball_whole_pillow():
    assert dual_ball(pillow(), 1) == pillow()


def test_dual_ball_asymmetric_generator():
    class Broken:
        def root_side(self):
            return 0, 0

        def neighbors(self, f):
            return ((1, 0), None, None) if f == 0 else ((0, 1), None, None)

        def hole_successor(self, f, s):
            return f, s

    with pytest.raises(mapcore.GeneratorInconsistent):
        dual_ball(Broken(), 1)


def test_ball_radius_zero_and_one():
    assert ball(pillow(), 0) == T1
    assert ball(pillow(), 1) == pillow()


def test_ball_tetrahedron():
    t = tetrahedron()          # root vertex is label 0, lying on faces 0, 1, 2
    b = ball(t, 1)
    assert b.face_count == 3
    assert b.perimeters() == (3,)
    assert b.vertex_count == 4 and b.inner_volume() == 1


def test_ball_unsupported_for_sources():
    with pytest.raises(mapcore.Unsupported):
        ball(mapcore.ComplexSource(pillow()), 1)


@pytest.mark.parametrize("r", range(5))
def test_dual_ball_size_bound(r):
    bound = (3 ** (r + 1) - 1) // 2
    for t in sphere_list(3)[::7]:
        assert dual_ball(t, r).face_count <= bound
    assert build_T0_dual_ball(r).face_count <= bound


# --- canonical codes ------------------------------------------------------------------------

def test_code_deterministic():
    t = tetrahedron()
    assert canonical_code(t) == canonical_code(tetrahedron())


def test_codes_match_brute_force_isomorphism():
    maps = sphere_list(1) + [single_triangle(), build(1, [((0, 1), (0, 2))], (0, 0))]
    rooted = [m.rerooted(e) for m in maps for e in range(m.side_count)]
    for s in rooted:
        for t in rooted:
            assert (canonical_code(s) == canonical_code(t)) == rooted_isomorphic(s, t)


def test_pillow_rerootings_share_code():
    p = pillow()
    codes = {canonical_code(p.rerooted(e)) for e in range(6)}
    assert len(codes) == 1
    assert rooted_isomorphic(p.rerooted(0), p.rerooted(4))


def test_pillow_differs_from_loop_sphere():
    loops = [t for t in sphere_list(1) if any(t.is_loop(e) for e in range(6))]
    assert loops
    for t in loops:
        assert canonical_code(t) != canonical_code(pillow())
        assert not rooted_isomorphic(t, pillow())


def _patch_samples():
    out = [single_triangle(), pillow(), tetrahedron(), ball(tetrahedron(), 1)]
    out += [build_T0_dual_ball(2), build_Tstar_dual_ball(2), T1, T2, T11]
    out += [dual_ball(t, 1) for t in sphere_list(3)[::11]]
    return out


@pytest.mark.parametrize("t", _patch_samples(), ids=repr)
def test_code_round_trip(t):
    back = decode(canonical_code(t))
    assert canonical_code(back) == canonical_code(t)
    assert back.perimeters() == t.perimeters()
    assert back.vertex_count == t.vertex_count
    assert mapcore.from_patch(mapcore.to_patch(t)) == t


def test_explicit_holes_in_patch():
    t = build_Tstar_dual_ball(1)
    patch = mapcore.to_patch(t)
    assert "holes" in patch
    assert mapcore.from_patch(patch).vertex_count == 1


# --- inclusion ----------------------------------------------------------------------------------

def test_lone_vertex_always_included():
    for t in sphere_list(2):
        assert includes(T1, t)
    assert includes(T1, build_T0_dual_ball(1))


def test_edge_pattern_and_loops():
    for t in sphere_list(2):
        assert includes(T2, t) == (not t.is_loop(t.root))
        assert includes(T11, t) == t.is_loop(t.root)


def test_loop_pattern_in_one_vertex_ball():
    assert includes(T11, build_Tstar_dual_ball(1))
    assert not includes(T11, build_T0_dual_ball(1))


def test_pattern_beyond_host_ball():
    host = build_T0_dual_ball(1)
    with pytest.raises(mapcore.Undetermined):
        includes(build_T0_dual_ball(2), host)
    assert includes(build_T0_dual_ball(1), build_T0_dual_ball(2))


def test_ball_included_in_its_host():
    for t in sphere_list(3)[::5]:
        for r in range(3):
            assert includes(dual_ball(t, r), t)
            assert includes(ball(t, r), t)


def test_occ_lone_vertex_and_edges():
    for n in (1, 2, 3):
        for t in sphere_list(n)[::3]:
            assert occ_count(T1, t) == 6 * n
            assert occ_count(T2, t) + occ_count(T11, t) == 6 * n


def test_occ_single_triangle_pillow():
    # a root face with three distinct corners is the pattern; every pillow root qualifies
    assert occ_count(single_triangle(), pillow()) == 6


def test_occ_single_triangle_by_root_scan():
    for t in sphere_list(3):
        cv = t.corner_vertex
        want = sum(len({cv[3 * (e // 3) + c] for c in range(3)}) == 3 for e in range(t.side_count))
        assert occ_count(single_triangle(), t) == want


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 4095), st.integers(1, 2), st.integers(0, 10 ** 6))
def test_inclusion_monotone(idx, r, seed):
    host = sphere_list(4)[idx]
    t = dual_ball(host, r)
    assert includes(t, host)
    rng = random.Random(seed)
    faces = set(range(t.face_count))
    root = t.root // 3
    for _ in range(rng.randint(1, 4)):
        boundary = [f for f in faces if f != root and any(t.glue[3 * f + s] == FREE or
                    t.glue[3 * f + s] // 3 not in faces for s in range(3))]
        if not boundary:
            break
        drop = rng.choice(boundary)
        trial = faces - {drop}
        if _connected(t, trial, root):
            faces = trial
    sub = mapcore.restrict(t, faces)
    assert includes(sub, t)
    assert includes(sub, host)


def _connected(t, faces, root):
    seen, stack = {root}, [root]
    while stack:
        f = stack.pop()
        for s in range(3):
            y = t.glue[3 * f + s]
            if y != FREE and y // 3 in faces and y // 3 not in seen:
                seen.add(y // 3)
                stack.append(y // 3)
    return seen == faces


# --- rerooting identity ----------------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_inverse_degree_sum(n):
    for t in sphere_list(n):
        assert mapcore.inverse_degree_sum(t) == t.vertex_count == n + 2


def test_inverse_degree_sum_is_exact():
    assert mapcore.inverse_degree_sum(tetrahedron()) == F(4)
