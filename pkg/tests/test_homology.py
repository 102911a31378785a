import numpy as np
import pytest

from fiberscope import (
    FlagComplex,
    VertexSet,
    boundary_matrix,
    is_connected,
    is_k_acyclic,
    reduced_homology,
    smith_normal_form,
    top_homology_nontrivial,
)
from fiberscope.errors import DegreeOutOfRange
from fiberscope.rng import SplitMix64

import oracles


# -- boundary matrices ---------------------------------------------------------


def test_triangle_boundary_rank(triangle):
    # boundary of the 3-cycle: 3x3 of rank 2 over the rationals
    m = boundary_matrix(triangle, 1)
    assert m.shape == (3, 3)
    assert oracles.rational_rank(m.tolist()) == 2


def test_single_vertex_augmentation():
    pt = FlagComplex.from_graph(1, [])
    m = boundary_matrix(pt, 0)
    assert m.tolist() == [[1]]


def test_hexagon_incidence_rank(hexagon):
    m = boundary_matrix(hexagon, 1)
    assert m.shape == (6, 6)
    assert oracles.rational_rank(m.tolist()) == 5


def test_boundary_degree_out_of_range(hexagon):
    with pytest.raises(DegreeOutOfRange):
        boundary_matrix(hexagon, 3)
    with pytest.raises(DegreeOutOfRange):
        boundary_matrix(hexagon, -1)
    # dim + 1 is allowed and is the zero map
    m = boundary_matrix(hexagon, 2)
    assert m.shape == (6, 0)


def test_boundary_squares_to_zero(triangle, b32):
    from fiberscope import building as bldg

    apt = bldg.apartment_from_frame(
        b32, [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]
    )
    sphere = b32.complex.induced(apt)
    for cx in (triangle, sphere):
        for k in range(1, cx.dimension + 1):
            prod = boundary_matrix(cx, k) @ boundary_matrix(cx, k + 1)
            assert not prod.any()


# -- smith normal form ---------------------------------------------------------


def test_snf_pinned_examples(square):
    assert smith_normal_form([[2, 0], [0, 6]]) == (2, (2, 6))
    assert smith_normal_form([[1, 0], [0, 0]]) == (1, (1,))
    rank, divs = smith_normal_form(boundary_matrix(square, 1))
    assert rank == 3
    assert divs == (1, 1, 1)
    assert oracles.rational_rank(boundary_matrix(square, 1).tolist()) == 3


def test_snf_known_torsion():
    m = [[2, 4, 4], [-6, 6, 12], [10, 4, 16]]
    rank, divs = smith_normal_form(m)
    assert rank == 3
    assert divs == (2, 2, 156)
    assert divs == oracles.invariant_factors_by_minors(m)


def test_snf_matches_minor_gcds_random():
    gen = SplitMix64(23)
    for _ in range(30):
        rows = 1 + gen.next_below(4)
        cols = 1 + gen.next_below(4)
        m = [[gen.next_below(13) - 6 for _ in range(cols)] for _ in range(rows)]
        rank, divs = smith_normal_form(m)
        assert divs == oracles.invariant_factors_by_minors(m)


def test_snf_divisibility_chain_random():
    gen = SplitMix64(11)
    for _ in range(50):
        rows = 1 + gen.next_below(5)
        cols = 1 + gen.next_below(5)
        m = [[gen.next_below(11) - 5 for _ in range(cols)] for _ in range(rows)]
        rank, divs = smith_normal_form(m)
        assert rank == oracles.rational_rank(m)
        assert all(d > 0 for d in divs)
        for a, b in zip(divs, divs[1:]):
            assert b % a == 0


def test_snf_unimodular_invariance():
    gen = SplitMix64(5)
    base = [[gen.next_below(9) - 4 for _ in range(4)] for _ in range(3)]
    expected = smith_normal_form(base)
    for _ in range(25):
        m = [row[:] for row in base]
        for _ in range(6):
            op = gen.next_below(4)
            if op == 0:  # add a multiple of one row to another
                i, j = gen.next_below(3), gen.next_below(3)
                if i != j:
                    c = gen.next_below(5) - 2
                    m[i] = [a + c * b for a, b in zip(m[i], m[j])]
            elif op == 1:  # swap rows
                i, j = gen.next_below(3), gen.next_below(3)
                m[i], m[j] = m[j], m[i]
            elif op == 2:  # add a multiple of one column to another
                i, j = gen.next_below(4), gen.next_below(4)
                if i != j:
                    c = gen.next_below(5) - 2
                    for row in m:
                        row[i] += c * row[j]
            else:  # negate a row
                i = gen.next_below(3)
                m[i] = [-a for a in m[i]]
        assert smith_normal_form(m) == expected


def test_snf_escalates_to_exact_integers():
    big = 1 << 40
    rank, divs = smith_normal_form([[big, 1], [1, big]])
    assert rank == 2
    # d1 = gcd of entries, d1*d2 = |det|
    assert divs == (1, big * big - 1)


# -- reduced homology ----------------------------------------------------------


def test_hexagon_is_a_circle(hexagon):
    prof = reduced_homology(hexagon)
    assert prof.nonempty
    assert prof.free_ranks == (0, 1)
    assert prof.torsion == ((), ())


def test_heawood_homology_rank_8(heawood):
    prof = reduced_homology(heawood)
    # Euler characteristic: 21 - 14 + 1 = 8 independent cycles
    assert prof.free_ranks == (0, 8)
    assert prof.torsion == ((), ())


def test_apartment_of_b32_is_a_2_sphere(b32):
    from fiberscope import building as bldg

    apt = bldg.apartment_from_frame(
        b32, [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]
    )
    sub = b32.complex.induced(apt)
    assert sub.n == 14
    assert len(sub.maximal_simplices()) == 24
    prof = reduced_homology(sub)
    assert prof.free_ranks == (0, 0, 1)
    assert prof.torsion == ((), (), ())


def test_cone_homology_trivial(b23, b32):
    # stars of hyperplane vertices are cones: link joined with the apex
    for b in (b23, b32):
        cx = b.complex
        tops = [i for i in range(cx.n) if cx.labels[i] == str(b.k)][:3]
        for h in tops:
            _, star = cx.link_star((h,))
            prof = reduced_homology(star)
            assert prof.nonempty
            assert all(prof.is_trivial(k) for k in range(star.dimension + 1))


def test_empty_profile():
    empty = FlagComplex.from_graph(0, [])
    prof = reduced_homology(empty)
    assert not prof.nonempty
    assert prof.free_ranks == ()


# -- acyclicity and connectivity -----------------------------------------------


def test_is_k_acyclic_degenerate(hexagon):
    empty = FlagComplex.from_graph(0, [])
    assert not is_k_acyclic(empty, -1)
    pt = FlagComplex.from_graph(1, [])
    for k in (-1, 0, 1, 5):
        assert is_k_acyclic(pt, k)
    assert is_k_acyclic(hexagon, 0)
    assert not is_k_acyclic(hexagon, 1)


def test_is_connected_cases(hexagon, b22):
    two = FlagComplex.from_graph(2, [])
    assert not is_connected(two)
    assert is_connected(hexagon)
    cx = b22.complex
    points = [i for i in range(cx.n) if cx.labels[i] == "1"]
    sub = cx.induced(VertexSet.from_indices(cx.n, points))
    assert not is_connected(sub)  # points are pairwise non-adjacent
    assert not is_connected(FlagComplex.from_graph(0, []))


def test_top_homology_nontrivial(hexagon, b22):
    assert top_homology_nontrivial(hexagon, 1)
    tree = FlagComplex.from_graph(4, [(0, 1), (1, 2), (1, 3)])
    assert not top_homology_nontrivial(tree, 1)
    # subcomplexes containing a full apartment hexagon keep a 1-cycle
    from fiberscope import building as bldg

    apt = bldg.apartment_from_frame(b22, [(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    gen = SplitMix64(3)
    for _ in range(5):
        extra = gen.next_bits(b22.complex.n)
        sub = b22.complex.induced(VertexSet(b22.complex.n, apt.bits | extra))
        assert top_homology_nontrivial(sub, 1)


# -- cross-checks ---------------------------------------------------------------


def test_euler_poincare(hexagon, triangle, heawood, b32):
    from fiberscope import building as bldg

    apt = bldg.apartment_from_frame(
        b32, [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]
    )
    corpus = [hexagon, triangle, heawood, b32.complex.induced(apt)]
    gen = SplitMix64(17)
    for _ in range(10):
        corpus.append(heawood.induced(VertexSet(14, gen.next_bits(14))))
    for cx in corpus:
        if not cx.nonempty:
            continue
        prof = reduced_homology(cx)
        f = cx.f_vector()
        euler = sum((-1) ** k * f[k] for k in range(len(f)))
        betti = sum((-1) ** k * prof.free_ranks[k] for k in range(len(prof.free_ranks)))
        assert euler == 1 + betti


def test_connected_iff_0_acyclic_census(heawood):
    # fast path against the SNF path on 10^4 random induced subcomplexes,
    # with the component/cycle-rank graph oracle as referee
    edges = heawood.edges()
    gen = SplitMix64(2024)
    for _ in range(10**4):
        bits = gen.next_bits(14)
        sub = heawood.induced(VertexSet(14, bits))
        fast = is_connected(sub)
        prof = reduced_homology(sub)
        via_snf = prof.nonempty and prof.trivial_through(0)
        assert fast == via_snf
        assert fast == is_k_acyclic(sub, 0)
        subset = set(i for i in range(14) if (bits >> i) & 1)
        assert fast == oracles.is_connected_graph(14, edges, subset)


def test_graph_profile_matches_component_formula(heawood):
    edges = heawood.edges()
    gen = SplitMix64(99)
    for _ in range(200):
        bits = gen.next_bits(14)
        if bits == 0:
            continue
        sub = heawood.induced(VertexSet(14, bits))
        prof = reduced_homology(sub)
        subset = set(i for i in range(14) if (bits >> i) & 1)
        b0, b1 = oracles.graph_reduced_betti(14, edges, subset)
        assert prof.free_ranks[0] == b0
        if sub.dimension >= 1:
            assert prof.free_ranks[1] == b1
        else:
            assert b1 == 0
