from fractions import Fraction

import pytest

from errors import KernelNotPreserved, NotInvolution
from graded import Coefficients, GradedHomology, PointedGradedHomology
from join_theory import (GradedMap, antipode_action, cover_join_factors, identity_map, invariant_subgroup,
                         join_homology, join_induced_map, product_homology, product_map)


def test_antipode_degrees():
    for k in range(1, 5):
        _, action = antipode_action(k)
        assert action.block(k) == ((Fraction((-1) ** (k + 1)),),)
    s0, swap = antipode_action(0)
    assert s0.component_count == 2
    assert swap.block(0) == ((0, 1), (1, 0))


def test_product_of_circles_is_torus():
    s1, _ = antipode_action(1)
    torus = product_homology(s1, s1)
    assert torus.homology.betti_numbers() == [1, 2, 1]
    assert torus.component_count == 1


def test_product_map_of_antipodes_on_torus():
    s1, a1 = antipode_action(1)
    s2, a2 = antipode_action(2)
    m = product_map(a1, a2)
    assert m.source == product_homology(s1, s2).homology
    assert m.block(3) == ((Fraction(-1),),)
    assert m.block(1) == ((Fraction(1),),)


def test_join_of_two_point_sets_is_a_circle():
    s0, _ = antipode_action(0)
    assert join_homology(s0, s0) == GradedHomology.from_ranks({0: 1, 1: 1})


def test_join_homology_of_cover_with_p_equal_q_equal_one():
    # (S^0 x S^0) * S^0: четыре точки в джойне с двумя
    x, y, _, _ = cover_join_factors(1, 1, 3)
    assert x.component_count == 4
    assert join_homology(x, y) == GradedHomology.from_ranks({0: 1, 1: 3})


def test_join_induced_map_for_smallest_quadric():
    x, y, f, g = cover_join_factors(1, 1, 3)
    m = join_induced_map(f, g, x, y)
    assert m.block(1) == tuple(tuple(Fraction(v) for v in row) for row in ((0, 0, 1), (0, 1, 0), (1, 0, 0)))
    assert invariant_subgroup(m) == GradedHomology.from_ranks({0: 1, 1: 2}, Coefficients.RATIONAL)


@pytest.mark.parametrize("p, q, n, expected", [
    (2, 3, 7, {0: 1, 3: 1}),
    (2, 4, 8, {0: 1, 3: 1, 5: 1, 6: 1}),
    (1, 3, 6, {0: 1, 4: 1}),
    (1, 1, 5, {0: 1, 3: 2}),
])
def test_invariants_of_join_action(p, q, n, expected):
    x, y, f, g = cover_join_factors(p, q, n)
    assert invariant_subgroup(join_induced_map(f, g, x, y)) == GradedHomology.from_ranks(expected,
                                                                                        Coefficients.RATIONAL)


def test_top_eigenvalues_for_two_three_seven():
    # степени 3, 4, 5 накрытия X_{2,3}^7: собственные значения +1, -1, -1
    x, y, f, g = cover_join_factors(2, 3, 7)
    m = join_induced_map(f, g, x, y)
    assert m.block(3) == ((Fraction(1),),)
    assert m.block(4) == ((Fraction(-1),),)
    assert m.block(5) == ((Fraction(-1),),)


def test_kernel_must_be_preserved():
    h = GradedHomology.from_ranks({0: 2})
    pointed = PointedGradedHomology(homology=h, component_count=2)
    collapse = GradedMap(source=h, target=h, blocks={0: ((1, 1), (0, 0))})
    other = GradedMap(source=h, target=h, blocks={0: ((1, 0), (1, 0))})
    with pytest.raises(KernelNotPreserved):
        join_induced_map(other, identity_map(h), pointed, pointed)
    # столбцы с равными суммами допустимы
    join_induced_map(collapse, identity_map(h), pointed, pointed)


def test_invariant_subgroup_requires_involution():
    h = GradedHomology.from_ranks({1: 1})
    with pytest.raises(NotInvolution):
        invariant_subgroup(GradedMap(source=h, target=h, blocks={1: ((2,),)}))


def test_graded_map_shape_checked():
    h = GradedHomology.from_ranks({1: 2})
    with pytest.raises(ValueError):
        GradedMap(source=h, target=h, blocks={1: ((1,),)})


def test_json_blocks_round_trip():
    x, y, f, g = cover_join_factors(1, 1, 3)
    m = join_induced_map(f, g, x, y)
    assert GradedMap.from_json_blocks(m.source, m.target, m.to_json_blocks()) == m


def test_cover_factors_require_degenerate_signature():
    with pytest.raises(ValueError):
        cover_join_factors(1, 2, 3)
