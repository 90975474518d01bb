import random

import pytest
from pydantic import ValidationError

from errors import TorsionPresent
from graded import (Coefficients, FgAbelianGroup, GradedHomology, PointedGradedHomology, augmentation_kernel,
                    tensor_degree)

RP3 = GradedHomology(groups={0: FgAbelianGroup.free(1), 1: FgAbelianGroup(torsion=(2,)), 3: FgAbelianGroup.free(1)})


def test_render():
    assert FgAbelianGroup(free_rank=1, torsion=(2,)).render() == "Z + Z/2"
    assert FgAbelianGroup.free(2).render() == "Z^2"
    assert FgAbelianGroup.free(2).render(Coefficients.RATIONAL) == "Q^2"
    assert FgAbelianGroup(torsion=(2, 2)).render() == "(Z/2)^2"
    assert FgAbelianGroup.free(3).render(Coefficients.MOD2) == "(Z/2)^3"
    assert FgAbelianGroup.zero().render() == "0"


def test_render_latex():
    assert FgAbelianGroup(free_rank=1, torsion=(2,)).render_latex() == r"\mathbb{Z} \oplus \mathbb{Z}/2"
    assert FgAbelianGroup.zero().render_latex() == "0"


def test_torsion_is_normalized_to_invariant_factors():
    assert FgAbelianGroup(torsion=(3, 2)).torsion == (6,)
    assert FgAbelianGroup(torsion=(2, 1, 4)).torsion == (2, 4)
    with pytest.raises(ValidationError):
        FgAbelianGroup(torsion=(0,))


def test_zero_degrees_are_dropped():
    h = GradedHomology(groups={2: FgAbelianGroup.zero(), 0: FgAbelianGroup.free(1)})
    assert list(h.groups) == [0]
    assert h.group(5).is_zero
    assert h.top_degree == 0


def test_fields_cannot_carry_torsion():
    with pytest.raises(ValidationError):
        GradedHomology(coeff=Coefficients.RATIONAL, groups={1: FgAbelianGroup(torsion=(2,))})


def test_universal_coefficients_for_rp3():
    assert RP3.change_coefficients(Coefficients.MOD2).betti_numbers() == [1, 1, 1, 1]
    assert RP3.change_coefficients(Coefficients.RATIONAL) == GradedHomology.from_ranks({0: 1, 3: 1},
                                                                                      Coefficients.RATIONAL)
    assert RP3.euler_characteristic() == 0
    assert not RP3.is_free


def test_change_coefficients_from_field_rejected():
    rational = GradedHomology.from_ranks([1], Coefficients.RATIONAL)
    assert rational.change_coefficients(Coefficients.RATIONAL) is rational
    with pytest.raises(ValueError):
        rational.change_coefficients(Coefficients.MOD2)


def test_json_round_trip():
    assert GradedHomology.from_json(RP3.to_json()) == RP3
    assert RP3.to_json() == {"coeff": "integer", "groups": {"0": {"rank": 1, "torsion": []},
                                                           "1": {"rank": 0, "torsion": [2]},
                                                           "3": {"rank": 1, "torsion": []}}}


def test_coefficient_flags():
    assert Coefficients.from_flag("z") == Coefficients.INTEGER
    assert Coefficients.from_flag("Q") == Coefficients.RATIONAL
    assert Coefficients.from_flag("z2") == Coefficients.MOD2
    with pytest.raises(ValueError):
        Coefficients.from_flag("z3")


def test_pointed_homology_checks_components():
    two_points = GradedHomology.from_ranks({0: 2})
    assert PointedGradedHomology(homology=two_points, component_count=2).component_count == 2
    with pytest.raises(ValidationError):
        PointedGradedHomology(homology=two_points, component_count=1)


def test_augmentation_kernel_and_tensor():
    s0 = PointedGradedHomology(homology=GradedHomology.from_ranks({0: 2}), component_count=2)
    assert augmentation_kernel(s0) == GradedHomology.from_ranks({0: 1})
    s1 = GradedHomology.from_ranks({0: 1, 1: 1})
    assert tensor_degree(s1, s1, 1) == FgAbelianGroup.free(2)
    with pytest.raises(TorsionPresent):
        tensor_degree(RP3, s1, 1)


@pytest.mark.parametrize("seed", range(20))
def test_torsion_normalization_is_idempotent(seed):
    rng = random.Random(seed)
    group = FgAbelianGroup(free_rank=rng.randint(0, 3), torsion=[rng.choice((2, 3, 4, 6, 8, 9, 12)) for _ in range(5)])
    assert FgAbelianGroup(free_rank=group.free_rank, torsion=group.torsion) == group
    assert all(b % a == 0 for a, b in zip(group.torsion, group.torsion[1:]))


@pytest.mark.parametrize("seed", range(20))
def test_tensor_degree_is_symmetric(seed):
    rng = random.Random(300 + seed)
    a = GradedHomology.from_ranks({k: rng.randint(0, 3) for k in range(rng.randint(1, 10))})
    b = GradedHomology.from_ranks({k: rng.randint(0, 3) for k in range(rng.randint(1, 10))})
    for k in range(21):
        assert tensor_degree(a, b, k) == tensor_degree(b, a, k)
    assert sum(tensor_degree(a, b, k).free_rank for k in range(21)) == (
        sum(a.betti_numbers()) * sum(b.betti_numbers()))
