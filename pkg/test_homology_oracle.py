from fractions import Fraction
from itertools import combinations

import pytest
from pydantic import ValidationError

from closed_forms import QuadricSignature, homology_X, integer_homology_Q, mod2_homology_Q, rational_homology_Q
from errors import OracleInfeasible
from graded import Coefficients, FgAbelianGroup, GradedHomology, PointedGradedHomology
from homology_oracle import (OracleResult, build_Q, build_X, chain_complex, chain_map_image, export_complex,
                             homology_of_complex, induced_map_on_homology, rational_Q_via_invariants)
from join_theory import join_homology
from simplicial import (PointVertex, SimplicialComplex, SphereModel, barycentric_subdivide, cycle, discrete,
                        induced_involution, is_regular, join, product, quotient_by_involution, sphere)
from verify import degenerate_signatures

Z = FgAbelianGroup.free(1)
Z2 = FgAbelianGroup(torsion=(2,))


def sig(p, q, n):
    return QuadricSignature(p=p, q=q, n=n)


def integer_homology(c):
    return homology_of_complex(c, Coefficients.INTEGER).homology


def pointed(c):
    h = integer_homology(c)
    return PointedGradedHomology(homology=h, component_count=h.rank(0))


def signature_params(signatures, slow_from):
    return [pytest.param(s, id=s.label(), marks=pytest.mark.slow if s.n >= slow_from else ())
            for s in signatures]


def circle_and_two_points():
    facets = list(sphere(1).facet_labels()) + [[PointVertex(10)], [PointVertex(11)]]
    return SimplicialComplex(facets, trace="sphere(1) + discrete(2)")


CATALOG = {
    "S0": sphere(0),
    "S1": sphere(1),
    "S2": sphere(2),
    "discrete3": discrete(3),
    "torus": product(sphere(1), sphere(1)),
    "S1+S0": circle_and_two_points(),
    "S1_simplex": sphere(1, SphereModel.SIMPLEX_BOUNDARY),
    "cycle5": cycle(5),
}


def test_boundary_of_boundary_vanishes():
    chain_complex(product(sphere(1), sphere(1))).check_boundary_squares()
    chain_complex(build_X(sig(1, 2, 4))[0]).check_boundary_squares()


def test_homology_of_basic_complexes():
    assert integer_homology(cycle(6)) == GradedHomology.from_ranks({0: 1, 1: 1})
    assert integer_homology(sphere(3)) == GradedHomology.from_ranks({0: 1, 3: 1})
    assert integer_homology(product(sphere(1), sphere(1))) == GradedHomology.from_ranks({0: 1, 1: 2, 2: 1})
    assert integer_homology(CATALOG["S1+S0"]) == GradedHomology.from_ranks({0: 3, 1: 1})


@pytest.mark.parametrize("left, right", list(combinations(CATALOG, 2)), ids=lambda name: name)
def test_join_oracle_matches_join_homology(left, right):
    a, b = CATALOG[left], CATALOG[right]
    joined = join(a, b)
    chain_complex(joined).check_boundary_squares()
    assert integer_homology(joined) == join_homology(pointed(a), pointed(b))


def test_projective_plane_has_torsion():
    rp2 = build_Q(sig(0, 1, 4))
    assert integer_homology(rp2) == GradedHomology(groups={0: Z, 1: Z2})
    assert homology_of_complex(rp2, Coefficients.MOD2).homology.betti_numbers() == [1, 1, 1]
    assert homology_of_complex(rp2, Coefficients.RATIONAL).homology.betti_numbers() == [1]


def test_projective_plane_from_twice_subdivided_octahedron():
    s = barycentric_subdivide(barycentric_subdivide(sphere(2)))
    t = induced_involution(s)
    assert is_regular(s, t)
    rp2 = quotient_by_involution(s, t)
    assert s.f_vector[0] == 146
    assert rp2.f_vector[0] == 73
    assert integer_homology(rp2) == GradedHomology(groups={0: Z, 1: Z2})


@pytest.mark.parametrize("name, c", [
    ("S2", sphere(2)),
    ("torus", product(sphere(1), sphere(1))),
    ("cycle5", cycle(5)),
    ("S1+S0", circle_and_two_points()),
])
def test_subdivision_preserves_homology(name, c):
    subdivided = barycentric_subdivide(c)
    chain_complex(subdivided).check_boundary_squares()
    assert integer_homology(subdivided) == integer_homology(c)


def test_subdivision_preserves_torsion():
    quotient = build_Q(sig(1, 1, 4))
    assert integer_homology(barycentric_subdivide(quotient)) == integer_homology(quotient)


@pytest.mark.parametrize("s", signature_params(degenerate_signatures(7), slow_from=6))
def test_double_cover_matches_formula(s):
    cover, _ = build_X(s)
    chain_complex(cover).check_boundary_squares()
    integral = integer_homology(cover)
    assert integral == homology_X(s)
    assert integral.change_coefficients(Coefficients.RATIONAL) == homology_X(s, Coefficients.RATIONAL)
    assert homology_of_complex(cover, Coefficients.MOD2).homology == homology_X(s, Coefficients.MOD2)


@pytest.mark.parametrize("p, q, n", [(1, 1, 3), (1, 2, 4), (1, 3, 5)])
def test_rational_ranks_agree_with_integer_homology(p, q, n):
    cover, _ = build_X(sig(p, q, n))
    rational = homology_of_complex(cover, Coefficients.RATIONAL).homology
    assert rational == integer_homology(cover).change_coefficients(Coefficients.RATIONAL)
    assert rational.coeff == Coefficients.RATIONAL


@pytest.mark.parametrize("p, q, n, groups", [
    (1, 1, 3, {0: Z, 1: FgAbelianGroup.free(2)}),
    (1, 1, 4, {0: Z, 1: Z2, 2: Z}),
    (1, 2, 4, {0: Z, 1: Z, 2: Z}),
    (1, 2, 5, {0: Z, 1: Z2, 3: Z}),
    (2, 2, 5, {0: Z, 1: Z2, 2: Z2}),
])
def test_quotient_matches_known_groups(p, q, n, groups):
    assert integer_homology(build_Q(sig(p, q, n))) == GradedHomology(groups=groups)


@pytest.mark.parametrize("s", signature_params(degenerate_signatures(5), slow_from=6))
def test_quotient_matches_formulas(s):
    quotient = build_Q(s)
    chain_complex(quotient).check_boundary_squares()
    assert integer_homology(quotient) == integer_homology_Q(s)
    assert homology_of_complex(quotient, Coefficients.RATIONAL).homology == rational_homology_Q(s)
    assert homology_of_complex(quotient, Coefficients.MOD2).homology == mod2_homology_Q(s)


def test_quotient_records_subdivisions():
    assert "[subdivisions=1]" in build_Q(sig(1, 1, 3)).trace


def test_nondegenerate_quotient_is_a_circle():
    quotient = build_Q(sig(1, 2, 3))
    assert homology_of_complex(quotient, Coefficients.MOD2).homology == mod2_homology_Q(sig(1, 2, 3))


def test_face_cap_makes_oracle_infeasible():
    with pytest.raises(OracleInfeasible) as info:
        build_X(sig(2, 3, 7), face_cap=100)
    assert info.value.face_cap == 100
    assert info.value.projected_faces > 100
    with pytest.raises(OracleInfeasible):
        build_Q(sig(1, 2, 5), face_cap=1000)


def test_zero_face_cap_is_not_the_default():
    with pytest.raises(OracleInfeasible) as info:
        build_X(sig(1, 1, 3), face_cap=0)
    assert info.value.face_cap == 0
    with pytest.raises(OracleInfeasible):
        build_Q(sig(1, 1, 3), face_cap=0)


@pytest.mark.parametrize("k", range(5))
def test_antipode_degree_on_spheres(k):
    s = sphere(k)
    m = induced_map_on_homology(s, induced_involution(s))
    if k == 0:
        assert m.block(0) == ((0, 1), (1, 0))
    else:
        assert m.block(0) == ((Fraction(1),),)
        assert m.block(k) == ((Fraction((-1) ** (k + 1)),),)


def test_induced_map_only_over_rationals():
    s = sphere(1)
    with pytest.raises(ValueError):
        induced_map_on_homology(s, induced_involution(s), Coefficients.MOD2)


@pytest.mark.parametrize("s", signature_params(degenerate_signatures(9), slow_from=7))
def test_invariants_route_matches_formula(s):
    assert rational_Q_via_invariants(s) == rational_homology_Q(s)


def test_chain_map_image_sign():
    s = sphere(1)
    t = induced_involution(s)
    sign, image = chain_map_image(t, (0, 2))
    assert image == (1, 3)
    assert sign == 1


def test_workers_do_not_change_result():
    cover, _ = build_X(sig(1, 2, 4))
    assert homology_of_complex(cover, workers=2).homology == homology_of_complex(cover, workers=1).homology


def test_oracle_result_checks_euler_characteristic():
    with pytest.raises(ValidationError):
        OracleResult(homology=GradedHomology.from_ranks({0: 1}), f_vector=(4, 4), build_trace=("cycle",))


def test_export_complex(tmp_path):
    quotient = build_Q(sig(1, 1, 3))
    path = tmp_path / "q113.facets"
    export_complex(quotient, str(path))
    assert SimplicialComplex.from_facet_list(path.read_text(encoding="utf-8")) == quotient
