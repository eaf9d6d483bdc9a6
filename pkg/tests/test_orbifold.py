import itertools
from fractions import Fraction

import pytest

from stringy_orbifold.catalogue import load_catalogue
from stringy_orbifold.ering import ERat, L, epoly_parse, erat_eq, specialize
from stringy_orbifold.errors import InvalidModelError, ParseError, PreconditionError
from stringy_orbifold.orbifold import (
    AbelianAction,
    Generator,
    SectorSpec,
    SpecSector,
    action_from_json,
    action_to_json,
    element_exponents,
    has_reflections,
    is_gorenstein,
    orbifold_e,
    orbifold_hodge,
    sector_spec_from_json,
    sectors,
    shift_number,
    trivially_acting_elements,
    verify_main_theorem,
)
from stringy_orbifold.stringy import SncModel, model_from_json

from .conftest import load_fixture

Z2 = AbelianAction.cyclic(2, (1, 1))
Z3 = AbelianAction.cyclic(3, (1, 1, 1))
Z2_REFL = AbelianAction.cyclic(2, (1, 0))
Z6 = AbelianAction.cyclic(6, (1, 5))
KLEIN = action_from_json(load_fixture("z2xz2_diag.json"))

ACTIONS = [Z2, Z3, Z2_REFL, Z6, KLEIN] + [e.action for e in load_catalogue()]


def test_element_exponents_examples():
    assert element_exponents(Z3, (0,)) == (1, (1, 1, 1))
    assert element_exponents(Z3, (1,)) == (3, (1, 1, 1))
    assert element_exponents(Z3, (2,)) == (3, (2, 2, 2))
    # element 2 of Z6 has order 3
    assert element_exponents(Z6, (2,)) == (3, (1, 2))
    assert element_exponents(Z6, (3,)) == (2, (1, 1))


def test_element_exponents_product_group():
    assert element_exponents(KLEIN, (1, 1)) == (2, (1, 2, 1))


@pytest.mark.parametrize("g", [(3,), (-1,), (0, 0)])
def test_element_exponents_out_of_range(g):
    with pytest.raises(ValueError):
        element_exponents(Z3, g)


@pytest.mark.parametrize(
    "l, exps, expected",
    [(1, (1, 1), 0), (2, (1, 1), 1), (3, (1, 1, 1), 2), (3, (2, 2, 2), 1), (4, (1, 2), Fraction(5, 4))],
)
def test_shift_number_examples(l, exps, expected):
    assert shift_number(l, exps) == expected


@pytest.mark.parametrize("l, exps", [(2, (0, 1)), (3, (4, 1)), (0, ())])
def test_shift_number_normalization(l, exps):
    with pytest.raises(ValueError):
        shift_number(l, exps)


def test_sectors_trivial_group():
    (s,) = sectors(AbelianAction(2, ()))
    assert s.shift == 0 and s.coarse_class == ERat(L**2)


def test_sectors_z2():
    table = [(s.element, s.shift, s.coarse_class) for s in sectors(Z2)]
    assert table == [((0,), 0, ERat(L**2)), ((1,), 1, ERat(1))]


def test_sectors_z3():
    secs = sectors(Z3)
    assert [s.shift for s in secs] == [0, 2, 1]
    assert [s.coarse_class for s in secs] == [ERat(L**3), ERat(1), ERat(1)]
    assert [s.age for s in secs] == [0, 1, 2]


def test_sector_dict():
    d = sectors(AbelianAction.cyclic(4, (1, 2)))[1].to_dict()
    assert d == {
        "element": [1],
        "order": 4,
        "exponents": [1, 2],
        "fixed_dim": 0,
        "shift": "5/4",
        "age": "3/4",
        "coarse_class": "1",
    }


@pytest.mark.parametrize(
    "action, gorenstein, reflections",
    [(Z2, True, False), (Z2_REFL, False, True), (Z3, True, False), (Z6, True, False), (KLEIN, True, False)],
)
def test_gorenstein_and_reflections(action, gorenstein, reflections):
    assert is_gorenstein(action) is gorenstein
    assert has_reflections(action) is reflections


def test_z6_fixed_dimensions():
    # only the identity fixes anything
    assert [s.fixed_dim for s in sectors(Z6)] == [2, 0, 0, 0, 0, 0]


def test_trivially_acting_elements():
    assert trivially_acting_elements(Z2) == []
    doubled = AbelianAction(2, (Generator(2, (1, 1)), Generator(2, (0, 0))))
    assert trivially_acting_elements(doubled) == [(0, 1)]


@pytest.mark.parametrize("action", ACTIONS)
def test_shift_duality(action):
    by_element = {s.element: s for s in sectors(action)}
    for g, s in by_element.items():
        inv = by_element[action.inverse(g)]
        if g != action.identity():
            assert s.shift + inv.shift == action.dim - s.fixed_dim
        assert s.age == inv.shift


@pytest.mark.parametrize("action", ACTIONS)
def test_gorenstein_iff_integral_shifts(action):
    assert is_gorenstein(action) == all(s.shift.denominator == 1 for s in sectors(action))


@pytest.mark.parametrize("action", ACTIONS)
def test_sector_count_and_euler(action):
    assert len(sectors(action)) == action.order
    assert specialize(orbifold_e(sectors(action)), 1, 1) == action.order


def test_orbifold_e_examples():
    assert orbifold_e(sectors(Z2)) == ERat(L**2 + L)
    assert orbifold_e(sectors(Z3)) == ERat(epoly_parse("L^3 + L^2 + L"))
    assert orbifold_e(sectors(AbelianAction(3, ()))) == ERat(L**3)


def test_orbifold_e_fractional_shift():
    value = orbifold_e(sectors(AbelianAction.cyclic(3, (1, 1))))
    assert value == ERat(epoly_parse("L^2 + L^(4/3) + L^(2/3)"))


def _klein_by_hand():
    # sum over the four elements of the diagonal Klein group of L^s * L^fixed
    signs = [(1, 1, 1), (-1, -1, 1), (1, -1, -1), (-1, 1, -1)]
    total = 0
    for sign in signs:
        moved = sign.count(-1)
        total = total + L ** (moved // 2) * L ** (3 - moved)
    return ERat(total)


def test_relabeling_invariance():
    presentations = [
        KLEIN,
        AbelianAction(3, (Generator(2, (1, 0, 1)), Generator(2, (0, 1, 1)))),
        AbelianAction(3, (Generator(2, (1, 1, 0)), Generator(2, (1, 0, 1)))),
    ]
    values = [orbifold_e(sectors(a)) for a in presentations]
    for v in values:
        assert erat_eq(v, _klein_by_hand())
    z6 = AbelianAction.cyclic(6, (1, 5))
    assert erat_eq(orbifold_e(sectors(z6)), orbifold_e(sectors(AbelianAction.cyclic(6, (5, 1)))))
    # Z6 = Z2 x Z3 on the same torus subgroup
    split = AbelianAction(2, (Generator(2, (1, 1)), Generator(3, (1, 2))))
    assert erat_eq(orbifold_e(sectors(z6)), orbifold_e(sectors(split)))


def test_orbifold_hodge_untwisted_p2():
    spec = SectorSpec((SpecSector("P2", 0, epoly=epoly_parse("1 + L + L^2")),))
    result = orbifold_hodge(spec)
    assert result.hodge == {(0, 0): 1, (1, 1): 1, (2, 2): 1}
    assert result.betti == {0: 1, 2: 1, 4: 1}


def test_orbifold_hodge_shifted_points():
    result = orbifold_hodge(sector_spec_from_json(load_fixture("p2_sectors.json")))
    assert result.betti == {0: 1, 2: 2, 4: 2}
    assert result.hodge[(1, 1)] == 2 and result.hodge[(2, 2)] == 2
    assert result.euler_from_betti == 5 == result.euler_from_e
    assert result.consistent


def test_orbifold_hodge_fractional_betti():
    spec = SectorSpec((SpecSector("pt", 0, hodge=((0, 0, 1),)), SpecSector("g", Fraction(1, 2), epoly=epoly_parse("1"))))
    result = orbifold_hodge(spec)
    assert result.betti == {0: 1, 1: 1}
    assert result.euler_from_betti is None
    assert result.to_dict()["hodge"] == [[0, 0, 1], ["1/2", "1/2", 1]]


@pytest.mark.parametrize("text", ["L - 1", "u + v", "L^(1/2)"])
def test_orbifold_hodge_rejects_ambiguous(text):
    spec = SectorSpec((SpecSector("x", 0, epoly=epoly_parse(text)),))
    with pytest.raises(ValueError, match="hodge table"):
        orbifold_hodge(spec)


def test_spec_sector_validation():
    with pytest.raises(ValueError):
        SpecSector("x", -1, epoly=epoly_parse("1"))
    with pytest.raises(ValueError):
        SpecSector("x", 0)
    with pytest.raises(ValueError):
        SpecSector("x", 0, hodge=((0, 0, -1),))


def test_sector_spec_json_errors():
    with pytest.raises(ParseError):
        sector_spec_from_json({"sectors": [{"label": "a", "shift": 0}]})
    with pytest.raises(ParseError):
        sector_spec_from_json({})
    with pytest.raises(ParseError):
        sector_spec_from_json({"sectors": [{"shift": -1, "epoly": "1"}]})


def test_main_theorem_z2():
    report = verify_main_theorem(Z2, model_from_json(load_fixture("a1_resolution.json")))
    assert report.equal
    assert str(report.stringy) == str(report.orbifold) == "L^2 + L"


def test_main_theorem_cone_over_p2():
    # complement of the zero section is L^3 - 1; the section itself is P^2
    model = SncModel.build(3, "L^3 + L^2 + L", [("E", 0)], {(): "L^3 - 1", ("E",): "L^2 + L + 1"})
    report = verify_main_theorem(Z3, model)
    assert report.equal
    assert report.orbifold == ERat(epoly_parse("L^3 + L^2 + L"))


def test_cone_model_with_wrong_complement_is_invalid():
    model = SncModel.build(3, "L^3 + L^2 + L", [("E", 0)], {(): "L^3 - (L^2 + L + 1)", ("E",): "L^2 + L + 1"})
    with pytest.raises(InvalidModelError, match="cover identity"):
        verify_main_theorem(Z3, model)


@pytest.mark.parametrize("entry", load_catalogue(), ids=lambda e: e.name)
def test_main_theorem_catalogue(entry):
    assert verify_main_theorem(entry.action, entry.resolution).equal


def test_main_theorem_preconditions():
    a1 = model_from_json(load_fixture("a1_resolution.json"))
    with pytest.raises(PreconditionError, match="Gorenstein"):
        verify_main_theorem(AbelianAction.cyclic(2, (1, 0)), a1)
    with pytest.raises(PreconditionError, match="reflections"):
        verify_main_theorem(AbelianAction(2, (Generator(2, (1, 0)), Generator(2, (0, 1)))), a1)
    with pytest.raises(PreconditionError, match="dimension"):
        verify_main_theorem(Z3, a1)
    with pytest.raises(PreconditionError, match="non-integral"):
        half = SncModel.build(2, "L^2 + L", [("E1", Fraction(1, 2))], {(): "L^2 - 1", ("E1",): "L + 1"})
        verify_main_theorem(Z2, half)
    with pytest.raises(InvalidModelError):
        verify_main_theorem(Z2, model_from_json(load_fixture("bad_cover.json")))


def test_mismatched_resolution_is_reported_not_raised():
    report = verify_main_theorem(Z2, model_from_json(load_fixture("a2_resolution.json")))
    assert not report.equal


def test_action_json_roundtrip():
    for action in ACTIONS:
        assert action_from_json(action_to_json(action)) == action
    assert action_from_json({"dim": 2, "generators": [{"order": 2, "weights": [3, -1]}]}) == Z2


@pytest.mark.parametrize(
    "obj",
    [{"generators": []}, {"dim": 2, "generators": [{"order": 2, "weights": [1]}]}, {"dim": 0, "generators": []}],
)
def test_action_json_errors(obj):
    with pytest.raises(ParseError):
        action_from_json(obj)


def test_elements_are_lexicographic():
    assert list(KLEIN.elements()) == list(itertools.product(range(2), range(2)))
