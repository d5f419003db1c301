"""Group arithmetic, canonical windows, and the vanishing-boundary ladder."""

import pytest

from lpdim._util import rng_for
from lpdim.errors import StructureError
from lpdim.groups import (
    FiniteSubset,
    GroupSpec,
    compose,
    folner_window,
    invert,
    parse_group,
    translate_set,
)
from lpdim.tiling import alpha_fraction

Z = GroupSpec.integer_lattice(1)
Z2 = GroupSpec.integer_lattice(2)
C5 = GroupSpec.cyclic(5)
ZxC3 = GroupSpec.product([Z, GroupSpec.cyclic(3)])

ALL_SPECS = [Z, Z2, C5, ZxC3]


def random_element(spec, rng):
    coords = []
    for m in spec.moduli:
        coords.append(int(rng.integers(-20, 21)) if m == 0 else int(rng.integers(0, m)))
    return spec.element(*coords)


def test_compose_examples():
    assert compose(Z.element(3), Z.element(4)).coords == (7,)
    assert compose(C5.element(3), C5.element(4)).coords == (2,)
    assert compose(ZxC3.element(1, 2), ZxC3.element(2, 2)).coords == (3, 1)


def test_invert_examples():
    assert invert(Z.element(3)).coords == (-3,)
    assert invert(C5.element(3)).coords == (2,)
    assert invert(Z2.element(1, -2)).coords == (-1, 2)


def test_group_laws_on_random_triples():
    """Associativity and two-sided inverses, 1000 triples per group."""
    for spec in ALL_SPECS:
        rng = rng_for(7, "laws", spec.describe())
        e = spec.identity()
        for _ in range(1000):
            a, b, c = (random_element(spec, rng) for _ in range(3))
            assert compose(compose(a, b), c) == compose(a, compose(b, c))
            assert compose(a, invert(a)) == e
            assert compose(invert(a), a) == e


def test_cross_group_composition_rejected():
    with pytest.raises(StructureError):
        compose(Z.element(1), C5.element(1))
    with pytest.raises(StructureError):
        Z2.element(1)


def test_cyclic_coordinates_reduced():
    assert C5.element(12).coords == (2,)
    assert C5.element(-1).coords == (4,)
    assert ZxC3.element(-4, 7).coords == (-4, 1)


def test_translate_examples():
    om = FiniteSubset.of(Z, [0, 1, 2])
    assert translate_set(Z.element(2), om).elements == ((2,), (3,), (4,))
    c4 = GroupSpec.cyclic(4)
    wrapped = translate_set(c4.element(3), FiniteSubset.of(c4, [0, 1]))
    assert wrapped.elements == ((0,), (3,))
    assert translate_set(Z.element(0), om) == om


def test_translate_preserves_count_and_composition():
    for spec in ALL_SPECS:
        rng = rng_for(11, "translate", spec.describe())
        base = FiniteSubset.of(spec, [random_element(spec, rng) for _ in range(9)])
        for _ in range(200):
            g = random_element(spec, rng)
            h = random_element(spec, rng)
            gh = compose(g, h)
            assert len(translate_set(g, base)) == len(base)
            assert translate_set(gh, base) == translate_set(g, translate_set(h, base))


def test_finite_subset_dedups_and_sorts():
    s = FiniteSubset.of(Z2, [(1, 1), (0, 3), (1, 1), (0, 0)])
    assert s.elements == ((0, 0), (0, 3), (1, 1))
    assert (1, 1) in s
    assert s.positions[(0, 3)] == 1


def test_folner_window_shapes():
    assert folner_window(Z, 4).elements == ((0,), (1,), (2,), (3,))
    assert folner_window(Z2, 2).elements == ((0, 0), (0, 1), (1, 0), (1, 1))
    # finite factors are exhausted at every index
    assert len(folner_window(C5, 1)) == 5
    assert len(folner_window(C5, 9)) == 5
    assert len(folner_window(ZxC3, 4)) == 12
    with pytest.raises(ValueError):
        folner_window(Z, 0)


def test_folner_boundary_ratio_vanishes():
    """alpha along the window ladder drops by 10x between index 4 and 256."""
    families = {
        Z.describe(): (Z, FiniteSubset.of(Z, [0, 1])),
        Z2.describe(): (Z2, FiniteSubset.of(Z2, [(0, 0), (1, 0)])),
        ZxC3.describe(): (ZxC3, FiniteSubset.of(ZxC3, [(0, 0), (1, 0)])),
    }
    for spec, shape in families.values():
        ladder = [alpha_fraction(folner_window(spec, i), shape) for i in (4, 16, 64, 256)]
        assert all(a > b for a, b in zip(ladder, ladder[1:]))
        assert ladder[-1] < ladder[0] / 10
    # purely finite groups have no boundary at all
    full = folner_window(C5, 1)
    assert alpha_fraction(full, FiniteSubset.of(C5, [0, 1])) == 0


def test_folner_alpha_exact_value():
    # on Z with shape {0,1} the boundary of [0,i) is {-1, i-1}
    from fractions import Fraction

    om = folner_window(Z, 10)
    assert alpha_fraction(om, FiniteSubset.of(Z, [0, 1])) == Fraction(1, 5)


def test_parse_group_round_trip():
    assert parse_group("Z") == Z
    assert parse_group("Z^2") == Z2
    assert parse_group("Z/5") == C5
    assert parse_group("Z x Z/3") == ZxC3
    assert parse_group("  z X  z/3") == ZxC3
    assert parse_group("Z^2 x Z/4").moduli == (0, 0, 4)
    for bad in ["", "Q", "Z^0", "Z/", "Z**2", "Z x"]:
        with pytest.raises(ValueError):
            parse_group(bad)


def test_describe_round_trips_through_parser():
    for spec in ALL_SPECS + [GroupSpec((0, 0, 4)), GroupSpec((2, 0))]:
        assert parse_group(spec.describe()) == spec


def test_constructor_validation():
    with pytest.raises(ValueError):
        GroupSpec.integer_lattice(0)
    with pytest.raises(ValueError):
        GroupSpec.cyclic(0)
    with pytest.raises(ValueError):
        GroupSpec.product([Z])
