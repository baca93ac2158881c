"""Unit tests for exact component arrays and basic tensor operations."""

from fractions import Fraction

import pytest

from jetcalc.symcore import (
    ComponentArray,
    alternate,
    all_indices,
    contract,
    format_rational,
    rat,
    sym_index_count,
    sym_indices,
    symmetrize,
    tensor_product,
)


def test_rat_parses_strings_ints_and_fractions():
    assert rat("3/4") == Fraction(3, 4)
    assert rat("-7") == Fraction(-7)
    assert rat(5) == Fraction(5)
    assert rat(Fraction(2, 6)) == Fraction(1, 3)
    with pytest.raises(TypeError):
        rat(0.5)


def test_format_rational_round_trips():
    for value in (Fraction(3, 4), Fraction(-2), Fraction(0), Fraction(22, 7)):
        assert rat(format_rational(value)) == value


def test_sym_index_count_matches_enumeration():
    for dim in (1, 2, 3, 4):
        for length in (0, 1, 2, 3, 4):
            listed = list(sym_indices(dim, length))
            assert len(listed) == sym_index_count(dim, length)
            assert all(tuple(sorted(t)) == t for t in listed)
    # spot value: multiset coefficient C(3+2-1, 2) = 6
    assert sym_index_count(3, 2) == 6


def test_symmetric_group_storage_and_lookup():
    arr = ComponentArray(3, ("u", "l", "l"), groups=(("s", (1, 2)),))
    arr[(1, 2, 3)] = Fraction(5, 7)
    assert arr[(1, 3, 2)] == Fraction(5, 7)
    assert arr[(1, 2, 3)] == Fraction(5, 7)
    # writing through the non-canonical order hits the same component
    arr[(1, 3, 2)] = Fraction(1, 2)
    assert arr[(1, 2, 3)] == Fraction(1, 2)


def test_antisymmetric_group_signs_and_diagonal():
    arr = ComponentArray(3, ("l", "l"), groups=(("a", (0, 1)),))
    arr[(1, 2)] = 4
    assert arr[(2, 1)] == -4
    assert arr[(1, 1)] == 0
    with pytest.raises(ValueError):
        arr[(2, 2)] = 1  # diagonal of an antisymmetric pair must stay zero
    arr[(3, 1)] = 2  # stored as -2 at the canonical key (1, 3)
    assert arr[(1, 3)] == -2


def test_from_function_checks_declared_symmetry():
    good = ComponentArray.from_function(
        2, ("l", "l"), lambda idx: idx[0] * idx[1], groups=(("s", (0, 1)),))
    assert good[(1, 2)] == 2
    with pytest.raises(ValueError):
        ComponentArray.from_function(
            2, ("l", "l"), lambda idx: idx[0] - idx[1], groups=(("s", (0, 1)),))


def test_symmetrize_averages_and_is_idempotent():
    arr = ComponentArray(2, ("l", "l"))
    arr[(1, 2)] = 1
    sym = symmetrize(arr, (0, 1))
    assert sym[(1, 2)] == Fraction(1, 2)
    assert sym[(2, 1)] == Fraction(1, 2)
    again = symmetrize(sym, (0, 1))
    assert again == sym


def test_alternate_halves_the_antisymmetric_part():
    arr = ComponentArray(2, ("l", "l"))
    arr[(1, 2)] = 1
    alt = alternate(arr, 0, 1)
    assert alt[(1, 2)] == Fraction(1, 2)
    assert alt[(2, 1)] == Fraction(-1, 2)
    assert alternate(alt, 0, 1) == alt


def test_symmetrize_then_alternate_annihilates():
    arr = ComponentArray.from_function(3, ("l", "l"), lambda idx: idx[0] + 2 * idx[1])
    assert alternate(symmetrize(arr, (0, 1)), 0, 1).is_zero()


def test_symmetrize_drops_conflicting_groups():
    # antisymmetric pair partially overlapped by a symmetrization: the
    # result keeps only symmetries it actually has
    arr = ComponentArray(2, ("l", "l", "l"), groups=(("a", (0, 1)),))
    arr[(1, 2, 1)] = 1
    arr[(1, 2, 2)] = 3
    sym = symmetrize(arr, (1, 2))
    # by hand: sym[1,2,1] = (arr[1,2,1] + arr[1,1,2]) / 2 = (1 + 0)/2
    assert sym[(1, 2, 1)] == Fraction(1, 2)
    assert sym[(1, 1, 2)] == Fraction(1, 2)
    assert all(kind == "s" for kind, _ in sym.groups)


def test_permuted_moves_slots_and_groups():
    arr = ComponentArray(2, ("u", "l"),)
    arr[(1, 2)] = 7
    swapped = arr.permuted((1, 0))
    assert swapped.slots == ("l", "u")
    assert swapped[(2, 1)] == 7
    anti = ComponentArray(3, ("l", "l"), groups=(("a", (0, 1)),))
    anti[(1, 2)] = 5
    flipped = anti.permuted((1, 0))
    assert flipped[(1, 2)] == -5
    assert flipped.groups == (("a", (0, 1)),)


def test_equality_ignores_group_declarations_when_values_agree():
    plain = ComponentArray(2, ("l", "l"))
    plain[(1, 2)] = 1
    plain[(2, 1)] = 1
    declared = ComponentArray(2, ("l", "l"), groups=(("s", (0, 1)),))
    declared[(1, 2)] = 1
    assert plain == declared


def test_arithmetic_is_componentwise_and_exact():
    a = ComponentArray.from_function(2, ("l",), lambda idx: Fraction(1, idx[0]))
    b = ComponentArray.from_function(2, ("l",), lambda idx: Fraction(idx[0], 3))
    s = a + b
    assert s[(2,)] == Fraction(1, 2) + Fraction(2, 3)
    assert (s - b) == a
    assert (-a).scaled(-1) == a
    assert a.scaled(Fraction(2, 5))[(1,)] == Fraction(2, 5)


def test_tensor_product_and_contract_give_matrix_trace():
    a = ComponentArray.from_function(3, ("u", "l"), lambda idx: idx[0] + 10 * idx[1])
    tr = contract(a, 0, 1)
    assert tr.slots == ()
    assert tr[()] == sum(i + 10 * i for i in range(1, 4))
    b = ComponentArray.from_function(3, ("l",), lambda idx: Fraction(idx[0]))
    prod = tensor_product(a, b)
    assert prod.slots == ("u", "l", "l")
    assert prod[(2, 3, 1)] == (2 + 30) * 1
    # contracting the product against b reproduces matrix-vector action
    mv = contract(prod, 0, 2)
    assert mv[(3,)] == sum((i + 30) * i for i in range(1, 4))


def test_contract_respects_symmetry_orbits():
    # antisymmetric array: trace over the pair is zero no matter how the
    # canonical representative is stored
    arr = ComponentArray(3, ("u", "u", "l", "l"), groups=(("a", (2, 3)),))
    arr[(1, 2, 1, 3)] = 5
    arr[(2, 2, 3, 1)] = 2
    out = contract(arr, 1, 2)
    # out[(u, l)] = sum_i arr[(u, i, i, l)]
    for u in range(1, 4):
        for low in range(1, 4):
            assert out[(u, low)] == sum(arr[(u, i, i, low)] for i in range(1, 4))


def test_gl_transform_scalar_weight_and_inverse():
    from jetcalc.linalg import invert_matrix

    mat = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(1)]]
    inv = invert_matrix(mat)
    arr = ComponentArray.from_function(2, ("u", "l"), lambda idx: idx[0] * idx[0] + idx[1])
    moved = arr.gl_transform(mat, inv)
    back = moved.gl_transform(inv, mat)
    assert back == arr
    # mixed (1,1) trace is invariant
    assert contract(moved, 0, 1) == contract(arr, 0, 1)


def test_all_indices_covers_the_full_cube():
    assert len(list(all_indices(3, 2))) == 9
    assert len(list(all_indices(2, 0))) == 1
