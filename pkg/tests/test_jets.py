"""Tests for jet composition, inversion, and the prolonged actions.

Key oracle: composition computed here must agree with independent truncated
polynomial composition, and the action formulas must satisfy the group and
action laws exactly.
"""

import random
import warnings
from fractions import Fraction

import pytest

from jetcalc import poly
from jetcalc.jets import (
    ConnectionJet,
    CotangentFibrePoint,
    DiffeoJet,
    TensorJet,
    act_on_connection,
    act_on_cotangent_fibre,
    act_on_tensor,
    compose_jets,
    invert_jet,
    kernel_jet,
    set_order_cap,
)
from jetcalc.randjets import (
    fill_random,
    rand_connection,
    rand_diffeo,
    rand_fibre_point,
    rand_kernel_jet,
    rand_linear_diffeo,
    rand_tensor,
)
from jetcalc.symcore import LO, UP, ComponentArray


def test_identity_jet_and_linear_matrix():
    g = DiffeoJet.identity(3, 2)
    assert g.linear_matrix() == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert g.coeffs[1].is_zero()


def test_rejects_singular_linear_part():
    arr = ComponentArray(2, (UP, LO))
    arr[(1, 1)] = 1
    arr[(2, 2)] = 0  # rank 1
    with pytest.raises(ValueError):
        DiffeoJet(2, [arr])


def test_compose_matches_polynomial_composition_oracle():
    # independent oracle: convert to Taylor polynomials, compose those
    # directly with a from-scratch substitution, and compare coefficients
    rng = random.Random(11)
    for _ in range(10):
        for dim, order in ((2, 3), (3, 2)):
            g = rand_diffeo(rng, dim, order)
            h = rand_diffeo(rng, dim, order)
            composed = compose_jets(g, h)
            gp, hp = g.to_polys(), h.to_polys()
            oracle = []
            for comp in gp:
                acc = {}
                for exp, c in comp.items():
                    term = {(0,) * dim: Fraction(c)}
                    for var, power in enumerate(exp):
                        for _ in range(power):
                            term = poly.p_mul(term, hp[var], order)
                    poly.p_add_into(acc, term)
                oracle.append(acc)
            assert composed == DiffeoJet.from_polys(dim, order, oracle)


def test_compose_associative_and_inverse_round_trip():
    rng = random.Random(7)
    for dim, order in ((2, 4), (3, 3)):
        a = rand_diffeo(rng, dim, order)
        b = rand_diffeo(rng, dim, order)
        c = rand_diffeo(rng, dim, order)
        assert compose_jets(compose_jets(a, b), c) == compose_jets(a, compose_jets(b, c))
        ident = DiffeoJet.identity(dim, order)
        assert compose_jets(a, invert_jet(a)) == ident
        assert compose_jets(invert_jet(a), a) == ident


def test_kernel_jet_inverse_negates_top_at_first_excess_order():
    # for a jet that is the identity up to order k, the inverse is the
    # identity up to order k with the order-(k+1) block negated
    rng = random.Random(3)
    for dim, order, k in ((2, 3, 2), (3, 2, 1), (2, 4, 2)):
        g = rand_kernel_jet(rng, dim, order, k)
        ginv = invert_jet(g)
        for i in range(k):
            assert ginv.coeffs[i] == DiffeoJet.identity(dim, order).coeffs[i]
        assert ginv.coeffs[k] == -g.coeffs[k]


def test_connection_jet_symmetry_validation():
    arr = ComponentArray(2, (UP, LO, LO))
    arr[(1, 1, 2)] = 1
    arr[(1, 2, 1)] = 2  # asymmetric values
    with pytest.raises(ValueError):
        ConnectionJet(2, 0, [arr], symmetric=True)
    ConnectionJet(2, 0, [arr], symmetric=False)  # fine when flagged


def test_act_on_connection_order_zero_formula():
    # closed-form check of the order-0 transformation against direct sums
    rng = random.Random(5)
    dim = 2
    conn = rand_connection(rng, dim, 0, symmetric=True)
    g = rand_diffeo(rng, dim, 2)
    moved = act_on_connection(g, conn)
    from jetcalc.linalg import invert_matrix
    a = g.linear_matrix()
    at = invert_matrix(a)
    a2 = g.coeffs[1]
    ginv = invert_jet(g)
    at2 = ginv.coeffs[1]  # second derivatives of the inverse germ
    for lam in range(1, dim + 1):
        for mu in range(1, dim + 1):
            for nu in range(1, dim + 1):
                total = Fraction(0)
                for rho in range(1, dim + 1):
                    inner = Fraction(0)
                    for sig in range(1, dim + 1):
                        for tau in range(1, dim + 1):
                            inner += (conn.arrays[0][(rho, sig, tau)]
                                      * at[sig - 1][mu - 1] * at[tau - 1][nu - 1])
                    inner -= at2[(rho, mu, nu)]
                    total += a[lam - 1][rho - 1] * inner
                assert moved.arrays[0][(lam, mu, nu)] == total


def test_act_on_connection_is_a_left_action():
    rng = random.Random(13)
    for dim in (2, 3):
        conn = rand_connection(rng, dim, 1, symmetric=True)
        g = rand_diffeo(rng, dim, 3)
        h = rand_diffeo(rng, dim, 3)
        lhs = act_on_connection(compose_jets(g, h), conn)
        rhs = act_on_connection(g, act_on_connection(h, conn))
        assert lhs == rhs


def test_act_on_connection_kernel_shift():
    # a jet that is the identity through order r+1 shifts an order-r
    # connection's top derivative array by its own top coefficients and
    # leaves everything below unchanged
    rng = random.Random(17)
    for dim, r in ((2, 1), (3, 0), (2, 2)):
        conn = rand_connection(rng, dim, r, symmetric=True)
        g = rand_kernel_jet(rng, dim, r + 2, r + 1)
        moved = act_on_connection(g, conn)
        for i in range(r):
            assert moved.arrays[i] == conn.arrays[i]
        top = g.coeffs[r + 1]
        for idx in _all_idx(dim, 3 + r):
            lam, rest = idx[0], idx[1:]
            assert moved.arrays[r][idx] == conn.arrays[r][idx] + top[(lam,) + rest]


def _all_idx(dim, length):
    import itertools
    return itertools.product(range(1, dim + 1), repeat=length)


def test_act_on_tensor_chain_rule_oracle():
    # (1,1)-tensor value transforms by plain matrix conjugation
    rng = random.Random(19)
    dim = 3
    t = rand_tensor(rng, dim, (1, 1), 0)
    g = rand_diffeo(rng, dim, 1)
    moved = act_on_tensor(g, t)
    from jetcalc.linalg import invert_matrix
    a, at = g.linear_matrix(), invert_matrix(g.linear_matrix())
    for i in range(1, dim + 1):
        for j in range(1, dim + 1):
            total = Fraction(0)
            for r_ in range(1, dim + 1):
                for s in range(1, dim + 1):
                    total += a[i - 1][r_ - 1] * t.arrays[0][(r_, s)] * at[s - 1][j - 1]
            assert moved.arrays[0][(i, j)] == total


def test_act_on_tensor_scalar_jet_is_composition():
    # a (0,0) tensor jet just composes with the inverse germ
    rng = random.Random(23)
    dim = 2
    t = rand_tensor(rng, dim, (0, 0), 2)
    g = rand_diffeo(rng, dim, 3)
    moved = act_on_tensor(g, t)
    gp = invert_jet(g).to_polys()
    expected = poly.p_compose(t.to_polys()[()], gp, 2, nvars_out=dim)
    assert moved == TensorJet.from_polys(dim, (0, 0), 2, {(): expected})


def test_act_on_tensor_is_a_left_action():
    rng = random.Random(29)
    for dim, valence, order in ((2, (1, 1), 2), (3, (0, 2), 1)):
        t = rand_tensor(rng, dim, valence, order)
        g = rand_diffeo(rng, dim, order + 1)
        h = rand_diffeo(rng, dim, order + 1)
        assert act_on_tensor(compose_jets(g, h), t) == \
            act_on_tensor(g, act_on_tensor(h, t))


def test_cotangent_action_linear_jets_touch_only_uu_block_off_diagonal():
    # for a purely linear jet the mixing matrix vanishes, so each block
    # transforms separately by the matrix/inverse pair
    rng = random.Random(31)
    dim = 3
    pt = rand_fibre_point(rng, dim)
    g = rand_linear_diffeo(rng, dim, 2)
    from jetcalc.linalg import invert_matrix
    a = g.linear_matrix()
    at = invert_matrix(a)
    moved = act_on_cotangent_fibre(g, pt)
    assert moved.x_dot == pt.x_dot.gl_transform(a, at)
    assert moved.phi_ll == pt.phi_ll.gl_transform(a, at)
    assert moved.phi_lu == pt.phi_lu.gl_transform(a, at)
    assert moved.phi_ul == pt.phi_ul.gl_transform(a, at)
    assert moved.phi_uu == pt.phi_uu.gl_transform(a, at)


def test_cotangent_action_kernel_mixing_is_bilinear_shift():
    # for a kernel 2-jet (identity linear part, quadratic block a2) the
    # covector is fixed and the ll block picks up M-weighted contributions,
    # M_{ρλ} = a2^κ_{ρλ} x_dot_κ
    rng = random.Random(37)
    dim = 2
    pt = rand_fibre_point(rng, dim)
    g = rand_kernel_jet(rng, dim, 2, 1)
    a2 = g.coeffs[1]
    moved = act_on_cotangent_fibre(g, pt)
    assert moved.x_dot == pt.x_dot
    assert moved.phi_uu == pt.phi_uu

    def m_entry(rho, lam):
        return sum(a2[(kappa, rho, lam)] * pt.x_dot[(kappa,)]
                   for kappa in range(1, dim + 1))

    for lam in range(1, dim + 1):
        for mu in range(1, dim + 1):
            expected = pt.phi_ll[(lam, mu)]
            expected += sum(m_entry(sig, mu) * pt.phi_lu[(lam, sig)]
                            for sig in range(1, dim + 1))
            expected += sum(m_entry(rho, lam) * pt.phi_ul[(rho, mu)]
                            for rho in range(1, dim + 1))
            expected += sum(m_entry(rho, lam) * m_entry(sig, mu) * pt.phi_uu[(rho, sig)]
                            for rho in range(1, dim + 1)
                            for sig in range(1, dim + 1))
            assert moved.phi_ll[(lam, mu)] == expected


def test_cotangent_action_is_a_left_action():
    rng = random.Random(41)
    for dim in (2, 3):
        for _ in range(5):
            pt = rand_fibre_point(rng, dim)
            g = rand_diffeo(rng, dim, 2)
            h = rand_diffeo(rng, dim, 2)
            assert act_on_cotangent_fibre(compose_jets(g, h), pt) == \
                act_on_cotangent_fibre(g, act_on_cotangent_fibre(h, pt))


def test_order_cap_warns_and_is_configurable():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        DiffeoJet.identity(2, 5)
        assert any(issubclass(w.category, RuntimeWarning) for w in caught)
    old = set_order_cap(6)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            DiffeoJet.identity(2, 5)
            assert not caught
    finally:
        set_order_cap(old)


def test_truncated_jets():
    rng = random.Random(43)
    g = rand_diffeo(rng, 2, 3)
    t2 = g.truncated(2)
    assert t2.order == 2 and t2.coeffs[0] == g.coeffs[0]
    conn = rand_connection(rng, 2, 2)
    assert conn.truncated(1).order == 1
    with pytest.raises(ValueError):
        conn.truncated(5)


def test_kernel_jet_validates_orders():
    dim = 2
    arr = ComponentArray(dim, (UP, LO, LO), (("s", (1, 2)),))
    arr[(1, 1, 2)] = 1
    with pytest.raises(ValueError):
        kernel_jet(dim, 3, 2, {2: arr})  # order-2 data inside the fixed part
    g = kernel_jet(dim, 3, 1, {2: arr})
    assert g.coeffs[1][(1, 1, 2)] == 1
