"""Jets of diffeomorphisms, connections, and tensor fields, with actions.

A jet is stored as the list of its derivative value arrays at the origin:
for a map germ f with f(0)=0 the order-i array holds
``a^λ_{μ1..μi} = ∂_{μ1}..∂_{μi} f^λ (0)`` (symmetric in the lower indices),
and analogously for connection and tensor-field jets.  The corresponding
Taylor polynomial divides by the usual multinomial factorials, and all group
operations (composition, inversion, prolonged actions on connections and
tensors) are carried out exactly on truncated polynomials and read back off
as derivative values.

Connection components follow the horizontal-lift sign convention: the
stored Λ^λ_{μν} transforms with a *minus* second-derivative inhomogeneous
term, i.e. Λ = -Γ in terms of the textbook Christoffel symbols.  Every sign
downstream (covariant derivative, curvature, Levi-Civita) is fixed by this
one choice and cross-checked by the identity tests.

Jet orders above a soft cap (default 4) trigger a RuntimeWarning — the
arithmetic stays exact at any order, but cost grows quickly.  Raise the cap
with :func:`set_order_cap` when higher orders are intended.
"""

from __future__ import annotations

import warnings
from fractions import Fraction

from jetcalc import poly
from jetcalc.linalg import determinant, invert_matrix
from jetcalc.symcore import LO, UP, ComponentArray, all_indices, rat

_ORDER_CAP = [4]


def order_cap() -> int:
    """Current soft cap on jet orders."""
    return _ORDER_CAP[0]


def set_order_cap(n: int) -> int:
    """Raise (or lower) the soft order cap; returns the previous value."""
    old = _ORDER_CAP[0]
    _ORDER_CAP[0] = int(n)
    return old


def _check_order_cap(order, what):
    if order > _ORDER_CAP[0]:
        warnings.warn(
            f"{what} of order {order} exceeds the soft cap {_ORDER_CAP[0]}; "
            "results stay exact but cost grows fast — raise the cap with "
            "set_order_cap() to silence this",
            RuntimeWarning, stacklevel=3)


def _sym_group(first, count):
    """Symmetric group declaration over `count` slots starting at `first`."""
    if count >= 2:
        return (("s", tuple(range(first, first + count))),)
    return ()


# ---------------------------------------------------------------------------
# jet types
# ---------------------------------------------------------------------------


class DiffeoJet:
    """Jet of an origin-preserving diffeomorphism germ.

    coeffs[i] is the order-(i+1) derivative array with slots (u, l, ..., l)
    (one upper, i+1 symmetric lower); the linear part must be invertible.
    """

    def __init__(self, dim, coeffs):
        coeffs = list(coeffs)
        if not coeffs:
            raise ValueError("a diffeomorphism jet needs at least its linear part")
        for i, arr in enumerate(coeffs):
            expected = (UP,) + (LO,) * (i + 1)
            if arr.dim != dim or arr.slots != expected:
                raise ValueError(f"order-{i + 1} array has wrong shape")
        self.dim = dim
        self.coeffs = coeffs
        mat = self.linear_matrix()
        if determinant(mat) == 0:
            raise ValueError("linear part is not invertible")
        _check_order_cap(self.order, "diffeomorphism jet")

    @property
    def order(self):
        return len(self.coeffs)

    @classmethod
    def identity(cls, dim, order):
        coeffs = [_diffeo_coeff_array(dim, i + 1) for i in range(order)]
        for lam in range(1, dim + 1):
            coeffs[0][(lam, lam)] = 1
        return cls(dim, coeffs)

    @classmethod
    def from_linear(cls, dim, order, matrix):
        """Jet of a linear map (rows of `matrix` give a^λ_μ, 0-based lists)."""
        g = cls.identity(dim, order)
        for lam in range(1, dim + 1):
            for mu in range(1, dim + 1):
                g.coeffs[0][(lam, mu)] = rat(matrix[lam - 1][mu - 1])
        if determinant(g.linear_matrix()) == 0:
            raise ValueError("linear part is not invertible")
        return g

    def linear_matrix(self):
        return [[self.coeffs[0][(lam, mu)] for mu in range(1, self.dim + 1)]
                for lam in range(1, self.dim + 1)]

    def truncated(self, order):
        if not 1 <= order <= self.order:
            raise ValueError(f"cannot truncate an order-{self.order} jet to order {order}")
        return DiffeoJet(self.dim, [arr.copy() for arr in self.coeffs[:order]])

    def to_polys(self, max_deg=None):
        """Component Taylor polynomials (derivative values / factorials)."""
        max_deg = self.order if max_deg is None else min(max_deg, self.order)
        out = [dict() for _ in range(self.dim)]
        for i, arr in enumerate(self.coeffs[:max_deg]):
            for key, value in arr.nonzero_items():
                lam, idx = key[0], key[1:]
                exp = poly.exponent_of_index_tuple(idx, self.dim)
                out[lam - 1][exp] = value / poly.factorial_of_exponent(exp)
        return out

    @classmethod
    def from_polys(cls, dim, order, polys):
        coeffs = [_diffeo_coeff_array(dim, i + 1) for i in range(order)]
        for lam in range(1, dim + 1):
            for exp, c in polys[lam - 1].items():
                deg = sum(exp)
                if deg == 0:
                    if c != 0:
                        raise ValueError("jet polynomials must vanish at the origin")
                    continue
                if deg > order:
                    continue
                idx = poly.index_tuple_of_exponent(exp)
                coeffs[deg - 1][(lam,) + idx] = c * poly.factorial_of_exponent(exp)
        return cls(dim, coeffs)

    def __eq__(self, other):
        if not isinstance(other, DiffeoJet):
            return NotImplemented
        return (self.dim, self.order) == (other.dim, other.order) and \
            all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def __repr__(self):
        return f"DiffeoJet(dim={self.dim}, order={self.order})"


def _diffeo_coeff_array(dim, order):
    return ComponentArray(dim, (UP,) + (LO,) * order, _sym_group(1, order))


class ConnectionJet:
    """Jet of a linear connection's coefficient functions.

    arrays[i] holds the i-th partial derivative values of Λ^λ_{μν} at the
    origin, with slots (u λ, l μ, l ν, l σ1..σi); the trailing derivative
    block is symmetric, and (μ, ν) is symmetric exactly when the connection
    is classical (symmetric=True).
    """

    def __init__(self, dim, order, arrays, symmetric):
        arrays = list(arrays)
        if len(arrays) != order + 1:
            raise ValueError(f"an order-{order} connection jet needs {order + 1} arrays")
        for i, arr in enumerate(arrays):
            expected = (UP, LO, LO) + (LO,) * i
            if arr.dim != dim or arr.slots != expected:
                raise ValueError(f"derivative-{i} array has wrong shape")
            if symmetric and not _has_symmetric_values(arr, 1, 2):
                raise ValueError("connection flagged symmetric has asymmetric values")
        self.dim = dim
        self.order = order
        self.arrays = arrays
        self.symmetric = bool(symmetric)
        _check_order_cap(order, "connection jet")

    @classmethod
    def zero(cls, dim, order, symmetric=True):
        return cls(dim, order, [connection_array(dim, i, symmetric)
                                for i in range(order + 1)], symmetric)

    def truncated(self, order):
        if not 0 <= order <= self.order:
            raise ValueError(f"cannot truncate an order-{self.order} jet to order {order}")
        return ConnectionJet(self.dim, order,
                             [a.copy() for a in self.arrays[:order + 1]],
                             self.symmetric)

    def to_polys(self):
        """dict (λ,μ,ν) -> truncated polynomial of that component function."""
        out = {key: {} for key in all_indices(self.dim, 3)}
        for i, arr in enumerate(self.arrays):
            for idx in all_indices(self.dim, 3 + i):
                value = arr[idx]
                if value == 0:
                    continue
                head, tail = idx[:3], idx[3:]
                if tuple(sorted(tail)) != tail:
                    continue  # each symmetric derivative tuple counted once
                exp = poly.exponent_of_index_tuple(tail, self.dim)
                out[head][exp] = value / poly.factorial_of_exponent(exp)
        return out

    @classmethod
    def from_polys(cls, dim, order, polys, symmetric):
        arrays = [connection_array(dim, i, symmetric) for i in range(order + 1)]
        _fill_arrays_checked(arrays, order, polys)
        return cls(dim, order, arrays, symmetric)

    def __eq__(self, other):
        if not isinstance(other, ConnectionJet):
            return NotImplemented
        return (self.dim, self.order) == (other.dim, other.order) and \
            all(a == b for a, b in zip(self.arrays, other.arrays))

    def __repr__(self):
        kind = "symmetric" if self.symmetric else "non-symmetric"
        return f"ConnectionJet(dim={self.dim}, order={self.order}, {kind})"


def _fill_arrays_checked(arrays, order, polys):
    """Install component polynomials as derivative arrays, verifying that
    values agree wherever declared symmetries identify components."""
    seen = [dict() for _ in range(order + 1)]
    for head, pp in polys.items():
        for exp, c in pp.items():
            deg = sum(exp)
            if deg > order:
                continue
            idx = poly.index_tuple_of_exponent(exp)
            value = c * poly.factorial_of_exponent(exp)
            arr = arrays[deg]
            full = tuple(head) + idx
            key, sign = arr.canonicalize(full)
            if sign == 0:
                if value != 0:
                    raise ValueError(
                        f"component at {full} must vanish by antisymmetry")
                continue
            prev = seen[deg].get(key)
            if prev is None:
                seen[deg][key] = sign * value
                arr[full] = value
            elif prev != sign * value:
                raise ValueError(
                    f"component functions violate the declared symmetry at {full}")
    return arrays


def connection_array(dim, n_derivs, symmetric):
    groups = (("s", (1, 2)),) if symmetric else ()
    groups += _sym_group(3, n_derivs)
    return ComponentArray(dim, (UP, LO, LO) + (LO,) * n_derivs, groups)


def _has_symmetric_values(arr, pos_a, pos_b):
    declared = any(set((pos_a, pos_b)) <= set(pos) and kind == "s"
                   for kind, pos in arr.groups)
    if declared:
        return True
    for idx in all_indices(arr.dim, len(arr.slots)):
        swapped = list(idx)
        swapped[pos_a], swapped[pos_b] = swapped[pos_b], swapped[pos_a]
        if arr[idx] != arr[tuple(swapped)]:
            return False
    return True


class TensorJet:
    """Jet of a (p, q) tensor field: p upper then q lower slots.

    arrays[i] appends i symmetric derivative slots after the valence slots.
    """

    def __init__(self, dim, valence, order, arrays):
        p, q = valence
        if p < 0 or q < 0:
            raise ValueError("valence components must be nonnegative")
        arrays = list(arrays)
        if len(arrays) != order + 1:
            raise ValueError(f"an order-{order} tensor jet needs {order + 1} arrays")
        for i, arr in enumerate(arrays):
            expected = (UP,) * p + (LO,) * q + (LO,) * i
            if arr.dim != dim or arr.slots != expected:
                raise ValueError(f"derivative-{i} array has wrong shape")
        self.dim = dim
        self.valence = (p, q)
        self.order = order
        self.arrays = arrays
        _check_order_cap(order, "tensor jet")

    @classmethod
    def zero(cls, dim, valence, order):
        return cls(dim, valence, order,
                   [tensor_array(dim, valence, i) for i in range(order + 1)])

    def truncated(self, order):
        if not 0 <= order <= self.order:
            raise ValueError(f"cannot truncate an order-{self.order} jet to order {order}")
        return TensorJet(self.dim, self.valence, order,
                         [a.copy() for a in self.arrays[:order + 1]])

    def to_polys(self):
        p, q = self.valence
        nval = p + q
        out = {key: {} for key in all_indices(self.dim, nval)}
        for i, arr in enumerate(self.arrays):
            for idx in all_indices(self.dim, nval + i):
                value = arr[idx]
                if value == 0:
                    continue
                head, tail = idx[:nval], idx[nval:]
                if tuple(sorted(tail)) != tail:
                    continue
                exp = poly.exponent_of_index_tuple(tail, self.dim)
                out[head][exp] = value / poly.factorial_of_exponent(exp)
        return out

    @classmethod
    def from_polys(cls, dim, valence, order, polys):
        arrays = [tensor_array(dim, valence, i) for i in range(order + 1)]
        _fill_arrays_checked(arrays, order, polys)
        return cls(dim, valence, order, arrays)

    def __eq__(self, other):
        if not isinstance(other, TensorJet):
            return NotImplemented
        return (self.dim, self.valence, self.order) == \
            (other.dim, other.valence, other.order) and \
            all(a == b for a, b in zip(self.arrays, other.arrays))

    def __repr__(self):
        return (f"TensorJet(dim={self.dim}, valence={self.valence}, "
                f"order={self.order})")


def tensor_array(dim, valence, n_derivs):
    p, q = valence
    return ComponentArray(dim, (UP,) * p + (LO,) * q + (LO,) * n_derivs,
                          _sym_group(p + q, n_derivs))


class CotangentFibrePoint:
    """A point of the cotangent bundle's (0,2)-tensor fibre over a covector.

    Holds the base covector components x_dot and the four blocks of a
    (0,2)-tensor on the cotangent space: in the induced frame
    (d^λ, d_dot_λ) the tensor reads
    phi_ll[λμ] d^λ⊗d^μ + phi_lu[λμ] d^λ⊗d_dot_μ +
    phi_ul[λμ] d_dot_λ⊗d^μ + phi_uu[λμ] d_dot_λ⊗d_dot_μ,
    where barred (velocity) indices count as upper for the linear action.
    """

    def __init__(self, dim, x_dot, phi_ll, phi_lu, phi_ul, phi_uu):
        shapes = [(x_dot, (LO,)), (phi_ll, (LO, LO)), (phi_lu, (LO, UP)),
                  (phi_ul, (UP, LO)), (phi_uu, (UP, UP))]
        for arr, slots in shapes:
            if arr.dim != dim or arr.slots != slots:
                raise ValueError("fibre point block has wrong shape")
        self.dim = dim
        self.x_dot = x_dot
        self.phi_ll = phi_ll
        self.phi_lu = phi_lu
        self.phi_ul = phi_ul
        self.phi_uu = phi_uu

    @classmethod
    def zero(cls, dim):
        return cls(dim,
                   ComponentArray(dim, (LO,)),
                   ComponentArray(dim, (LO, LO)),
                   ComponentArray(dim, (LO, UP)),
                   ComponentArray(dim, (UP, LO)),
                   ComponentArray(dim, (UP, UP)))

    def blocks(self):
        return (self.x_dot, self.phi_ll, self.phi_lu, self.phi_ul, self.phi_uu)

    def __eq__(self, other):
        if not isinstance(other, CotangentFibrePoint):
            return NotImplemented
        return self.dim == other.dim and all(
            a == b for a, b in zip(self.blocks(), other.blocks()))

    def phi_add(self, other):
        """Sum of the tensor blocks over a shared base covector."""
        if self.x_dot != other.x_dot:
            raise ValueError("fibre points lie over different covectors")
        return CotangentFibrePoint(
            self.dim, self.x_dot.copy(),
            self.phi_ll + other.phi_ll, self.phi_lu + other.phi_lu,
            self.phi_ul + other.phi_ul, self.phi_uu + other.phi_uu)

    def phi_scaled(self, factor):
        return CotangentFibrePoint(
            self.dim, self.x_dot.copy(),
            self.phi_ll.scaled(factor), self.phi_lu.scaled(factor),
            self.phi_ul.scaled(factor), self.phi_uu.scaled(factor))

    def __repr__(self):
        return f"CotangentFibrePoint(dim={self.dim})"


# ---------------------------------------------------------------------------
# group operations
# ---------------------------------------------------------------------------


def compose_jets(g: DiffeoJet, h: DiffeoJet) -> DiffeoJet:
    """Jet of the composite map g∘h (h applied first)."""
    if g.dim != h.dim:
        raise ValueError("dimension mismatch")
    order = min(g.order, h.order)
    gp = g.to_polys(order)
    hp = h.to_polys(order)
    comp = [poly.p_compose(p, hp, order, nvars_out=g.dim) for p in gp]
    return DiffeoJet.from_polys(g.dim, order, comp)


def invert_jet(g: DiffeoJet) -> DiffeoJet:
    """Jet of the inverse germ: compose_jets(g, invert_jet(g)) is identity."""
    inv_polys = _invert_polys(g.to_polys(), g.dim, g.order)
    return DiffeoJet.from_polys(g.dim, g.order, inv_polys)


def _invert_polys(fp, dim, order):
    """Inverse of origin-preserving polynomial components, exact to `order`."""
    a_inv = invert_matrix(
        [[fp[i].get(tuple(1 if k == j else 0 for k in range(dim)), Fraction(0))
          for j in range(dim)] for i in range(dim)])
    gp = [dict() for _ in range(dim)]
    for i in range(dim):
        for j in range(dim):
            if a_inv[i][j] != 0:
                gp[i][tuple(1 if k == j else 0 for k in range(dim))] = a_inv[i][j]
    # Each pass kills the lowest remaining error degree, so `order - 1`
    # corrections suffice.
    for _ in range(order - 1):
        residual = [poly.p_compose(p, gp, order, nvars_out=dim) for p in fp]
        for i in range(dim):
            exp = tuple(1 if k == i else 0 for k in range(dim))
            residual[i] = poly.p_add(residual[i], {exp: Fraction(-1)})
        for i in range(dim):
            correction = {}
            for j in range(dim):
                if a_inv[i][j] != 0 and residual[j]:
                    poly.p_add_into(correction, residual[j], -a_inv[i][j])
            gp[i] = poly.p_add(gp[i], correction)
    return gp


def _jacobian(polys, dim, max_deg):
    """J[i][j] = ∂(polys[i])/∂x_j, truncated."""
    return [[poly.p_truncate(poly.p_diff(polys[i], j + 1), max_deg)
             for j in range(dim)] for i in range(dim)]


def _compose_matrix(mat, subs, dim, max_deg):
    return [[poly.p_compose(entry, subs, max_deg, nvars_out=dim) if entry else {}
             for entry in row] for row in mat]


def _contract_polys_slotwise(comp_polys, roles, jac_fwd, jac_inv, dim, max_deg):
    """Contract a table of component polynomials slot by slot.

    comp_polys maps index tuples to polynomials; roles[k] says what to do
    with slot k: "fwd" contracts new^i = Σ_j jac_fwd[i][j] old^j (an upper
    slot), "inv" contracts new_i = Σ_j jac_inv[j][i] old_j (a lower slot),
    None leaves the slot alone.
    """
    n = len(roles)
    cur = comp_polys
    for pos in range(n):
        role = roles[pos]
        if role is None:
            continue
        nxt = {idx: {} for idx in cur}
        for idx, pp in cur.items():
            if not pp:
                continue
            j = idx[pos]
            for i in range(1, dim + 1):
                factor = (jac_fwd[i - 1][j - 1] if role == "fwd"
                          else jac_inv[j - 1][i - 1])
                if not factor:
                    continue
                target = idx[:pos] + (i,) + idx[pos + 1:]
                poly.p_add_into(nxt[target], poly.p_mul(pp, factor, max_deg))
        cur = nxt
    return cur


def act_on_connection(g: DiffeoJet, conn: ConnectionJet) -> ConnectionJet:
    """Transform a connection jet by a diffeomorphism jet.

    Needs g.order >= conn.order + 2 (the result's top derivatives see two
    more orders of g).  The transformed coefficient functions are
    Λ̄^λ_{μν} = (∂F^λ_ρ ∘ G) (Λ^ρ_{στ}∘G · ∂G^σ_μ · ∂G^τ_ν  −  ∂_μ∂_ν G^ρ)
    with F the map polynomials and G their inverse; the inhomogeneous term
    enters with a minus sign (horizontal-lift convention).
    """
    r = conn.order
    if g.dim != conn.dim:
        raise ValueError("dimension mismatch")
    if g.order < r + 2:
        raise ValueError(f"need a diffeomorphism jet of order >= {r + 2}")
    dim = conn.dim
    fp = g.to_polys(r + 2)
    gp = _invert_polys(fp, dim, r + 2)
    jac_inv = _jacobian(gp, dim, r + 1)          # ∂G^σ/∂x̄^μ
    jac_fwd = _compose_matrix(_jacobian(fp, dim, r + 1), gp, dim, r)
    lam = conn.to_polys()
    lam_g = {key: poly.p_compose(p, gp, r, nvars_out=dim) if p else {}
             for key, p in lam.items()}
    # stage 1: contract the last lower slot, then the middle one, with ∂G
    stage = _contract_polys_slotwise(
        lam_g, (None, "inv", "inv"), jac_fwd, jac_inv, dim, r)
    # stage 2: subtract the second-derivative inhomogeneous term
    for rho in range(1, dim + 1):
        for mu in range(1, dim + 1):
            for nu in range(1, dim + 1):
                hess = poly.p_truncate(
                    poly.p_diff(poly.p_diff(gp[rho - 1], mu), nu), r)
                poly.p_add_into(stage[(rho, mu, nu)], poly.p_neg(hess))
    # stage 3: contract the upper slot with (∂F)∘G
    out = _contract_polys_slotwise(
        stage, ("fwd", None, None), jac_fwd, jac_inv, dim, r)
    return ConnectionJet.from_polys(dim, r, out, conn.symmetric)


def act_on_tensor(g: DiffeoJet, t: TensorJet) -> TensorJet:
    """Transform a tensor-field jet by a diffeomorphism jet.

    Needs g.order >= t.order + 1.  Upper valence slots contract with the
    Jacobian of the map (composed with the inverse), lower slots with the
    Jacobian of the inverse; the whole component function is pulled back
    through the inverse.
    """
    r = t.order
    if g.dim != t.dim:
        raise ValueError("dimension mismatch")
    if g.order < r + 1:
        raise ValueError(f"need a diffeomorphism jet of order >= {r + 1}")
    dim = t.dim
    p, q = t.valence
    fp = g.to_polys(r + 1)
    gp = _invert_polys(fp, dim, r + 1)
    jac_inv = _jacobian(gp, dim, r)
    jac_fwd = _compose_matrix(_jacobian(fp, dim, r + 1), gp, dim, r)
    tp = t.to_polys()
    tp_g = {key: poly.p_compose(pp, gp, r, nvars_out=dim) if pp else {}
            for key, pp in tp.items()}
    roles = ("fwd",) * p + ("inv",) * q
    out = _contract_polys_slotwise(tp_g, roles, jac_fwd, jac_inv, dim, r)
    return TensorJet.from_polys(dim, t.valence, r, out)


def act_on_cotangent_fibre(g: DiffeoJet, point: CotangentFibrePoint) -> CotangentFibrePoint:
    """Transform a cotangent fibre point by (the 2-jet of) a diffeomorphism.

    With a the linear part, ã its inverse, a2 the quadratic derivative
    array, and M_{ρλ} = ã^κ_α a^α_{ρβ} ã^β_λ x_dot_κ, the covector and the
    four blocks transform as

        x_dot'_λ   = ã^μ_λ x_dot_μ
        phi'_ll[λμ] = ã^ρ_λ ã^σ_μ phi_ll[ρσ] + ã^ρ_λ M_{σμ} phi_lu[ρσ]
                      + M_{ρλ} ã^σ_μ phi_ul[ρσ] + M_{ρλ} M_{σμ} phi_uu[ρσ]
        phi'_lu[λμ] = ã^ρ_λ a^μ_σ phi_lu[ρσ] + M_{ρλ} a^μ_σ phi_uu[ρσ]
        phi'_ul[λμ] = a^λ_ρ ã^σ_μ phi_ul[ρσ] + a^λ_ρ M_{σμ} phi_uu[ρσ]
        phi'_uu[λμ] = a^λ_ρ a^μ_σ phi_uu[ρσ]
    """
    if g.dim != point.dim:
        raise ValueError("dimension mismatch")
    if g.order < 2:
        raise ValueError("need at least a 2-jet to move a cotangent fibre point")
    dim = g.dim
    a = g.linear_matrix()
    at = invert_matrix(a)
    a2 = g.coeffs[1]
    xd = point.x_dot

    big_m = [[Fraction(0)] * dim for _ in range(dim)]
    for rho in range(1, dim + 1):
        for lam in range(1, dim + 1):
            total = Fraction(0)
            for kappa in range(1, dim + 1):
                xk = xd[(kappa,)]
                if xk == 0:
                    continue
                for alpha in range(1, dim + 1):
                    c1 = at[kappa - 1][alpha - 1]
                    if c1 == 0:
                        continue
                    for beta in range(1, dim + 1):
                        c2 = a2[(alpha, rho, beta)] * at[beta - 1][lam - 1]
                        if c2 != 0:
                            total += c1 * c2 * xk
            big_m[rho - 1][lam - 1] = total

    new = CotangentFibrePoint.zero(dim)
    for lam in range(1, dim + 1):
        new.x_dot[(lam,)] = sum((at[mu - 1][lam - 1] * xd[(mu,)]
                                 for mu in range(1, dim + 1)), Fraction(0))
    for lam in range(1, dim + 1):
        for mu in range(1, dim + 1):
            vll = vlu = vul = vuu = Fraction(0)
            for rho in range(1, dim + 1):
                at_rl = at[rho - 1][lam - 1]
                m_rl = big_m[rho - 1][lam - 1]
                a_lr = a[lam - 1][rho - 1]
                for sig in range(1, dim + 1):
                    at_sm = at[sig - 1][mu - 1]
                    m_sm = big_m[sig - 1][mu - 1]
                    a_ms = a[mu - 1][sig - 1]
                    vll += (at_rl * at_sm * point.phi_ll[(rho, sig)]
                            + at_rl * m_sm * point.phi_lu[(rho, sig)]
                            + m_rl * at_sm * point.phi_ul[(rho, sig)]
                            + m_rl * m_sm * point.phi_uu[(rho, sig)])
                    vlu += (at_rl * a_ms * point.phi_lu[(rho, sig)]
                            + m_rl * a_ms * point.phi_uu[(rho, sig)])
                    vul += (a_lr * at_sm * point.phi_ul[(rho, sig)]
                            + a_lr * m_sm * point.phi_uu[(rho, sig)])
                    vuu += a_lr * a_ms * point.phi_uu[(rho, sig)]
            new.phi_ll[(lam, mu)] = vll
            new.phi_lu[(lam, mu)] = vlu
            new.phi_ul[(lam, mu)] = vul
            new.phi_uu[(lam, mu)] = vuu
    return new


def kernel_jet(dim, order, fixed_order, top_arrays) -> DiffeoJet:
    """Jet that is the identity through `fixed_order`, arbitrary above.

    top_arrays maps derivative order d (fixed_order < d <= order) to the
    symmetric coefficient array to install; missing orders stay zero.
    """
    if not 1 <= fixed_order <= order:
        raise ValueError("need 1 <= fixed_order <= order")
    g = DiffeoJet.identity(dim, order)
    for d, arr in top_arrays.items():
        if not fixed_order < d <= order:
            raise ValueError(f"order-{d} data conflicts with identity part")
        expected = (UP,) + (LO,) * d
        if arr.dim != dim or arr.slots != expected:
            raise ValueError(f"order-{d} array has wrong shape")
        g.coeffs[d - 1] = arr.copy()
    return g
