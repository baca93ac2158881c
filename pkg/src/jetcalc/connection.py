"""Curvature, covariant differentials, torsion, and metric connections.

Everything here is formal calculus on jets: a connection jet of order r
determines the curvature value and its first r-1 iterated covariant
differentials exactly, by polynomial arithmetic on the Taylor data.

Conventions (fixed once, in jets.py, and used consistently):

* connection components Λ^λ_{μν} carry the horizontal-lift sign, Λ = -Γ;
* the covariant derivative is ∇_σ v^ρ = ∂_σ v^ρ - Λ^ρ_{στ} v^τ on upper
  slots and ∇_σ w_ν = ∂_σ w_ν + Λ^τ_{σν} w_τ on lower slots;
* the curvature of a symmetric connection jet is stored with slot order
  (ν, ρ, λ, μ): w_ν^ρ_{λμ} = ∂_μ Λ^ρ_{λν} - ∂_λ Λ^ρ_{μν}
  + Λ^σ_{μν} Λ^ρ_{λσ} - Λ^σ_{λν} Λ^ρ_{μσ}, antisymmetric in (λ, μ), and
  satisfies [∇_λ, ∇_μ] v^ρ = w_σ^ρ_{λμ} v^σ;
* iterated covariant derivatives append their index last: the slot σ_i of
  ∇^i t is the outermost derivative.

Order budgets are enforced strictly: a request that would need more jet
data than is present raises ValueError rather than silently truncating.
"""

from __future__ import annotations

from fractions import Fraction

from jetcalc import poly
from jetcalc.jets import ConnectionJet, TensorJet, _sym_group, connection_array
from jetcalc.symcore import LO, UP, ComponentArray, all_indices


class TorsionJet:
    """Jet of a connection's torsion tensor: T^λ_{μν} antisymmetric in (μ, ν).

    arrays[i] has slots (u λ, l μ, l ν, l σ1..σi) with the derivative block
    symmetric.
    """

    def __init__(self, dim, order, arrays):
        arrays = list(arrays)
        if len(arrays) != order + 1:
            raise ValueError(f"an order-{order} torsion jet needs {order + 1} arrays")
        for i, arr in enumerate(arrays):
            expected = (UP, LO, LO) + (LO,) * i
            if arr.dim != dim or arr.slots != expected:
                raise ValueError(f"derivative-{i} array has wrong shape")
        self.dim = dim
        self.order = order
        self.arrays = arrays

    @classmethod
    def zero(cls, dim, order):
        return cls(dim, order, [torsion_array(dim, i) for i in range(order + 1)])

    def is_zero(self):
        return all(a.is_zero() for a in self.arrays)

    def as_tensor_jet(self) -> TensorJet:
        """View as a plain (1,2) tensor jet (for the prolonged action)."""
        out = TensorJet.zero(self.dim, (1, 2), self.order)
        for i, arr in enumerate(self.arrays):
            out.arrays[i] = ComponentArray.from_function(
                self.dim, out.arrays[i].slots, arr.__getitem__,
                out.arrays[i].groups)
        return out

    @classmethod
    def from_tensor_jet(cls, t: TensorJet):
        if t.valence != (1, 2):
            raise ValueError("torsion is a (1,2) tensor")
        arrays = []
        for i, arr in enumerate(t.arrays):
            out = torsion_array(t.dim, i)
            for idx in all_indices(t.dim, 3 + i):
                value = arr[idx]
                swapped = (idx[0], idx[2], idx[1]) + idx[3:]
                if value != -arr[swapped]:
                    raise ValueError("tensor jet is not antisymmetric in (μ, ν)")
                out[idx] = value
            arrays.append(out)
        return cls(t.dim, t.order, arrays)

    def __eq__(self, other):
        if not isinstance(other, TorsionJet):
            return NotImplemented
        return (self.dim, self.order) == (other.dim, other.order) and \
            all(a == b for a, b in zip(self.arrays, other.arrays))

    def __repr__(self):
        return f"TorsionJet(dim={self.dim}, order={self.order})"


def torsion_array(dim, n_derivs):
    return ComponentArray(dim, (UP, LO, LO) + (LO,) * n_derivs,
                          (("a", (1, 2)),) + _sym_group(3, n_derivs))


class MetricJet:
    """Jet of a pseudo-Riemannian metric: symmetric (0,2) with invertible value."""

    def __init__(self, dim, order, arrays):
        arrays = list(arrays)
        if len(arrays) != order + 1:
            raise ValueError(f"an order-{order} metric jet needs {order + 1} arrays")
        for i, arr in enumerate(arrays):
            expected = (LO, LO) + (LO,) * i
            if arr.dim != dim or arr.slots != expected:
                raise ValueError(f"derivative-{i} array has wrong shape")
        from jetcalc.linalg import determinant
        value = [[arrays[0][(i, j)] for j in range(1, dim + 1)]
                 for i in range(1, dim + 1)]
        if determinant(value) == 0:
            raise ValueError("metric value matrix is singular")
        self.dim = dim
        self.order = order
        self.arrays = arrays

    def as_tensor_jet(self) -> TensorJet:
        out = TensorJet.zero(self.dim, (0, 2), self.order)
        for i, arr in enumerate(self.arrays):
            out.arrays[i] = ComponentArray.from_function(
                self.dim, out.arrays[i].slots, arr.__getitem__,
                out.arrays[i].groups)
        return out

    def to_polys(self):
        return self.as_tensor_jet().to_polys()

    def __eq__(self, other):
        if not isinstance(other, MetricJet):
            return NotImplemented
        return (self.dim, self.order) == (other.dim, other.order) and \
            all(a == b for a, b in zip(self.arrays, other.arrays))

    def __repr__(self):
        return f"MetricJet(dim={self.dim}, order={self.order})"


def metric_array(dim, n_derivs):
    return ComponentArray(dim, (LO, LO) + (LO,) * n_derivs,
                          (("s", (0, 1)),) + _sym_group(2, n_derivs))


class CurvatureValue:
    """Value of an iterated covariant differential of the curvature tensor.

    Wraps a ComponentArray with slots (l ν, u ρ, l λ, l μ, l σ1..σ_n):
    component [ν, ρ, λ, μ, σ1..σn] is (∇_{σn}..∇_{σ1} w)_ν^ρ_{λμ},
    antisymmetric in (λ, μ).  The derivative slots are *not* symmetric:
    covariant derivatives do not commute.
    """

    def __init__(self, array: ComponentArray, n_derivs=None):
        if n_derivs is None:
            n_derivs = len(array.slots) - 4
        expected = (LO, UP, LO, LO) + (LO,) * n_derivs
        if array.slots != expected:
            raise ValueError("curvature array has wrong slot layout")
        if ("a", (2, 3)) not in array.groups:
            array = _check_antisym_pair(array)
        self.array = array
        self.dim = array.dim
        self.n_derivs = n_derivs

    def __getitem__(self, idx):
        return self.array[idx]

    def __eq__(self, other):
        if not isinstance(other, CurvatureValue):
            return NotImplemented
        return self.array == other.array

    def is_zero(self):
        return self.array.is_zero()

    def gl_transform(self, mat, mat_inv):
        return CurvatureValue(self.array.gl_transform(mat, mat_inv), self.n_derivs)

    def __repr__(self):
        return f"CurvatureValue(dim={self.dim}, n_derivs={self.n_derivs})"


def curvature_value_array(dim, n_derivs):
    return ComponentArray(dim, (LO, UP, LO, LO) + (LO,) * n_derivs,
                          (("a", (2, 3)),))


def _check_antisym_pair(array):
    out = curvature_value_array(array.dim, len(array.slots) - 4)
    for idx in all_indices(array.dim, len(array.slots)):
        value = array[idx]
        swapped = idx[:2] + (idx[3], idx[2]) + idx[4:]
        if value != -array[swapped]:
            raise ValueError("curvature array is not antisymmetric in (λ, μ)")
        out[idx] = value
    return out


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def split_connection(conn: ConnectionJet):
    """Split into the symmetric part and the torsion: Λ = Λ̃ + T/2.

    Returns (symmetric ConnectionJet, TorsionJet); exact recombination via
    :func:`combine_connection`.
    """
    dim, order = conn.dim, conn.order
    sym_arrays = []
    tors_arrays = []
    for i, arr in enumerate(conn.arrays):
        sym = connection_array(dim, i, symmetric=True)
        tor = torsion_array(dim, i)
        for key in sym.canonical_keys():
            flipped = (key[0], key[2], key[1]) + key[3:]
            sym[key] = (arr[key] + arr[flipped]) / 2
        for key in tor.canonical_keys():
            flipped = (key[0], key[2], key[1]) + key[3:]
            tor[key] = arr[key] - arr[flipped]
        sym_arrays.append(sym)
        tors_arrays.append(tor)
    return (ConnectionJet(dim, order, sym_arrays, symmetric=True),
            TorsionJet(dim, order, tors_arrays))


def combine_connection(sym: ConnectionJet, torsion: TorsionJet) -> ConnectionJet:
    """Reassemble Λ = Λ̃ + T/2; inverse of :func:`split_connection`."""
    if not sym.symmetric:
        raise ValueError("first argument must be a symmetric connection jet")
    if (sym.dim, sym.order) != (torsion.dim, torsion.order):
        raise ValueError("jets have mismatched dimension or order")
    arrays = []
    for i, (s, t) in enumerate(zip(sym.arrays, torsion.arrays)):
        out = connection_array(sym.dim, i, symmetric=False)
        for key in out.canonical_keys():
            out[key] = s[key] + t[key] / 2
        arrays.append(out)
    return ConnectionJet(sym.dim, sym.order, arrays, symmetric=False)


def _require_symmetric(conn, what):
    if not conn.symmetric:
        raise ValueError(
            f"{what} is defined here for symmetric connection jets; "
            "split_connection first and use the symmetric part")


def _curvature_polys(lam_polys, dim, max_deg):
    """Polynomials of w_ν^ρ_{λμ} from the connection component polynomials."""
    out = {}
    for nu in range(1, dim + 1):
        for rho in range(1, dim + 1):
            for lam in range(1, dim + 1):
                for mu in range(1, dim + 1):
                    if lam == mu:
                        out[(nu, rho, lam, mu)] = {}
                        continue
                    if lam > mu:
                        out[(nu, rho, lam, mu)] = poly.p_neg(out[(nu, rho, mu, lam)])
                        continue
                    acc = poly.p_truncate(
                        poly.p_diff(lam_polys[(rho, lam, nu)], mu), max_deg)
                    poly.p_add_into(
                        acc,
                        poly.p_neg(poly.p_truncate(
                            poly.p_diff(lam_polys[(rho, mu, nu)], lam), max_deg)))
                    for sig in range(1, dim + 1):
                        poly.p_add_into(acc, poly.p_mul(
                            lam_polys[(sig, mu, nu)], lam_polys[(rho, lam, sig)],
                            max_deg))
                        poly.p_add_into(acc, poly.p_neg(poly.p_mul(
                            lam_polys[(sig, lam, nu)], lam_polys[(rho, mu, sig)],
                            max_deg)))
                    out[(nu, rho, lam, mu)] = acc
    return out


def _covariant_step(table, variances, lam_polys, dim, max_deg):
    """One formal covariant derivative of a table of component polynomials.

    `table` maps full index tuples to polynomials; `variances` gives the
    slot variances.  The result has one extra lower slot appended (the new,
    outermost derivative index), each entry truncated at max_deg.
    """
    n = len(variances)
    out = {}
    for idx, pp in table.items():
        for sig in range(1, dim + 1):
            out[idx + (sig,)] = poly.p_truncate(poly.p_diff(pp, sig), max_deg)
    for idx, pp in table.items():
        if not pp:
            continue
        for sig in range(1, dim + 1):
            for k in range(n):
                a_k = idx[k]
                for tau in range(1, dim + 1):
                    swapped = idx[:k] + (tau,) + idx[k + 1:]
                    if variances[k] == UP:
                        factor = poly.p_neg(lam_polys[(a_k, sig, tau)])
                    else:
                        factor = lam_polys[(tau, sig, a_k)]
                    if not factor:
                        continue
                    poly.p_add_into(out[swapped + (sig,)],
                                    poly.p_mul(factor, pp, max_deg))
    return out


def _extract_value(table, variances, dim, groups=()):
    """Values at the origin of a polynomial table, as a ComponentArray."""
    slots = tuple(variances)
    return ComponentArray.from_function(
        dim, slots, lambda idx: poly.p_eval_zero(table[idx]), groups)


def curvature(conn: ConnectionJet) -> CurvatureValue:
    """Curvature tensor value of a symmetric connection jet (order >= 1)."""
    return curvature_differentials(conn, 0)[0]


def curvature_differentials(conn: ConnectionJet, max_derivs=None):
    """[w, ∇w, ..., ∇^k w] values; needs conn.order >= k + 1.

    Each entry i is a CurvatureValue with i derivative slots, the newest
    index last (outermost derivative).
    """
    _require_symmetric(conn, "curvature")
    if conn.order < 1:
        raise ValueError("curvature needs a connection jet of order >= 1")
    if max_derivs is None:
        max_derivs = conn.order - 1
    if max_derivs < 0:
        raise ValueError("max_derivs must be >= 0")
    if max_derivs > conn.order - 1:
        raise ValueError(
            f"∇^{max_derivs} of curvature needs a connection jet of order "
            f">= {max_derivs + 1}, got {conn.order}")
    dim = conn.dim
    lam_polys = conn.to_polys()
    table = _curvature_polys(lam_polys, dim, conn.order - 1)
    variances = [LO, UP, LO, LO]
    out = []
    for i in range(max_derivs + 1):
        arr = _extract_value(table, variances, dim, groups=(("a", (2, 3)),))
        out.append(CurvatureValue(arr, i))
        if i < max_derivs:
            table = _covariant_step(table, variances, lam_polys, dim,
                                    conn.order - 1 - (i + 1))
            variances = variances + [LO]
    return out


def covariant_differential(conn: ConnectionJet, t: TensorJet, steps=None):
    """[t, ∇t, ..., ∇^k t] values of the iterated covariant differentials.

    Each step appends one (outermost) lower derivative slot: a formal
    partial derivative plus one connection correction per slot (minus on
    upper slots, plus on lower slots, including previously created
    derivative slots).  Needs t.order >= k and conn.order >= k - 1.
    """
    _require_symmetric(conn, "the covariant differential")
    if t.dim != conn.dim:
        raise ValueError("dimension mismatch")
    max_steps = min(t.order, conn.order + 1)
    if steps is None:
        steps = max_steps
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if steps > max_steps:
        raise ValueError(
            f"∇^{steps} of an order-{t.order} tensor jet over an order-"
            f"{conn.order} connection jet is not determined; max is {max_steps}")
    dim = conn.dim
    p, q = t.valence
    lam_polys = conn.to_polys()
    table = t.to_polys()
    variances = [UP] * p + [LO] * q
    out = [_extract_value(table, variances, dim)]
    for i in range(1, steps + 1):
        table = _covariant_step(table, variances, lam_polys, dim, t.order - i)
        variances = variances + [LO]
        out.append(_extract_value(table, variances, dim))
    return out


def levi_civita(metric: MetricJet) -> ConnectionJet:
    """Connection jet of the metric's Levi-Civita connection (order r-1).

    Components are the negated textbook Christoffel symbols
    -(1/2) g^{ρσ} (∂_μ g_{σν} + ∂_ν g_{σμ} - ∂_σ g_{μν}), the unique
    symmetric connection with ∇g = 0 under the engine's sign convention.
    """
    if metric.order < 1:
        raise ValueError("levi_civita needs a metric jet of order >= 1")
    dim = metric.dim
    deg = metric.order - 1
    gp = metric.to_polys()
    gmat = [[gp[(i, j)] for j in range(1, dim + 1)] for i in range(1, dim + 1)]
    ginv = poly.matrix_poly_inverse(gmat, dim, deg)
    out = {}
    for rho in range(1, dim + 1):
        for mu in range(1, dim + 1):
            for nu in range(1, dim + 1):
                acc = {}
                for sig in range(1, dim + 1):
                    inner = poly.p_truncate(poly.p_diff(gp[(sig, nu)], mu), deg)
                    poly.p_add_into(inner, poly.p_truncate(
                        poly.p_diff(gp[(sig, mu)], nu), deg))
                    poly.p_add_into(inner, poly.p_neg(poly.p_truncate(
                        poly.p_diff(gp[(mu, nu)], sig), deg)))
                    poly.p_add_into(acc, poly.p_mul(ginv[rho - 1][sig - 1], inner, deg))
                out[(rho, mu, nu)] = poly.p_scale(acc, Fraction(-1, 2))
    return ConnectionJet.from_polys(dim, deg, out, symmetric=True)
