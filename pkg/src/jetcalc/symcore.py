"""Exact multi-index arrays over the rationals.

Everything downstream (jets, connections, curvature, classification) stores
its components in :class:`ComponentArray`: a dense table of
:class:`fractions.Fraction` values keyed by canonical index tuples.  Slots
carry a variance tag (``"u"`` upper / ``"l"`` lower) and may be grouped into
fully symmetric or fully antisymmetric blocks; lookups with indices in any
order are routed through the canonical representative (with a sign for
antisymmetric blocks), so storage never duplicates components related by a
declared symmetry.

Indices are 1-based throughout, matching the usual component notation
``T^1_{23}`` rather than Python's 0-based convention.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

# Re-export: Fraction already provides exact reduced-form rational arithmetic
# with positive denominators, so it serves as the engine's Rational type.
Rational = Fraction

UP = "u"
LO = "l"

ZERO = Fraction(0)
ONE = Fraction(1)


def rat(value) -> Fraction:
    """Coerce ints, Fractions, or 'p/q' strings to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_rational(value: Fraction) -> str:
    """Render a Fraction as 'p' or 'p/q' (the str() form round-trips)."""
    return str(Fraction(value))


def sym_index_count(dim: int, length: int) -> int:
    """Number of nondecreasing index tuples of the given length in 1..dim."""
    if length < 0:
        raise ValueError("index tuple length must be >= 0")
    return math.comb(dim + length - 1, length)


def sym_indices(dim: int, length: int):
    """Iterate all nondecreasing index tuples of the given length in 1..dim."""
    return itertools.combinations_with_replacement(range(1, dim + 1), length)


def all_indices(dim: int, length: int):
    """Iterate all index tuples of the given length in 1..dim."""
    return itertools.product(range(1, dim + 1), repeat=length)


def perm_parity(perm) -> int:
    """Sign (+1/-1) of a permutation given as a sequence of distinct ints."""
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def _sort_with_parity(values):
    """Sort a tuple, returning (sorted_tuple, parity_sign_of_the_sort)."""
    order = sorted(range(len(values)), key=lambda k: values[k])
    return tuple(values[k] for k in order), perm_parity(order)


class ComponentArray:
    """Dense exact-rational array with declared slot symmetries.

    Parameters
    ----------
    dim:
        Index range is 1..dim for every slot.
    slots:
        Tuple of variance tags, ``"u"`` or ``"l"``, one per slot.
    groups:
        Tuple of ``(kind, positions)`` pairs with ``kind`` in ``{"s", "a"}``
        (fully symmetric / fully antisymmetric) and ``positions`` a tuple of
        distinct slot positions (0-based, ascending).  Groups must be
        pairwise disjoint and each group's slots must share a variance.

    Components are stored for canonical index tuples only: within each
    group the indices appear in nondecreasing order.  Reads and writes with
    arbitrary index order are mapped onto the canonical representative,
    picking up a sign from antisymmetric groups (and forcing zero when an
    antisymmetric group carries a repeated index).
    """

    __slots__ = ("dim", "slots", "groups", "_data")

    def __init__(self, dim, slots, groups=(), _data=None):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        slots = tuple(slots)
        if any(s not in (UP, LO) for s in slots):
            raise ValueError(f"slot tags must be '{UP}' or '{LO}': {slots!r}")
        groups = tuple((kind, tuple(pos)) for kind, pos in groups)
        seen = set()
        for kind, pos in groups:
            if kind not in ("s", "a"):
                raise ValueError(f"group kind must be 's' or 'a': {kind!r}")
            if list(pos) != sorted(pos) or len(set(pos)) != len(pos):
                raise ValueError(f"group positions must be ascending and distinct: {pos!r}")
            if any(p < 0 or p >= len(slots) for p in pos):
                raise ValueError(f"group positions out of range: {pos!r}")
            if seen & set(pos):
                raise ValueError("symmetry groups must be disjoint")
            if len({slots[p] for p in pos}) > 1:
                raise ValueError("a symmetry group must not mix variances")
            seen |= set(pos)
        self.dim = dim
        self.slots = slots
        self.groups = groups
        if _data is None:
            self._data = {key: ZERO for key in self.canonical_keys()}
        else:
            self._data = _data

    # -- canonical indexing ------------------------------------------------

    def canonicalize(self, idx):
        """Map an index tuple to (canonical_key, sign); sign 0 kills the entry."""
        idx = tuple(idx)
        if len(idx) != len(self.slots):
            raise IndexError(f"expected {len(self.slots)} indices, got {len(idx)}")
        for i in idx:
            if not 1 <= i <= self.dim:
                raise IndexError(f"index {i} out of range 1..{self.dim}")
        if not self.groups:
            return idx, 1
        key = list(idx)
        sign = 1
        for kind, pos in self.groups:
            sub = tuple(key[p] for p in pos)
            sorted_sub, parity = _sort_with_parity(sub)
            if kind == "a":
                if len(set(sorted_sub)) != len(sorted_sub):
                    return tuple(key), 0
                sign *= parity
            for p, v in zip(pos, sorted_sub):
                key[p] = v
        return tuple(key), sign

    def canonical_keys(self):
        """Iterate every canonical index tuple, in lexicographic order."""
        for idx in all_indices(self.dim, len(self.slots)):
            key, sign = self.canonicalize(idx)
            if key == idx and sign != 0:
                yield idx

    def __getitem__(self, idx):
        key, sign = self.canonicalize(idx)
        if sign == 0:
            return ZERO
        return sign * self._data[key]

    def __setitem__(self, idx, value):
        value = rat(value)
        key, sign = self.canonicalize(idx)
        if sign == 0:
            if value != 0:
                raise ValueError(
                    f"cannot store nonzero value at {idx}: an antisymmetric "
                    "group has a repeated index there")
            return
        self._data[key] = sign * value

    def add_at(self, idx, value):
        """In-place accumulate value at idx (canonicalized, signed)."""
        value = rat(value)
        key, sign = self.canonicalize(idx)
        if sign == 0:
            return
        self._data[key] += sign * value

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_entries(cls, dim, slots, entries, groups=()):
        """Build from an iterable/dict of (index_tuple, value) pairs."""
        arr = cls(dim, slots, groups)
        items = entries.items() if isinstance(entries, dict) else entries
        for idx, value in items:
            arr[tuple(idx)] = value
        return arr

    @classmethod
    def from_function(cls, dim, slots, fn, groups=()):
        """Tabulate fn over *all* index tuples, checking declared symmetries.

        Raises ValueError if fn is inconsistent with the symmetry groups, so
        this doubles as a consistency check when capturing computed data.
        """
        arr = cls(dim, slots, groups)
        for idx in all_indices(dim, len(slots)):
            value = rat(fn(idx))
            key, sign = arr.canonicalize(idx)
            if sign == 0:
                if value != 0:
                    raise ValueError(f"value at {idx} must vanish by antisymmetry")
                continue
            if key == idx:
                arr._data[key] = sign * value
            elif arr._data[key] != sign * value:
                raise ValueError(
                    f"values at {idx} and {key} violate the declared symmetry")
        return arr

    # -- basic queries -------------------------------------------------------

    @property
    def rank(self):
        return len(self.slots)

    def is_zero(self) -> bool:
        return all(v == 0 for v in self._data.values())

    def nonzero_items(self):
        """Iterate (canonical_key, value) pairs with value != 0, sorted."""
        for key in sorted(self._data):
            v = self._data[key]
            if v != 0:
                yield key, v

    def items(self):
        """Iterate all (canonical_key, value) pairs, sorted by key."""
        for key in sorted(self._data):
            yield key, self._data[key]

    def copy(self):
        return ComponentArray(self.dim, self.slots, self.groups,
                              dict(self._data))

    def __eq__(self, other):
        if not isinstance(other, ComponentArray):
            return NotImplemented
        if (self.dim, self.slots) != (other.dim, other.slots):
            return False
        if self.groups == other.groups:
            return self._data == other._data
        # Same shape, different declared symmetries: compare componentwise.
        return all(self[idx] == other[idx]
                   for idx in all_indices(self.dim, len(self.slots)))

    def __hash__(self):
        raise TypeError("ComponentArray is mutable; not hashable")

    def __repr__(self):
        nz = list(self.nonzero_items())
        shown = ", ".join(f"{k}: {v}" for k, v in nz[:6])
        more = "" if len(nz) <= 6 else f", ... ({len(nz)} nonzero)"
        return (f"ComponentArray(dim={self.dim}, slots={''.join(self.slots)}, "
                f"{{{shown}{more}}})")

    # -- arithmetic ----------------------------------------------------------

    def _check_compatible(self, other):
        if (self.dim, self.slots, self.groups) != (other.dim, other.slots, other.groups):
            raise ValueError("arrays have incompatible shape or symmetry")

    def __add__(self, other):
        self._check_compatible(other)
        data = {k: v + other._data[k] for k, v in self._data.items()}
        return ComponentArray(self.dim, self.slots, self.groups, data)

    def __sub__(self, other):
        self._check_compatible(other)
        data = {k: v - other._data[k] for k, v in self._data.items()}
        return ComponentArray(self.dim, self.slots, self.groups, data)

    def __neg__(self):
        data = {k: -v for k, v in self._data.items()}
        return ComponentArray(self.dim, self.slots, self.groups, data)

    def scaled(self, factor):
        factor = rat(factor)
        data = {k: factor * v for k, v in self._data.items()}
        return ComponentArray(self.dim, self.slots, self.groups, data)

    # -- structural operations -------------------------------------------

    def permuted(self, perm):
        """Reorder slots: new slot k is old slot perm[k].

        Symmetry groups are carried along through the permutation.
        """
        perm = tuple(perm)
        if sorted(perm) != list(range(len(self.slots))):
            raise ValueError(f"not a slot permutation: {perm!r}")
        inv = [0] * len(perm)
        for new_pos, old_pos in enumerate(perm):
            inv[old_pos] = new_pos
        new_slots = tuple(self.slots[p] for p in perm)
        new_groups = tuple((kind, tuple(sorted(inv[p] for p in pos)))
                           for kind, pos in self.groups)
        out = ComponentArray(self.dim, new_slots, new_groups)
        for key, value in self._data.items():
            if value == 0:
                continue
            out.add_at(tuple(key[p] for p in perm), value)
        return out

    def gl_transform(self, mat, mat_inv):
        """Tensorially transform by an invertible matrix (lists of Fractions).

        Upper slots contract with mat, lower slots with mat_inv, following
        the usual change-of-frame rule  new^i..._j... =
        mat[i][p] ... mat_inv[q][j] ... old^p..._q...  (0-based matrices,
        1-based component indices).  Transforms one slot at a time over the
        full (non-canonical) index table, then re-canonicalizes; the final
        capture re-checks the declared symmetries.
        """
        n = len(self.slots)
        cur = {}
        for idx in all_indices(self.dim, n):
            v = self[idx]
            if v != 0:
                cur[idx] = v
        for pos in range(n):
            up = self.slots[pos] == UP
            nxt = {}
            for key, v in cur.items():
                j = key[pos]
                for i in range(1, self.dim + 1):
                    c = mat[i - 1][j - 1] if up else mat_inv[j - 1][i - 1]
                    if c == 0:
                        continue
                    new_key = key[:pos] + (i,) + key[pos + 1:]
                    acc = nxt.get(new_key)
                    nxt[new_key] = v * c if acc is None else acc + v * c
            cur = nxt
        return ComponentArray.from_function(
            self.dim, self.slots, lambda idx: cur.get(idx, ZERO), self.groups)


def zeros_like(arr: ComponentArray) -> ComponentArray:
    return ComponentArray(arr.dim, arr.slots, arr.groups)


def _permuted_groups_after(perm_positions, groups):
    """Groups that survive a value-mixing operation on perm_positions."""
    moved = set(perm_positions)
    return tuple(g for g in groups if moved.isdisjoint(g[1]))


def symmetrize(arr: ComponentArray, positions) -> ComponentArray:
    """Average over all permutations of the named slots.

    The result declares a symmetric group on those slots (plus any original
    groups untouched by the averaging).  Idempotent: symmetrizing an already
    symmetric array returns an equal array.
    """
    positions = tuple(sorted(positions))
    if len(positions) < 2:
        return arr.copy()
    if len({arr.slots[p] for p in positions}) > 1:
        raise ValueError("cannot symmetrize slots of mixed variance")
    kept = _permuted_groups_after(positions, arr.groups)
    out = ComponentArray(arr.dim, arr.slots, kept + (("s", positions),))
    perms = list(itertools.permutations(positions))
    weight = Fraction(1, len(perms))
    for key in out.canonical_keys():
        total = ZERO
        for perm in perms:
            idx = list(key)
            for tgt, src in zip(positions, perm):
                idx[tgt] = key[src]
            total += arr[tuple(idx)]
        out[key] = total * weight
    return out


def alternate(arr: ComponentArray, pos_a: int, pos_b: int) -> ComponentArray:
    """Antisymmetrize one slot pair: (T - T with the pair swapped) / 2.

    The result declares an antisymmetric group on the pair (plus any
    original groups not touching it).
    """
    if pos_a == pos_b:
        raise ValueError("alternation needs two distinct slots")
    pos_a, pos_b = sorted((pos_a, pos_b))
    if arr.slots[pos_a] != arr.slots[pos_b]:
        raise ValueError("cannot alternate slots of mixed variance")
    kept = _permuted_groups_after((pos_a, pos_b), arr.groups)
    out = ComponentArray(arr.dim, arr.slots, kept + (("a", (pos_a, pos_b)),))
    half = Fraction(1, 2)
    for key in out.canonical_keys():
        swapped = list(key)
        swapped[pos_a], swapped[pos_b] = swapped[pos_b], swapped[pos_a]
        out[key] = (arr[key] - arr[tuple(swapped)]) * half
    return out


def tensor_product(a: ComponentArray, b: ComponentArray) -> ComponentArray:
    """Outer product; b's slots (and groups) follow a's."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    shift = len(a.slots)
    groups = a.groups + tuple((kind, tuple(p + shift for p in pos))
                              for kind, pos in b.groups)
    out = ComponentArray(a.dim, a.slots + b.slots, groups)
    for ka, va in a._data.items():
        if va == 0:
            continue
        for kb, vb in b._data.items():
            if vb == 0:
                continue
            out.add_at(ka + kb, va * vb)
    return out


def contract(arr: ComponentArray, pos_up: int, pos_lo: int) -> ComponentArray:
    """Trace over one upper and one lower slot; both slots are removed."""
    if arr.slots[pos_up] != UP or arr.slots[pos_lo] != LO:
        raise ValueError("contract expects an (upper, lower) slot pair")
    remaining = [p for p in range(len(arr.slots)) if p not in (pos_up, pos_lo)]
    remap = {old: new for new, old in enumerate(remaining)}
    groups = tuple((kind, tuple(remap[p] for p in pos))
                   for kind, pos in arr.groups
                   if not ({pos_up, pos_lo} & set(pos)))
    out = ComponentArray(arr.dim, tuple(arr.slots[p] for p in remaining), groups)
    first, second = sorted((pos_up, pos_lo))
    for out_key in out.canonical_keys():
        total = ZERO
        for i in range(1, arr.dim + 1):
            full = list(out_key)
            full.insert(first, i)
            full.insert(second, i)
            total += arr[tuple(full)]
        out[out_key] = total
    return out
