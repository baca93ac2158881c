"""Truncated multivariate polynomials over the rationals.

A polynomial in m variables truncated at total degree `max_deg` is a dict
mapping exponent tuples (length m, nonnegative ints, sum <= max_deg) to
nonzero Fractions.  The zero polynomial is the empty dict.  These are the
Taylor polynomials that jets are made of: every jet operation (composition,
inversion, prolonged actions, formal covariant derivatives) reduces to the
handful of exact operations here.

All operations truncate at a caller-supplied total degree; nothing here
rounds or approximates.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from jetcalc.symcore import ZERO


def p_zero():
    return {}


def p_const(c, nvars):
    c = Fraction(c)
    if c == 0:
        return {}
    return {(0,) * nvars: c}


def p_var(i, nvars, coeff=1):
    """The monomial coeff * x_i (1-based variable index)."""
    exp = [0] * nvars
    exp[i - 1] = 1
    coeff = Fraction(coeff)
    return {tuple(exp): coeff} if coeff != 0 else {}


def p_add(a, b):
    out = dict(a)
    for exp, c in b.items():
        acc = out.get(exp)
        total = c if acc is None else acc + c
        if total == 0:
            out.pop(exp, None)
        else:
            out[exp] = total
    return out


def p_add_into(out, b, factor=None):
    """In-place out += factor*b (factor None means 1)."""
    for exp, c in b.items():
        if factor is not None:
            c = c * factor
            if c == 0:
                continue
        acc = out.get(exp)
        total = c if acc is None else acc + c
        if total == 0:
            out.pop(exp, None)
        else:
            out[exp] = total
    return out


def p_neg(a):
    return {exp: -c for exp, c in a.items()}


def p_scale(a, factor):
    factor = Fraction(factor)
    if factor == 0:
        return {}
    return {exp: c * factor for exp, c in a.items()}


def p_mul(a, b, max_deg):
    """Product truncated at total degree max_deg."""
    if not a or not b:
        return {}
    out = {}
    for ea, ca in a.items():
        da = sum(ea)
        if da > max_deg:
            continue
        for eb, cb in b.items():
            if da + sum(eb) > max_deg:
                continue
            exp = tuple(x + y for x, y in zip(ea, eb))
            c = ca * cb
            acc = out.get(exp)
            total = c if acc is None else acc + c
            if total == 0:
                out.pop(exp, None)
            else:
                out[exp] = total
    return out


def p_mul_many(polys, max_deg):
    out = None
    for p in polys:
        out = p if out is None else p_mul(out, p, max_deg)
        if not out:
            return {}
    return dict(out) if out is not None else {}


def p_pow(a, n, max_deg):
    if n == 0:
        raise ValueError("p_pow with n=0 needs the variable count; use p_const")
    out = a
    for _ in range(n - 1):
        out = p_mul(out, a, max_deg)
    return out


def p_truncate(a, max_deg):
    return {exp: c for exp, c in a.items() if sum(exp) <= max_deg}


def p_diff(a, i):
    """Partial derivative with respect to variable i (1-based)."""
    out = {}
    k = i - 1
    for exp, c in a.items():
        e = exp[k]
        if e == 0:
            continue
        newexp = exp[:k] + (e - 1,) + exp[k + 1:]
        out[newexp] = out.get(newexp, ZERO) + c * e
    return {exp: c for exp, c in out.items() if c != 0}


def p_eval_zero(a):
    """Value at the origin (the constant coefficient)."""
    nvars = len(next(iter(a))) if a else 0
    return a.get((0,) * nvars, ZERO)


def p_coeff(a, exp):
    return a.get(tuple(exp), ZERO)


def p_compose(a, subs, max_deg, nvars_out=None):
    """Substitute subs[k] for variable k+1 in a, truncating at max_deg.

    Powers of each substituted series are cached, so the cost is dominated
    by the number of distinct exponents per variable rather than the number
    of monomials in `a`.
    """
    if not a:
        return {}
    nvars_in = len(next(iter(a)))
    if len(subs) != nvars_in:
        raise ValueError("need one substitution per variable")
    if nvars_out is None:
        for s in subs:
            if s:
                nvars_out = len(next(iter(s)))
                break
    if nvars_out is None:
        raise ValueError("all substitutions are zero; pass nvars_out explicitly")
    power_cache = [{0: p_const(1, nvars_out)} for _ in range(nvars_in)]

    def var_power(k, n):
        cache = power_cache[k]
        if n not in cache:
            top = max(cache)
            cur = cache[top]
            for e in range(top + 1, n + 1):
                cur = p_mul(cur, subs[k], max_deg)
                cache[e] = cur
        return cache[n]

    out = {}
    for exp, c in a.items():
        term = p_const(c, nvars_out)
        for k, e in enumerate(exp):
            if e == 0:
                continue
            if not subs[k] and e > 0:
                term = {}
                break
            term = p_mul(term, var_power(k, e), max_deg)
            if not term:
                break
        p_add_into(out, term)
    return out


def p_equal(a, b):
    return p_truncate(a, 10**9) == p_truncate(b, 10**9)


def exponents_upto(nvars, max_deg):
    """All exponent tuples with total degree <= max_deg, lexicographic."""
    for total in range(max_deg + 1):
        for exp in _exponents_of_degree(nvars, total):
            yield exp


def _exponents_of_degree(nvars, total):
    if nvars == 0:
        if total == 0:
            yield ()
        return
    for first in range(total, -1, -1):
        for rest in _exponents_of_degree(nvars - 1, total - first):
            yield (first,) + rest


def factorial_of_exponent(exp):
    """Product of factorials of the entries (the multinomial denominator)."""
    out = 1
    for e in exp:
        for k in range(2, e + 1):
            out *= k
    return out


def exponent_of_index_tuple(idx, nvars):
    """Exponent tuple counting occurrences of each variable in idx."""
    exp = [0] * nvars
    for i in idx:
        exp[i - 1] += 1
    return tuple(exp)


def index_tuple_of_exponent(exp):
    """Nondecreasing index tuple with variable k+1 repeated exp[k] times."""
    out = []
    for k, e in enumerate(exp):
        out.extend([k + 1] * e)
    return tuple(out)


def matrix_poly_inverse(mat, nvars, max_deg):
    """Inverse of a square matrix of polynomials, order by order.

    mat[i][j] are truncated polynomials; the constant-term matrix must be
    invertible.  Newton iteration X -> X(2I - MX) doubles the valid degree
    each step, all arithmetic exact.
    """
    from jetcalc.linalg import invert_matrix

    n = len(mat)
    const = [[p_eval_zero(mat[i][j]) for j in range(n)] for i in range(n)]
    x = [[p_const(c, nvars) if c != 0 else {} for c in row]
         for row in invert_matrix(const)]
    deg_ok = 0
    while deg_ok < max_deg:
        deg_ok = min(2 * deg_ok + 1, max_deg)
        # R = 2I - M X  (truncated), then X <- X R
        mx = _mat_poly_mul(mat, x, nvars, deg_ok)
        for i in range(n):
            for j in range(n):
                mx[i][j] = p_neg(mx[i][j])
            p_add_into(mx[i][i], p_const(2, nvars))
        x = _mat_poly_mul(x, mx, nvars, deg_ok)
    return x


def _mat_poly_mul(a, b, nvars, max_deg):
    n = len(a)
    m = len(b[0])
    k = len(b)
    out = [[{} for _ in range(m)] for _ in range(n)]
    for i in range(n):
        for p in range(k):
            if not a[i][p]:
                continue
            for j in range(m):
                if b[p][j]:
                    p_add_into(out[i][j], p_mul(a[i][p], b[p][j], max_deg))
    return out


def itertools_subsets(seq):
    """All subsets of a sequence as tuples, by size then position."""
    for r in range(len(seq) + 1):
        yield from itertools.combinations(seq, r)
