"""Seeded random generators for exact-rational jets and fibre points.

All entries are Fractions with numerator in [-bound, bound] and denominator
in [1, bound] (default bound 9), drawn from a caller-supplied
``random.Random`` so every consumer — tests and CLI alike — is reproducible
from a seed.
"""

from __future__ import annotations

from fractions import Fraction

from jetcalc.jets import (
    ConnectionJet,
    CotangentFibrePoint,
    DiffeoJet,
    TensorJet,
    connection_array,
    kernel_jet,
    tensor_array,
)
from jetcalc.linalg import determinant
from jetcalc.symcore import LO, UP, ComponentArray


def rand_fraction(rng, bound=9):
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def fill_random(arr: ComponentArray, rng, bound=9):
    """Fill every canonical component of an array with a random rational."""
    for key in arr.canonical_keys():
        arr[key] = rand_fraction(rng, bound)
    return arr


def rand_invertible_matrix(rng, dim, bound=9):
    while True:
        mat = [[rand_fraction(rng, bound) for _ in range(dim)] for _ in range(dim)]
        if determinant(mat) != 0:
            return mat


def rand_diffeo(rng, dim, order, bound=9) -> DiffeoJet:
    g = DiffeoJet.from_linear(dim, order, rand_invertible_matrix(rng, dim, bound))
    for i in range(1, order):
        fill_random(g.coeffs[i], rng, bound)
    return g


def rand_linear_diffeo(rng, dim, order, bound=9) -> DiffeoJet:
    """Random jet of a purely linear (GL) map, prolonged to `order`."""
    return DiffeoJet.from_linear(dim, order, rand_invertible_matrix(rng, dim, bound))


def rand_kernel_jet(rng, dim, order, fixed_order, bound=9) -> DiffeoJet:
    """Random jet that is the identity through `fixed_order`."""
    top = {}
    for d in range(fixed_order + 1, order + 1):
        arr = ComponentArray(dim, (UP,) + (LO,) * d,
                             (("s", tuple(range(1, d + 1))),))
        top[d] = fill_random(arr, rng, bound)
    return kernel_jet(dim, order, fixed_order, top)


def rand_connection(rng, dim, order, symmetric=True, bound=9) -> ConnectionJet:
    arrays = [fill_random(connection_array(dim, i, symmetric), rng, bound)
              for i in range(order + 1)]
    return ConnectionJet(dim, order, arrays, symmetric)


def rand_tensor(rng, dim, valence, order, bound=9) -> TensorJet:
    arrays = [fill_random(tensor_array(dim, valence, i), rng, bound)
              for i in range(order + 1)]
    return TensorJet(dim, valence, order, arrays)


def rand_metric(rng, dim, order, bound=9):
    """Random metric jet: symmetric (0,2) with invertible value matrix."""
    from jetcalc.connection import MetricJet, metric_array

    while True:
        arrays = [fill_random(metric_array(dim, i), rng, bound)
                  for i in range(order + 1)]
        value = [[arrays[0][(i, j)] for j in range(1, dim + 1)]
                 for i in range(1, dim + 1)]
        if determinant(value) != 0:
            return MetricJet(dim, order, arrays)


def rand_fibre_point(rng, dim, bound=9) -> CotangentFibrePoint:
    pt = CotangentFibrePoint.zero(dim)
    for block in pt.blocks():
        fill_random(block, rng, bound)
    return pt
