"""Igusa invariants from the ten even theta constants.

h4 = sum theta_i^8, h10 = prod theta_i^2, h12 = sum of 15 g-terms,
h16 = sum of 60 f-terms, where g and f are fourth powers of products of 6
and 8 theta values.  Then I2 = h12/h10, I4 = h4, I6 = h16/h10, I10 = h10
and j1 = I2^5/I10, j2 = I4 I2^3/I10, j3 = I6 I2^2/I10.

Functions accept a :class:`~igusa_cm.theta.ThetaVector` or any sequence of
ten numbers (mpmath, Python complex, ints), indexed from 1 in the tables.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

# Index tables, 1-based.  Do not edit: test_invariants locks their checksum.
G_TUPLES = (
    (1,5,2,9,6,10), (1,2,9,6,8,3), (5,9,6,8,10,7),
    (5,2,6,8,3,7), (1,5,2,10,3,7), (1,9,8,10,3,7),
    (1,5,2,8,10,4), (1,5,9,8,3,4), (5,9,6,10,3,4),
    (2,6,8,10,3,4), (1,2,9,6,7,4), (1,5,6,8,7,4),
    (2,9,8,10,7,4), (5,2,9,3,7,4), (1,6,10,3,7,4),
)

F_TUPLES = (
    (8,1,5,2,9,6,8,10), (5,1,5,2,9,6,8,3), (10,1,2,9,6,8,10,3),
    (3,1,5,2,9,6,10,3), (1,1,5,9,6,8,10,7), (2,5,2,9,6,8,10,7),
    (1,1,5,2,6,8,3,7), (9,5,2,9,6,8,3,7), (9,1,5,2,9,10,3,7),
    (6,1,5,2,6,10,3,7), (5,1,5,9,8,10,3,7), (2,1,2,9,8,10,3,7),
    (6,1,9,6,8,10,3,7), (8,1,5,2,8,10,3,7), (10,5,2,6,8,10,3,7),
    (3,5,9,6,8,10,3,7), (7,1,5,2,9,6,10,7), (7,1,2,9,6,8,3,7),
    (9,1,5,2,9,8,10,4), (6,1,5,2,6,8,10,4), (2,1,5,2,9,8,3,4),
    (6,1,5,9,6,8,3,4), (1,1,5,9,6,10,3,4), (2,5,2,9,6,10,3,4),
    (1,1,2,6,8,10,3,4), (5,5,2,6,8,10,3,4), (9,2,9,6,8,10,3,4),
    (8,5,9,6,8,10,3,4), (10,1,5,9,8,10,3,4), (3,1,5,2,8,10,3,4),
    (5,1,5,2,9,6,7,4), (2,1,5,2,6,8,7,4), (9,1,5,9,6,8,7,4),
    (8,1,2,9,6,8,7,4), (1,1,2,9,8,10,7,4), (5,5,2,9,8,10,7,4),
    (6,2,9,6,8,10,7,4), (10,1,2,9,6,10,7,4), (10,1,5,6,8,10,7,4),
    (1,1,5,2,9,3,7,4), (6,5,2,9,6,3,7,4), (8,5,2,9,8,3,7,4),
    (5,1,5,6,10,3,7,4), (2,1,2,6,10,3,7,4), (9,1,9,6,10,3,7,4),
    (8,1,6,8,10,3,7,4), (10,5,2,9,10,3,7,4), (3,1,2,9,6,3,7,4),
    (3,1,5,6,8,3,7,4), (3,2,9,8,10,3,7,4), (7,1,5,2,8,10,7,4),
    (7,1,5,9,8,3,7,4), (7,5,9,6,10,3,7,4), (7,2,6,8,10,3,7,4),
    (4,1,5,2,9,6,10,4), (4,1,2,9,6,8,3,4), (4,5,9,6,8,10,7,4),
    (4,5,2,6,8,3,7,4), (4,1,5,2,10,3,7,4), (4,1,9,8,10,3,7,4),
)


class IndexOutOfRange(IndexError):
    pass


class DecomposablePoint(ArithmeticError):
    """h10 vanishes to working precision: a product of elliptic curves."""


def tables_digest() -> str:
    return hashlib.sha256(repr((G_TUPLES, F_TUPLES)).encode()).hexdigest()


def _values(theta):
    vals = tuple(theta.values) if hasattr(theta, "values") else tuple(theta)
    if len(vals) != 10:
        raise ValueError("need exactly ten theta values")
    return vals


def _prod4(ks, vals):
    p = 1
    for k in ks:
        if not 1 <= k <= 10:
            raise IndexOutOfRange(f"theta index {k} outside 1..10")
        p = p * vals[k - 1]
    return p**4


def helper_f(ks, theta):
    if len(ks) != 8:
        raise ValueError("f takes 8 indices")
    return _prod4(ks, _values(theta))


def helper_g(ks, theta):
    if len(ks) != 6:
        raise ValueError("g takes 6 indices")
    return _prod4(ks, _values(theta))


@dataclass(frozen=True)
class ModularValues:
    h4: object
    h10: object
    h12: object
    h16: object


def modular_values(theta) -> ModularValues:
    vals = _values(theta)
    sq = [v * v for v in vals]
    fourth = [s * s for s in sq]
    h4 = 0
    h10 = 1
    for s, q in zip(sq, fourth):
        h4 = h4 + q * q
        h10 = h10 * s
    h12 = 0
    for ks in G_TUPLES:
        h12 = h12 + _prod4(ks, vals)
    h16 = 0
    for ks in F_TUPLES:
        h16 = h16 + _prod4(ks, vals)
    return ModularValues(h4, h10, h12, h16)


@dataclass(frozen=True)
class IgusaPoint:
    j1: object
    j2: object
    j3: object
    I2: object = None
    I4: object = None
    I6: object = None
    I10: object = None
    source: tuple | None = None


def igusa_point(hv: ModularValues, floor=None, source=None) -> IgusaPoint:
    """Absolute invariants; raises DecomposablePoint if |h10| <= floor."""
    if floor is not None and abs(hv.h10) <= floor:
        raise DecomposablePoint(f"|h10| = {abs(hv.h10)} below floor {floor}")
    if hv.h10 == 0:
        raise DecomposablePoint("h10 = 0")
    I10 = hv.h10
    I2 = hv.h12 / I10
    I4 = hv.h4
    I6 = hv.h16 / I10
    j1 = I2**5 / I10
    j2 = I4 * I2**3 / I10
    j3 = I6 * I2**2 / I10
    return IgusaPoint(j1, j2, j3, I2, I4, I6, I10, source)


def decomposable_floor(theta, ctx):
    """2^(-tail_bits/2) relative to the natural scale max|theta|^20 of h10."""
    mp = ctx.mp
    m = max(abs(v) for v in _values(theta))
    return mp.ldexp(1, -ctx.tail_bits // 2) * m**20


def igusa_from_theta(theta, ctx=None, source=None) -> IgusaPoint:
    floor = decomposable_floor(theta, ctx) if ctx is not None else None
    return igusa_point(modular_values(theta), floor, source)
