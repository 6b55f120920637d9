"""Genus-2 theta constants with even characteristics.

theta[m1, m2](Omega) = sum_n exp(pi i (n+m1)^T Omega (n+m1) + 2 pi i (n+m1)^T m2)

All ten constants come from four lattice sweeps, one per m1.  A sweep
collects the terms exp(pi i x^T Omega x), x = n + m1, into 16 buckets by
(2 x_1 mod 4, 2 x_2 mod 4); the m2-phase of a term is a power of i fixed by
its bucket, so each constant is a short combination of bucket sums.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .numeric import PrecisionContext

R_CAP = 400


class PrecisionInfeasible(RuntimeError):
    """The truncation radius needed for the requested tail exceeds the cap."""


@dataclass(frozen=True)
class ThetaCharacteristic:
    m1: tuple[Fraction, Fraction]
    m2: tuple[Fraction, Fraction]
    index: int

    @property
    def bits(self) -> tuple[int, int, int, int]:
        return (int(2 * self.m1[0]), int(2 * self.m1[1]), int(2 * self.m2[0]), int(2 * self.m2[1]))


def even_characteristics() -> list[ThetaCharacteristic]:
    """The ten even characteristics, 4-bit (2m1, 2m2) codes in ascending order."""
    out = []
    half = Fraction(1, 2)
    for b in range(16):
        a0, a1, b0, b1 = (b >> 3) & 1, (b >> 2) & 1, (b >> 1) & 1, b & 1
        if (a0 * b0 + a1 * b1) % 2 == 0:
            out.append(ThetaCharacteristic((a0 * half, a1 * half), (b0 * half, b1 * half), len(out) + 1))
    return out


CHARACTERISTICS = tuple(even_characteristics())


def _omega(om):
    return om.omega if hasattr(om, "omega") else om


def lambda_min_imag(omega) -> float:
    y11, y12, y22 = float(omega[0][0].imag), float((omega[0][1].imag + omega[1][0].imag) / 2), float(omega[1][1].imag)
    tr, det = y11 + y22, y11 * y22 - y12 * y12
    disc = math.sqrt(max((y11 - y22) ** 2 + 4 * y12 * y12, 0.0))
    lam = (tr - disc) / 2
    if lam <= 0 or det <= 0:
        raise ValueError("Im(Omega) is not positive definite")
    # tr - disc loses accuracy when y11 ~ y22 >> y12; det / lambda_max is stable
    return min(lam, det / ((tr + disc) / 2))


def tail_bound(R: int, lam: float) -> float:
    """log2 of 8 (R+2) exp(-pi lam (R-1)^2)."""
    return math.log2(8 * (R + 2)) - math.pi * lam * (R - 1) ** 2 / math.log(2)


def truncation_radius(omega, tail_bits: int, cap: int = R_CAP) -> int:
    lam = lambda_min_imag(omega)
    R = 2
    while tail_bound(R, lam) >= -tail_bits:
        R += 1
        if R > cap:
            raise PrecisionInfeasible(f"radius above {cap} needed (lambda_min = {lam:.3g}); Siegel-reduce first")
    return R


def _sweep(mp, omega, m1, R):
    """16 bucket sums of exp(pi i x^T Omega x) over x = n + m1, |n|_inf <= R."""
    a, b, c = omega[0][0], (omega[0][1] + omega[1][0]) / 2, omega[1][1]
    pii = mp.mpc(0, mp.pi)
    h1, h2 = Fraction(int(m1[0]), 2), Fraction(int(m1[1]), 2)
    buckets = [[mp.mpc(0) for _ in range(4)] for _ in range(4)]
    step2 = mp.exp(2 * pii * a)  # ratio of consecutive ratios along a row
    x1_start = -R + h1
    for n2 in range(-R, R + 1):
        x2 = n2 + h2
        x2m = mp.mpf(x2.numerator) / x2.denominator
        x1m = mp.mpf(x1_start.numerator) / x1_start.denominator
        term = mp.exp(pii * (a * x1m * x1m + 2 * b * x1m * x2m + c * x2m * x2m))
        ratio = mp.exp(pii * (a * (2 * x1m + 1) + 2 * b * x2m))
        u2 = int(2 * x2) % 4
        u1 = int(2 * x1_start) % 4
        row = buckets
        for _ in range(2 * R + 1):
            row[u1][u2] += term
            term *= ratio
            ratio *= step2
            u1 = (u1 + 2) % 4
    return buckets


_I_POW = (1, 1j, -1, -1j)


def _combine(mp, buckets, m2bits):
    b1, b2 = m2bits
    acc = mp.mpc(0)
    for u1 in range(4):
        for u2 in range(4):
            s = buckets[u1][u2]
            if not s:
                continue
            k = (b1 * u1 + b2 * u2) % 4
            if k == 0:
                acc += s
            elif k == 2:
                acc -= s
            elif k == 1:
                acc += mp.mpc(-s.imag, s.real)
            else:
                acc += mp.mpc(s.imag, -s.real)
    return acc


@dataclass(frozen=True)
class ThetaVector:
    """theta_1..theta_10 (``values[i-1]``) at ``omega`` with a certified tail."""

    values: tuple
    omega: tuple
    truncation_radius: int
    certified_tail: float  # log2 of the per-value tail bound
    permutation: tuple[int, ...] = tuple(range(10))

    def __getitem__(self, i: int):
        """1-based access as in the invariant formulas."""
        if not 1 <= i <= 10:
            raise IndexError("theta index must lie in 1..10")
        return self.values[i - 1]


def _validate_perm(perm) -> tuple[int, ...]:
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(10)):
        raise ValueError("theta permutation must be a permutation of 0..9")
    return perm


def theta_vector(om, ctx: PrecisionContext, permutation=None, radius: int | None = None) -> ThetaVector:
    """All ten even theta constants, reindexed by ``permutation`` if given.

    ``values[i] = raw[permutation[i]]`` where ``raw`` follows
    :func:`even_characteristics`.
    """
    omega = _omega(om)
    mp = ctx.mp
    R = radius or truncation_radius(omega, ctx.tail_bits)
    lam = lambda_min_imag(omega)
    sweeps = {}
    raw = []
    for ch in CHARACTERISTICS:
        key = ch.bits[:2]
        if key not in sweeps:
            sweeps[key] = _sweep(mp, omega, key, R)
        raw.append(_combine(mp, sweeps[key], ch.bits[2:]))
    perm = _validate_perm(permutation) if permutation is not None else tuple(range(10))
    vals = tuple(raw[p] for p in perm)
    return ThetaVector(vals, omega, R, tail_bound(R, lam), perm)


def theta_constant(m: ThetaCharacteristic, om, ctx: PrecisionContext, radius: int | None = None):
    """A single theta constant via the same sweep as :func:`theta_vector`."""
    omega = _omega(om)
    R = radius or truncation_radius(omega, ctx.tail_bits)
    return _combine(ctx.mp, _sweep(ctx.mp, omega, m.bits[:2], R), m.bits[2:])
