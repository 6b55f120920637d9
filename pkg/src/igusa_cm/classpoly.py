"""Class polynomials from Igusa points, exact reconstruction, discriminants.

Polynomials are coefficient lists with the highest degree first; the
floating versions hold mpmath complex numbers, the exact ones Fractions.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from .numeric import Factorization, PrecisionContext, factor, poly_discriminant, rational_reconstruct, to_fraction

log = logging.getLogger(__name__)


class ConjugationClosureWarning(UserWarning):
    """Assembled coefficients are not real: the point set is not closed under conjugation."""


class ReconstructionUnstable(RuntimeError):
    pass


def assemble(points, ctx: PrecisionContext) -> tuple[list[list], float]:
    """prod (x - j_k) for k = 1, 2, 3, plus the largest |coefficient|."""
    if not points:
        raise ValueError("no Igusa points")
    mp = ctx.mp
    out = []
    for attr in ("j1", "j2", "j3"):
        poly = [mp.mpc(1)]
        for pt in points:
            r = mp.mpc(getattr(pt, attr))
            nxt = poly + [mp.mpc(0)]
            for i in range(1, len(nxt)):
                nxt[i] -= r * poly[i - 1]
            poly = nxt
        out.append(poly)
    biggest = max(float(abs(c)) for p in out for c in p)
    return out, biggest


def max_imaginary(polys) -> float:
    return max((float(abs(c.imag)) for p in polys for c in p), default=0.0)


def check_real(polys, ctx: PrecisionContext, strict: bool = False) -> float:
    """Largest imaginary part relative to coefficient size; warn or raise above 2^(-tail/2)."""
    worst = 0.0
    for p in polys:
        for c in p:
            rel = float(abs(c.imag)) / max(1.0, float(abs(c)))
            worst = max(worst, rel)
    if worst > 2.0 ** (-ctx.tail_bits / 2):
        msg = f"imaginary residual {worst:.3g}: point set not closed under complex conjugation"
        if strict:
            raise ReconstructionUnstable(msg)
        warnings.warn(msg, ConjugationClosureWarning, stacklevel=2)
    return worst


def reconstruction_bounds(ctx: PrecisionContext, biggest: float) -> tuple[int, Fraction]:
    """(max_den, tol) for coefficients of magnitude up to ``biggest``.

    The effective accuracy e = bits - log2(max(1, biggest)) is split as
    tol = 2^(-e/2) and max_den = 2^(e/3).
    """
    e = ctx.bits - max(0.0, math.log2(max(biggest, 1.0)))
    if e < 8:
        return 1, Fraction(1, 2)
    return 2 ** int(e / 3), Fraction(1, 2 ** int(e / 2))


@dataclass(frozen=True)
class ClassPolynomialSet:
    h1: tuple[Fraction, ...]
    h2: tuple[Fraction, ...]
    h3: tuple[Fraction, ...]
    precision_used: int
    stable: bool = False
    residual: float = 0.0
    max_imag: float = 0.0

    @property
    def polys(self):
        return (self.h1, self.h2, self.h3)

    @property
    def degree(self) -> int:
        return len(self.h1) - 1

    def with_stable(self, stable: bool) -> "ClassPolynomialSet":
        return ClassPolynomialSet(self.h1, self.h2, self.h3, self.precision_used, stable, self.residual, self.max_imag)


def reconstruct(polys, ctx: PrecisionContext, max_den: int | None = None, tol=None) -> ClassPolynomialSet | None:
    """Rational coefficients for all three polynomials, or None on any NoMatch."""
    biggest = max(float(abs(c)) for p in polys for c in p)
    d_max, d_tol = reconstruction_bounds(ctx, biggest)
    max_den = max_den or d_max
    tol = Fraction(tol) if tol is not None else d_tol
    out = []
    residual = Fraction(0)
    for p in polys:
        coeffs = []
        for c in p:
            x = c.real if hasattr(c, "real") else c
            q = rational_reconstruct(x, max_den, tol)
            if q is None:
                return None
            residual = max(residual, abs(to_fraction(x) - q))
            coeffs.append(q)
        out.append(tuple(coeffs))
    if any(c[0] != 1 for c in out):
        return None
    return ClassPolynomialSet(out[0], out[1], out[2], ctx.bits, False, float(residual), max_imaginary(polys))


def evaluate(coeffs, x):
    acc = 0
    for c in coeffs:
        acc = acc * x + c
    return acc


# ------------------------------------------------------------ discriminants


@dataclass(frozen=True)
class DiscriminantData:
    discs: tuple[Fraction, Fraction, Fraction]
    denominators: tuple[int, int, int]
    factored: tuple[Factorization, Factorization, Factorization]
    coeff_denominators: tuple[int, int, int] = (1, 1, 1)
    coeff_factored: tuple = ()


def _lcm_den(coeffs) -> int:
    m = 1
    for c in coeffs:
        m = m * c.denominator // math.gcd(m, c.denominator)
    return m


def discriminant_data(cps: ClassPolynomialSet) -> DiscriminantData:
    if not cps.stable:
        log.warning("discriminants computed from an unstable reconstruction")
    discs = tuple(poly_discriminant(p) for p in cps.polys)
    dens = tuple(d.denominator for d in discs)
    cdens = tuple(_lcm_den(p) for p in cps.polys)
    return DiscriminantData(
        discs,
        dens,
        tuple(factor(d) for d in dens),
        cdens,
        tuple(factor(d) for d in cdens),
    )


def format_poly(coeffs, var: str = "x") -> str:
    """Human form, e.g. ``x^2 - 3*x + 2``."""
    n = len(coeffs) - 1
    parts = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        k = n - i
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        mag = abs(c)
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{mag}*{mono}"
        else:
            body = str(mag)
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    if not parts:
        return "0"
    first = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    return " ".join([first] + [f"{s} {b}" for s, b in parts[1:]])
