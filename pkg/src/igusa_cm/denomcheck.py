"""Checks on the primes dividing class-polynomial denominators.

For each such prime q we record whether q divides d - x^2 for some integer
x with x^2 <= d (and the same with d0), and whether q <= d.  Primes from
discriminant denominators and from coefficient denominators are kept in
separate sections; the second is an extension that keeps the check
meaningful for degree-1 polynomials, whose discriminant is 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .classpoly import ClassPolynomialSet, DiscriminantData

INTERPRETATION = (
    "Denominator primes are expected to be primes of bad reduction for the genus 2 curve "
    "(informational; no reduction types are computed)."
)


def property1_holds(q: int, d: int) -> tuple[bool, int | None]:
    """Smallest x >= 0 with x^2 <= d and q | d - x^2, by exhaustive scan."""
    if q < 2 or d < 1:
        raise ValueError("need q >= 2 and d >= 1")
    for x in range(math.isqrt(d) + 1):
        if (d - x * x) % q == 0:
            return True, x
    return False, None


@dataclass(frozen=True)
class PrimeRecord:
    q: int
    sources: tuple[str, ...]
    property1_d: bool
    witness_d: int | None
    property1_d0: bool
    witness_d0: int | None
    bounded_by_d: bool

    @property
    def ok(self) -> bool:
        return self.property1_d and self.property1_d0 and self.bounded_by_d


@dataclass(frozen=True)
class DenominatorReport:
    field: str
    d: int
    d0: int
    discriminant_primes: tuple[PrimeRecord, ...]
    coefficient_primes: tuple[PrimeRecord, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def verdict_discriminant(self) -> bool:
        return all(r.ok for r in self.discriminant_primes)

    @property
    def verdict_coefficient(self) -> bool:
        return all(r.ok for r in self.coefficient_primes)

    @property
    def counterexamples(self) -> list[PrimeRecord]:
        return [r for r in self.discriminant_primes + self.coefficient_primes if not r.ok]


def _verify_witness(q, d, x) -> None:
    if x is not None and (x * x > d or pow(d - x * x, 1, q) != 0):
        raise AssertionError(f"bad witness x={x} for q={q}, d={d}")


def check_prime(q: int, d: int, d0: int, sources) -> PrimeRecord:
    ok_d, x_d = property1_holds(q, d)
    ok_d0, x_d0 = property1_holds(q, d0)
    _verify_witness(q, d, x_d)
    _verify_witness(q, d0, x_d0)
    return PrimeRecord(q, tuple(sorted(set(sources))), ok_d, x_d, ok_d0, x_d0, q <= d)


def _collect(factored, labels) -> dict[int, list[str]]:
    out: dict[int, list[str]] = {}
    for fz, lab in zip(factored, labels):
        for p, e in fz.factors:
            out.setdefault(p, []).append(f"{lab}^{e}" if e > 1 else lab)
    return out


def denominator_report(
    field_id: str, d: int, d0: int, cps: ClassPolynomialSet | None, dd: DiscriminantData | None, coefficients: bool = True
) -> DenominatorReport:
    notes = []
    disc_primes: dict[int, list[str]] = {}
    coef_primes: dict[int, list[str]] = {}
    if dd is not None:
        disc_primes = _collect(dd.factored, ("disc h1", "disc h2", "disc h3"))
        if coefficients and dd.coeff_factored:
            coef_primes = _collect(dd.coeff_factored, ("coeffs h1", "coeffs h2", "coeffs h3"))
    if not disc_primes:
        notes.append("no denominator primes in the discriminants")
    if coefficients and not coef_primes:
        notes.append("no denominator primes in the coefficients")
    if cps is not None and not cps.stable:
        notes.append("reconstruction not stable: results are best effort")
    notes.append(INTERPRETATION)
    return DenominatorReport(
        field_id,
        d,
        d0,
        tuple(check_prime(q, d, d0, s) for q, s in sorted(disc_primes.items())),
        tuple(check_prime(q, d, d0, s) for q, s in sorted(coef_primes.items())),
        tuple(notes),
    )
