"""Precision bookkeeping and exact arithmetic helpers.

Everything analytic runs on a private :class:`mpmath.MPContext` owned by a
:class:`PrecisionContext`, so two runs at different precisions never share
global mpmath state.  Exact values are plain :class:`fractions.Fraction`.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Sequence

from mpmath.ctx_mp import MPContext

TRIAL_BOUND = 10**6
MR_BASES = 40


class FactorTimeout(RuntimeError):
    """Pollard rho exhausted its iteration cap on ``cofactor``."""

    def __init__(self, cofactor: int):
        super().__init__(f"could not split cofactor {cofactor}")
        self.cofactor = cofactor


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision for one pipeline pass.

    ``bits`` is the mantissa precision of exported values, ``tail_bits`` the
    accuracy demanded of truncated series, and ``guard_bits`` extra mantissa
    used for intermediate arithmetic.
    """

    bits: int
    tail_bits: int = 0
    guard_bits: int = 32

    def __post_init__(self):
        if self.tail_bits == 0:
            object.__setattr__(self, "tail_bits", self.bits // 2)
        if self.bits < 64:
            raise ValueError("bits must be >= 64")
        if self.guard_bits < 32:
            raise ValueError("guard_bits must be >= 32")
        if not 0 < self.tail_bits <= self.bits:
            raise ValueError("tail_bits must lie in [1, bits]")

    @cached_property
    def mp(self) -> MPContext:
        ctx = MPContext()
        ctx.prec = self.bits + self.guard_bits
        return ctx

    @property
    def tail_eps(self):
        return self.mp.ldexp(1, -self.tail_bits)

    def doubled(self) -> "PrecisionContext":
        return PrecisionContext(2 * self.bits, 2 * self.tail_bits, self.guard_bits)


def to_fraction(x) -> Fraction:
    """Exact rational value of an int, float, Fraction or mpmath real."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    if hasattr(x, "_mpf_"):
        sign, man, exp, _ = x._mpf_
        if not man:
            if exp:  # inf / nan encodings
                raise ValueError("non-finite value")
            return Fraction(0)
        v = Fraction(int(man)) * (Fraction(2) ** int(exp))
        return -v if sign else v
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


def convergents(x: Fraction):
    """Yield the continued-fraction convergents p/q of an exact rational."""
    p0, q0, p1, q1 = 0, 1, 1, 0
    num, den = x.numerator, x.denominator
    while den:
        a, r = divmod(num, den)
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        yield Fraction(p1, q1)
        num, den = den, r


def rational_reconstruct(x, max_den: int, tol) -> Fraction | None:
    """Smallest-denominator convergent of ``x`` within ``tol``.

    Returns ``None`` when no convergent has denominator <= ``max_den`` and
    error <= ``tol``; callers treat that as "precision insufficient".
    """
    if max_den < 1:
        raise ValueError("max_den must be >= 1")
    tol = to_fraction(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    xf = to_fraction(x)
    for c in convergents(xf):
        if c.denominator > max_den:
            return None
        if abs(xf - c) <= tol:
            return c
    return None


# ---------------------------------------------------------------- factoring


@lru_cache(maxsize=1)
def _small_primes() -> tuple[int, ...]:
    n = TRIAL_BOUND
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return tuple(i for i in range(n + 1) if sieve[i])


def is_probable_prime(n: int, rounds: int = MR_BASES) -> bool:
    """Strong probable-prime test to the first ``rounds`` prime bases."""
    if n < 2:
        return False
    for p in _small_primes()[:rounds]:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _small_primes()[:rounds]:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def pollard_brent(n: int, max_iter: int = 10**7, seed: int = 0) -> int:
    """A nontrivial factor of composite ``n`` (Brent's cycle variant)."""
    if n % 2 == 0:
        return 2
    rng = random.Random(seed ^ n)
    spent = 0
    while spent < max_iter:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1 and spent < max_iter:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            spent += r
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    raise FactorTimeout(n)


@dataclass(frozen=True)
class Factorization:
    """Prime factorization of ``|n|``.

    ``certified[i]`` is True when factor ``i`` was found by trial division
    (hence provably prime) and False when it only passed Miller-Rabin.
    """

    n: int
    factors: tuple[tuple[int, int], ...] = ()
    certified: tuple[bool, ...] = field(default=())

    def value(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p**e
        return out

    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]


def factor(n: int, rho_cap: int = 10**7) -> Factorization:
    """Complete factorization of ``|n|``: trial division, then Pollard-Brent."""
    if n == 0:
        raise ValueError("cannot factor 0")
    m = abs(n)
    found: dict[int, int] = {}
    for p in _small_primes():
        if p * p > m:
            break
        while m % p == 0:
            found[p] = found.get(p, 0) + 1
            m //= p
    stack = [m] if m > 1 else []
    while stack:
        c = stack.pop()
        if c <= TRIAL_BOUND or is_probable_prime(c):
            found[c] = found.get(c, 0) + 1
            continue
        r = math.isqrt(c)
        if r * r == c:
            stack += [r, r]
            continue
        g = pollard_brent(c, rho_cap)
        stack += [g, c // g]
    ps = sorted(found)
    return Factorization(
        abs(n),
        tuple((p, found[p]) for p in ps),
        tuple(p <= TRIAL_BOUND for p in ps),
    )


def squarefree_part(n: int) -> tuple[int, int]:
    """Write ``n > 0`` as ``f**2 * n0`` with ``n0`` squarefree; return (n0, f)."""
    n0, f = 1, 1
    for p, e in factor(n).factors:
        f *= p ** (e // 2)
        if e % 2:
            n0 *= p
    return n0, f


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


# ------------------------------------------------------ polynomial helpers
# Integer polynomials are coefficient lists, highest degree first.


def _strip(p: list[int]) -> list[int]:
    i = 0
    while i < len(p) - 1 and p[i] == 0:
        i += 1
    return p[i:]


def _deg(p: list[int]) -> int:
    return -1 if p == [0] else len(p) - 1


def _content(p: list[int]) -> int:
    g = 0
    for c in p:
        g = math.gcd(g, c)
    return g


def _prem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder lc(b)^(deg a - deg b + 1) * a mod b."""
    db = _deg(b)
    lb = b[0]
    r = list(a)
    e = _deg(a) - db + 1
    while _deg(r) >= db:
        lr = r[0]
        r = [lb * c for c in r]
        for i in range(len(b)):
            r[i] -= lr * b[i]
        r = _strip(r[1:] if len(r) > 1 else [0])
        e -= 1
    return [lb**e * c for c in r] if e > 0 else r


def resultant(a: Sequence[int], b: Sequence[int]) -> int:
    """Resultant of two integer polynomials by the subresultant PRS."""
    A, B = _strip(list(a)), _strip(list(b))
    if A == [0] or B == [0]:
        return 0
    s = 1
    if _deg(A) < _deg(B):
        if _deg(A) % 2 and _deg(B) % 2:
            s = -1
        A, B = B, A
    ca, cb = _content(A), _content(B)
    A = [c // ca for c in A]
    B = [c // cb for c in B]
    t = ca ** _deg(B) * cb ** _deg(A)
    g = h = 1
    while _deg(B) > 0:
        delta = _deg(A) - _deg(B)
        if _deg(A) % 2 and _deg(B) % 2:
            s = -s
        R = _prem(A, B)
        if R == [0]:
            return 0
        A = B
        div = g * h**delta
        B = [c // div for c in R]
        g = A[0]
        h = g**delta // h ** (delta - 1) if delta else h
    dA = _deg(A)
    if dA == 0:
        return s * t * h
    h = B[0] ** dA // h ** (dA - 1) if dA >= 1 else h
    return s * t * h


def poly_discriminant(coeffs: Sequence) -> Fraction:
    """Exact discriminant of a rational polynomial (highest degree first)."""
    cs = [Fraction(c) for c in coeffs]
    while cs and cs[0] == 0:
        cs = cs[1:]
    n = len(cs) - 1
    if n < 1:
        raise ValueError("degree must be >= 1")
    if n == 1:
        return Fraction(1)
    lcm = 1
    for c in cs:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    F = [int(c * lcm) for c in cs]
    dF = [F[i] * (n - i) for i in range(n)]
    res = resultant(F, dF)
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    disc_int = Fraction(sign * res, F[0])
    return disc_int / Fraction(lcm) ** (2 * n - 2)
