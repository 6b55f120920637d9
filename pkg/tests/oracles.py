"""Independent reference computations used only by the tests."""
from __future__ import annotations

import math

import flint


def primes_up_to(n: int) -> list[int]:
    sieve = bytearray([1]) * (n + 1)
    sieve[:2] = b"\x00\x00"
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i in range(n + 1) if sieve[i]]


def residue_degrees_mod_p(a: int, b: int, p: int) -> list[int]:
    """Residue degrees of the primes over p (Dedekind-Kummer; p must not divide the index)."""
    f = flint.nmod_poly([b % p, 0, a % p, 0, 1], p)
    _, facs = f.factor()
    return sorted(g.degree() for g, _ in facs)


def residue_degrees_sympy(a: int, b: int, p: int) -> list[int] | None:
    from sympy import Poly, symbols
    from sympy.polys.numberfields.primes import prime_decomp

    x = symbols("x")
    try:
        return sorted(P.f for P in prime_decomp(p, T=Poly(x**4 + a * x**2 + b)))
    except AssertionError:  # known failure mode of sympy's kernel computation
        return None


def kronecker(D: int, p: int) -> int:
    if p == 2:
        if D % 2 == 0:
            return 0
        return 1 if D % 8 in (1, 7) else -1
    r = pow(D % p, (p - 1) // 2, p)
    return 0 if r == 0 else (1 if r == 1 else -1)


def minus_class_number_estimate(a: int, b: int, d: int, d_k0: int, D0: int, w: int = 2, bound: int = 100000) -> float:
    """h(K)/h(K0) / Q from the analytic class number formula.

    L(1, chi) for chi the character of K/K0 is approximated by its Euler
    product over primes up to ``bound``.  Index primes (p^2 | disc(f)/d)
    use sympy's prime decomposition; all others use Dedekind-Kummer.
    """
    disc = 16 * b * (a * a - 4 * b) ** 2
    index2 = disc // d
    L = 1.0
    for p in primes_up_to(bound):
        degs = residue_degrees_sympy(a, b, p) if index2 % p == 0 else residue_degrees_mod_p(a, b, p)
        if degs is None:
            raise RuntimeError(f"no decomposition available at p={p}")
        zK = 1.0
        for f in degs:
            zK /= 1 - p ** (-f)
        k = kronecker(D0 if D0 % 4 == 1 else 4 * D0, p)
        z0 = 1 / ((1 - 1 / p) ** 2) if k == 1 else (1 / (1 - p**-2) if k == -1 else 1 / (1 - 1 / p))
        L *= zK / z0
    return w * math.sqrt(d / d_k0) * L / (4 * math.pi**2)
