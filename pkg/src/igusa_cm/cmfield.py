"""Quartic CM fields K = Q(alpha), alpha^4 + a alpha^2 + b = 0.

Elements of K are 4-tuples of Fractions in the power basis
(1, alpha, alpha^2, alpha^3).  The real quadratic subfield is
K0 = Q(alpha^2) = Q(sqrt(D)) with D = a^2 - 4b, and complex conjugation is
the automorphism alpha -> -alpha.
"""
from __future__ import annotations

import enum
import logging
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from . import linalg
from .linalg import QLattice
from .numeric import PrecisionContext, factor, is_probable_prime, is_square, squarefree_part

log = logging.getLogger(__name__)

Elt = tuple[Fraction, Fraction, Fraction, Fraction]


class NotCM(ValueError):
    pass


class BiquadraticRejected(ValueError):
    pass


class MaximalOrderFailure(RuntimeError):
    pass


class GaloisType(str, enum.Enum):
    CYCLIC = "Cyclic"
    NON_GALOIS = "NonGalois"
    BIQUADRATIC = "Biquadratic"


def _check_shape(a: int, b: int) -> None:
    if a <= 0 or b <= 0:
        raise NotCM(f"need a, b > 0, got ({a}, {b})")
    D = a * a - 4 * b
    if D <= 0:
        raise NotCM(f"a^2 - 4b = {D} <= 0: not a CM quartic")
    if is_square(D):
        raise NotCM(f"a^2 - 4b = {D} is a square: polynomial is reducible")
    if is_square(b):
        r = math.isqrt(b)
        if is_square(2 * r - a):
            raise NotCM(f"x^4 + {a}x^2 + {b} is reducible")


def classify_galois(a: int, b: int) -> GaloisType:
    """Galois type of x^4 + a x^2 + b (Biquadratic / Cyclic / NonGalois)."""
    _check_shape(a, b)
    if is_square(b):
        return GaloisType.BIQUADRATIC
    if is_square(b * (a * a - 4 * b)):
        return GaloisType.CYCLIC
    return GaloisType.NON_GALOIS


@dataclass(frozen=True)
class CMType:
    """Two embeddings, given as indices into :meth:`CMField.roots`.

    Index k and (k + 2) % 4 are complex conjugate, so a CM type takes one
    index from {0, 2} and one from {1, 3}.
    """

    phi1: int
    phi2: int

    def __post_init__(self):
        if self.phi1 not in (0, 2) or self.phi2 not in (1, 3):
            raise ValueError(f"not a CM type: {(self.phi1, self.phi2)}")

    @property
    def indices(self) -> tuple[int, int]:
        return (self.phi1, self.phi2)

    def __str__(self):
        return f"({self.phi1},{self.phi2})"


def _zero() -> Elt:
    return (Fraction(0),) * 4


def elt(*cs) -> Elt:
    cs = list(cs) + [0] * (4 - len(cs))
    return tuple(Fraction(c) for c in cs)


@dataclass(frozen=True)
class CMField:
    a: int
    b: int
    D: int
    D0: int
    conductor: int  # D = conductor^2 * D0
    galois_type: GaloisType
    d: int
    d_K0: int
    d0: int
    integral_basis: tuple[Elt, ...]

    # ------------------------------------------------------ arithmetic
    def mul(self, x: Sequence, y: Sequence) -> Elt:
        a, b = self.a, self.b
        c = [Fraction(0)] * 7
        for i, xi in enumerate(x):
            if xi:
                for j, yj in enumerate(y):
                    if yj:
                        c[i + j] += xi * yj
        # x^6 = (a^2 - b) x^2 + ab,  x^5 = -a x^3 - b x,  x^4 = -a x^2 - b
        c[2] += (a * a - b) * c[6]
        c[0] += a * b * c[6]
        c[3] -= a * c[5]
        c[1] -= b * c[5]
        c[2] -= a * c[4]
        c[0] -= b * c[4]
        return (c[0], c[1], c[2], c[3])

    def add(self, x, y) -> Elt:
        return tuple(Fraction(u) + Fraction(v) for u, v in zip(x, y))

    def sub(self, x, y) -> Elt:
        return tuple(Fraction(u) - Fraction(v) for u, v in zip(x, y))

    def scale(self, c, x) -> Elt:
        c = Fraction(c)
        return tuple(c * v for v in x)

    def conj(self, x) -> Elt:
        return (Fraction(x[0]), -Fraction(x[1]), Fraction(x[2]), -Fraction(x[3]))

    def trace(self, x) -> Fraction:
        return 4 * Fraction(x[0]) - 2 * self.a * Fraction(x[2])

    def norm_k0(self, u, v) -> Fraction:
        """Norm K0 -> Q of u + v alpha^2."""
        return u * u - self.a * u * v + self.b * v * v

    def relative_norm(self, x) -> Elt:
        """x * conj(x), an element of K0."""
        return self.mul(x, self.conj(x))

    def norm(self, x) -> Fraction:
        n = self.relative_norm(x)
        return self.norm_k0(n[0], n[2])

    def inv(self, x) -> Elt:
        xc = self.conj(x)
        n = self.mul(x, xc)  # u + v s in K0
        u, v = n[0], n[2]
        nn = self.norm_k0(u, v)
        if nn == 0:
            raise ZeroDivisionError("inverse of zero")
        # (u + v s)^{-1} = (u + v s') / N,  s' = -a - s
        w = elt((u - self.a * v) / nn, 0, -v / nn, 0)
        return self.mul(xc, w)

    def div(self, x, y) -> Elt:
        return self.mul(x, self.inv(y))

    def power(self, x, n: int) -> Elt:
        if n < 0:
            return self.power(self.inv(x), -n)
        out, base = elt(1), tuple(Fraction(v) for v in x)
        while n:
            if n & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            n >>= 1
        return out

    def mult_matrix(self, y) -> list[list[Fraction]]:
        """Rows are alpha^i * y, so coords(x*y) = coords(x) @ M."""
        return [list(self.mul(elt(*([0] * i + [1])), y)) for i in range(4)]

    def in_k0(self, x) -> bool:
        return x[1] == 0 and x[3] == 0

    def is_imaginary(self, x) -> bool:
        return x[0] == 0 and x[2] == 0

    # ------------------------------------------------------ K0 data
    @property
    def sqrt_D0(self) -> Elt:
        return elt(Fraction(self.a, self.conductor), 0, Fraction(2, self.conductor), 0)

    @property
    def omega(self) -> Elt:
        """Generator of the ring of integers of K0."""
        r = self.sqrt_D0
        if self.D0 % 4 == 1:
            return self.scale(Fraction(1, 2), self.add(elt(1), r))
        return r

    def k0_elt(self, u, v) -> Elt:
        """u + v*omega as an element of K."""
        return self.add(elt(u), self.scale(v, self.omega))

    def k0_coords(self, x) -> tuple[Fraction, Fraction]:
        """(u, v) with x = u + v*omega for x in K0."""
        if not self.in_k0(x):
            raise ValueError("element not in K0")
        w = self.omega
        v = x[2] / w[2]
        return (x[0] - v * w[0], v)

    @cached_property
    def fundamental_unit(self) -> Elt:
        u, v = fundamental_unit(self.D0)
        return self.k0_elt(u, v)

    @cached_property
    def epsilon_float(self) -> float:
        u, v = fundamental_unit(self.D0)
        w = (1 + math.sqrt(self.D0)) / 2 if self.D0 % 4 == 1 else math.sqrt(self.D0)
        return u + v * w

    # ------------------------------------------------------ orders
    @cached_property
    def ring_of_integers(self) -> QLattice:
        return QLattice.from_rows([list(v) for v in self.integral_basis])

    @cached_property
    def trace_dual(self) -> QLattice:
        """Inverse different: {x : Tr(x O_K) in Z}."""
        W = [list(v) for v in self.integral_basis]
        T = [[self.trace(self.mul(u, v)) for v in W] for u in W]
        Tinv = linalg.inverse(T)
        rows = [[sum(Tinv[i][k] * W[k][j] for k in range(4)) for j in range(4)] for i in range(4)]
        return QLattice.from_rows(rows)

    # ------------------------------------------------------ embeddings
    def roots(self, ctx: PrecisionContext) -> list:
        """The four roots [r1, r2, conj(r1), conj(r2)] with r1, r2 in the upper half plane.

        r1 = i*sqrt((a + sqrt(D))/2), r2 = i*sqrt((a - sqrt(D))/2), polished by
        Newton iteration on x^4 + a x^2 + b.
        """
        mp = ctx.mp
        sD = mp.sqrt(self.D)
        out = []
        for s in (1, -1):
            r = mp.mpc(0, mp.sqrt((self.a + s * sD) / 2))
            for _ in range(3):
                f = r**4 + self.a * r**2 + self.b
                df = 4 * r**3 + 2 * self.a * r
                r = r - f / df
            out.append(r)
        return [out[0], out[1], mp.conj(out[0]), mp.conj(out[1])]

    def embed(self, x, k: int, ctx: PrecisionContext, roots=None):
        roots = roots or self.roots(ctx)
        r = roots[k]
        mp = ctx.mp
        acc = mp.mpc(0)
        for c in reversed(x):
            acc = acc * r + mp.mpf(c.numerator) / c.denominator
        return acc

    def automorphisms(self) -> list[Elt]:
        """Images of alpha under Aut(K)."""
        al = elt(0, 1)
        out = [al, self.scale(-1, al)]
        if self.galois_type is GaloisType.CYCLIC:
            m = math.isqrt(self.b * self.D)
            sqrtD = elt(self.a, 0, 2)
            beta = self.div(elt(m), self.mul(al, sqrtD))
            f = self.add(self.add(self.power(beta, 4), self.scale(self.a, self.power(beta, 2))), elt(self.b))
            if any(f):
                raise AssertionError("cyclic automorphism check failed")
            out += [beta, self.scale(-1, beta)]
        return out


def _maximal_order(K_tmp: "CMField") -> QLattice:
    """Round-2 enlargement of Z[alpha] at every prime whose square divides disc(f)."""
    a, b = K_tmp.a, K_tmp.b
    D = a * a - 4 * b
    disc_f = 16 * b * D * D
    O = QLattice.from_rows([list(elt(*([0] * i + [1]))) for i in range(4)])
    for p, e in factor(disc_f).factors:
        if e < 2:
            continue
        for _ in range(64):
            Op = _enlarge_at(K_tmp, O, p)
            if Op == O:
                break
            O = Op
        else:
            raise MaximalOrderFailure(f"enlargement at p={p} did not stabilize")
    return O


def structure_constants(K: CMField, O: QLattice) -> list[list[list[int]]]:
    B = O.basis()
    C = []
    for u in B:
        row = []
        for v in B:
            c = O.coords(K.mul(u, v))
            if c is None or any(t.denominator != 1 for t in c):
                raise MaximalOrderFailure("lattice is not a ring")
            row.append([int(t) for t in c])
        C.append(row)
    return C


def fp_mul(C, x, y, p):
    n = len(x)
    out = [0] * n
    for i in range(n):
        if x[i]:
            for j in range(n):
                if y[j]:
                    xy = x[i] * y[j]
                    cij = C[i][j]
                    for k in range(n):
                        out[k] += xy * cij[k]
    return [v % p for v in out]


def fp_pow(C, x, e, one, p):
    out, base = list(one), list(x)
    while e:
        if e & 1:
            out = fp_mul(C, out, base, p)
        base = fp_mul(C, base, base, p)
        e >>= 1
    return out


def p_radical(K: CMField, O: QLattice, p: int) -> QLattice:
    """{x in O : x^(p^k) in pO} for p^k >= 4."""
    C = structure_constants(K, O)
    n = 4
    one = [int(t) for t in O.coords(elt(1))]
    q = p
    while q < n:
        q *= p
    rows = [fp_pow(C, [int(i == j) for j in range(n)], q, one, p) for i in range(n)]
    ker = linalg.fp_kernel(rows, p)
    B = O.basis()
    gens = [[sum(Fraction(v[i]) * B[i][j] for i in range(n)) for j in range(n)] for v in ker]
    gens += [[p * t for t in r] for r in B]
    return QLattice.from_rows(gens)


def colon(K: CMField, I: QLattice, J: QLattice) -> QLattice:
    """{x in K : x J subset I} for full-rank lattices."""
    Ib_inv = linalg.inverse(I.basis())
    dual_gens = []
    for y in J.basis():
        A = linalg.matmul(K.mult_matrix(y), Ib_inv)
        dual_gens += linalg.transpose(A)
    return QLattice.from_rows(dual_gens).dual()


def _enlarge_at(K: CMField, O: QLattice, p: int) -> QLattice:
    R = p_radical(K, O, p)
    return colon(K, R, R)


def _disc_of_basis(K: CMField, W) -> Fraction:
    T = [[K.trace(K.mul(u, v)) for v in W] for u in W]
    return linalg.det(T)


def cmfield_from_quartic(a: int, b: int, expected_d: int | None = None, expected_d0: int | None = None) -> CMField:
    """Build the CM field defined by x^4 + a x^2 + b.

    Raises :class:`NotCM` for non-CM or reducible input and
    :class:`BiquadraticRejected` when the Galois group is the Klein group.
    """
    gt = classify_galois(a, b)
    if gt is GaloisType.BIQUADRATIC:
        raise BiquadraticRejected(f"x^4 + {a}x^2 + {b}: b is a square, Galois group is Klein four")
    D = a * a - 4 * b
    D0, cond = squarefree_part(D)
    d_K0 = D0 if D0 % 4 == 1 else 4 * D0
    proto = CMField(a, b, D, D0, cond, gt, 0, d_K0, 0, ())
    O = _maximal_order(proto)
    W = tuple(tuple(r) for r in O.basis())
    disc = _disc_of_basis(proto, W)
    if disc.denominator != 1:
        raise MaximalOrderFailure("non-integral discriminant")
    d = abs(int(disc))
    if d % (d_K0 * d_K0):
        raise MaximalOrderFailure(f"d = {d} not divisible by d_K0^2 = {d_K0**2}")
    d0 = d // (d_K0 * d_K0)
    if expected_d is not None and expected_d != d:
        warnings.warn(f"field ({a},{b}): supplied d={expected_d} but computed d={d}; using supplied value")
        d = expected_d
        d0 = d // (d_K0 * d_K0)
    if expected_d0 is not None and expected_d0 != d0:
        warnings.warn(f"field ({a},{b}): supplied d0={expected_d0} but computed d0={d0}; using supplied value")
        d0 = expected_d0
    return CMField(a, b, D, D0, cond, gt, d, d_K0, d0, W)


def compute_discriminants(K: CMField) -> tuple[int, int, int]:
    return K.d, K.d_K0, K.d0


def _raw_types() -> list[CMType]:
    return [CMType(i, j) for i in (0, 2) for j in (1, 3)]


def _embedding_permutation(K: CMField, sigma: Elt, ctx: PrecisionContext) -> list[int]:
    """k -> k' with phi_k o sigma = phi_k'."""
    roots = K.roots(ctx)
    perm = []
    for k in range(4):
        z = K.embed(sigma, k, ctx, roots)
        dist = [abs(z - r) for r in roots]
        perm.append(min(range(4), key=lambda i: dist[i]))
    if sorted(perm) != [0, 1, 2, 3]:
        raise AssertionError("automorphism does not permute the embeddings")
    return perm


def cm_type_orbits(K: CMField) -> list[list[CMType]]:
    """Partition the four raw CM types into equivalence classes.

    Equivalence is generated by composing with automorphisms of K on the
    right and with complex conjugation on the left.
    """
    ctx = PrecisionContext(64)
    perms = [_embedding_permutation(K, s, ctx) for s in K.automorphisms()]
    perms.append([(k + 2) % 4 for k in range(4)])

    def act(perm, t: CMType) -> CMType:
        i, j = perm[t.phi1], perm[t.phi2]
        return CMType(*sorted((i, j), key=lambda k: k % 2))

    seen: set[CMType] = set()
    orbits = []
    for t in _raw_types():
        if t in seen:
            continue
        orbit, frontier = {t}, [t]
        while frontier:
            u = frontier.pop()
            for pm in perms:
                v = act(pm, u)
                if v not in orbit:
                    orbit.add(v)
                    frontier.append(v)
        seen |= orbit
        orbits.append(sorted(orbit, key=lambda c: c.indices))
    return orbits


def cm_types(K: CMField, all_raw: bool = False) -> list[CMType]:
    """Inequivalent CM types (one per orbit), or all four raw types."""
    if all_raw:
        return _raw_types()
    return [orb[0] for orb in cm_type_orbits(K)]


def embeddings(K: CMField, ctx: PrecisionContext) -> list:
    return K.roots(ctx)


# ------------------------------------------------------------ real quadratic


def _cf_quadratic(P: int, Q: int, N: int):
    """Partial quotients of (P + sqrt(N)) / Q, requiring Q > 0 and Q | N - P^2."""
    s = math.isqrt(N)
    while True:
        if Q <= 0:
            raise ArithmeticError("continued fraction left the reduced range")
        a = (P + s) // Q
        yield a
        P = a * Q - P
        Q = (N - P * P) // Q


def fundamental_unit(D0: int) -> tuple[int, int]:
    """Fundamental unit u + v*omega > 1 of the real quadratic field Q(sqrt(D0)).

    omega = (1 + sqrt(D0))/2 when D0 = 1 mod 4, else sqrt(D0).  The unit is
    read off the first continued-fraction convergent of omega whose norm form
    value is +-1.
    """
    if D0 <= 1 or squarefree_part(D0)[1] != 1:
        raise ValueError("D0 must be a squarefree integer > 1")
    if D0 % 4 == 1:
        P, Q, T = 1, 2, 1
        c = (D0 - 1) // 4

        def nrm(x, y):
            return x * x + x * y - c * y * y
    else:
        P, Q, T = 0, 1, 0

        def nrm(x, y):
            return x * x - D0 * y * y
    p0, q0, p1, q1 = 0, 1, 1, 0
    for i, a in enumerate(_cf_quadratic(P, Q, D0)):
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        if abs(nrm(p1, -q1)) == 1:
            return (p1 - q1 * T, q1)
        if i > 10**6:
            raise RuntimeError("continued fraction did not reach a unit")
    raise AssertionError("unreachable")


def k0_norm_form(D0: int):
    if D0 % 4 == 1:
        c = (D0 - 1) // 4
        return lambda x, y: x * x + x * y - c * y * y
    return lambda x, y: x * x - D0 * y * y


def k0_represents(D0: int, n: int) -> tuple[int, int] | None:
    """Some x + y*omega of norm +-n, or None if there is none.

    Multiplying by powers of the fundamental unit brings any solution to one
    with both real embeddings at most sqrt(n * eps) in size, which bounds
    |y| <= 2 sqrt(n * eps / D0); x then solves a quadratic.
    """
    if n == 1:
        return (1, 0)
    eps = _eps_float(D0)
    ymax = int(2 * math.sqrt(n * eps / D0)) + 2
    for y in range(0, ymax + 1):
        for sgn in (1, -1):
            if D0 % 4 == 1:
                # (2x + y)^2 - D0 y^2 = 4 * (+-n)
                disc = D0 * y * y + 4 * sgn * n
                if disc < 0 or not is_square(disc):
                    continue
                r = math.isqrt(disc)
                for t in (r, -r):
                    if (t - y) % 2 == 0:
                        return ((t - y) // 2, y)
            else:
                disc = D0 * y * y + sgn * n
                if disc >= 0 and is_square(disc):
                    return (math.isqrt(disc), y)
    return None


def _eps_float(D0: int) -> float:
    u, v = fundamental_unit(D0)
    w = (1 + math.sqrt(D0)) / 2 if D0 % 4 == 1 else math.sqrt(D0)
    return u + v * w


def k0_class_number_is_one(D0: int) -> bool:
    """True iff every ideal class of Q(sqrt(D0)) below the Minkowski bound is trivial."""
    dK = D0 if D0 % 4 == 1 else 4 * D0
    bound = math.isqrt(dK) // 2 + 1
    for p in range(2, bound + 1):
        if not is_probable_prime(p):
            continue
        if p * p > dK / 4:
            break
        # p inert iff (dK / p) = -1
        if _kronecker(dK, p) == -1:
            continue
        if k0_represents(D0, p) is None:
            return False
    return True


def _kronecker(D: int, p: int) -> int:
    if p == 2:
        if D % 2 == 0:
            return 0
        return 1 if D % 8 in (1, 7) else -1
    r = pow(D % p, (p - 1) // 2, p)
    return 0 if r == 0 else (1 if r == 1 else -1)
