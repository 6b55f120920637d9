"""Ideal classes of O_K and relative bases {1, tau} over O_K0.

Ideals are full-rank :class:`~igusa_cm.linalg.QLattice` objects in the
power-basis coordinates of K.  Principality is decided by enumerating the
T2 ellipsoid ``Tr(x * conj(x)) <= bound``; the radius that certifies a
negative answer comes from balancing a generator by powers of the
fundamental unit of K0.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

from . import linalg
from .cmfield import (
    CMField,
    Elt,
    colon,
    elt,
    fp_mul,
    fp_pow,
    k0_class_number_is_one,
    structure_constants,
)
from .linalg import QLattice
from .numeric import is_probable_prime

log = logging.getLogger(__name__)

CLASS_CAP = 64


class ClassGroupTooLarge(RuntimeError):
    pass


class PrincipalityTimeout(RuntimeError):
    """Enumeration radius exhausted before a definite answer."""


class K0ClassNumberNotOne(RuntimeError):
    pass


class InvalidIdealData(ValueError):
    pass


# ------------------------------------------------------------ ideal algebra


def ideal_from_gens(K: CMField, gens) -> QLattice:
    rows = [list(K.mul(g, w)) for g in gens for w in K.integral_basis]
    return QLattice.from_rows(rows)


def ideal_mul(K: CMField, I: QLattice, J: QLattice) -> QLattice:
    return QLattice.from_rows([list(K.mul(u, v)) for u in I.basis() for v in J.basis()])


def ideal_norm(K: CMField, I: QLattice) -> Fraction:
    return I.volume() / K.ring_of_integers.volume()


def ideal_inv(K: CMField, I: QLattice) -> QLattice:
    return colon(K, K.ring_of_integers, I)


def ideal_conj(K: CMField, I: QLattice) -> QLattice:
    return QLattice.from_rows([list(K.conj(v)) for v in I.basis()])


def is_ideal(K: CMField, I: QLattice) -> bool:
    return all(K.mul(u, w) in I for u in I.basis() for w in K.integral_basis)


def t2_gram(K: CMField, basis) -> list[list[Fraction]]:
    return [[K.trace(K.mul(u, K.conj(v))) for v in basis] for u in basis]


def combine(basis, v) -> Elt:
    return tuple(sum(Fraction(c) * b[j] for c, b in zip(v, basis)) for j in range(4))


@dataclass(frozen=True)
class IdealRep:
    """A fractional ideal with its exact norm.

    ``lattice`` holds the Z-basis in power-basis coordinates; :meth:`hnf`
    is its canonical Hermite form, used for ordering and equality.
    """

    lattice: QLattice
    norm: Fraction

    @classmethod
    def of(cls, K: CMField, lattice: QLattice) -> "IdealRep":
        return cls(lattice, ideal_norm(K, lattice))

    @property
    def hnf(self):
        return (self.lattice.den, self.lattice.H)

    def basis(self):
        return self.lattice.basis()

    def integral_coords(self, K: CMField) -> list[list[Fraction]]:
        """Z-basis written in the integral basis of K."""
        Winv = linalg.inverse([list(v) for v in K.integral_basis])
        return [linalg.vecmat(v, Winv) for v in self.basis()]

    def sort_key(self):
        return (self.norm, self.hnf)


# ------------------------------------------------------------ primes


def _fp_reduce(rows, pivots, v, p):
    v = [x % p for x in v]
    for r, c in zip(rows, pivots):
        if v[c]:
            f = v[c]
            v = [(x - f * y) % p for x, y in zip(v, r)]
    return v


def _pivots(rref_rows):
    return [next(j for j, x in enumerate(r) if x) for r in rref_rows]


def _split_components(C, one, I_rows, p):
    """Maximal ideals of A = O_K/p containing the ideal spanned by I_rows."""
    n = len(one)
    I = linalg.fp_rref(I_rows, p) if I_rows else []
    piv = _pivots(I)
    frob = []
    for i in range(n):
        e = [int(i == j) for j in range(n)]
        fe = fp_pow(C, e, p, one, p)
        frob.append(_fp_reduce(I, piv, [(x - y) % p for x, y in zip(fe, e)], p))
    S = linalg.fp_kernel(frob, p)
    r = len(S) - len(I)
    if r <= 1:
        return [I]
    base = linalg.fp_rref(I + [one], p)
    z = next(s for s in S if linalg.fp_span_dim(base + [s], p) > len(base))
    out = []
    for c in range(p):
        zc = [(x - c * y) % p for x, y in zip(z, one)]
        gens = I + [fp_mul(C, zc, [int(i == j) for j in range(n)], p) for i in range(n)]
        Ic = linalg.fp_rref(gens, p)
        if len(Ic) < n:
            out += _split_components(C, one, Ic, p)
    return out


@dataclass(frozen=True)
class PrimeIdeal:
    p: int
    f: int
    rep: IdealRep


def prime_ideals_above(K: CMField, p: int) -> list[PrimeIdeal]:
    """Prime ideals of O_K over ``p`` with their residue degrees."""
    O = K.ring_of_integers
    C = structure_constants(K, O)
    one = [int(t) for t in O.coords(elt(1))]
    n = 4
    q = p
    while q < n:
        q *= p
    rows = [fp_pow(C, [int(i == j) for j in range(n)], q, one, p) for i in range(n)]
    J = linalg.fp_kernel(rows, p)
    W = O.basis()
    out = []
    for M in _split_components(C, one, J, p):
        gens = [combine(W, m) for m in M] + [tuple(p * t for t in w) for w in W]
        lat = QLattice.from_rows([list(g) for g in gens])
        f = n - len(M)
        out.append(PrimeIdeal(p, f, IdealRep(lat, Fraction(p**f))))
    out.sort(key=lambda P: P.rep.sort_key())
    return out


def minkowski_bound(K: CMField) -> float:
    return (24 / 256) * (4 / math.pi) ** 2 * math.sqrt(K.d)


def ideals_up_to(K: CMField, bound: float) -> list[IdealRep]:
    """All integral ideals of norm <= bound, as products of small primes."""
    primes = []
    for p in range(2, int(bound) + 1):
        if is_probable_prime(p):
            primes += [P for P in prime_ideals_above(K, p) if P.rep.norm <= bound]
    unit = IdealRep(K.ring_of_integers, Fraction(1))
    found = {unit.hnf: unit}

    def extend(I: IdealRep, start: int):
        for k in range(start, len(primes)):
            P = primes[k]
            if I.norm * P.rep.norm > bound:
                continue
            J = IdealRep(ideal_mul(K, I.lattice, P.rep.lattice), I.norm * P.rep.norm)
            if J.hnf not in found:
                found[J.hnf] = J
            extend(J, k)

    extend(unit, 0)
    return sorted(found.values(), key=IdealRep.sort_key)


# ------------------------------------------------------------ principality


def certified_multiplier(K: CMField) -> float:
    """T2 radius (in units of 4 sqrt(N)) that contains a balanced generator."""
    e = K.epsilon_float
    return (e + 1 / e) / 2


def is_principal(K: CMField, I, radius: float = 1.2, rounds: int = 3) -> Elt | None:
    """A generator of the fractional ideal ``I``, or None if it is not principal.

    The search radius starts at ``radius`` times the AM-GM floor 4 sqrt(N(I))
    and grows by 1.5 per round.  A None answer is only returned once the
    radius reaches the certified multiplier; otherwise PrincipalityTimeout.
    """
    lat = I.lattice if isinstance(I, IdealRep) else I
    N = ideal_norm(K, lat)
    if lat == K.ring_of_integers:
        return elt(1)
    basis = lat.basis()
    G = t2_gram(K, basis)
    cert = certified_multiplier(K)
    base = 4 * math.sqrt(N)
    m = radius
    for _ in range(rounds + 1):
        m_eff = min(m, cert * (1 + 1e-9))
        bound = Fraction(base * m_eff) * Fraction(1000001, 1000000)
        for v in linalg.short_vectors(G, bound):
            x = combine(basis, v)
            if abs(K.norm(x)) == N:
                return x
        if m_eff >= cert:
            return None
        m *= 1.5
    raise PrincipalityTimeout(f"radius {m / 1.5:.3g} below certified {cert:.3g} for ideal of norm {N}")


def _principal_escalating(K: CMField, I, max_rounds: int = 24):
    rounds = 3
    while True:
        try:
            return is_principal(K, I, rounds=rounds)
        except PrincipalityTimeout:
            if rounds >= max_rounds:
                raise
            rounds += 3


def equivalent(K: CMField, I: IdealRep, J: IdealRep) -> bool:
    Q = ideal_mul(K, I.lattice, ideal_inv(K, J.lattice))
    return _principal_escalating(K, Q) is not None


# ------------------------------------------------------------ relative basis


def k0_generator(K: CMField, lat: QLattice) -> Elt:
    """Generator of a rank-2 lattice that is a fractional ideal of O_K0."""
    Ob = [list(elt(1)), list(K.omega)]
    O0 = QLattice.from_rows(Ob)
    m = 1
    for v in lat.basis():
        c = O0.coords(v)
        for t in c:
            m = m * t.denominator // math.gcd(m, t.denominator)
    scaled = lat.scale(m)
    n = _k0_lattice_norm(K, scaled)
    for x, y in _k0_elements_of_norm(K.D0, n):
        g = K.k0_elt(x, y)
        if g in scaled and _k0_lattice_norm(K, QLattice.from_rows([list(g), list(K.mul(g, K.omega))])) == n:
            return K.scale(Fraction(1, m), g)
    raise K0ClassNumberNotOne(f"no generator for K0 ideal of norm {n}")


def _k0_lattice_norm(K: CMField, lat: QLattice) -> Fraction:
    def vol(rows):
        return abs(rows[0][0] * rows[1][2] - rows[0][2] * rows[1][0])

    return vol(lat.basis()) / vol([list(elt(1)), list(K.omega)])


def _k0_elements_of_norm(D0: int, n) -> list[tuple[int, int]]:
    """All x + y*omega (y >= 0) of norm +-n in the unit-balanced region."""
    from .cmfield import _eps_float

    n = int(n)
    eps = _eps_float(D0)
    ymax = int(2 * math.sqrt(n * eps / D0)) + 2
    out = []
    for y in range(0, ymax + 1):
        for sgn in (1, -1):
            if D0 % 4 == 1:
                disc = D0 * y * y + 4 * sgn * n
                if disc < 0 or math.isqrt(disc) ** 2 != disc:
                    continue
                r = math.isqrt(disc)
                for t in {r, -r}:
                    if (t - y) % 2 == 0:
                        out.append(((t - y) // 2, y))
            else:
                disc = D0 * y * y + sgn * n
                if disc >= 0 and math.isqrt(disc) ** 2 == disc:
                    r = math.isqrt(disc)
                    out += [(r, y), (-r, y)] if r else [(0, y)]
    return out


@lru_cache(maxsize=None)
def _k0_h1(D0: int) -> bool:
    return k0_class_number_is_one(D0)


def relative_basis(K: CMField, I: IdealRep) -> tuple[Elt, Elt]:
    """Return (tau, h) with I = h * (O_K0 + tau * O_K0), h in K0.

    I intersect K0 = h O_K0, and the projection of I onto the alpha-part
    K0 * alpha is generated by g; any x0 in I projecting to g gives
    tau = x0 / h.
    """
    if not _k0_h1(K.D0):
        raise K0ClassNumberNotOne(f"Q(sqrt({K.D0})) has class number > 1")
    lat = I.lattice
    c = lat.sublattice_where_zero([1, 3])
    B = lat.basis()
    proj = [[v[1], 0, v[3], 0] for v in B]
    b = QLattice.from_rows(proj)
    h = k0_generator(K, c)
    g = k0_generator(K, b)
    t = linalg.solve_integer(proj, list(g))
    if t is None:
        raise AssertionError("projection generator not hit by the ideal")
    x0 = combine(B, t)
    tau = K.div(x0, h)
    return tau, h


def relative_lattice(K: CMField, tau) -> QLattice:
    """Z-lattice spanned by {1, omega, tau, omega*tau}."""
    return QLattice.from_rows([list(elt(1)), list(K.omega), list(tau), list(K.mul(K.omega, tau))])


@dataclass(frozen=True)
class IdealClass:
    """One ideal class: integral representative, tau, and the K0 scale h.

    The fractional ideal actually used downstream is rep / h, which has
    Z-basis {1, omega, tau, omega*tau}.
    """

    rep: IdealRep
    tau: Elt
    h: Elt
    orientation_normalized: bool = True

    def z_basis(self, K: CMField) -> list[Elt]:
        return [elt(1), K.omega, self.tau, K.mul(K.omega, self.tau)]


def verify_class(K: CMField, cls: IdealClass) -> None:
    """Exact checks: {1, omega, tau, omega tau} is a basis of rep / h."""
    if K.in_k0(cls.tau):
        raise AssertionError("tau lies in K0")
    target = QLattice.from_rows([list(K.div(v, cls.h)) for v in cls.rep.basis()])
    M = [[Fraction(x) for x in target.coords(v)] for v in cls.z_basis(K)]
    if any(x.denominator != 1 for r in M for x in r) or abs(linalg.det(M)) != 1:
        raise AssertionError("relative basis change is not unimodular")


def make_class(K: CMField, I: IdealRep) -> IdealClass:
    tau, h = relative_basis(K, I)
    cls = IdealClass(I, tau, h)
    verify_class(K, cls)
    return cls


def class_group(K: CMField, bound_multiplier: float = 1.0, cap: int = CLASS_CAP) -> list[IdealClass]:
    """One minimal-norm representative per ideal class of O_K."""
    bound = minkowski_bound(K) * bound_multiplier
    reps: list[IdealRep] = []
    for I in ideals_up_to(K, bound):
        if any(equivalent(K, I, R) for R in reps):
            continue
        reps.append(I)
        if len(reps) > cap:
            raise ClassGroupTooLarge(f"more than {cap} classes")
    log.info("field (%d,%d): %d ideal classes below norm %.2f", K.a, K.b, len(reps), bound)
    return [make_class(K, I) for I in reps]


# ------------------------------------------------------------ external data


def load_ideal_data(K: CMField, path: str | Path) -> list[IdealClass]:
    """Read external ideal-class records and validate them.

    Each record is ``{"Z_basis": 4x4 integers (rows in the integral basis
    of K), "tau_coordinates": 4 rationals in the power basis}``.
    """
    records = json.loads(Path(path).read_text())
    return [ideal_class_from_record(K, r) for r in records]


def ideal_class_from_record(K: CMField, rec: dict) -> IdealClass:
    W = [list(v) for v in K.integral_basis]
    Z = rec["Z_basis"]
    if len(Z) != 4 or any(len(r) != 4 for r in Z):
        raise InvalidIdealData("Z_basis must be 4x4")
    rows = [linalg.vecmat([Fraction(x) for x in r], W) for r in Z]
    lat = QLattice.from_rows(rows)
    if lat.rank != 4 or not is_ideal(K, lat):
        raise InvalidIdealData("Z_basis does not span an O_K-ideal")
    tau = tuple(Fraction(x) for x in rec["tau_coordinates"])
    if len(tau) != 4 or K.in_k0(tau):
        raise InvalidIdealData("tau must be a K-element outside K0")
    rl = relative_lattice(K, tau)
    if not is_ideal(K, rl):
        raise InvalidIdealData("O_K0 + tau O_K0 is not an O_K-module")
    quotient = ideal_mul(K, lat, ideal_inv(K, rl))
    h = _principal_escalating(K, quotient)
    if h is None or not K.in_k0(h):
        # any generator can be adjusted by a unit; insist on one in K0
        h = _k0_scale_between(K, lat, rl)
    rep = IdealRep.of(K, lat)
    cls = IdealClass(rep, tau, h)
    verify_class(K, cls)
    return cls


def _k0_scale_between(K: CMField, lat: QLattice, rl: QLattice) -> Elt:
    q = ideal_mul(K, lat, ideal_inv(K, rl))
    c = q.sublattice_where_zero([1, 3])
    if c.rank != 2:
        raise InvalidIdealData("ideal is not a K0-multiple of O_K0 + tau O_K0")
    h = k0_generator(K, c)
    if QLattice.from_rows([list(K.mul(h, v)) for v in rl.basis()]) != lat:
        raise InvalidIdealData("ideal is not a K0-multiple of O_K0 + tau O_K0")
    return h
