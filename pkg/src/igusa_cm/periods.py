"""Principal polarizations, symplectic bases and period matrices.

For an ideal class a with Z-basis z_1..z_4 and a CM type Phi, a principal
polarization is a purely imaginary xi generating (a abar D)^(-1), D the
different, with Im phi(xi) > 0 on Phi.  The pairing E(x, y) = Tr(xi x ybar)
is unimodular on a; a symplectic basis (e1, e2, f1, f2) of E, embedded by
Phi, gives Omega = P2^(-1) P1 with P1 = Phi(e), P2 = Phi(f).

Period matrices are 2x2 tuples of mpmath complex numbers living on the
context of the :class:`~igusa_cm.numeric.PrecisionContext` that made them.
"""
from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field

from . import linalg
from .classgroup import (
    IdealClass,
    combine,
    ideal_conj,
    ideal_inv,
    ideal_mul,
    ideal_norm,
    relative_lattice,
    t2_gram,
)
from .cmfield import CMField, CMType, Elt
from .linalg import QLattice
from .numeric import PrecisionContext

log = logging.getLogger(__name__)

UNIT_WINDOW = 8
J4 = ((0, 0, 1, 0), (0, 0, 0, 1), (-1, 0, 0, 0), (0, -1, 0, 0))


class NoPrincipalPolarization(RuntimeError):
    pass


class WindowExhausted(RuntimeError):
    pass


class NotPrincipal(ValueError):
    """Alternating form without elementary divisors (1, 1)."""


class DegenerateLattice(RuntimeError):
    pass


class ReductionStall(RuntimeWarning):
    pass


# ------------------------------------------------------------ polarizations


@dataclass(frozen=True)
class Polarization:
    xi: Elt
    pairing_matrix: tuple[tuple[int, ...], ...]
    basis: tuple[Elt, ...]


def pairing_matrix(K: CMField, xi, basis) -> list[list[int]]:
    E = []
    for x in basis:
        row = []
        for y in basis:
            v = K.trace(K.mul(xi, K.mul(x, K.conj(y))))
            if v.denominator != 1:
                raise NotPrincipal("pairing is not integral")
            row.append(int(v))
        E.append(row)
    return E


def _is_unit_norm(K: CMField, eps: Elt) -> bool:
    """Whether the totally positive unit ``eps`` of K0 is u * conj(u) for a unit u of K."""
    O = K.ring_of_integers
    B = O.basis()
    bound = 2 * K.trace(eps)
    for v in linalg.short_vectors(t2_gram(K, B), bound):
        u = combine(B, v)
        if K.mul(u, K.conj(u)) == tuple(eps):
            return True
    return False


def _signs(K: CMField, x, phi: CMType, ctx: PrecisionContext, roots) -> tuple[int, int]:
    return tuple(1 if K.embed(x, k, ctx, roots).imag > 0 else -1 for k in phi.indices)


def polarization_target(K: CMField, lattice: QLattice) -> QLattice:
    """(a abar)^(-1) D^(-1) for the ideal spanned by ``lattice``."""
    aa = ideal_mul(K, lattice, ideal_conj(K, lattice))
    return ideal_mul(K, ideal_inv(K, aa), K.trace_dual)


def imaginary_generator(K: CMField, T: QLattice) -> Elt | None:
    """A purely imaginary generator of T, searched in the rank-2 lattice T cap alpha K0.

    The certified T2 radius 2 sqrt(N) (eps + 1/eps) contains a unit-balanced
    generator, so None means no purely imaginary generator exists.
    """
    Tm = T.sublattice_where_zero([0, 2])
    N = abs(ideal_norm(K, T))
    B = Tm.basis()
    e = K.epsilon_float
    from fractions import Fraction

    bound = Fraction(2 * math.sqrt(N) * (e + 1 / e)) * Fraction(1000001, 1000000)
    for v in linalg.short_vectors(t2_gram(K, B), bound):
        x = combine(B, v)
        if abs(K.norm(x)) == N:
            return x
    return None


def polarizations(
    K: CMField, cls: IdealClass, phi: CMType, ctx: PrecisionContext | None = None, window: int = UNIT_WINDOW
) -> list[Polarization]:
    """All principal polarizations of (cls, phi) up to xi ~ u ubar xi."""
    if window < 1:
        raise WindowExhausted("unit window must include k = 1")
    ctx = ctx or PrecisionContext(128)
    roots = K.roots(ctx)
    basis = tuple(cls.z_basis(K))
    lat = relative_lattice(K, cls.tau)
    xi0 = imaginary_generator(K, polarization_target(K, lat))
    if xi0 is None:
        raise NoPrincipalPolarization("(a abar D)^(-1) has no purely imaginary generator")
    eps = K.fundamental_unit
    eps_is_norm = K.norm_k0(*K.k0_coords(eps)) == 1 and _is_unit_norm(K, eps if K.epsilon_float > 0 else K.scale(-1, eps))
    kept: list[tuple[int, Elt]] = []
    for k in sorted(range(-window, window + 1), key=lambda t: (abs(t), t < 0)):
        base = K.mul(xi0, K.power(eps, k))
        for sgn in (1, -1):
            xi = K.scale(sgn, base)
            if _signs(K, xi, phi, ctx, roots) != (1, 1):
                continue
            # xi eps^k / xi eps^j is totally positive here, so it is a norm
            # iff k - j is even or eps itself is a norm
            if any((k - j) % 2 == 0 or eps_is_norm for j, _ in kept):
                continue
            kept.append((k, xi))
    if not kept:
        raise NoPrincipalPolarization(f"no xi with positive signs on {phi}")
    out = []
    for _, xi in kept:
        E = pairing_matrix(K, xi, basis)
        if linalg.det(E) != 1:
            raise NotPrincipal("pairing determinant is not 1")
        out.append(Polarization(xi, tuple(tuple(r) for r in E), basis))
    return out


# ------------------------------------------------------------ symplectic basis


def _form(E, x, y):
    return sum(x[i] * E[i][j] * y[j] for i in range(len(x)) for j in range(len(y)))


def _gcd_combination(vals):
    """(g, c) with sum c_i vals_i = g = gcd(vals) >= 0."""
    g, c = 0, [0] * len(vals)
    for i, v in enumerate(vals):
        g2, s, t = linalg._xgcd(g, v)
        c = [s * x for x in c]
        c[i] += t
        g = g2
    if g < 0:
        g, c = -g, [-x for x in c]
    return g, c


def symplectic_basis(E) -> list[list[int]]:
    """Unimodular U with U^T E U = J (symplectic Gram-Schmidt over Z)."""
    n = len(E)
    if any(E[i][j] != -E[j][i] for i in range(n) for j in range(n)):
        raise NotPrincipal("form is not alternating")
    if linalg.det(E) != 1:
        raise NotPrincipal("determinant is not 1")
    L = [[int(i == j) for j in range(n)] for i in range(n)]
    es, fs = [], []
    while L:
        e = L[0]
        g, c = _gcd_combination([_form(E, e, v) for v in L])
        if g != 1:
            raise NotPrincipal("elementary divisors are not all 1")
        f = [sum(ci * v[j] for ci, v in zip(c, L)) for j in range(n)]
        proj = [[w[j] - _form(E, w, f) * e[j] + _form(E, w, e) * f[j] for j in range(n)] for w in L]
        L = [r for r in linalg.hnf(proj) if any(r)]
        es.append(e)
        fs.append(f)
    return linalg.transpose(es + fs)


# ------------------------------------------------------------ 2x2 complex helpers


def m2_mul(A, B):
    return tuple(tuple(A[i][0] * B[0][j] + A[i][1] * B[1][j] for j in range(2)) for i in range(2))


def m2_add(A, B):
    return tuple(tuple(A[i][j] + B[i][j] for j in range(2)) for i in range(2))


def m2_det(A):
    return A[0][0] * A[1][1] - A[0][1] * A[1][0]


def m2_inv(A):
    d = m2_det(A)
    return ((A[1][1] / d, -A[0][1] / d), (-A[1][0] / d, A[0][0] / d))


def m2_imag(A):
    return tuple(tuple(x.imag for x in r) for r in A)


def m2_real(A):
    return tuple(tuple(x.real for x in r) for r in A)


def lambda_min(Y):
    """Smallest eigenvalue of a real symmetric 2x2 matrix."""
    a, b, d = Y[0][0], (Y[0][1] + Y[1][0]) / 2, Y[1][1]
    tr, det = a + d, a * d - b * b
    disc = (a - d) ** 2 + 4 * b * b
    return (tr - disc**0.5) / 2 if disc else tr / 2


# ------------------------------------------------------------ period matrices


@dataclass(frozen=True)
class PeriodMatrix:
    omega: tuple
    source: tuple[int, int, int] = (0, 0, 0)
    reduced: bool = False
    gamma: tuple | None = None
    ctx: PrecisionContext | None = field(default=None, compare=False)


def check_siegel(omega, ctx: PrecisionContext) -> None:
    mp = ctx.mp
    tol = mp.ldexp(1, -ctx.tail_bits)
    scale = max(1, max(abs(x) for r in omega for x in r))
    if abs(omega[0][1] - omega[1][0]) > tol * scale:
        raise DegenerateLattice("period matrix is not symmetric")
    Y = m2_imag(omega)
    if not (Y[0][0] > tol and Y[0][0] * Y[1][1] - Y[0][1] * Y[1][0] > tol):
        raise DegenerateLattice("imaginary part is not positive definite")


def period_matrix(
    K: CMField, cls: IdealClass, phi: CMType, pol: Polarization, ctx: PrecisionContext, source=(0, 0, 0)
) -> PeriodMatrix:
    U = symplectic_basis([list(r) for r in pol.pairing_matrix])
    if linalg.matmul(linalg.matmul(linalg.transpose(U), [list(r) for r in pol.pairing_matrix]), U) != [list(r) for r in J4]:
        raise AssertionError("symplectic basis check failed")
    Ut = linalg.transpose(U)
    vecs = [combine(pol.basis, col) for col in Ut]
    roots = K.roots(ctx)
    P = [[K.embed(v, k, ctx, roots) for v in vecs] for k in phi.indices]
    P1 = ((P[0][0], P[0][1]), (P[1][0], P[1][1]))
    P2 = ((P[0][2], P[0][3]), (P[1][2], P[1][3]))
    floor = ctx.mp.ldexp(1, -ctx.tail_bits)
    for A, B in ((P2, P1), (P1, P2)):
        if abs(m2_det(A)) < floor:
            raise DegenerateLattice("singular period block")
        om = m2_mul(m2_inv(A), B)
        om = ((om[0][0], (om[0][1] + om[1][0]) / 2), ((om[0][1] + om[1][0]) / 2, om[1][1])) if _near_sym(om, floor) else om
        Y = m2_imag(om)
        if Y[0][0] > 0 and Y[0][0] * Y[1][1] - Y[0][1] ** 2 > 0:
            check_siegel(om, ctx)
            return PeriodMatrix(om, source, False, None, ctx)
    raise DegenerateLattice("neither block order gives a positive imaginary part")


def _near_sym(om, floor):
    scale = max(1, max(abs(x) for r in om for x in r))
    if abs(om[0][1] - om[1][0]) > floor * scale:
        raise DegenerateLattice("period matrix is not symmetric")
    return True


# ------------------------------------------------------------ Sp4(Z)


def sp4_apply(gamma, omega):
    """(A Omega + B)(C Omega + D)^(-1)."""
    A = ((gamma[0][0], gamma[0][1]), (gamma[1][0], gamma[1][1]))
    B = ((gamma[0][2], gamma[0][3]), (gamma[1][2], gamma[1][3]))
    C = ((gamma[2][0], gamma[2][1]), (gamma[3][0], gamma[3][1]))
    D = ((gamma[2][2], gamma[2][3]), (gamma[3][2], gamma[3][3]))
    num = m2_add(m2_mul(A, omega), B)
    den = m2_add(m2_mul(C, omega), D)
    out = m2_mul(num, m2_inv(den))
    s = (out[0][1] + out[1][0]) / 2
    return ((out[0][0], s), (s, out[1][1]))


def sp4_cocycle(gamma, omega):
    """det(C Omega + D)."""
    C = ((gamma[2][0], gamma[2][1]), (gamma[3][0], gamma[3][1]))
    D = ((gamma[2][2], gamma[2][3]), (gamma[3][2], gamma[3][3]))
    return m2_det(m2_add(m2_mul(C, omega), D))


def is_symplectic(gamma) -> bool:
    g = [list(r) for r in gamma]
    return linalg.matmul(linalg.matmul(linalg.transpose(g), [list(r) for r in J4]), g) == [list(r) for r in J4]


def _block(A, B, C, D):
    return tuple(tuple(A[i] + B[i]) for i in range(2)) + tuple(tuple(C[i] + D[i]) for i in range(2))


def sp4_translation(S):
    return _block([[1, 0], [0, 1]], S, [[0, 0], [0, 0]], [[1, 0], [0, 1]])


def sp4_rotation(U):
    """diag(U, U^(-T)) for U in GL2(Z)."""
    det = U[0][0] * U[1][1] - U[0][1] * U[1][0]
    if abs(det) != 1:
        raise ValueError("U must be unimodular")
    Uinv = [[U[1][1] * det, -U[0][1] * det], [-U[1][0] * det, U[0][0] * det]]
    UinvT = [[Uinv[0][0], Uinv[1][0]], [Uinv[0][1], Uinv[1][1]]]
    return _block(U, [[0, 0], [0, 0]], [[0, 0], [0, 0]], UinvT)


def sp4_inversion(mask=(1, 1)):
    """Full (mask (1,1)) or partial inversion on the coordinates in ``mask``."""
    E = [[mask[0], 0], [0, mask[1]]]
    I_E = [[1 - mask[0], 0], [0, 1 - mask[1]]]
    return _block(I_E, [[-e for e in r] for r in E], E, I_E)


def sp4_mul(g, h):
    return tuple(tuple(r) for r in linalg.matmul([list(r) for r in g], [list(r) for r in h]))


SP4_IDENTITY = tuple(tuple(int(i == j) for j in range(4)) for i in range(4))


def sp4_generators():
    """A generating set of Sp4(Z) and the inverses of its elements."""
    gens = []
    for S in ([[1, 0], [0, 0]], [[0, 0], [0, 1]], [[0, 1], [1, 0]]):
        gens.append(sp4_translation(S))
        gens.append(sp4_translation([[-x for x in r] for r in S]))
    for U in ([[1, 1], [0, 1]], [[1, -1], [0, 1]], [[0, 1], [1, 0]]):
        gens.append(sp4_rotation(U))
    for m in ((1, 1), (1, 0), (0, 1)):
        gens.append(sp4_inversion(m))
    return gens


def random_sp4(rng: random.Random, length: int = 6):
    gens = sp4_generators()
    g = SP4_IDENTITY
    for _ in range(rng.randint(1, length)):
        g = sp4_mul(rng.choice(gens), g)
    return g


# ------------------------------------------------------------ reduction


def _gauss_reduce(Y):
    """U in GL2(Z) with U Y U^T Minkowski reduced."""
    U = [[1, 0], [0, 1]]
    a, b, c = Y[0][0], Y[0][1], Y[1][1]
    for _ in range(200):
        q = int(round(b / a))
        if q:
            # row2 -= q row1
            U[1] = [U[1][0] - q * U[0][0], U[1][1] - q * U[0][1]]
            c = c - 2 * q * b + q * q * a
            b = b - q * a
        if c < a:
            U[0], U[1] = U[1], U[0]
            a, c = c, a
            continue
        break
    if b < 0:
        U[1] = [-U[1][0], -U[1][1]]
    return U


def siegel_reduce(pm: PeriodMatrix, ctx: PrecisionContext | None = None, max_steps: int = 200) -> PeriodMatrix:
    """Move Omega toward the genus-2 fundamental domain.

    Alternates Minkowski reduction of Im Omega, integer translation of
    Re Omega, and inversions with |det(C Omega + D)| < 1.  The returned
    matrix carries gamma with reduced = gamma . original.
    """
    ctx = ctx or pm.ctx
    omega = pm.omega
    gamma = SP4_IDENTITY
    inversions = [sp4_inversion(m) for m in ((1, 0), (0, 1), (1, 1))]
    seen = set()
    stalled = False
    for _ in range(max_steps):
        U = _gauss_reduce(m2_imag(omega))
        g = sp4_rotation(U)
        omega, gamma = sp4_apply(g, omega), sp4_mul(g, gamma)
        X = m2_real(omega)
        S = [[-int(ctx.mp.nint(X[i][j])) for j in range(2)] for i in range(2)]
        S[1][0] = S[0][1]
        g = sp4_translation(S)
        omega, gamma = sp4_apply(g, omega), sp4_mul(g, gamma)
        best = None
        for inv in inversions:
            c = abs(sp4_cocycle(inv, omega))
            if c < 1 - ctx.mp.ldexp(1, -ctx.tail_bits) and (best is None or c < best[0]):
                best = (c, inv)
        if best is None:
            break
        key = gamma
        if key in seen:
            stalled = True
            break
        seen.add(key)
        omega, gamma = sp4_apply(best[1], omega), sp4_mul(best[1], gamma)
    else:
        stalled = True
    if stalled:
        log.warning("Siegel reduction stalled; continuing with best iterate")
    return PeriodMatrix(omega, pm.source, True, gamma, ctx)
