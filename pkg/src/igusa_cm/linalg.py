"""Exact linear algebra over Z, Q and F_p.

Matrices are lists of rows.  Lattices are row spans.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Matrix = list[list[int]]


def hnf_with_transform(rows: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix]:
    """Row Hermite normal form ``H = U A`` with ``U`` unimodular.

    ``H`` keeps every row (zero rows last).  Pivots are positive and entries
    above a pivot are reduced into ``[0, pivot)``.
    """
    A = [list(map(int, r)) for r in rows]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for c in range(n):
        if r == m:
            break
        # gcd-combine column c over rows r..m-1 into row r
        for i in range(r + 1, m):
            if A[i][c] == 0:
                continue
            a, b = A[r][c], A[i][c]
            g, x, y = _xgcd(a, b)
            p, q = a // g, b // g
            A[r], A[i] = (
                [x * u + y * v for u, v in zip(A[r], A[i])],
                [-q * u + p * v for u, v in zip(A[r], A[i])],
            )
            U[r], U[i] = (
                [x * u + y * v for u, v in zip(U[r], U[i])],
                [-q * u + p * v for u, v in zip(U[r], U[i])],
            )
        if A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-v for v in A[r]]
            U[r] = [-v for v in U[r]]
        piv = A[r][c]
        for i in range(r):
            k = A[i][c] // piv
            if k:
                A[i] = [u - k * v for u, v in zip(A[i], A[r])]
                U[i] = [u - k * v for u, v in zip(U[i], U[r])]
        r += 1
    return A, U


def hnf(rows: Sequence[Sequence[int]]) -> Matrix:
    """Nonzero rows of the row Hermite normal form."""
    H, _ = hnf_with_transform(rows)
    return [row for row in H if any(row)]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def det(M: Sequence[Sequence]) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    A = [[Fraction(v) for v in r] for r in M]
    n = len(A)
    out = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            out = -out
        out *= A[c][c]
        for i in range(c + 1, n):
            f = A[i][c] / A[c][c]
            if f:
                A[i] = [u - f * v for u, v in zip(A[i], A[c])]
    return out


def inverse(M: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(M)
    A = [[Fraction(v) for v in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M)]
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c] != 0), None)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        A[c], A[p] = A[p], A[c]
        piv = A[c][c]
        A[c] = [v / piv for v in A[c]]
        for i in range(n):
            if i != c and A[i][c]:
                f = A[i][c]
                A[i] = [u - f * v for u, v in zip(A[i], A[c])]
    return [r[n:] for r in A]


def matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def transpose(A):
    return [list(c) for c in zip(*A)]


def vecmat(v, M):
    return [sum(a * b for a, b in zip(v, col)) for col in zip(*M)]


def common_denominator(rows) -> int:
    d = 1
    for r in rows:
        for v in r:
            q = Fraction(v).denominator
            d = d * q // math.gcd(d, q)
    return d


@dataclass(frozen=True)
class QLattice:
    """Z-span of rational row vectors, stored canonically as ``H / den``.

    ``H`` is the row HNF of the scaled generators with zero rows dropped,
    and ``den`` is minimal, so equal lattices compare equal.
    """

    H: tuple[tuple[int, ...], ...]
    den: int
    dim: int

    @classmethod
    def from_rows(cls, rows, dim: int | None = None) -> "QLattice":
        rows = [list(r) for r in rows]
        if dim is None:
            dim = len(rows[0])
        d = common_denominator(rows)
        H = hnf([[int(Fraction(v) * d) for v in r] for r in rows]) if rows else []
        g = d
        for r in H:
            for v in r:
                g = math.gcd(g, v)
        if g > 1:
            H = [[v // g for v in r] for r in H]
            d //= g
        return cls(tuple(tuple(r) for r in H), d, dim)

    @property
    def rank(self) -> int:
        return len(self.H)

    def basis(self) -> list[list[Fraction]]:
        return [[Fraction(v, self.den) for v in r] for r in self.H]

    def volume(self) -> Fraction:
        """Covolume of a full-rank lattice."""
        if self.rank != self.dim:
            raise ValueError("lattice is not of full rank")
        out = Fraction(1)
        for i, r in enumerate(self.H):
            out *= r[i]
        return out / Fraction(self.den) ** self.dim

    def __add__(self, other: "QLattice") -> "QLattice":
        return QLattice.from_rows(self.basis() + other.basis(), self.dim)

    def scale(self, c) -> "QLattice":
        c = Fraction(c)
        return QLattice.from_rows([[c * v for v in r] for r in self.basis()], self.dim)

    def coords(self, x) -> list[Fraction] | None:
        """Rational coordinates of ``x`` in :meth:`basis`, or None if outside the span."""
        y = [Fraction(v) * self.den for v in x]
        t = []
        for r in self.H:
            piv = next(j for j, v in enumerate(r) if v)
            c = y[piv] / r[piv]
            t.append(c)
            y = [u - c * v for u, v in zip(y, r)]
        if any(y):
            return None
        return t

    def __contains__(self, x) -> bool:
        t = self.coords(x)
        return t is not None and all(v.denominator == 1 for v in t)

    def contains_lattice(self, other: "QLattice") -> bool:
        return all(v in self for v in other.basis())

    def dual(self) -> "QLattice":
        """Dual lattice for the standard dot product (full rank only)."""
        Binv = inverse(self.basis())
        return QLattice.from_rows(transpose(Binv), self.dim)

    def intersect(self, other: "QLattice") -> "QLattice":
        return (self.dual() + other.dual()).dual()

    def sublattice_where_zero(self, cols: Sequence[int]) -> "QLattice":
        """Vectors of the lattice whose coordinates in ``cols`` all vanish."""
        B = self.H
        A = [[r[c] for c in cols] for r in B]
        Hc, U = hnf_with_transform(A)
        ker = [U[i] for i, r in enumerate(Hc) if not any(r)]
        rows = [vecmat(k, B) for k in ker]
        return QLattice.from_rows([[Fraction(v, self.den) for v in r] for r in rows] or [[0] * self.dim], self.dim)


def solve_integer(rows: Sequence[Sequence], target: Sequence) -> list[int] | None:
    """Integer ``t`` with ``sum t_i rows[i] == target``, or None."""
    d = common_denominator(list(rows) + [target])
    A = [[int(Fraction(v) * d) for v in r] for r in rows]
    y = [int(Fraction(v) * d) for v in target]
    H, U = hnf_with_transform(A)
    coeff = [0] * len(H)
    for i, r in enumerate(H):
        if not any(r):
            continue
        piv = next(j for j, v in enumerate(r) if v)
        q, rem = divmod(y[piv], r[piv])
        if rem:
            return None
        coeff[i] = q
        y = [u - q * v for u, v in zip(y, r)]
    if any(y):
        return None
    return vecmat(coeff, U)


# ------------------------------------------------------------------ F_p


def fp_rref(rows: Sequence[Sequence[int]], p: int) -> list[list[int]]:
    """Nonzero rows of the reduced row echelon form over F_p."""
    A = [[v % p for v in r] for r in rows]
    out = []
    ncols = len(A[0]) if A else 0
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][c], -1, p)
        A[r] = [v * inv % p for v in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [(u - f * v) % p for u, v in zip(A[i], A[r])]
        r += 1
    out = [row for row in A[:r]]
    return out


def fp_kernel(M: Sequence[Sequence[int]], p: int) -> list[list[int]]:
    """Basis of ``{v : v M = 0}`` over F_p (left kernel)."""
    n = len(M)
    if n == 0:
        return []
    m = len(M[0])
    aug = [[v % p for v in M[i]] + [int(i == j) for j in range(n)] for i in range(n)]
    R = fp_rref(aug, p)
    return [row[m:] for row in R if not any(row[:m])]


def fp_span_dim(rows, p: int) -> int:
    return len(fp_rref(rows, p)) if rows else 0


# ------------------------------------------------------------ LLL / enum


def lll_gram(G: Sequence[Sequence], delta: float = 0.75) -> list[list[int]]:
    """LLL-reduce the lattice with exact Gram matrix ``G``.

    Returns the unimodular transform ``T`` (rows are the new basis in terms of
    the old one).  The Gram matrix of the current basis is tracked exactly in
    integers; only the Gram-Schmidt data is floating point, which affects the
    quality of the reduction but never its unimodularity.
    """
    n = len(G)
    d = common_denominator(G)
    A = [[int(Fraction(v) * d) for v in r] for r in G]
    T = [[int(i == j) for j in range(n)] for i in range(n)]

    def gso():
        mu = [[0.0] * n for _ in range(n)]
        B = [0.0] * n
        for i in range(n):
            for j in range(i):
                mu[i][j] = (A[i][j] - sum(mu[j][k] * mu[i][k] * B[k] for k in range(j))) / B[j]
            B[i] = A[i][i] - sum(mu[i][k] ** 2 * B[k] for k in range(i))
        return mu, B

    def reduce(k, j, q):
        # b_k -= q b_j
        T[k] = [u - q * v for u, v in zip(T[k], T[j])]
        akk = A[k][k] - 2 * q * A[k][j] + q * q * A[j][j]
        for t in range(n):
            A[k][t] -= q * A[j][t]
        for t in range(n):
            A[t][k] = A[k][t]
        A[k][k] = akk

    def swap(k):
        T[k], T[k - 1] = T[k - 1], T[k]
        A[k], A[k - 1] = A[k - 1], A[k]
        for r in A:
            r[k], r[k - 1] = r[k - 1], r[k]

    k = 1
    for _ in range(100000):
        if k >= n:
            break
        mu, B = gso()
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                reduce(k, j, q)
                mu, B = gso()
        if B[k] >= (delta - mu[k][k - 1] ** 2) * B[k - 1]:
            k += 1
        else:
            swap(k)
            k = max(k - 1, 1)
    return T


def short_vectors(G: Sequence[Sequence], bound) -> list[tuple[int, ...]]:
    """All nonzero integer ``x`` with ``x^T G x <= bound`` (up to sign).

    Fincke-Pohst enumeration on an LLL-reduced basis.  Ranges are computed in
    floating point with a one-unit safety margin and every candidate is then
    checked exactly, so the result is exact for rational ``G`` and ``bound``.
    """
    n = len(G)
    G = [[Fraction(v) for v in r] for r in G]
    bound = Fraction(bound)
    T = lll_gram(G)
    Gr = [[sum(T[i][a] * G[a][b] * T[j][b] for a in range(n) for b in range(n)) for j in range(n)] for i in range(n)]
    # q_ii, q_ij of the completed square  x^T G x = sum q_ii (x_i + sum_j q_ij x_j)^2
    Q = [[float(v) for v in r] for r in Gr]
    for i in range(n):
        for j in range(i + 1, n):
            Q[j][i] = Q[i][j]
            Q[i][j] = Q[i][j] / Q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                Q[k][l] -= Q[k][i] * Q[i][l]
    fb = float(bound) * (1 + 1e-9) + 1e-9
    out = []
    x = [0] * n

    def rec(i, remaining):
        c = -sum(Q[i][j] * x[j] for j in range(i + 1, n))
        r = math.sqrt(max(remaining, 0.0) / Q[i][i])
        for xi in range(math.floor(c - r) - 1, math.ceil(c + r) + 2):
            rest = remaining - Q[i][i] * (xi - c) ** 2
            if rest < -1e-9 * (1 + fb):
                continue
            x[i] = xi
            if i == 0:
                if any(x):
                    out.append(tuple(x))
            else:
                rec(i - 1, rest)
        x[i] = 0

    rec(n - 1, fb)
    res = []
    seen = set()
    for v in out:
        y = tuple(sum(v[i] * T[i][j] for i in range(n)) for j in range(n))
        neg = tuple(-t for t in y)
        if y in seen or neg in seen:
            continue
        val = sum(y[a] * G[a][b] * y[b] for a in range(n) for b in range(n))
        if val <= bound:
            seen.add(y)
            res.append(y)
    res.sort(key=lambda y: (sum(y[a] * G[a][b] * y[b] for a in range(n) for b in range(n)), y))
    return res
