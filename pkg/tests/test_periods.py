import random

import pytest

from igusa_cm import linalg
from igusa_cm import periods as pr
from igusa_cm.classgroup import class_group
from igusa_cm.cmfield import cm_types, cmfield_from_quartic
from igusa_cm.numeric import PrecisionContext

J = [list(r) for r in pr.J4]


def _random_unimodular(rng, n=4, steps=12):
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        c = rng.randint(-3, 3)
        U[i] = [a + c * b for a, b in zip(U[i], U[j])]
    return U


def _check_basis(E, U):
    T = linalg.transpose
    assert linalg.matmul(linalg.matmul(T(U), E), U) == J
    assert abs(linalg.det(U)) == 1


def test_symplectic_basis_of_J_is_identity():
    U = pr.symplectic_basis(J)
    assert U == [[int(i == j) for j in range(4)] for i in range(4)]


def test_symplectic_basis_round_trip():
    rng = random.Random(3)
    for _ in range(50):
        P = _random_unimodular(rng)
        E = linalg.matmul(linalg.matmul(linalg.transpose(P), J), P)
        _check_basis(E, pr.symplectic_basis(E))


def test_symplectic_basis_rejects_non_principal():
    E = [[0, 0, 1, 0], [0, 0, 0, 2], [-1, 0, 0, 0], [0, -2, 0, 0]]
    with pytest.raises(pr.NotPrincipal):
        pr.symplectic_basis(E)
    with pytest.raises(pr.NotPrincipal):
        pr.symplectic_basis([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]])


@pytest.fixture(scope="module")
def zeta5():
    K = cmfield_from_quartic(5, 5)
    cls = class_group(K)[0]
    phi = cm_types(K)[0]
    return K, cls, phi


def test_zeta5_single_polarization(zeta5):
    K, cls, phi = zeta5
    pols = pr.polarizations(K, cls, phi)
    assert len(pols) == 1
    E = [list(r) for r in pols[0].pairing_matrix]
    assert linalg.det(E) == 1
    _check_basis(E, pr.symplectic_basis(E))


def test_sign_flip_fails_positivity(zeta5):
    K, cls, phi = zeta5
    ctx = PrecisionContext(128)
    roots = K.roots(ctx)
    xi = pr.polarizations(K, cls, phi)[0].xi
    assert K.is_imaginary(xi)
    assert pr._signs(K, xi, phi, ctx, roots) == (1, 1)
    assert pr._signs(K, K.scale(-1, xi), phi, ctx, roots) == (-1, -1)


@pytest.mark.parametrize("a,b", [(5, 2), (6, 3), (13, 37)])
def test_polarizations_are_principal(a, b):
    K = cmfield_from_quartic(a, b)
    for cls in class_group(K):
        for phi in cm_types(K):
            try:
                pols = pr.polarizations(K, cls, phi)
            except pr.NoPrincipalPolarization:
                continue
            for p in pols:
                E = [list(r) for r in p.pairing_matrix]
                assert all(E[i][j] == -E[j][i] for i in range(4) for j in range(4))
                _check_basis(E, pr.symplectic_basis(E))


def test_window_must_be_positive(zeta5):
    K, cls, phi = zeta5
    with pytest.raises(pr.WindowExhausted):
        pr.polarizations(K, cls, phi, window=0)


@pytest.mark.parametrize("a,b", [(5, 5), (5, 2), (6, 3)])
def test_period_matrix_is_siegel_and_stable_under_doubling(a, b):
    K = cmfield_from_quartic(a, b)
    cls = class_group(K)[-1]
    phi = cm_types(K)[0]
    pol = pr.polarizations(K, cls, phi)[0]
    lo, hi = PrecisionContext(300), PrecisionContext(600)
    om = pr.period_matrix(K, cls, phi, pol, lo).omega
    om2 = pr.period_matrix(K, cls, phi, pol, hi).omega
    tol = lo.mp.ldexp(1, -lo.tail_bits)
    assert abs(om[0][1] - om[1][0]) < tol
    Y = pr.m2_imag(om)
    assert Y[0][0] > 0 and Y[0][0] * Y[1][1] - Y[0][1] ** 2 > 0
    for i in range(2):
        for j in range(2):
            assert abs(om[i][j] - om2[i][j]) < tol


def test_generators_are_symplectic():
    for g in pr.sp4_generators():
        assert pr.is_symplectic(g)
    rng = random.Random(1)
    for _ in range(20):
        assert pr.is_symplectic(pr.random_sp4(rng))
    assert not pr.is_symplectic(((2, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)))


def test_sp4_action_composes():
    ctx = PrecisionContext(200)
    from util import random_omega

    rng = random.Random(8)
    om = random_omega(ctx, rng)
    g, h = pr.random_sp4(rng), pr.random_sp4(rng)
    a = pr.sp4_apply(pr.sp4_mul(g, h), om)
    b = pr.sp4_apply(g, pr.sp4_apply(h, om))
    assert max(abs(a[i][j] - b[i][j]) for i in range(2) for j in range(2)) < ctx.mp.ldexp(1, -150)


def test_siegel_reduce_keeps_reduced_point():
    ctx = PrecisionContext(128)
    mp = ctx.mp
    z = mp.mpc(0)
    om = ((mp.mpc(0, 2), z), (z, mp.mpc(0, 3)))
    red = pr.siegel_reduce(pr.PeriodMatrix(om, ctx=ctx), ctx)
    assert red.gamma == pr.SP4_IDENTITY
    assert red.omega == om and red.reduced


def test_siegel_reduce_inverts_small_diagonal_entry():
    ctx = PrecisionContext(128)
    mp = ctx.mp
    z = mp.mpc(0)
    om = ((mp.mpc(0, 0.25), z), (z, mp.mpc(0, 2)))
    red = pr.siegel_reduce(pr.PeriodMatrix(om, ctx=ctx), ctx)
    Y = pr.m2_imag(red.omega)
    assert pr.lambda_min(Y) >= 0.5
    assert sorted([float(Y[0][0]), float(Y[1][1])]) == pytest.approx([2, 4])
    assert pr.is_symplectic(red.gamma)
    back = pr.sp4_apply(red.gamma, om)
    assert max(abs(back[i][j] - red.omega[i][j]) for i in range(2) for j in range(2)) < mp.ldexp(1, -100)


def test_siegel_reduce_random_points():
    ctx = PrecisionContext(200)
    mp = ctx.mp
    rng = random.Random(4)
    for _ in range(10):
        y = [rng.uniform(0.05, 0.3), rng.uniform(0.05, 0.3)]
        om = ((mp.mpc(rng.random(), y[0]), mp.mpc(0.01, 0.001)), (mp.mpc(0.01, 0.001), mp.mpc(rng.random(), y[1])))
        red = pr.siegel_reduce(pr.PeriodMatrix(om, ctx=ctx), ctx)
        assert pr.lambda_min(pr.m2_imag(red.omega)) >= 0.5
        X = pr.m2_real(red.omega)
        assert all(abs(X[i][j]) <= 0.5 + 1e-30 for i in range(2) for j in range(2))
