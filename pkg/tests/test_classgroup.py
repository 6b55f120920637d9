import json
import random
from fractions import Fraction

import pytest
from oracles import minus_class_number_estimate, residue_degrees_sympy

from igusa_cm import classgroup as cg
from igusa_cm.cmfield import cmfield_from_quartic, elt
from igusa_cm.linalg import QLattice

# (a, b, h(K), w) with w the number of roots of unity
CLASS_NUMBERS = [(5, 5, 1, 10), (4, 2, 1, 2), (5, 2, 1, 2), (6, 3, 2, 2), (7, 11, 2, 2), (13, 37, 2, 2), (12, 19, 4, 2)]


@pytest.fixture(scope="module")
def groups():
    return {(a, b): cg.class_group(cmfield_from_quartic(a, b)) for a, b, _, _ in CLASS_NUMBERS}


@pytest.mark.parametrize("a,b,h,w", CLASS_NUMBERS)
def test_class_number_matches_analytic_formula(groups, a, b, h, w):
    K = cmfield_from_quartic(a, b)
    est = minus_class_number_estimate(a, b, K.d, K.d_K0, K.D0, w=w, bound=20000)
    assert abs(est - h) < 0.1
    assert len(groups[(a, b)]) == h


def test_unit_ideal_is_first(groups):
    for (a, b), classes in groups.items():
        K = cmfield_from_quartic(a, b)
        assert classes[0].rep.lattice == K.ring_of_integers
        assert classes[0].rep.norm == 1


@pytest.mark.parametrize("a,b", [(5, 5), (6, 3), (12, 19)])
def test_representatives_pairwise_inequivalent(groups, a, b):
    K = cmfield_from_quartic(a, b)
    reps = [c.rep for c in groups[(a, b)]]
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            assert not cg.equivalent(K, reps[i], reps[j])
        assert cg.equivalent(K, reps[i], reps[i])


@pytest.mark.parametrize("a,b", [(6, 3), (7, 11)])
def test_class_count_stable_under_bound(a, b):
    K = cmfield_from_quartic(a, b)
    assert len(cg.class_group(K, bound_multiplier=1.5)) == len(cg.class_group(K))


def test_class_group_cap():
    with pytest.raises(cg.ClassGroupTooLarge):
        cg.class_group(cmfield_from_quartic(12, 19), cap=2)


@pytest.mark.parametrize("a,b", [(5, 5), (4, 2), (6, 3), (7, 11), (12, 19), (9, 12), (21, 29)])
def test_prime_decomposition_matches_sympy(a, b):
    K = cmfield_from_quartic(a, b)
    for p in (2, 3, 5, 7, 11, 13):
        want = residue_degrees_sympy(a, b, p)
        if want is None:
            continue
        primes = cg.prime_ideals_above(K, p)
        assert sorted(P.f for P in primes) == want
        for P in primes:
            assert cg.is_ideal(K, P.rep.lattice)
            assert cg.ideal_norm(K, P.rep.lattice) == p**P.f


def test_product_of_primes_is_p():
    K = cmfield_from_quartic(6, 3)
    for p in (2, 3, 5, 7):
        primes = cg.prime_ideals_above(K, p)
        # p O_K contains the product of the primes above p, with equal norm when unramified
        prod = K.ring_of_integers
        for P in primes:
            prod = cg.ideal_mul(K, prod, P.rep.lattice)
        assert prod.contains_lattice(K.ring_of_integers.scale(p))


def test_is_principal_unit_ideal():
    K = cmfield_from_quartic(5, 5)
    assert cg.is_principal(K, K.ring_of_integers) == elt(1)


@pytest.mark.parametrize("a,b", [(5, 5), (6, 3), (7, 11)])
def test_is_principal_round_trip(a, b):
    K = cmfield_from_quartic(a, b)
    rng = random.Random(a * 100 + b)
    for _ in range(6):
        x = tuple(Fraction(rng.randint(-3, 3)) for _ in range(4))
        if not any(x):
            continue
        x = cg.combine(K.integral_basis, x)
        I = cg.ideal_from_gens(K, [x])
        g = cg._principal_escalating(K, I)
        assert g is not None
        assert abs(K.norm(g)) == abs(K.norm(x))
        assert cg.ideal_from_gens(K, [g]) == I


def test_non_principal_prime_in_class_number_two_field():
    K = cmfield_from_quartic(6, 3)
    nonprincipal = [P for P in cg.prime_ideals_above(K, 2) + cg.prime_ideals_above(K, 3)
                    if cg._principal_escalating(K, P.rep) is None]
    assert nonprincipal
    # its square is principal since h = 2
    P = nonprincipal[0].rep.lattice
    assert cg._principal_escalating(K, cg.ideal_mul(K, P, P)) is not None


def test_zeta5_relative_basis():
    K = cmfield_from_quartic(5, 5)
    # alpha = zeta - zeta^-1 here, and Z[omega] + Z[omega] alpha has index 4 in O_K
    assert cg.relative_lattice(K, elt(0, 1)).volume() == 4 * K.ring_of_integers.volume()
    with pytest.raises(AssertionError):
        cg.verify_class(K, cg.IdealClass(cg.IdealRep(K.ring_of_integers, Fraction(1)), elt(0, 1), elt(1)))
    tau, h = cg.relative_basis(K, cg.IdealRep(K.ring_of_integers, Fraction(1)))
    cg.verify_class(K, cg.IdealClass(cg.IdealRep(K.ring_of_integers, Fraction(1)), tau, h))
    assert cg.relative_lattice(K, tau) == K.ring_of_integers


@pytest.mark.parametrize("a,b", [(5, 5), (6, 3), (12, 19)])
def test_every_class_passes_unimodular_check(groups, a, b):
    K = cmfield_from_quartic(a, b)
    for cls in groups[(a, b)]:
        cg.verify_class(K, cls)
        assert not K.in_k0(cls.tau)


def test_relative_basis_scaling_invariance(groups):
    K = cmfield_from_quartic(6, 3)
    cls = groups[(6, 3)][1]
    c = K.k0_elt(2, 1)
    scaled = cg.IdealRep.of(K, QLattice.from_rows([list(K.mul(c, v)) for v in cls.rep.basis()]))
    tau, h = cg.relative_basis(K, scaled)
    # same O_K0-module up to the K0 scale
    assert cg.relative_lattice(K, tau) == cg.relative_lattice(K, cls.tau)
    assert QLattice.from_rows([list(K.div(v, h)) for v in scaled.basis()]) == cg.relative_lattice(K, tau)


def test_k0_class_number_not_one_raises():
    # K0 = Q(sqrt(10)) has class number 2
    K = cmfield_from_quartic(10, 15)
    assert K.D0 == 10
    with pytest.raises(cg.K0ClassNumberNotOne):
        cg.relative_basis(K, cg.IdealRep(K.ring_of_integers, Fraction(1)))


def _record(K, cls):
    return {
        "Z_basis": [[str(x) for x in r] for r in cls.rep.integral_coords(K)],
        "tau_coordinates": [str(x) for x in cls.tau],
    }


def test_external_ideal_data_round_trip(groups, tmp_path):
    K = cmfield_from_quartic(6, 3)
    path = tmp_path / "ideals.json"
    path.write_text(json.dumps([_record(K, c) for c in groups[(6, 3)]]))
    loaded = cg.load_ideal_data(K, path)
    assert [c.rep.lattice for c in loaded] == [c.rep.lattice for c in groups[(6, 3)]]
    for c in loaded:
        cg.verify_class(K, c)


def test_external_ideal_data_rejected(tmp_path):
    K = cmfield_from_quartic(6, 3)
    bad = {"Z_basis": [[1, 0, 0, 0], [0, 2, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], "tau_coordinates": ["0", "1", "0", "0"]}
    with pytest.raises(cg.InvalidIdealData):
        cg.ideal_class_from_record(K, {"Z_basis": [[1, 0]], "tau_coordinates": []})
    with pytest.raises(cg.InvalidIdealData):
        cg.ideal_class_from_record(K, {**bad, "tau_coordinates": ["1", "0", "0", "0"]})
