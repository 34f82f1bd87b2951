import pytest

from qfeyn.combinat import (
    Composition,
    FiberMap,
    Pairing,
    SizeGuardError,
    compositions,
    count_pairings,
    double_factorial,
    enumerate_fiber_maps,
    enumerate_pairings,
    inv_generating,
    inversions,
    multinomial,
    pairing_weight,
    pairing_weight_exponent,
    pairings_by_first_partner,
    partitions_at_most,
    sum_pairing_weights,
)
from qfeyn.qarith import QPolynomial, eval_exact, pochhammer_qk, qfactorial, qint, qmultinomial


def test_counts():
    assert double_factorial(-1) == 1
    assert double_factorial(0) == 1
    assert double_factorial(7) == 105
    with pytest.raises(ValueError):
        double_factorial(-2)
    assert multinomial([2, 2]) == 6
    assert count_pairings(3) == 15


def test_pairing():
    alpha = Pairing(((1, 3), (2, 4)))
    assert alpha.n == 2
    assert alpha.to_json() == [[1, 3], [2, 4]]
    assert Pairing.from_pairs([(4, 2), (3, 1)]) == alpha
    for bad in (((2, 1),), ((1, 2), (1, 3)), ((1, 3),), ((2, 3), (1, 4)), ((1, 2, 3),)):
        with pytest.raises(ValueError):
            Pairing(bad)


def test_enumerate_pairings():
    pairings = list(enumerate_pairings(2))
    assert [a.pairs for a in pairings] == [((1, 2), (3, 4)), ((1, 3), (2, 4)), ((1, 4), (2, 3))]
    assert [pairing_weight_exponent(a) for a in pairings] == [0, 1, 2]
    assert pairing_weight(pairings[2]) == QPolynomial.monomial(2)
    assert [a.pairs for a in enumerate_pairings(0)] == [()]

    for n in range(1, 6):
        seen = set()
        for a in enumerate_pairings(n):
            assert a not in seen
            seen.add(a)
        assert len(seen) == count_pairings(n)

    with pytest.raises(SizeGuardError):
        list(enumerate_pairings(11))
    with pytest.raises(ValueError):
        list(enumerate_pairings(-1))


def test_pairing_weights():
    assert sum_pairing_weights(0) == 1
    assert sum_pairing_weights(2) == qint(3)
    for n in range(1, 7):
        z = sum_pairing_weights(n)
        assert z == pochhammer_qk(1, n, 2)
        assert eval_exact(z, 1) == double_factorial(2 * n - 1)


def test_pairings_by_first_partner():
    for n in range(1, 6):
        groups = pairings_by_first_partner(n)
        assert list(groups) == list(range(2, 2 * n + 1))
        for b, z in groups.items():
            assert z == pochhammer_qk(1, n - 1, 2).shift(b - 2)
    with pytest.raises(ValueError):
        pairings_by_first_partner(0)


def test_fiber_maps():
    maps = list(enumerate_fiber_maps([1, 2]))
    assert [f.values for f in maps] == [(1, 2, 2), (2, 1, 2), (2, 2, 1)]
    assert [inversions(f) for f in maps] == [0, 1, 2]
    assert inv_generating([1, 2]) == qint(3)
    assert inv_generating([2, 2]) == qmultinomial([2, 2])
    assert inv_generating([1, 1, 1, 1]) == qfactorial(4)
    assert len(list(enumerate_fiber_maps([2, 1, 3]))) == multinomial([2, 1, 3])

    with pytest.raises(ValueError):
        FiberMap((1, 1), (1, 1))
    with pytest.raises(ValueError):
        FiberMap((3,), (1,))
    with pytest.raises(ValueError):
        list(enumerate_fiber_maps([]))
    with pytest.raises(ValueError):
        list(enumerate_fiber_maps([1, 0]))
    with pytest.raises(SizeGuardError):
        list(enumerate_fiber_maps([6, 5]))


def test_compositions():
    assert [c.parts for c in compositions(4, 2)] == [(1, 3), (2, 2), (3, 1)]
    assert list(compositions(2, 3)) == []
    assert [c.parts for c in compositions(3, 3)] == [(1, 1, 1)]
    comp = Composition((2, 1, 3))
    assert comp.total == 6
    assert len(comp) == 3
    with pytest.raises(ValueError):
        Composition((0, 1))
    with pytest.raises(SizeGuardError):
        list(compositions(25, 2))
    with pytest.raises(ValueError):
        list(compositions(4, 0))


def test_partitions():
    assert list(partitions_at_most(5, 2)) == [(5,), (4, 1), (3, 2)]
    assert len(list(partitions_at_most(6, 6))) == 11
