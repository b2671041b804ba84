"""Free sets, bases, and base lattices."""

import pytest

from tanglekit import (
    Base,
    DomainError,
    base_for_set,
    enumerate_bases,
    free_subset,
    is_base,
    kappa_min,
    lattice_bottom,
    lattice_top,
)
from tanglekit.oracles import brute_force_lattice


def test_free_subset_triforce(triforce):
    # each single edge of the triangle already pins the order-1 separation;
    # the scan keeps the lowest id
    got = free_subset(triforce.oracle, triforce.t1)
    assert got == triforce.t1 & -triforce.t1


def test_free_subset_trivials(triforce):
    assert free_subset(triforce.oracle, 0) == 0
    assert free_subset(triforce.oracle, triforce.full) == 0


def test_free_subset_properties(triforce, k4, c5rank):
    for oracle in (triforce.oracle, k4, c5rank):
        full = oracle.ground.full_mask
        for x in range(full + 1):
            y = free_subset(oracle, x)
            assert y & ~x == 0
            assert y.bit_count() <= oracle.evaluate(x)
            assert kappa_min(oracle, y, full & ~x).value == oracle.evaluate(x)


def test_is_base(triforce):
    oracle = triforce.oracle
    assert is_base(oracle, 0, 0)
    assert is_base(oracle, triforce.edge(0, 1), triforce.edge(0, 3))
    two_edges = triforce.edge(0, 1) | triforce.edge(0, 2)
    assert not is_base(oracle, two_edges, 0)  # the whole ground set has order 0
    with pytest.raises(DomainError):
        is_base(oracle, 0b11, 0b01)


def test_enumerate_bases_order_zero(p3, triforce):
    for oracle in (p3, triforce.oracle):
        bases = enumerate_bases(oracle, 0)
        assert Base(0, 0, 0) in bases
        assert all(b.order == 0 for b in bases)


def test_enumerate_bases_p3(p3):
    bases = enumerate_bases(p3, 1)
    assert Base(0b01, 0b10, 1) in bases
    assert Base(0b10, 0b01, 1) in bases


def test_enumerate_bases_matches_filter(triforce):
    oracle = triforce.oracle
    k = 1
    got = enumerate_bases(oracle, k)
    expected = []
    masks = [0] + [1 << i for i in range(oracle.ground.n)]
    for b1 in masks:
        for b2 in masks:
            if b1 & b2:
                continue
            value = kappa_min(oracle, b1, b2).value
            if value <= k and value >= max(b1.bit_count(), b2.bit_count()):
                expected.append(Base(b1, b2, value))
    assert sorted(got, key=lambda b: (b.b1, b.b2)) == sorted(
        expected, key=lambda b: (b.b1, b.b2)
    )
    assert len({(b.b1, b.b2) for b in got}) == len(got)


def test_base_for_set(triforce, k4):
    for oracle, x in ((triforce.oracle, triforce.t1), (k4, 0b000001)):
        base = base_for_set(oracle, x)
        assert base.order == oracle.evaluate(x)
        members = brute_force_lattice(oracle, base.b1, base.b2)
        assert x in members
    assert base_for_set(triforce.oracle, 0) == Base(0, 0, 0)


def test_lattice_bottom_and_top_triforce(triforce):
    oracle = triforce.oracle
    base = Base(triforce.edge(0, 1), triforce.edge(0, 3), 1)
    members = brute_force_lattice(oracle, base.b1, base.b2)
    assert members == sorted([triforce.t1, triforce.t1 | triforce.t3])
    assert lattice_bottom(oracle, base) == triforce.t1
    assert lattice_top(oracle, base) == triforce.t1 | triforce.t3
    assert lattice_bottom(oracle, Base(0, 0, 0)) == 0
    with pytest.raises(DomainError):
        lattice_bottom(oracle, Base(0b11, 0, 0))


def test_lattice_scan_small(p3, c5rank, k4):
    """Bottom/top equal the extremes of an exhaustive lattice scan and every
    member shares the base order; the lattice is intersection/union closed."""
    for oracle in (p3, c5rank, k4):
        for base in enumerate_bases(oracle, 2):
            members = brute_force_lattice(oracle, base.b1, base.b2)
            assert members, base
            assert lattice_bottom(oracle, base) == min(members, key=lambda m: (m.bit_count(), m))
            assert lattice_top(oracle, base) == max(members, key=lambda m: (m.bit_count(), m))
            member_set = set(members)
            for m in members:
                assert oracle.evaluate(m) == base.order
            for a in members:
                for b in members:
                    assert a & b in member_set and a | b in member_set
            bottom, top = lattice_bottom(oracle, base), lattice_top(oracle, base)
            assert all(bottom & ~m == 0 and m & ~top == 0 for m in members)


def test_bases_size_bound(c5rank):
    bases = enumerate_bases(c5rank, 2)
    for base in bases:
        assert base.b1.bit_count() <= base.order <= 2
        assert base.b2.bit_count() <= base.order
