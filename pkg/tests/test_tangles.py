"""Tangle axioms, membership, avoidance queries, and tangle separations."""

import pytest

from tanglekit import (
    Base,
    DomainError,
    OutOfOrderError,
    build_structure,
    check_axioms,
    empty_tangle,
    exists_tangle_avoiding,
    has_tangle_of_order,
    leftmost_tangle_separation,
    leftmost_tangle_set_separation,
    max_tangle_order,
    minimal_member_in_box,
    tangle_lattice_bottom,
    truncate,
)
from tanglekit.oracles import (
    brute_force_branch_width,
    brute_force_leftmost_tangle_separation,
    brute_force_tangles,
)


def _explicit(oracle, order, sides):
    """All sets of order < `order` whose side is forced by the given members."""
    full = oracle.ground.full_mask
    members = set(sides)
    for x in range(full + 1):
        if oracle.evaluate(x) < order and x not in members and (full & ~x) not in members:
            raise AssertionError("orientation not determined")
    return members


def test_check_axioms_triforce_tangle(triforce):
    oracle = triforce.oracle
    full = triforce.full
    # the order-2 tangle pointing at triangle 1: orient every order-<2 set
    # toward the side containing triangle 1
    members = set()
    for x in range(full + 1):
        if oracle.evaluate(x) < 2:
            members.add(x if x & triforce.t1 == triforce.t1 else full & ~x)
    ok, why = check_axioms(oracle, members, 2)
    assert ok, why


def test_check_axioms_unit_and_violation(triforce):
    oracle = triforce.oracle
    ok, _ = check_axioms(oracle, {triforce.full}, 1)
    assert ok
    ok, why = check_axioms(oracle, {triforce.full, 0}, 1)
    assert not ok and "empty set" in why


def test_check_axioms_t3(p3):
    ok, why = check_axioms(p3, {0b01, 0b11}, 2)
    assert not ok and "singleton" in why


def test_membership_matches_explicit_enumeration(triforce, p3, k4, c5rank):
    """Signature tangles agree with the explicit enumeration on a full sweep."""
    for oracle in (triforce.oracle, p3, k4, c5rank):
        top = max_tangle_order(oracle)
        ds = build_structure(oracle, top)
        full = oracle.ground.full_mask
        for k in range(top + 1):
            explicit = brute_force_tangles(oracle, k)
            indices = ds.indices_of_order(k)
            assert len(explicit) == len(indices)
            matched = set()
            for i in indices:
                tangle = ds.tangle(i)
                members = frozenset(
                    x for x in range(full + 1) if oracle.evaluate(x) < k and tangle.member(x)
                )
                hits = [e for e in explicit if e.members == members]
                assert len(hits) == 1
                matched.add(hits[0].members)
            assert len(matched) == len(explicit)


def test_membership_out_of_order(triforce):
    ds = build_structure(triforce.oracle, 2)
    tangle = ds.tangle(3)
    with pytest.raises(OutOfOrderError):
        tangle.member(triforce.edge(0, 1))  # a single edge has order 2


def test_membership_xor(triforce, k4):
    for oracle in (triforce.oracle, k4):
        top = max_tangle_order(oracle)
        ds = build_structure(oracle, top)
        full = oracle.ground.full_mask
        for i in range(1, ds.size(top) + 1):
            tangle = ds.tangle(i)
            for x in range(full + 1):
                if oracle.evaluate(x) < tangle.order:
                    assert tangle.member(x) != tangle.member(full & ~x)


def test_unit_tangle_contains_ground(triforce):
    ds = build_structure(triforce.oracle, 1)
    assert ds.tangle(2).member(triforce.full)


def test_truncate(triforce):
    ds = build_structure(triforce.oracle, 2)
    t3 = ds.tangle(3)
    unit = truncate(t3, 1)
    assert unit.order == 1 and unit.member(triforce.full)
    assert truncate(t3, 2) is t3
    assert truncate(t3, 5) is t3
    assert truncate(t3, 0) == empty_tangle(triforce.oracle)


def test_minimal_member_in_box(triforce):
    oracle = triforce.oracle
    ds = build_structure(oracle, 2)
    tri1 = ds.tangle(3)
    full = triforce.full
    assert minimal_member_in_box(oracle, tri1.member, 0, full, 1) == triforce.t1
    assert minimal_member_in_box(oracle, tri1.member, 0, triforce.t2 | triforce.t3, 1) is None
    unit = ds.tangle(2)
    assert minimal_member_in_box(oracle, unit.member, 0, full, 0) == full


def test_minimal_member_cross_check(k4, c5rank):
    """The shrinking search agrees with a full enumeration of members."""
    for oracle in (k4, c5rank):
        top = max_tangle_order(oracle)
        ds = build_structure(oracle, top)
        full = oracle.ground.full_mask
        for i in ds.indices_of_order(top):
            tangle = ds.tangle(i)
            members = [
                x for x in range(full + 1) if oracle.evaluate(x) < top and tangle.member(x)
            ]
            expected_min = [
                m for m in members if not any(z != m and z & ~m == 0 for z in members)
            ]
            got = minimal_member_in_box(oracle, tangle.member, 0, full, top - 1)
            assert got in expected_min


def test_exists_tangle_avoiding_examples(triforce):
    oracle = triforce.oracle
    full = triforce.full
    unit = build_structure(oracle, 1).tangle(2)
    assert exists_tangle_avoiding(oracle, 2, [full & ~triforce.t1], base_tangle=unit)
    assert not exists_tangle_avoiding(
        oracle, 2, [full & ~t for t in triforce.triangles], base_tangle=unit
    )
    assert exists_tangle_avoiding(oracle, 0)


def test_exists_tangle_avoiding_rejects_high_order(triforce):
    with pytest.raises(DomainError):
        exists_tangle_avoiding(triforce.oracle, 1, [triforce.edge(0, 1)])  # order 2 > 0


def test_exists_tangle_avoiding_monotone(triforce):
    oracle = triforce.oracle
    full = triforce.full
    avoids = [full & ~t for t in triforce.triangles]
    state = True
    for upto in range(len(avoids) + 1):
        answer = exists_tangle_avoiding(oracle, 2, avoids[:upto])
        assert state or not answer  # adding avoid sets never flips false -> true
        state = answer


def test_batched_and_single_step_agree(triforce, p3, k4, c5rank):
    """The one-violation-at-a-time variant reaches the same answers."""
    for oracle in (triforce.oracle, p3, k4, c5rank):
        full = oracle.ground.full_mask
        top = max_tangle_order(oracle)
        for k in range(top + 2):
            assert exists_tangle_avoiding(oracle, k) == exists_tangle_avoiding(
                oracle, k, batched=False
            )
        low = [x for x in range(full + 1) if 0 < oracle.evaluate(x) <= top][:3]
        for x in low:
            assert exists_tangle_avoiding(oracle, top + 1, [x] if oracle.evaluate(x) <= top else []) == \
                exists_tangle_avoiding(oracle, top + 1, [x], batched=False)


def test_has_tangle_of_order(p3, k4):
    assert not has_tangle_of_order(p3, 2)
    assert has_tangle_of_order(k4, 3)
    assert has_tangle_of_order(p3, 0)


def test_max_tangle_order_fixtures(triforce, p3, k4, grid3, c5rank):
    assert max_tangle_order(p3) == 1
    assert max_tangle_order(k4) == 3
    assert max_tangle_order(c5rank) == 2
    assert max_tangle_order(triforce.oracle) == 2
    assert brute_force_branch_width(p3) == 1
    assert brute_force_branch_width(k4) == 3
    assert brute_force_branch_width(c5rank) == 2


def test_leftmost_tangle_separation_triforce(triforce):
    ds = build_structure(triforce.oracle, 2)
    t1, t2, t3 = (ds.tangle(i) for i in (3, 4, 5))
    by_triangle = {}
    for t in (t1, t2, t3):
        for mask in triforce.triangles:
            if t.member(mask):
                by_triangle[mask] = t
    a, b, c = (by_triangle[m] for m in triforce.triangles)
    assert leftmost_tangle_separation(a, b) == triforce.t1
    assert leftmost_tangle_separation(b, a) == triforce.t2
    assert leftmost_tangle_separation(a, truncate(a, 1)) is None


def test_leftmost_tangle_separation_vs_brute(triforce, c5rank, k4):
    from tanglekit.tangles import ExplicitTangle

    for oracle in (triforce.oracle, c5rank, k4):
        top = max_tangle_order(oracle)
        ds = build_structure(oracle, top)
        full = oracle.ground.full_mask
        explicit = {}
        for i in range(1, ds.size(top) + 1):
            tangle = ds.tangle(i)
            members = frozenset(
                x
                for x in range(full + 1)
                if oracle.evaluate(x) < tangle.order and tangle.member(x)
            )
            explicit[i] = ExplicitTangle(tangle.order, members)
        for i in explicit:
            for j in explicit:
                if i == j:
                    continue
                fast = leftmost_tangle_separation(ds.tangle(i), ds.tangle(j))
                ti, tj = explicit[i], explicit[j]
                comparable = ti.members <= tj.members or tj.members <= ti.members
                if comparable:
                    assert fast is None
                else:
                    assert fast == brute_force_leftmost_tangle_separation(oracle, ti, tj)


def test_leftmost_contained_in_every_minimum(triforce):
    oracle = triforce.oracle
    ds = build_structure(oracle, 2)
    full = triforce.full
    for i in (3, 4, 5):
        for j in (3, 4, 5):
            if i == j:
                continue
            z = leftmost_tangle_separation(ds.tangle(i), ds.tangle(j))
            value = oracle.evaluate(z)
            ti, tj = ds.tangle(i), ds.tangle(j)
            for x in range(full + 1):
                if (
                    oracle.evaluate(x) == value
                    and ti.member(x)
                    and tj.member(full & ~x)
                ):
                    assert z & ~x == 0


def test_tangle_lattice_bottom(triforce):
    oracle = triforce.oracle
    ds = build_structure(oracle, 2)
    tri1 = next(t for t in (ds.tangle(i) for i in (3, 4, 5)) if t.member(triforce.t1))
    base = Base(triforce.edge(0, 1), triforce.edge(0, 3), 1)
    assert tangle_lattice_bottom(tri1, base) == triforce.t1
    reverse = Base(triforce.edge(0, 3), triforce.edge(0, 1), 1)
    assert tangle_lattice_bottom(tri1, reverse) is None
    unit = ds.tangle(2)
    assert tangle_lattice_bottom(unit, Base(0, 0, 0)) == triforce.full


def test_leftmost_tangle_set_separation(triforce):
    ds = build_structure(triforce.oracle, 2)
    tri1 = next(t for t in (ds.tangle(i) for i in (3, 4, 5)) if t.member(triforce.t1))
    assert leftmost_tangle_set_separation(tri1, triforce.full & ~triforce.t1) == triforce.t1
    assert leftmost_tangle_set_separation(tri1, triforce.t1) is None


def test_tangle_count_bound(triforce, p3, k4, c5rank, grid3):
    for oracle in (triforce.oracle, p3, k4, c5rank, grid3):
        n = oracle.ground.n
        top = max_tangle_order(oracle)
        ds = build_structure(oracle, top)
        for k in range(top + 1):
            assert len(ds.indices_of_order(k)) <= n


def test_signature_sets_are_members(triforce, k4):
    for oracle in (triforce.oracle, k4):
        top = max_tangle_order(oracle)
        ds = build_structure(oracle, top)
        for i in range(1, ds.size(top) + 1):
            tangle = ds.tangle(i)
            for s in tangle.signature:
                assert tangle.member(s)
