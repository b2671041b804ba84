"""Tangles and the decision procedures around them.

A tangle of order k orients every subset of order below k toward a "big
side", subject to four axioms: every member has order below k; for each X
of order below k, X or its complement is a member; any three members have
nonempty intersection; and no singleton is a member.

Tangles are represented compactly: a ``Tangle`` is a declared order plus a
*signature*, a tuple of committed member sets such that exactly one tangle
of that order contains them all.  Membership of any further set X is then a
single avoidance query: X is a member iff some tangle of the order contains
signature + {X}, i.e. avoids the complements of all of these.

The avoidance decision itself follows the dual decomposition search: it
maintains, for every base B of bounded order, a growing decomposable member
mu(B) of the lattice L(B), propagates the closure rule "any lattice member
covered by two mu values joins its own base's mu", and declares that a
tangle exists exactly when no two mu values cover the ground set.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

from .bases import Base, enumerate_bases, lattice_bottom, lattice_top
from .connectivity import ConnectivityOracle, bits_list, iter_bits
from .errors import DomainError, OutOfOrderError, SizeGuardError, StructuralError
from .separations import box_min, leftmost_min_in_box, rightmost_min_in_box


@dataclass(frozen=True)
class Tangle:
    """A tangle fixed by (order, signature) over a connectivity oracle."""

    oracle: ConnectivityOracle
    order: int
    signature: Tuple[int, ...]

    def member(self, x: int) -> bool:
        """Decide whether x belongs to this tangle.

        Only defined for kappa(x) < order; asking about higher-order sets is
        an error, not a False.
        """
        if self.oracle.evaluate(x) >= self.order:
            raise OutOfOrderError(
                f"membership undefined: set has order >= tangle order {self.order}"
            )
        full = self.oracle.ground.full_mask
        avoids = tuple(sorted({full & ~s for s in self.signature}))
        ctx = _context(self.oracle, self.order, avoids)
        return ctx.exists((full & ~x,))

    def member_fn(self) -> Callable[[int], bool]:
        return self.member

    def __repr__(self) -> str:
        sig = ",".join(format(s, "x") for s in self.signature)
        return f"Tangle(order={self.order}, signature=[{sig}])"


@dataclass(frozen=True)
class ExplicitTangle:
    """A tangle given by its full member family; used by oracles and tests."""

    order: int
    members: frozenset

    def member(self, x: int) -> bool:
        return x in self.members


def empty_tangle(oracle: ConnectivityOracle) -> Tangle:
    return Tangle(oracle, 0, ())


def membership(tangle: Tangle, x: int) -> bool:
    return tangle.member(x)


# ---------------------------------------------------------------------------
# The avoidance fixpoint.


class AvoidContext:
    """Fixpoint state for one (order, avoid family, base tangle) question.

    ``exists(extras)`` answers whether a tangle of ``order`` extending the
    base tangle avoids the stored family plus ``extras``.  Extra queries
    warm-start from the stored fixpoint, which is sound because adding avoid
    sets only ever grows the mu values.
    """

    def __init__(
        self,
        oracle: ConnectivityOracle,
        order: int,
        avoids: Tuple[int, ...] = (),
        base_tangle: Optional[Tangle] = None,
        batched: bool = True,
    ):
        self.oracle = oracle
        self.order = order
        self.full = oracle.ground.full_mask
        self.batched = batched
        self.bases: List[Base] = enumerate_bases(oracle, order - 1)
        mu = [0] * len(self.bases)
        self._seed_singletons(mu)
        if base_tangle is not None and base_tangle.order > 0:
            self._seed_base_tangle(mu, base_tangle)
        for a in avoids:
            self._seed_avoid(mu, a)
        self._run(mu)
        self.mu = mu
        self._answer = not self._covered(mu)
        self._extra_cache: dict = {}

    # mu seeding ------------------------------------------------------

    def _seed_singletons(self, mu) -> None:
        oracle = self.oracle
        singles = [
            (u, oracle.evaluate(1 << u)) for u in range(oracle.ground.n)
        ]
        for i, base in enumerate(self.bases):
            acc = 0
            for u, value in singles:
                bit = 1 << u
                if value != base.order or bit & base.b2:
                    continue
                if base.b1 == 0 or base.b1 == bit:
                    acc |= bit
            mu[i] |= acc

    def _seed_avoid(self, mu, avoid_mask: int) -> None:
        # Greatest lattice member inside the avoided set, per base.
        oracle = self.oracle
        for i, base in enumerate(self.bases):
            hi = avoid_mask & ~base.b2
            if base.b1 & ~hi:
                continue
            r = box_min(oracle, base.b1, hi)
            if r is None or r[0] != base.order:
                continue
            mu[i] |= rightmost_min_in_box(oracle, base.b1, hi)

    def _seed_base_tangle(self, mu, base_tangle: Tangle) -> None:
        # Complement of the least member of base_tangle within L(b2, b1);
        # bases at or above the tangle's order cannot meet it.
        oracle = self.oracle
        for i, base in enumerate(self.bases):
            if base.order >= base_tangle.order:
                continue
            swapped = Base(base.b2, base.b1, base.order)
            m = tangle_lattice_bottom(base_tangle, swapped)
            if m is not None:
                mu[i] |= self.full & ~m

    # fixpoint ---------------------------------------------------------

    def _covered(self, mu) -> bool:
        values = sorted({v for v in mu if v})
        for i, a in enumerate(values):
            for b in values[i:]:
                if a | b == self.full:
                    return True
        return False

    def _violation_update(self, mu, i: int, base: Base, window: int) -> bool:
        if window & ~mu[i] == 0:
            return False
        oracle = self.oracle
        hi = window & ~base.b2
        if base.b1 & ~hi:
            return False
        r = box_min(oracle, base.b1, hi)
        if r is None or r[0] != base.order:
            return False
        y = rightmost_min_in_box(oracle, base.b1, hi)
        if y & ~mu[i]:
            mu[i] |= y
            return True
        return False

    def _run(self, mu) -> None:
        while True:
            values = sorted({v for v in mu if v})
            windows = sorted({a | b for j, a in enumerate(values) for b in values[j:]})
            changed = False
            for i, base in enumerate(self.bases):
                for w in windows:
                    if self._violation_update(mu, i, base, w):
                        changed = True
                        if not self.batched:
                            break
                if changed and not self.batched:
                    break
            if not changed or self._covered(mu):
                return

    # queries ----------------------------------------------------------

    def exists(self, extras: Iterable[int] = ()) -> bool:
        key = frozenset(extras)
        if not key:
            return self._answer
        if not self._answer:
            return False
        hit = self._extra_cache.get(key)
        if hit is not None:
            return hit
        mu = list(self.mu)
        for a in sorted(key):
            self._seed_avoid(mu, a)
        self._run(mu)
        answer = not self._covered(mu)
        self._extra_cache[key] = answer
        return answer


def _context(
    oracle: ConnectivityOracle,
    order: int,
    avoids: Tuple[int, ...],
    base_tangle: Optional[Tangle] = None,
    batched: bool = True,
) -> AvoidContext:
    cache = oracle.cache("avoid_ctx")
    base_key = None if base_tangle is None else (base_tangle.order, base_tangle.signature)
    key = (order, frozenset(avoids), base_key, batched)
    ctx = cache.get(key)
    if ctx is None:
        ctx = AvoidContext(oracle, order, avoids, base_tangle, batched)
        cache[key] = ctx
    return ctx


def exists_tangle_avoiding(
    oracle: ConnectivityOracle,
    order: int,
    avoid: Sequence[int] = (),
    base_tangle: Optional[Tangle] = None,
    batched: bool = True,
) -> bool:
    """Is there a tangle of ``order`` extending ``base_tangle`` that avoids
    (the down-closures of) every set in ``avoid``?

    Every avoided set must have order at most ``order - 1``; the base tangle,
    when given, must have order below ``order``.
    """
    for a in avoid:
        if oracle.evaluate(a) > order - 1:
            raise DomainError("avoided sets must have order below the target order")
    if base_tangle is not None and base_tangle.order >= order:
        if base_tangle.order > order:
            raise DomainError("base tangle order exceeds target order")
        # Extending a tangle of the same order: it is its own extension iff it
        # avoids the given sets.
        return all(not base_tangle.member(a) for a in avoid) if avoid else True
    ctx = _context(oracle, order, tuple(sorted(set(avoid))), base_tangle, batched)
    return ctx.exists(())


def has_tangle_of_order(oracle: ConnectivityOracle, k: int) -> bool:
    if k < 0:
        raise DomainError("tangle orders are nonnegative")
    if k == 0:
        return True
    return exists_tangle_avoiding(oracle, k)


def _caterpillar_width(oracle: ConnectivityOracle) -> int:
    """Width of the caterpillar branch decomposition over ascending ids.

    Any decomposition's width bounds the maximum tangle order, so this gives
    a cheap safe upper bound for order scans.
    """
    n = oracle.ground.n
    if n == 1:
        return 0
    width = 0
    prefix = 0
    for u in range(n):
        width = max(width, oracle.evaluate(1 << u))
        prefix |= 1 << u
        width = max(width, oracle.evaluate(prefix))
    return width


def max_tangle_order(oracle: ConnectivityOracle) -> int:
    """The largest k admitting a tangle of order k (equals the branch width)."""
    cap = _caterpillar_width(oracle) + 1
    k = 0
    while k < cap and has_tangle_of_order(oracle, k + 1):
        k += 1
    if k >= cap and has_tangle_of_order(oracle, k + 1):
        raise StructuralError("tangle order exceeded its duality bound")
    return k


# ---------------------------------------------------------------------------
# Minimal members of tangle unions in boxes and lattices.


def _small_submasks(mask: int, max_size: int) -> List[int]:
    ids = bits_list(mask)
    out = [0]
    for size in range(1, min(max_size, len(ids)) + 1):
        out.extend(sum(1 << i for i in combo) for combo in combinations(ids, size))
    return out


def _grow_maximal(oracle: ConnectivityOracle, start: int, cap: int, bound: int) -> Optional[int]:
    """Greedy inclusion-maximal X with start <= X <= cap whose box toward cap
    stays at order <= bound.  The result itself has kappa <= bound."""
    cache = oracle.cache("grow")
    key = (start, cap, bound)
    if key in cache:
        return cache[key]
    r = box_min(oracle, start, cap)
    if r is None or r[0] > bound:
        cache[key] = None
        return None
    cur = start
    for u in iter_bits(cap & ~start):
        bit = 1 << u
        r = box_min(oracle, cur | bit, cap)
        if r is not None and r[0] <= bound:
            cur |= bit
    cache[key] = cur
    return cur


def _find_smaller_member(oracle, member, lo: int, x: int, bound: int) -> Optional[int]:
    """Some member X' of the union with lo <= X' strictly inside x, or None.

    Guesses an excluded element and a candidate free set of the hypothetical
    smaller member, grows maximally below the bound, and asks the membership
    oracle once per distinct grown set.
    """
    tried = set()
    for excluded in iter_bits(x & ~lo):
        cap = x & ~(1 << excluded)
        for z in _small_submasks(cap & ~lo, bound):
            grown = _grow_maximal(oracle, lo | z, cap, bound)
            if grown is None or grown in tried:
                continue
            tried.add(grown)
            if member(grown):
                return grown
    return None


def minimal_member_in_box(
    oracle: ConnectivityOracle,
    member: Callable[[int], bool],
    lo: int,
    hi: int,
    max_order: int,
) -> Optional[int]:
    """An inclusion-minimal X with member(X), lo <= X <= hi, kappa(X) <= max_order.

    ``member`` must be a membership oracle for a union of tangles whose
    orders all exceed ``max_order`` (tangle members are upward-closed below
    their order, which the shrinking argument relies on).  Returns None when
    no such set exists.
    """
    if lo & ~hi:
        return None
    found = None
    if oracle.evaluate(hi) <= max_order and member(hi):
        found = hi
    x = hi
    while True:
        nxt = _find_smaller_member(oracle, member, lo, x, max_order)
        if nxt is None:
            return found
        found = nxt
        x = nxt


def minimal_member_in_lattice(
    oracle: ConnectivityOracle,
    member: Callable[[int], bool],
    base: Base,
    within: Optional[int] = None,
) -> Optional[int]:
    """An inclusion-minimal member of (union of tangles) inside L(base).

    With ``within`` given, the lattice is additionally restricted to subsets
    of that window.  Exploits two shortcuts: the union meets the (restricted)
    lattice iff it contains the lattice top, and the lattice bottom, when a
    member, is the global minimum.
    """
    oracle_full = oracle.ground.full_mask
    hi = (oracle_full & ~base.b2) & (oracle_full if within is None else within)
    if base.b1 & ~hi:
        return None
    if within is None:
        top = lattice_top(oracle, base)
        bottom = lattice_bottom(oracle, base)
    else:
        r = box_min(oracle, base.b1, hi)
        if r is None or r[0] != base.order:
            return None
        top = rightmost_min_in_box(oracle, base.b1, hi)
        bottom = leftmost_min_in_box(oracle, base.b1, hi)
    if not member(top):
        return None
    if bottom == top or member(bottom):
        return bottom
    x = top
    while True:
        nxt = _find_smaller_member(oracle, member, base.b1, x, base.order)
        if nxt is None:
            return x
        x = nxt


# ---------------------------------------------------------------------------
# Separations between tangles.


def is_extension(big: Tangle, small: Tangle) -> bool:
    """True iff ``small`` is a truncation of ``big`` (as set families)."""
    if small.order > big.order:
        return False
    if small.order == 0:
        return True
    return all(big.member(s) for s in small.signature)


def comparable(t1: Tangle, t2: Tangle) -> bool:
    return is_extension(t1, t2) or is_extension(t2, t1)


def _least_of(candidates: List[int]) -> int:
    least = min(candidates, key=lambda m: (m.bit_count(), m))
    for c in candidates:
        if least & ~c:
            raise StructuralError("minimum separations are not intersection-directed")
    return least


def leftmost_tangle_separation(
    t1: Tangle, t2: Tangle, known_order: Optional[int] = None
) -> Optional[int]:
    """The leftmost minimum (t1, t2)-separation, or None if comparable.

    Scans base orders upward; for each base, the least member of t1 inside
    the base's lattice is a candidate whenever its complement lies in t2.
    The true leftmost separation is the least candidate at the first order
    where any appear.
    """
    if t1.oracle is not t2.oracle:
        raise DomainError("tangles live on different oracles")
    if comparable(t1, t2):
        return None
    oracle = t1.oracle
    limit = min(t1.order, t2.order)
    orders = range(limit) if known_order is None else (known_order,)
    member1 = t1.member
    for q in orders:
        candidates = []
        for base in enumerate_bases(oracle, q):
            if base.order != q:
                continue
            m = minimal_member_in_lattice(oracle, member1, base)
            if m is None:
                continue
            if t2.member(oracle.ground.complement(m)):
                candidates.append(m)
        if candidates:
            return _least_of(candidates)
    raise StructuralError("incomparable tangles admit no separation; oracle is not a tangle")


def leftmost_tangle_set_separation(tangle: Tangle, x: int) -> Optional[int]:
    """The leftmost minimum (tangle, x)-separation: the least minimum-order
    member of the tangle disjoint from x.  None if no member avoids x."""
    oracle = tangle.oracle
    window = oracle.ground.complement(x)
    for q in range(tangle.order):
        candidates = []
        for base in enumerate_bases(oracle, q):
            if base.order != q:
                continue
            m = minimal_member_in_lattice(oracle, tangle.member, base, within=window)
            if m is not None:
                candidates.append(m)
        if candidates:
            return _least_of(candidates)
    return None


def tangle_lattice_bottom(tangle: Tangle, base: Base) -> Optional[int]:
    """Least member of tangle intersected with L(base); None when empty."""
    if base.order >= tangle.order:
        return None
    return minimal_member_in_lattice(tangle.oracle, tangle.member, base)


def truncate(tangle: Tangle, order: int) -> Tangle:
    """The truncation to the given order, re-anchored to a canonical signature.

    Orders at or above the tangle's own return the tangle unchanged, matching
    the data structure convention.
    """
    if order >= tangle.order:
        return tangle
    if order < 0:
        raise DomainError("truncation order must be nonnegative")
    if order == 0:
        return empty_tangle(tangle.oracle)
    from .tangle_ds import build_structure

    ds = build_structure(tangle.oracle, order)
    return ds.tangle(ds.find(order, tangle.member))


# ---------------------------------------------------------------------------
# Axiom checking for explicit families.


def check_axioms(
    oracle: ConnectivityOracle, family: Iterable[int], order: int
) -> Tuple[bool, Optional[str]]:
    """Validate the four tangle axioms for an explicit family; first failure wins."""
    members = sorted(set(family))
    n = oracle.ground.n
    if n > 12:
        raise SizeGuardError("explicit axiom checking is capped at 12 elements")
    full = oracle.ground.full_mask
    get = oracle.value_getter()
    for m in members:
        if get(m) >= order:
            return False, f"member {m:#x} has order {get(m)}, not below {order}"
    member_set = set(members)
    for x in range(full + 1):
        if get(x) < order and x not in member_set and (full & ~x) not in member_set:
            return False, f"neither {x:#x} nor its complement is oriented"
    for m in members:
        if m == 0:
            return False, "the empty set is a member"
        if m.bit_count() == 1:
            return False, f"singleton {m:#x} is a member"
    for a, b in combinations(members, 2):
        if a & b == 0:
            return False, f"members {a:#x} and {b:#x} are disjoint"
    for a, b, c in combinations(members, 3):
        if a & b & c == 0:
            return False, f"members {a:#x}, {b:#x}, {c:#x} have empty intersection"
    return True, None
