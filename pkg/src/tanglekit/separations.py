"""Constrained minimization of kappa and leftmost/rightmost minimum separations.

kappa_min(X, Y) is the minimum of kappa over the "box" of all Z with
X subset-of Z subset-of complement(Y).  Minimum separations in a box are
closed under intersection and union (submodularity), so there is a unique
inclusion-least one (leftmost) and a unique inclusion-greatest one
(rightmost).

The minimizer is pluggable: an oracle may carry a ``minimizer`` attribute
``fn(oracle, lo, hi) -> (value, witness)`` minimizing kappa over the box
[lo, hi].  The bundled default is an exhaustive scan of the free positions,
guarded at FREE_LIMIT bits, which covers all desk-scale targets.
"""

from __future__ import annotations

from dataclasses import dataclass

from .connectivity import ConnectivityOracle, iter_bits
from .errors import DomainError, SizeGuardError

FREE_LIMIT = 22


@dataclass(frozen=True)
class MinSeparationResult:
    value: int
    witness: int


def _exhaustive_box_min(oracle: ConnectivityOracle, lo: int, hi: int):
    free = hi & ~lo
    nfree = free.bit_count()
    if nfree > FREE_LIMIT:
        raise SizeGuardError(
            f"exhaustive minimizer guard: {nfree} free positions exceeds {FREE_LIMIT}"
        )
    get = oracle.value_getter()
    best = get(lo)
    best_set = lo
    sub = free
    while sub:
        z = lo | sub
        v = get(z)
        if v < best:
            best = v
            best_set = z
            if v == 0:
                break
        sub = (sub - 1) & free
    return best, best_set


def box_min(oracle: ConnectivityOracle, lo: int, hi: int):
    """(min kappa(Z), witness) over lo <= Z <= hi, or None if the box is empty.

    Results are cached per oracle; the cache is sound because oracles are
    immutable.
    """
    if lo & ~hi:
        return None
    cache = oracle.cache("box_min")
    key = (lo, hi)
    hit = cache.get(key)
    if hit is not None:
        return hit
    minimizer = oracle.minimizer or _exhaustive_box_min
    result = minimizer(oracle, lo, hi)
    cache[key] = result
    return result


def kappa_min(oracle: ConnectivityOracle, x: int, y: int) -> MinSeparationResult:
    """Minimize kappa over all Z with x <= Z <= complement(y).

    x and y must be disjoint subsets of the oracle's ground set.
    """
    if x & y:
        raise DomainError("kappa_min requires disjoint subsets")
    ground = oracle.ground
    if not (ground.contains_mask(x) and ground.contains_mask(y)):
        raise DomainError("subset mask outside this oracle's ground set")
    value, witness = box_min(oracle, x, ground.complement(y))
    return MinSeparationResult(value, witness)


def leftmost_min_in_box(oracle: ConnectivityOracle, lo: int, hi: int) -> int:
    """The inclusion-least Z with lo <= Z <= hi and kappa(Z) minimal.

    Computed by iterative pinning: an element u can be excluded exactly when
    some minimum separation of the current box avoids u; since minimum
    separations are intersection-closed, greedily excluding every such u
    converges to the unique least one.
    """
    value, _ = box_min(oracle, lo, hi)
    cur_hi = hi
    for u in iter_bits(hi & ~lo):
        bit = 1 << u
        shrunk = box_min(oracle, lo, cur_hi & ~bit)
        if shrunk is not None and shrunk[0] == value:
            cur_hi &= ~bit
    return cur_hi


def leftmost_min_separation(oracle: ConnectivityOracle, x: int, y: int) -> int:
    """The unique minimum (x, y)-separation contained in all others."""
    if x & y:
        raise DomainError("leftmost_min_separation requires disjoint subsets")
    return leftmost_min_in_box(oracle, x, oracle.ground.complement(y))


def rightmost_min_separation(oracle: ConnectivityOracle, x: int, y: int) -> int:
    """The unique minimum (x, y)-separation containing all others.

    Equals the complement of the leftmost minimum (y, x)-separation.
    """
    return oracle.ground.complement(leftmost_min_separation(oracle, y, x))


def rightmost_min_in_box(oracle: ConnectivityOracle, lo: int, hi: int) -> int:
    """The inclusion-greatest Z with lo <= Z <= hi and kappa(Z) minimal."""
    value, _ = box_min(oracle, lo, hi)
    cur_lo = lo
    for u in iter_bits(hi & ~lo):
        bit = 1 << u
        grown = box_min(oracle, cur_lo | bit, hi)
        if grown is not None and grown[0] == value:
            cur_lo |= bit
    return cur_lo
