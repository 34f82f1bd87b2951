"""
Exact enumerators behind the combinatorial q-identities.

- Pairings (perfect matchings) of ``[[2n]] = {1, ..., 2n}``, with the weight
  ``w(α) = q^{Σ_i |((a_i, b_i)) \\ P_i(α)|}``, where ``((a, b))`` is the open
  interval of indices strictly between ``a`` and ``b`` and
  ``P_i(α) = {b_j : j < i}``. Summed over all pairings, the weights give
  ``[1]_{n,2} = [1]_q [3]_q ... [2n-1]_q``.
- Maps ``f: [[a]] → [[n]]`` with prescribed fiber sizes and their inversions;
  ``Σ_f q^{inv(f)}`` is the q-multinomial coefficient.
- Compositions and partitions.

All enumerations are generators and are guarded by size limits; a request
beyond a limit raises :class:`SizeGuardError` before anything is generated.
"""

from __future__ import annotations

__all__ = [
    'SizeGuardError',
    'Pairing',
    'FiberMap',
    'Composition',
    'double_factorial',
    'multinomial',
    'count_pairings',
    'enumerate_pairings',
    'pairing_weight',
    'pairing_weight_exponent',
    'sum_pairing_weights',
    'pairings_by_first_partner',
    'enumerate_fiber_maps',
    'inversions',
    'inv_generating',
    'compositions',
    'partitions_at_most',
    'MAX_PAIRING_N',
    'MAX_FIBER_TOTAL',
    'MAX_COMPOSITION_TOTAL',
]


import dataclasses
import math
from collections.abc import Iterator, Sequence

from .qarith import QPolynomial

MAX_PAIRING_N = 10
MAX_FIBER_TOTAL = 10
MAX_COMPOSITION_TOTAL = 24


class SizeGuardError(ValueError):
    pass


def double_factorial(m: int) -> int:
    """``m!! = m (m-2) (m-4) ...``; ``(-1)!! = 0!! = 1``."""
    if m < -1:
        raise ValueError(f'double factorial of {m}')
    z = 1
    while m > 1:
        z *= m
        m -= 2
    return z


def multinomial(parts: Sequence[int]) -> int:
    z = math.factorial(sum(parts))
    for p in parts:
        z //= math.factorial(p)
    return z


def count_pairings(n: int) -> int:
    """``|P([[2n]])| = (2n-1)!!``."""
    return double_factorial(2 * n - 1)


@dataclasses.dataclass(frozen=True)
class Pairing:
    """
    A perfect matching of ``[[2n]]`` as pairs ``(a_i, b_i)`` with
    ``a_1 < a_2 < ... < a_n`` and ``a_i < b_i``.
    """

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple(tuple(p) for p in self.pairs)
        object.__setattr__(self, 'pairs', pairs)
        seen = set()
        prev = 0
        for p in pairs:
            if len(p) != 2:
                raise ValueError(f'a pair must have two elements; got {p}')
            a, b = p
            if not a < b:
                raise ValueError(f'pair {p} must satisfy a < b')
            if not a > prev:
                raise ValueError(f'left ends must be increasing; got {pairs}')
            prev = a
            seen.add(a)
            seen.add(b)
        if seen != set(range(1, 2 * len(pairs) + 1)):
            raise ValueError(f'{pairs} does not partition [[{2 * len(pairs)}]]')

    @classmethod
    def from_pairs(cls, pairs) -> Pairing:
        """Build a pairing from pairs in any order and orientation."""
        return cls(tuple(sorted(tuple(sorted(p)) for p in pairs)))

    @property
    def n(self) -> int:
        return len(self.pairs)

    def to_json(self) -> list[list[int]]:
        return [list(p) for p in self.pairs]


@dataclasses.dataclass(frozen=True)
class FiberMap:
    """
    A map ``f: [[a]] → [[n]]`` given by its values ``(f(1), ..., f(a))``,
    with ``|f^{-1}(i)| = parts[i-1]``.
    """

    values: tuple[int, ...]
    parts: tuple[int, ...]

    def __post_init__(self):
        values = tuple(self.values)
        parts = tuple(self.parts)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'parts', parts)
        counts = [0] * len(parts)
        for v in values:
            if not 1 <= v <= len(parts):
                raise ValueError(f'value {v} out of range [[{len(parts)}]]')
            counts[v - 1] += 1
        if tuple(counts) != parts:
            raise ValueError(f'fiber sizes {tuple(counts)} of {values} do not match {parts}')


@dataclasses.dataclass(frozen=True)
class Composition:
    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(self.parts)
        object.__setattr__(self, 'parts', parts)
        if any(p < 1 for p in parts):
            raise ValueError(f'composition parts must be positive; got {parts}')

    @property
    def total(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)


def _guard_pairings(n: int):
    if not isinstance(n, int) or n < 0:
        raise ValueError(f'n must be a non-negative integer; got {n!r}')
    if n > MAX_PAIRING_N:
        raise SizeGuardError(
            f'pairings of [[{2 * n}]]: count (2n-1)!! = {count_pairings(n)} exceeds the guard n <= {MAX_PAIRING_N}'
        )


def _pairings(free: list[int]) -> Iterator[list[tuple[int, int]]]:
    if not free:
        yield []
        return
    a = free[0]
    for i in range(1, len(free)):
        rest = free[1:i] + free[i + 1 :]
        for tail in _pairings(rest):
            yield [(a, free[i])] + tail


def enumerate_pairings(n: int) -> Iterator[Pairing]:
    """
    All pairings of ``[[2n]]``, each once, by recursion on the partner of the
    smallest free element; this is lexicographic order of the ``b``-sequence.
    """
    _guard_pairings(n)
    for pairs in _pairings(list(range(1, 2 * n + 1))):
        yield Pairing(tuple(pairs))


def pairing_weight_exponent(alpha: Pairing) -> int:
    """``Σ_i |((a_i, b_i)) \\ P_i(α)|``, with the pairs taken by increasing ``a_i``."""
    pairs = sorted(alpha.pairs)
    used = set()
    e = 0
    for a, b in pairs:
        e += sum(1 for x in range(a + 1, b) if x not in used)
        used.add(b)
    return e


def pairing_weight(alpha: Pairing) -> QPolynomial:
    """The weight ``w(α) = q^e`` as a monomial."""
    return QPolynomial.monomial(pairing_weight_exponent(alpha))


def _exponent_counts(exponents) -> QPolynomial:
    counts: dict[int, int] = {}
    for e in exponents:
        counts[e] = counts.get(e, 0) + 1
    if not counts:
        return QPolynomial.zero()
    z = [0] * (max(counts) + 1)
    for e, c in counts.items():
        z[e] = c
    return QPolynomial(z)


def sum_pairing_weights(n: int) -> QPolynomial:
    """``Σ_{α ∈ P([[2n]])} w(α)``, which equals ``[1]_{n,2}``."""
    return _exponent_counts(pairing_weight_exponent(a) for a in enumerate_pairings(n))


def pairings_by_first_partner(n: int) -> dict[int, QPolynomial]:
    """
    The weight sums of the pairings of ``[[2n]]`` grouped by the partner ``b_1`` of 1.

    Each group sums to ``q^{b_1 - 2} [1]_{n-1,2}``, so the groups together give
    ``[2n-1]_q [1]_{n-1,2} = [1]_{n,2}``.
    """
    _guard_pairings(n)
    if n < 1:
        raise ValueError(f'n must be positive; got {n}')
    groups: dict[int, list[int]] = {}
    for alpha in enumerate_pairings(n):
        groups.setdefault(alpha.pairs[0][1], []).append(pairing_weight_exponent(alpha))
    return {b: _exponent_counts(es) for b, es in sorted(groups.items())}


def _check_parts(parts: Sequence[int]) -> tuple[int, ...]:
    parts = tuple(parts)
    if not parts:
        raise ValueError('parts must be non-empty')
    for p in parts:
        if not isinstance(p, int) or p < 1:
            raise ValueError(f'parts must be positive integers; got {parts}')
    if sum(parts) > MAX_FIBER_TOTAL:
        raise SizeGuardError(
            f'maps with fiber sizes {parts}: count multinomial = {multinomial(parts)} '
            f'exceeds the guard sum(parts) <= {MAX_FIBER_TOTAL}'
        )
    return parts


def enumerate_fiber_maps(parts: Sequence[int]) -> Iterator[FiberMap]:
    """
    Every map with fiber sizes ``parts`` exactly once, in lexicographic
    order of the value sequence.
    """
    parts = _check_parts(parts)
    values = [i + 1 for i, p in enumerate(parts) for _ in range(p)]
    # Next-permutation over the multiset, starting from the sorted sequence.
    while True:
        yield FiberMap(tuple(values), parts)
        i = len(values) - 2
        while i >= 0 and values[i] >= values[i + 1]:
            i -= 1
        if i < 0:
            return
        j = len(values) - 1
        while values[j] <= values[i]:
            j -= 1
        values[i], values[j] = values[j], values[i]
        values[i + 1 :] = reversed(values[i + 1 :])


def inversions(f: FiberMap) -> int:
    """``|{(i, j) : i < j, f(i) > f(j)}|``."""
    v = f.values
    return sum(1 for i in range(len(v)) for j in range(i + 1, len(v)) if v[i] > v[j])


def inv_generating(parts: Sequence[int]) -> QPolynomial:
    """``Σ_f q^{inv(f)}`` over the maps with fiber sizes ``parts``; equals the q-multinomial."""
    return _exponent_counts(inversions(f) for f in enumerate_fiber_maps(parts))


def _guard_total(total: int, d: int):
    if not isinstance(total, int) or total < 1:
        raise ValueError(f'total must be a positive integer; got {total!r}')
    if not isinstance(d, int) or d < 1:
        raise ValueError(f'd must be a positive integer; got {d!r}')
    if total > MAX_COMPOSITION_TOTAL:
        raise SizeGuardError(
            f'compositions of {total}: count C(total-1, d-1) = {math.comb(total - 1, d - 1)} '
            f'exceeds the guard total <= {MAX_COMPOSITION_TOTAL}'
        )


def compositions(total: int, d: int) -> Iterator[Composition]:
    """Ordered tuples of exactly ``d`` positive parts summing to ``total``, in lexicographic order."""
    _guard_total(total, d)
    yield from (Composition(p) for p in _compositions(total, d))


def _compositions(total: int, d: int) -> Iterator[tuple[int, ...]]:
    if d == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - d + 2):
        for rest in _compositions(total - first, d - 1):
            yield (first,) + rest


def partitions_at_most(total: int, d: int) -> Iterator[tuple[int, ...]]:
    """Weakly decreasing tuples of at most ``d`` positive parts summing to ``total``, largest first part first."""
    _guard_total(total, d)
    yield from _partitions(total, d, total)


def _partitions(total: int, d: int, largest: int) -> Iterator[tuple[int, ...]]:
    if total == 0:
        yield ()
        return
    if d == 0:
        return
    for first in range(min(total, largest), 0, -1):
        for rest in _partitions(total - first, d - 1, first):
            yield (first,) + rest
