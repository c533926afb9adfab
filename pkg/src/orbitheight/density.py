"""Exact algebra of eventually-periodic subsets of N.

A set in this class is a union of residue classes mod m corrected by
finitely many added/removed elements.  The class is closed under union,
intersection, and shifts, and on it the upper asymptotic density equals
the limit |R|/m exactly, so every density statement here is a statement
about finite residue arithmetic.

General subsets of N only admit the empirical prefix density; the counter
|A intersect [1, n]| / n is provided for that purpose.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable

from .errors import HypothesisViolated, InvalidParameter


class EventuallyPeriodicSet:
    """Residue classes mod m plus a finite symmetric difference.

    Canonical form: the least modulus among equivalent representations,
    added elements not already in the periodic part, removed elements
    taken from it.  Instances are immutable and hashable.
    """

    __slots__ = ("modulus", "residues", "added", "removed")

    def __init__(
        self,
        modulus: int,
        residues: Iterable[int],
        added: Iterable[int] = (),
        removed: Iterable[int] = (),
    ):
        if modulus < 1:
            raise InvalidParameter(f"modulus must be >= 1, got {modulus}")
        residues = frozenset(r % modulus for r in residues)
        added = frozenset(added)
        removed = frozenset(removed)
        for x in added | removed:
            if x < 0:
                raise InvalidParameter(f"exception {x} is not a natural number")
        # drop redundant exceptions so membership flags are genuine flips
        added = frozenset(x for x in added if x % modulus not in residues)
        removed = frozenset(x for x in removed if x % modulus in residues)
        modulus, residues = _least_modulus(modulus, residues)
        object.__setattr__(self, "modulus", modulus)
        object.__setattr__(self, "residues", residues)
        object.__setattr__(self, "added", added)
        object.__setattr__(self, "removed", removed)

    def __setattr__(self, *_):
        raise AttributeError("EventuallyPeriodicSet is immutable")

    # --- membership and counting ---

    def __contains__(self, n: int) -> bool:
        if n < 0:
            return False
        if n in self.added:
            return True
        if n in self.removed:
            return False
        return n % self.modulus in self.residues

    @property
    def stabilization_bound(self) -> int:
        """Index from which membership is purely periodic."""
        exceptions = self.added | self.removed
        return max(exceptions) + 1 if exceptions else 0

    def count_prefix(self, n: int) -> int:
        """Exact |S intersect [1, n]|."""
        if n < 1:
            return 0
        total = 0
        for r in self.residues:
            if r == 0:
                total += n // self.modulus
            elif r <= n:
                total += (n - r) // self.modulus + 1
        total += sum(1 for x in self.added if 1 <= x <= n)
        total -= sum(1 for x in self.removed if 1 <= x <= n)
        return total

    def is_empty(self) -> bool:
        return not self.residues and not self.added

    # --- equality on canonical form ---

    def _key(self):
        return (self.modulus, self.residues, self.added, self.removed)

    def __eq__(self, other) -> bool:
        return isinstance(other, EventuallyPeriodicSet) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __str__(self) -> str:
        body = "mod {}: {{{}}}".format(
            self.modulus, ",".join(str(r) for r in sorted(self.residues))
        )
        if self.added:
            body += " +{" + ",".join(str(x) for x in sorted(self.added)) + "}"
        if self.removed:
            body += " -{" + ",".join(str(x) for x in sorted(self.removed)) + "}"
        return body

    def __repr__(self) -> str:
        return f"EventuallyPeriodicSet({self})"

    # --- JSON form used in job files ---

    def to_json(self) -> dict:
        return {
            "modulus": self.modulus,
            "residues": sorted(self.residues),
            "added": sorted(self.added),
            "removed": sorted(self.removed),
        }

    @classmethod
    def from_json(cls, data: dict) -> "EventuallyPeriodicSet":
        return cls(
            int(data["modulus"]),
            [int(r) for r in data.get("residues", [])],
            [int(x) for x in data.get("added", [])],
            [int(x) for x in data.get("removed", [])],
        )


def _least_modulus(m: int, residues: frozenset[int]) -> tuple[int, frozenset[int]]:
    for d in range(1, m + 1):
        if m % d:
            continue
        classes = frozenset(r % d for r in residues)
        # R must be exactly the union of those classes of modulus d
        if len(residues) == len(classes) * (m // d):
            return d, classes
    return m, residues


NATURALS = EventuallyPeriodicSet(1, [0])
EMPTY = EventuallyPeriodicSet(1, [])


def evens() -> EventuallyPeriodicSet:
    return EventuallyPeriodicSet(2, [0])


def multiples_of(m: int) -> EventuallyPeriodicSet:
    return EventuallyPeriodicSet(m, [0])


def density(s: EventuallyPeriodicSet) -> Fraction:
    """Upper asymptotic density; on this class it is the exact limit |R|/m."""
    return Fraction(len(s.residues), s.modulus)


def _combine(a: EventuallyPeriodicSet, b: EventuallyPeriodicSet, keep) -> EventuallyPeriodicSet:
    m = a.modulus * b.modulus // gcd(a.modulus, b.modulus)
    residues = [r for r in range(m) if keep(r % a.modulus in a.residues, r % b.modulus in b.residues)]
    bound = max(a.stabilization_bound, b.stabilization_bound)
    added, removed = [], []
    for n in range(bound):
        actual = keep(n in a, n in b)
        periodic = n % m in set(residues)
        if actual and not periodic:
            added.append(n)
        elif periodic and not actual:
            removed.append(n)
    return EventuallyPeriodicSet(m, residues, added, removed)


def union(a: EventuallyPeriodicSet, b: EventuallyPeriodicSet) -> EventuallyPeriodicSet:
    return _combine(a, b, lambda x, y: x or y)


def intersection(a: EventuallyPeriodicSet, b: EventuallyPeriodicSet) -> EventuallyPeriodicSet:
    return _combine(a, b, lambda x, y: x and y)


def shift(s: EventuallyPeriodicSet, i: int) -> EventuallyPeriodicSet:
    """The translate {x + i : x in S}, truncated below 0 when i < 0."""
    m = s.modulus
    residues = [(r + i) % m for r in s.residues]
    scan_to = max(0, s.stabilization_bound + i, i)
    added, removed = [], []
    for n in range(scan_to):
        actual = (n - i) in s
        periodic = n % m in set(residues)
        if actual and not periodic:
            added.append(n)
        elif periodic and not actual:
            removed.append(n)
    return EventuallyPeriodicSet(m, residues, added, removed)


def set_algebra(op: str, *args) -> EventuallyPeriodicSet:
    """Dispatcher: op is "union", "intersection", or "shift" (set, i)."""
    if op == "union":
        return union(*args)
    if op == "intersection":
        return intersection(*args)
    if op == "shift":
        return shift(*args)
    raise InvalidParameter(f"unknown set operation {op!r}")


def shift_set(s: EventuallyPeriodicSet) -> EventuallyPeriodicSet:
    """Shifts i with d(S intersect (S+i)) > 0: exactly the residue differences.

    Exceptions never contribute because finite corrections are density-null;
    the result is {i >= 0 : i mod m in R - R}.
    """
    m = s.modulus
    diffs = {(r - t) % m for r in s.residues for t in s.residues}
    return EventuallyPeriodicSet(m, diffs)


def check_lemma_shifts(
    s: EventuallyPeriodicSet, f_set: Iterable[int], n_bound: int
) -> tuple[int, int]:
    """Witness j > k in F with j - k in the shift set of S.

    Requires density(S) > 1/n_bound and |F| >= n_bound; under those
    hypotheses a witness always exists, and the search is exhaustive.  The
    returned pair minimizes (j - k, k).
    """
    f_sorted = sorted(set(f_set))
    if len(f_sorted) < n_bound:
        raise HypothesisViolated(
            f"|F| = {len(f_sorted)} but the bound needs at least {n_bound}"
        )
    if density(s) * n_bound <= 1:
        raise HypothesisViolated(
            f"density {density(s)} is not greater than 1/{n_bound}"
        )
    sigma = shift_set(s)
    candidates = sorted(
        ((j - k, k, j) for k in f_sorted for j in f_sorted if j > k),
    )
    for diff, k, j in candidates:
        if diff in sigma:
            return (j, k)
    raise AssertionError(
        "no witness found although the hypotheses hold; this contradicts the "
        "pigeonhole bound and indicates a bug"
    )


def empirical_density(indices: Iterable[int], n: int) -> Fraction:
    """Prefix density |A intersect [1, n]| / n for an explicit index list."""
    if n < 1:
        raise InvalidParameter("prefix length must be positive")
    hits = sum(1 for i in set(indices) if 1 <= i <= n)
    return Fraction(hits, n)
