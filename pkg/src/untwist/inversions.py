"""Inversions, co-inversions, periodicity arithmetic, and k-inversion safety.

An inversion is a pair of anchored loop components with non-empty trace
outputs occurring in run order but with their anchor positions in reversed
(for co-inversions: preserved) order.  Two sharpenings keep the predicate
sound, in the sense that an aperiodic inversion word genuinely obstructs
one-way (resp. sweeping) definability:

* the anchors are distinct locations, ordered strictly by the run; and
* the two loops are either equal or weakly separated, the second lying
  entirely left (for co-inversions: right) of the first.

Both restrictions come from the pumping argument that backs the
periodicity requirement: separated loops iterate independently at once,
one loop iterates against its own outer copies after pumping it three
times, but nested or staggered overlapping loops cannot be iterated
independently at all.  Machines that re-enter equal crossing sequences in
structurally unrelated parts of the input produce such overlapping pairs
with aperiodic words even when they are plainly one-way definable, so
admitting them would make refutations unsound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional

from .bounds import PeriodBound, bound_admits
from .loops import Component, Loop, components_of, enumerate_loops, trace_of
from .runs import Run

INVERSION = "inversion"
CO_INVERSION = "co-inversion"


@dataclass(frozen=True)
class AnchoredComponent:
    loop: Loop
    component: Component
    trace_output: str

    @property
    def anchor(self):
        return self.component.anchor


@dataclass(frozen=True)
class Inversion:
    kind: str
    first: AnchoredComponent
    second: AnchoredComponent

    @property
    def anchors(self):
        return (self.first.anchor, self.second.anchor)


@dataclass(frozen=True)
class PeriodReport:
    word: str
    len1: int
    len2: int
    gcd: int
    found_period: Optional[int]

    @property
    def safe(self) -> bool:
        return self.found_period is not None


@dataclass(frozen=True)
class KInversion:
    members: tuple[Inversion, ...]


def anchored_components(run: Run) -> list[AnchoredComponent]:
    """All (idempotent loop, component) pairs with non-empty trace output,
    sorted by anchor run order then loop interval."""
    out = []
    for loop in enumerate_loops(run, idempotent_only=True):
        for comp in components_of(run, loop):
            tr = trace_of(run, loop, comp)
            if tr.output:
                out.append(AnchoredComponent(loop, comp, tr.output))
    out.sort(key=lambda a: (run.loc_index[a.anchor], a.loop.x1, a.loop.x2,
                            a.component.min_node))
    return out


def _pair_matches(run: Run, kind: str, a: AnchoredComponent,
                  b: AnchoredComponent) -> bool:
    ia, ib = run.loc_index[a.anchor], run.loc_index[b.anchor]
    if ia >= ib:        # anchors must be distinct and in run order
        return False
    xa, xb = a.anchor[0], b.anchor[0]
    if kind == INVERSION:
        if xa < xb:
            return False
        return a.loop == b.loop or b.loop.x2 <= a.loop.x1
    if xa > xb:
        return False
    return a.loop == b.loop or a.loop.x2 <= b.loop.x1


def enumerate_inversions(run: Run, kind: str = INVERSION,
                         anchored: Optional[list[AnchoredComponent]] = None
                         ) -> list[Inversion]:
    if anchored is None:
        anchored = anchored_components(run)
    out = []
    for i, a in enumerate(anchored):
        for b in anchored[i:]:
            if _pair_matches(run, kind, a, b):
                out.append(Inversion(kind, a, b))
    return out


def inversion_word(run: Run, inv: Inversion) -> str:
    i = run.loc_index[inv.first.anchor]
    j = run.loc_index[inv.second.anchor]
    return inv.first.trace_output + run.output_between(i, j) \
        + inv.second.trace_output


def smallest_period(word) -> int:
    """Least p >= 1 with word[i] == word[i+p] for all valid i."""
    n = len(word)
    if n == 0:
        raise ValueError("the empty word has no smallest period")
    for p in range(1, n):
        if word[p:] == word[:-p]:
            return p
    return n


def _divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def has_dividing_period(word, len1: int, len2: int,
                        bound: PeriodBound) -> Optional[int]:
    """Smallest period of `word` dividing gcd(len1, len2) and <= bound."""
    assert len1 >= 1 and len2 >= 1
    g = math.gcd(len1, len2)
    n = len(word)
    for p in _divisors(g):
        if not bound_admits(bound, p):
            break
        if p >= n or word[p:] == word[:-p]:
            return p
    return None


def period_report(run: Run, inv: Inversion, bound: PeriodBound) -> PeriodReport:
    w = inversion_word(run, inv)
    l1, l2 = len(inv.first.trace_output), len(inv.second.trace_output)
    return PeriodReport(w, l1, l2, math.gcd(l1, l2),
                        has_dividing_period(w, l1, l2, bound))


def check_p2(run: Run, bound: PeriodBound
             ) -> list[tuple[Inversion, PeriodReport]]:
    """Periodicity report for every inversion; the run passes when all safe."""
    return [(inv, period_report(run, inv, bound))
            for inv in enumerate_inversions(run, INVERSION)]


def first_unsafe_inversion(run: Run, bound: PeriodBound
                           ) -> Optional[tuple[Inversion, PeriodReport]]:
    """First unsafe inversion in canonical (anchor pair) order, or None."""
    anchored = anchored_components(run)
    for i, a in enumerate(anchored):
        for b in anchored[i:]:
            if not _pair_matches(run, INVERSION, a, b):
                continue
            inv = Inversion(INVERSION, a, b)
            rep = period_report(run, inv, bound)
            if not rep.safe:
                return inv, rep
    return None


# ---------------------------------------------------------------------------
# Fine and Wilf
# ---------------------------------------------------------------------------

class FineWilfPrecondition(Exception):
    """The hypothesis of the overlap lemma is not met (distinct from a
    failed conclusion)."""


def has_period(word, p: int) -> bool:
    return p >= len(word) or word[p:] == word[:-p]


def fine_wilf_check(w1, p1: int, w2, p2: int,
                    overlap: tuple[int, int, int]) -> bool:
    """Oracle for the overlap lemma.

    `overlap` = (i1, i2, length) aligns the common factor w1[i1:i1+length]
    == w2[i2:i2+length].  Under the hypothesis (both words periodic as
    stated, common factor at least p1+p2-gcd long), returns whether w1, w2
    and the glued word w1[:i1] + w + w2[i2+length:] all have period
    gcd(p1, p2); the lemma asserts this always holds.
    """
    i1, i2, length = overlap
    w = w1[i1:i1 + length]
    if w != w2[i2:i2 + length]:
        raise FineWilfPrecondition("the aligned factors differ")
    if not has_period(w1, p1):
        raise FineWilfPrecondition(f"first word lacks period {p1}")
    if not has_period(w2, p2):
        raise FineWilfPrecondition(f"second word lacks period {p2}")
    g = math.gcd(p1, p2)
    if length < p1 + p2 - g:
        raise FineWilfPrecondition(
            f"common factor of length {length} is shorter than "
            f"{p1}+{p2}-{g}")
    w3 = w1[:i1] + w + w2[i2 + length:]
    return has_period(w1, g) and has_period(w2, g) and has_period(w3, g)


# ---------------------------------------------------------------------------
# k-inversions
# ---------------------------------------------------------------------------

def enumerate_k_inversions(run: Run, k: int, *,
                           cap: int = 10**6) -> Iterator[KInversion]:
    """All alternating inversion/co-inversion chains of length k with
    non-decreasing anchor order between consecutive members."""
    if k < 1:
        raise ValueError("k must be positive")
    anchored = anchored_components(run)
    members_by_kind = {
        INVERSION: enumerate_inversions(run, INVERSION, anchored),
        CO_INVERSION: enumerate_inversions(run, CO_INVERSION, anchored),
    }
    count = 0

    def rec(i: int, chain: list[Inversion]) -> Iterator[KInversion]:
        nonlocal count
        if i == k:
            count += 1
            if count > cap:
                from .runs import CapExceeded
                raise CapExceeded(f"k-inversion cap {cap} exceeded")
            yield KInversion(tuple(chain))
            return
        kind = INVERSION if i % 2 == 0 else CO_INVERSION
        for inv in members_by_kind[kind]:
            if chain:
                prev_end = run.loc_index[chain[-1].second.anchor]
                if run.loc_index[inv.first.anchor] < prev_end:
                    continue
            chain.append(inv)
            yield from rec(i + 1, chain)
            chain.pop()

    yield from rec(0, [])


def k_inversion_safe(run: Run, ki: KInversion, bound: PeriodBound) -> bool:
    """Safe when some member's word admits a dividing period within bound."""
    return any(period_report(run, inv, bound).safe for inv in ki.members)


def first_unsafe_k_inversion(run: Run, k: int, bound: PeriodBound, *,
                             cap: int = 10**6) -> Optional[KInversion]:
    for ki in enumerate_k_inversions(run, k, cap=cap):
        if not k_inversion_safe(run, ki, bound):
            return ki
    return None
