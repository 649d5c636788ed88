"""Coverage classes, diagonal/block predicates, and the decomposition builder.

Locations covered by overlapping inversions merge into classes; each class
widens to a block piece via the latest-before/earliest-after locations at
the extreme anchor positions, and the gaps between blocks are diagonals.
Both piece predicates take an explicit length bound, defaulting to the
symbolic master bound, under which the side conditions hold trivially at
desk scale; a finite override exercises their failure paths.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .bounds import PeriodBound, bound_admits
from .inversions import (INVERSION, Inversion, PeriodReport,
                         enumerate_inversions, smallest_period)
from .runs import Location, LocationSet, Run

DIAGONAL = "diagonal"
BLOCK = "block"


class InternalInconsistencyError(Exception):
    """A consequence of the theory failed to hold; always a bug."""


@dataclass(frozen=True)
class CoverageClass:
    start: int                  # run-order index of the first covered location
    end: int                    # index of the last covered location
    chain: tuple[Inversion, ...]
    anchors: tuple[Location, ...]

    @property
    def anchor_positions(self) -> tuple[int, ...]:
        return tuple(sorted({x for x, _ in self.anchors}))


@dataclass(frozen=True)
class BlockData:
    head: str
    mid: str
    tail: str
    period: int
    pattern: str
    left_word: str      # output of the piece's excursions left of its span
    right_word: str


@dataclass(frozen=True)
class Piece:
    kind: str
    start: Location
    end: Location
    witness: tuple[Location, ...] = ()          # diagonal: map x -> location
    block: Optional[BlockData] = None


@dataclass(frozen=True)
class Decomposition:
    pieces: tuple[Piece, ...]
    bound: PeriodBound = field(compare=False)

    def render(self) -> str:
        lines = []
        for i, p in enumerate(self.pieces):
            extra = f" [period={p.block.period}]" if p.block else ""
            lines.append(f"piece {i}: ({p.start[0]},{p.start[1]})"
                         f"..({p.end[0]},{p.end[1]}) {p.kind}{extra}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class BuildOutcome:
    decomposition: Optional[Decomposition]
    unsafe: Optional[tuple[Inversion, PeriodReport]] = None


def coverage_classes(run: Run) -> list[CoverageClass]:
    """Non-singleton classes of the covered-by-overlapping-inversions
    equivalence, as maximal location-index intervals with covering chains."""
    inversions = enumerate_inversions(run, INVERSION)
    if not inversions:
        return []
    intervals: dict[tuple[int, int], Inversion] = {}
    for inv in inversions:
        key = (run.loc_index[inv.first.anchor], run.loc_index[inv.second.anchor])
        intervals.setdefault(key, inv)
    # Keep only maximal intervals; containment-redundant ones add nothing.
    items = sorted(intervals.items())
    maximal: list[tuple[tuple[int, int], Inversion]] = []
    for (s, e), inv in items:
        if any(s2 <= s and e <= e2 and (s2, e2) != (s, e)
               for (s2, e2), _ in items):
            continue
        maximal.append(((s, e), inv))
    anchors_all = sorted({run.loc_index[inv.first.anchor] for inv in inversions}
                         | {run.loc_index[inv.second.anchor]
                            for inv in inversions})
    classes = []
    i = 0
    while i < len(maximal):
        (s, e), inv = maximal[i]
        chain = [inv]
        j = i + 1
        while j < len(maximal):
            (s2, e2), inv2 = maximal[j]
            if s2 > e:
                break
            # Greedy chain: keep only members that extend the reach.
            if e2 > e:
                chain.append(inv2)
                e = e2
            j += 1
        anchor_locs = tuple(run.locations[a] for a in anchors_all
                            if s <= a <= e)
        classes.append(CoverageClass(s, e, tuple(chain), anchor_locs))
        i = j
    return classes


def block_interval(run: Run, cls: CoverageClass) -> tuple[Location, Location]:
    """Widen a class to the latest location before it at the least anchor
    position and the earliest after it at the greatest anchor position."""
    xs = cls.anchor_positions
    x_min, x_max = xs[0], xs[-1]
    l1 = None
    for i in range(cls.start, -1, -1):
        if run.locations[i][0] == x_min:
            l1 = run.locations[i]
            break
    l2 = None
    for i in range(cls.end, len(run.locations)):
        if run.locations[i][0] == x_max:
            l2 = run.locations[i]
            break
    if l1 is None or l2 is None:
        raise InternalInconsistencyError(
            "bounding locations for a coverage class do not exist")
    return l1, l2


def _z_output_len(run: Run, lo: int, hi: int, x1: int, x2: int) -> int:
    z = LocationSet((lo, hi), (x1, x2))
    return len(run.subrun_output(z))


def is_diagonal(run: Run, l1: Location, l2: Location, bound: PeriodBound
                ) -> tuple[bool, object]:
    """Search a monotone witness map under the two backward-output bounds.

    Returns (True, witness locations per position) or (False, failing x).
    """
    i1, i2 = run.loc_index[l1], run.loc_index[l2]
    x1, x2 = l1[0], l2[0]
    assert x1 <= x2 and i1 <= i2
    # Desk-scale fast path: a bound admitting the whole output admits any Z.
    check_bounds = not bound_admits(bound, len(run.output))
    omega = run.word.omega
    witness: list[Location] = []
    prev = i1
    for x in range(x1, x2 + 1):
        chosen = None
        for i in range(prev, i2 + 1):
            loc = run.locations[i]
            if loc[0] != x:
                continue
            if check_bounds:
                up_left = _z_output_len(run, i, i2, 0, x)
                down_right = _z_output_len(run, i1, i, x, omega)
                if not (bound_admits(bound, up_left)
                        and bound_admits(bound, down_right)):
                    continue
            chosen = i
            break
        if chosen is None:
            return False, x
        witness.append(run.locations[chosen])
        prev = chosen
    return True, tuple(witness)


def is_block(run: Run, l1: Location, l2: Location, bound: PeriodBound
             ) -> tuple[bool, Optional[BlockData]]:
    """Almost-periodic output plus bounded outside excursions.

    The split maximizes the periodic middle and then minimizes the head;
    ties are broken identically by the brute-force oracle in the tests.
    """
    i1, i2 = run.loc_index[l1], run.loc_index[l2]
    x1, x2 = l1[0], l2[0]
    assert x1 <= x2
    omega = run.word.omega
    left_word = run.subrun_output(LocationSet((i1, i2), (0, x1)))
    right_word = run.subrun_output(LocationSet((i1, i2), (x2, omega)))
    if not (bound_admits(bound, len(left_word))
            and bound_admits(bound, len(right_word))):
        return False, None
    w = run.output_between(i1, i2)
    n = len(w)
    if n == 0:
        return True, BlockData("", "", "", 1, "", left_word, right_word)
    # Candidate (i, j) splits: head w[:i], middle w[i:j], tail w[j:].
    for length in range(n, -1, -1):
        for i in range(0, n - length + 1):
            j = i + length
            if not (bound_admits(bound, i) and bound_admits(bound, n - j)):
                continue
            mid = w[i:j]
            p = smallest_period(mid) if mid else 1
            if not bound_admits(bound, p):
                continue
            return True, BlockData(w[:i], mid, w[j:], p, mid[:p],
                                   left_word, right_word)
    return False, None


def build_decomposition(run: Run, bound: PeriodBound) -> BuildOutcome:
    """Blocks from coverage classes, gaps as diagonals.

    Returns the decomposition, or the first unsafe inversion when the run
    fails the periodicity condition.  A gap that fails the diagonal
    predicate after the condition held contradicts the theory and raises.
    """
    from .inversions import first_unsafe_inversion
    unsafe = first_unsafe_inversion(run, bound)
    if unsafe is not None:
        return BuildOutcome(None, unsafe)

    blocks: list[tuple[Location, Location]] = []
    for cls in coverage_classes(run):
        xs = cls.anchor_positions
        if xs[0] == xs[-1]:
            continue    # positionally flat; its locations live in a diagonal
        blocks.append(block_interval(run, cls))
    for (a1, b1), (a2, b2) in zip(blocks, blocks[1:]):
        if not (b1[0] < a2[0] and run.loc_index[b1] <= run.loc_index[a2]):
            raise InternalInconsistencyError(
                f"blocks {b1}..{a2} are not consecutive")

    start = run.locations[0]
    end = run.locations[-1]
    pieces: list[Piece] = []

    def add_diagonal(a: Location, b: Location) -> None:
        ok, info = is_diagonal(run, a, b, bound)
        if not ok:
            raise InternalInconsistencyError(
                f"gap {a}..{b} is not a diagonal (fails at x={info})")
        pieces.append(Piece(DIAGONAL, a, b, witness=info))

    def add_block(a: Location, b: Location) -> None:
        ok, data = is_block(run, a, b, bound)
        if not ok:
            raise InternalInconsistencyError(f"{a}..{b} is not a block")
        pieces.append(Piece(BLOCK, a, b, block=data))

    cur = start
    for k, (a, b) in enumerate(blocks):
        if cur != a:
            if k == 0 and cur == start and \
                    not run.output_upto(run.loc_index[a]):
                # Silent lead-in: absorb it into the first block.
                a = cur
            else:
                add_diagonal(cur, a)
        add_block(a, b)
        cur = b
    if cur != end:
        merged = False
        if pieces and pieces[-1].kind == BLOCK:
            # Absorb the tail when the block's periodic pattern genuinely
            # continues through it (or it is silent).
            blk = pieces[-1]
            i, j = run.loc_index[blk.start], len(run.steps)
            tail = run.output_between(run.loc_index[cur], j)
            w = run.output_between(i, j)
            if not tail or (w and smallest_period(w) <= max(blk.block.period,
                                                            1)):
                ok, data = is_block(run, blk.start, end, bound)
                if ok:
                    pieces[-1] = Piece(BLOCK, blk.start, end, block=data)
                    merged = True
        if not merged:
            add_diagonal(cur, end)

    xs = [p.start[0] for p in pieces] + [pieces[-1].end[0]]
    if any(a >= b for a, b in zip(xs, xs[1:])):
        raise InternalInconsistencyError(
            f"piece boundary positions not strictly increasing: {xs}")
    return BuildOutcome(Decomposition(tuple(pieces), bound))


def validate_decomposition(run: Run, d: Decomposition) -> bool:
    """Full independent re-check of tiling, ordering and piece predicates."""
    if not d.pieces:
        return False
    if d.pieces[0].start != run.locations[0]:
        return False
    if d.pieces[-1].end != run.locations[-1]:
        return False
    for p, q in zip(d.pieces, d.pieces[1:]):
        if p.end != q.start:
            return False
    xs = [p.start[0] for p in d.pieces] + [d.pieces[-1].end[0]]
    if any(a >= b for a, b in zip(xs, xs[1:])):
        return False
    for p in d.pieces:
        if run.loc_index[p.start] > run.loc_index[p.end]:
            return False
        if p.kind == DIAGONAL:
            ok, _ = is_diagonal(run, p.start, p.end, d.bound)
        elif p.kind == BLOCK:
            ok, _ = is_block(run, p.start, p.end, d.bound)
        else:
            return False
        if not ok:
            return False
    return True
