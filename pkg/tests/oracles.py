"""Independent oracles the tests check the library against.

These deliberately avoid the library's own search and bookkeeping: the run
oracle walks raw configurations and filters afterwards, the period oracle
tries every shift, and the subrun oracle filters steps one by one.
"""
from __future__ import annotations

from untwist.runs import Run
from untwist.transducer import RIGHT, Transducer


def naive_runs(t: Transducer, raw: str) -> set[tuple]:
    """All normalized successful runs as transition tuples, by unpruned
    configuration search with a hard length cap and post-hoc filtering."""
    padded = "\x02" + raw + "\x03"
    omega = len(padded)
    cap = 2 * len(t.states) * (omega + 1) + 1
    results: set[tuple] = set()

    def walk(head: int, state: str, path: list):
        if head == omega:
            if state in t.finals:
                results.add(tuple(path))
            return
        if len(path) >= cap:
            return
        for tr, _ in t.moves(state, padded[head]):
            nxt = head + 1 if tr.direction == RIGHT else head - 1
            if nxt < 0:
                continue
            path.append(tr)
            walk(nxt, tr.target, path)
            path.pop()

    walk(0, t.initial, [])
    return {path for path in results if _is_normalized(t, raw, path)}


def _is_normalized(t: Transducer, raw: str, path: tuple) -> bool:
    """Recompute locations for a transition path and check normalization."""
    omega = len(raw) + 2
    levels = [0] * (omega + 1)
    levels[0] = 1
    seen = [set() for _ in range(omega + 1)]
    seen[0].add((t.initial, 0))
    x, y = 0, 0
    for tr in path:
        if y % 2 == 0:
            x2 = x + 1 if tr.direction == RIGHT else x
        else:
            x2 = x if tr.direction == RIGHT else x - 1
        key = (tr.target, levels[x2] % 2)
        if key in seen[x2]:
            return False
        seen[x2].add(key)
        x, y = x2, levels[x2]
        levels[x2] += 1
    return True


def run_signature(run: Run) -> tuple:
    return tuple(s.transition for s in run.steps)


def brute_smallest_period(word: str) -> int:
    for p in range(1, len(word) + 1):
        if all(word[i] == word[i + p] for i in range(len(word) - p)):
            return p
    raise AssertionError("unreachable for non-empty words")


def brute_subrun_output(run: Run, lo: int, hi: int, x1: int, x2: int) -> str:
    parts = []
    for i, step in enumerate(run.steps):
        if lo <= i and i + 1 <= hi \
                and x1 <= step.source[0] <= x2 and x1 <= step.target[0] <= x2:
            parts.append(step.output)
    return "".join(parts)


def independent_constants(q: int, c_max: int):
    """Big-integer evaluation of the three closed forms, written separately
    from the library's formulas."""
    h = q + q - 1
    e = 1
    for _ in range(2 * h):
        e *= 2 * q
    bound = c_max * h * (pow(2, 3 * e) + 4) if 3 * e <= 1 << 20 else None
    return h, e, bound
