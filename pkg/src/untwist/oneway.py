"""Decomposition-driven one-way simulation, bounded deciders, certificates.

The simulator replays a decomposed run strictly left to right, emitting in
diagonal mode the output between consecutive witness locations (split into
the three bookkeeping classes a one-way machine would use: border
transitions, stored left words, guessed right words) and in block mode
prefixes of the almost-periodic output drawn from its periodic
representation.  Deciders scan all inputs up to a length bound and report
either a replayable refutation certificate or an explicitly bounded
no-counterexample verdict.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Iterator, Optional

from .bounds import PeriodBound, bound_admits
from .decomposition import BLOCK, DIAGONAL, Decomposition, build_decomposition
from .inversions import (CO_INVERSION, INVERSION, AnchoredComponent,
                         Inversion, _divisors, _pair_matches,
                         anchored_components, enumerate_k_inversions,
                         inversion_word, k_inversion_safe, period_report)
from .runs import Run, dump_run, enumerate_runs, parse_run_dump, validate_run
from .transducer import Transducer, constants, serialize_transducer
from .effects import effect_of_interval, effect_product
from .loops import components_of, trace_of


class FunctionalityError(Exception):
    """The transducer produced two outputs for one input."""


@dataclass(frozen=True)
class TranscriptEntry:
    position: int
    text: str
    note: str


@dataclass
class SimulationResult:
    output: Optional[str]               # encoded; None when absent
    transcript: tuple[TranscriptEntry, ...]
    run_index: Optional[int]
    decomposition: Optional[Decomposition]

    @property
    def present(self) -> bool:
        return self.output is not None


def _replay_decomposition(run: Run, d: Decomposition
                          ) -> tuple[str, tuple[TranscriptEntry, ...]]:
    out: list[str] = []
    transcript: list[TranscriptEntry] = []
    emitted = 0

    def emit(pos: int, text: str, note: str) -> None:
        nonlocal emitted
        if text:
            out.append(text)
            emitted += len(text)
            transcript.append(TranscriptEntry(pos, text, note))

    for piece in d.pieces:
        i1, i2 = run.loc_index[piece.start], run.loc_index[piece.end]
        x1, x2 = piece.start[0], piece.end[0]
        if piece.kind == DIAGONAL:
            witness = piece.witness
            emit(x1, run.output_between(i1, run.loc_index[witness[0]]),
                 "diagonal entry")
            for x in range(x1, x2):
                a = run.loc_index[witness[x - x1]]
                b = run.loc_index[witness[x - x1 + 1]]
                border = stored = guessed = 0
                for s in run.steps[a:b]:
                    ps, pt = s.source[0], s.target[0]
                    if ps in (x, x + 1) and pt in (x, x + 1):
                        border += len(s.output)
                    elif ps <= x and pt <= x:
                        stored += len(s.output)
                    else:
                        guessed += len(s.output)
                emit(x + 1, run.output_between(a, b),
                     f"diagonal step border={border} "
                     f"stored={stored} guessed={guessed}")
            emit(x2, run.output_between(run.loc_index[witness[-1]], i2),
                 "diagonal exit")
        else:
            data = piece.block
            w = run.output_between(i1, i2)
            head, mid, tail = data.head, data.mid, data.tail
            p = data.period

            def pattern_char(k: int) -> str:
                if k < len(head):
                    return head[k]
                if k < len(head) + len(mid):
                    return data.pattern[(k - len(head)) % p]
                return tail[k - len(head) - len(mid)]

            done = 0

            def emit_upto(x: int, target: int, note: str) -> None:
                nonlocal done
                if target <= done:
                    return
                chunk = w[done:target]
                # The periodic representation must reproduce the output.
                rep = "".join(pattern_char(k) for k in range(done, target))
                assert rep == chunk, "block representation out of sync"
                emit(x, chunk, note)
                done = target

            lens = {}
            for x in range(x1, x2 + 1):
                n = 0
                for s in run.steps[i1:i2]:
                    if s.source[0] <= x and s.target[0] <= x:
                        n += len(s.output)
                lens[x] = n
            emit_upto(x1, lens[x1], "block entry")
            for x in range(x1 + 1, x2 + 1):
                emit_upto(x, lens[x], "block step")
            emit_upto(x2, len(w), "block exit")

    positions = [e.position for e in transcript]
    assert positions == sorted(positions), "transcript not left-to-right"
    text = "".join(out)
    assert text == run.output, "replay diverged from the run output"
    return text, tuple(transcript)


def simulate_oneway(t: Transducer, raw: str, *, bound: PeriodBound = None,
                    cap_runs: int = 10**5) -> SimulationResult:
    """Output of the first decomposable run, produced by left-to-right replay.

    Absent when no successful run on the input admits a decomposition.
    """
    if bound is None:
        bound = constants(t).bound_factored
    runs = enumerate_runs(t, raw, cap_runs=cap_runs)
    outputs = {r.output for r in runs}
    if len(outputs) > 1:
        raise FunctionalityError(
            f"two outputs on {t.table.render(raw)!r}")
    for idx, run in enumerate(runs):
        outcome = build_decomposition(run, bound)
        if outcome.decomposition is not None:
            text, transcript = _replay_decomposition(run,
                                                     outcome.decomposition)
            return SimulationResult(text, transcript, idx,
                                    outcome.decomposition)
    return SimulationResult(None, (), None, None)


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------

def transducer_digest(t: Transducer) -> str:
    return hashlib.sha256(serialize_transducer(t).encode()).hexdigest()


@dataclass(frozen=True)
class MemberRecord:
    kind: str
    loop1: tuple[int, int]
    nodes1: tuple[int, ...]
    anchor1: tuple[int, int]
    trace1: str
    loop2: tuple[int, int]
    nodes2: tuple[int, ...]
    anchor2: tuple[int, int]
    trace2: str
    word: str
    mismatches: tuple[tuple[int, int], ...]   # (divisor, failing index)


@dataclass(frozen=True)
class RefutationCertificate:
    kind: str                   # "oneway" | "sweeping"
    transducer_name: str
    digest: str
    input_text: str
    run_dump: str
    members: tuple[MemberRecord, ...]
    passes: int = 1


def _member_record(run: Run, inv: Inversion, bound: PeriodBound
                   ) -> MemberRecord:
    table = run.transducer.table
    w = inversion_word(run, inv)
    l1 = len(inv.first.trace_output)
    l2 = len(inv.second.trace_output)
    g = math.gcd(l1, l2)
    mismatches = []
    for p in _divisors(g):
        if not bound_admits(bound, p):
            break
        bad = next(i for i in range(len(w) - p) if w[i] != w[i + p])
        mismatches.append((p, bad))
    return MemberRecord(
        inv.kind,
        inv.first.loop.interval, inv.first.component.nodes,
        inv.first.anchor, table.render(inv.first.trace_output),
        inv.second.loop.interval, inv.second.component.nodes,
        inv.second.anchor, table.render(inv.second.trace_output),
        table.render(w), tuple(mismatches))


def certificate_text(cert: RefutationCertificate) -> str:
    lines = [
        "untwist-certificate v1",
        f"kind: {cert.kind}",
        f"passes: {cert.passes}",
        f"transducer: {cert.transducer_name}",
        f"sha256: {cert.digest}",
        f'input: "{cert.input_text}"',
        "run:",
    ]
    lines += ["  " + ln for ln in cert.run_dump.rstrip("\n").split("\n")]
    for m, rec in enumerate(cert.members):
        lines.append(f"member {m}: {rec.kind}")
        for tag, loop, nodes, anchor, trace in (
                ("1", rec.loop1, rec.nodes1, rec.anchor1, rec.trace1),
                ("2", rec.loop2, rec.nodes2, rec.anchor2, rec.trace2)):
            lines.append(
                f"  loop{tag}: [{loop[0]},{loop[1]}] levels "
                f"[{nodes[0]},{nodes[-1]}] anchor ({anchor[0]},{anchor[1]})"
                f' trace "{trace}"')
        lines.append(f'  word: "{rec.word}"')
        lines.append("  mismatches:")
        for p, i in rec.mismatches:
            lines.append(f"    p={p} fail-at={i}")
    return "\n".join(lines) + "\n"


def parse_certificate(text: str) -> RefutationCertificate:
    lines = text.splitlines()
    if not lines or lines[0] != "untwist-certificate v1":
        raise ValueError("not an untwist certificate")
    fields: dict[str, str] = {}
    i = 1
    while i < len(lines) and not lines[i].startswith("run:"):
        key, val = lines[i].split(": ", 1)
        fields[key] = val
        i += 1
    i += 1
    dump_lines = []
    while i < len(lines) and lines[i].startswith("  "):
        dump_lines.append(lines[i][2:])
        i += 1
    members = []
    while i < len(lines):
        header = lines[i]
        if not header.startswith("member "):
            raise ValueError(f"unexpected line: {header!r}")
        kind = header.split(": ")[1]
        parts = []
        for tag_line in (lines[i + 1], lines[i + 2]):
            body = tag_line.strip()
            _, rest = body.split(": ", 1)
            loop_txt, rest = rest.split("] levels [", 1)
            levels_txt, rest = rest.split("] anchor (", 1)
            anchor_txt, trace_txt = rest.split(") trace ", 1)
            x1, x2 = map(int, loop_txt.lstrip("[").split(","))
            lv1, lv2 = map(int, levels_txt.split(","))
            ax, ay = map(int, anchor_txt.split(","))
            parts.append(((x1, x2), tuple(range(lv1, lv2 + 1)), (ax, ay),
                          trace_txt.strip()[1:-1]))
        word = lines[i + 3].strip().split(": ", 1)[1][1:-1]
        assert lines[i + 4].strip() == "mismatches:"
        i += 5
        mism = []
        while i < len(lines) and lines[i].startswith("    p="):
            p_txt, at_txt = lines[i].strip().split(" ")
            mism.append((int(p_txt[2:]), int(at_txt.split("=")[1])))
            i += 1
        (l1, n1, a1, t1), (l2, n2, a2, t2) = parts
        members.append(MemberRecord(kind, l1, n1, a1, t1, l2, n2, a2, t2,
                                    word, tuple(mism)))
    return RefutationCertificate(
        fields["kind"], fields["transducer"], fields["sha256"],
        fields["input"][1:-1], "\n".join(dump_lines) + "\n", tuple(members),
        int(fields.get("passes", "1")))


def verify_certificate(t: Transducer, cert: RefutationCertificate, *,
                       bound: PeriodBound = None) -> bool:
    """Full independent replay of a refutation certificate."""
    if bound is None:
        bound = constants(t).bound_factored
    try:
        if cert.digest != transducer_digest(t):
            return False
        raw = t.parse_input_text(cert.input_text) if cert.input_text else ""
        run = parse_run_dump(t, raw, cert.run_dump)
        if not validate_run(t, raw, run):
            return False
        table = t.table
        prev_second = None
        for m, rec in enumerate(cert.members):
            expect_kind = INVERSION if m % 2 == 0 else CO_INVERSION
            if rec.kind != expect_kind:
                return False
            sides = []
            for loop_iv, nodes, anchor, trace in (
                    (rec.loop1, rec.nodes1, rec.anchor1, rec.trace1),
                    (rec.loop2, rec.nodes2, rec.anchor2, rec.trace2)):
                x1, x2 = loop_iv
                if not (1 <= x1 < x2 <= run.word.omega - 1):
                    return False
                if run.crossing(x1) != run.crossing(x2):
                    return False
                e = effect_of_interval(run, x1, x2)
                if effect_product(e, e) != e:
                    return False
                from .loops import Loop
                loop = Loop(x1, x2, e, True)
                comp = next((c for c in components_of(run, loop)
                             if c.nodes == nodes), None)
                if comp is None or comp.anchor != anchor:
                    return False
                tr = trace_of(run, loop, comp)
                if table.render(tr.output) != trace or not tr.output:
                    return False
                sides.append(AnchoredComponent(loop, comp, tr.output))
            first, second = sides
            if not _pair_matches(run, rec.kind, first, second):
                return False
            if prev_second is not None:
                if run.loc_index[first.anchor] < prev_second:
                    return False
            prev_second = run.loc_index[second.anchor]
            w = inversion_word(run, Inversion(rec.kind, first, second))
            if table.render(w) != rec.word:
                return False
            l1, l2 = len(first.trace_output), len(second.trace_output)
            g = math.gcd(l1, l2)
            expected = [p for p in _divisors(g) if bound_admits(bound, p)]
            if [p for p, _ in rec.mismatches] != expected:
                return False
            for p, i in rec.mismatches:
                if not (0 <= i < len(w) - p) or w[i] == w[i + p]:
                    return False
        if len(cert.members) != (1 if cert.kind == "oneway" else cert.passes):
            return False
        return True
    except Exception:
        return False


# ---------------------------------------------------------------------------
# Deciders
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    kind: str                   # "refuted" | "no-counterexample" | "bound-exceeded"
    max_len: int
    certificate: Optional[RefutationCertificate] = None
    searched: dict = field(default_factory=dict, compare=False)
    note: str = ""


def _words_upto(t: Transducer, max_len: int) -> Iterator[str]:
    alphabet = sorted(t.table.encode_symbol(s) for s in t.input_symbols)
    for n in range(max_len + 1):
        for tup in iproduct(alphabet, repeat=n):
            yield "".join(tup)


def _check_functional(t: Transducer, max_len: int, cap_runs: int) -> None:
    from .transducer import check_functional_bounded
    res = check_functional_bounded(t, max_len, cap_runs=cap_runs)
    if res[0] == "witness":
        raise FunctionalityError(
            f"input {res[1]!r} has outputs {res[2]!r} and {res[3]!r}")


def decide_oneway_bounded(t: Transducer, max_len: int, *,
                          bound: PeriodBound = None,
                          cap_runs: int = 10**5,
                          skip_functional_check: bool = False) -> Verdict:
    """Refute one-way definability within the bound, or report honestly
    that no counterexample exists up to it (which is not a proof)."""
    if bound is None:
        bound = constants(t).bound_factored
    if not skip_functional_check:
        _check_functional(t, max_len, cap_runs)
    stats = {"inputs": 0, "runs": 0, "inversions": 0}
    for raw in _words_upto(t, max_len):
        stats["inputs"] += 1
        for run in enumerate_runs(t, raw, cap_runs=cap_runs):
            stats["runs"] += 1
            anchored = anchored_components(run)
            for i, a in enumerate(anchored):
                for b in anchored[i:]:
                    if not _pair_matches(run, INVERSION, a, b):
                        continue
                    stats["inversions"] += 1
                    inv = Inversion(INVERSION, a, b)
                    rep = period_report(run, inv, bound)
                    if not rep.safe:
                        cert = RefutationCertificate(
                            "oneway", t.name, transducer_digest(t),
                            t.table.render(raw), dump_run(run),
                            (_member_record(run, inv, bound),))
                        return Verdict("refuted", max_len, cert, stats)
    return Verdict("no-counterexample", max_len, None, stats)


def decide_sweeping_bounded(t: Transducer, passes: Optional[int],
                            max_len: int, *, bound: PeriodBound = None,
                            cap_runs: int = 10**5, cap_passes: int = 8,
                            cap_chains: int = 10**6,
                            skip_functional_check: bool = False) -> Verdict:
    """Search for an unsafe k-inversion; passes=None asks about sweeping
    definability for the theoretical pass count, which is far beyond any
    enumerable k, so it reports bound-exceeded after a proxy search."""
    if bound is None:
        bound = constants(t).bound_factored
    symbolic = passes is None
    if symbolic:
        c = constants(t)
        note = (f"theoretical pass count 2*{c.h_max}*(2^{3 * c.e_max}+1) "
                f"exceeds the enumeration cap {cap_passes}; the proxy "
                f"search below bears on {cap_passes}-pass definability only")
        passes = cap_passes
    else:
        note = ""
        if passes < 1:
            raise ValueError("passes must be positive")
        if passes > cap_passes:
            return Verdict("bound-exceeded", max_len, None, {},
                           f"passes {passes} exceeds cap {cap_passes}")
    if not skip_functional_check:
        _check_functional(t, max_len, cap_runs)
    stats = {"inputs": 0, "runs": 0, "chains": 0}
    for raw in _words_upto(t, max_len):
        stats["inputs"] += 1
        for run in enumerate_runs(t, raw, cap_runs=cap_runs):
            stats["runs"] += 1
            for ki in enumerate_k_inversions(run, passes, cap=cap_chains):
                stats["chains"] += 1
                if not k_inversion_safe(run, ki, bound):
                    cert = RefutationCertificate(
                        "sweeping", t.name, transducer_digest(t),
                        t.table.render(raw), dump_run(run),
                        tuple(_member_record(run, inv, bound)
                              for inv in ki.members),
                        passes=passes)
                    if symbolic:
                        return Verdict(
                            "bound-exceeded", max_len, cert, stats,
                            note + "; the proxy search refuted "
                            f"{passes}-pass definability")
                    return Verdict("refuted", max_len, cert, stats, note)
    kind = "bound-exceeded" if symbolic else "no-counterexample"
    return Verdict(kind, max_len, None, stats, note)
