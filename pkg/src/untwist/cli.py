"""Command-line front end.

Exit codes: 0 pass/no-counterexample, 1 refuted, 2 absent, 64 usage,
65 parse/validation, 69 resource cap exceeded.  Default output carries no
timestamps so identical invocations are byte-identical; --stats adds
timing behind a flag.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from .decomposition import build_decomposition
from .inversions import check_p2
from .loops import components_of, enumerate_loops, pump, trace_of
from .oneway import (FunctionalityError, certificate_text, decide_oneway_bounded,
                     decide_sweeping_bounded, parse_certificate,
                     simulate_oneway, verify_certificate)
from .runs import CapExceeded, dump_run, enumerate_runs
from .transducer import (ParseError, constants, parse_transducer,
                         serialize_transducer, validate)

EX_OK, EX_REFUTED, EX_ABSENT = 0, 1, 2
EX_USAGE, EX_DATA, EX_CAP = 64, 65, 69


def _load(path: str):
    with open(path, encoding="utf-8") as fh:
        t = parse_transducer(fh.read())
    report = validate(t)
    if not report.ok:
        msgs = "; ".join(i.message for i in report.errors())
        raise ParseError(f"{path}: {msgs}")
    return t


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def _bound(args, t):
    if args.period_bound == "symbolic":
        return constants(t).bound_factored
    return int(args.period_bound)


def cmd_parse(args) -> int:
    t = _load(args.file)
    text = serialize_transducer(t)
    _emit(args, {"command": "parse", "result": "ok",
                 "details": {"name": t.name, "states": len(t.states),
                             "transitions": len(t.transitions),
                             "canonical": text}}, text)
    return EX_OK


def cmd_constants(args) -> int:
    t = _load(args.file)
    c = constants(t)
    text = (f"states: {c.state_count}\nc_max: {c.c_max}\n"
            f"h_max: {c.h_max}\ne_max: {c.e_max}\n"
            f"bound: {c.bound_factored}\n")
    _emit(args, {"command": "constants", "result": "ok",
                 "details": {"states": c.state_count, "c_max": c.c_max,
                             "h_max": c.h_max, "e_max": str(c.e_max),
                             "bound": str(c.bound_factored)}}, text)
    return EX_OK


def cmd_run(args) -> int:
    t = _load(args.file)
    raw = t.parse_input_text(args.input)
    runs = enumerate_runs(t, raw, cap_runs=args.cap_runs,
                          cap_steps=args.cap_steps)
    if args.dump_runs:
        with open(args.dump_runs, "w", encoding="utf-8") as fh:
            for i, r in enumerate(runs):
                fh.write(f"run {i}:\n{dump_run(r)}")
    if not runs:
        _emit(args, {"command": "run", "result": "absent", "details": {}},
              "input not in domain\n")
        return EX_ABSENT
    outs = sorted({r.render_output() for r in runs})
    text = "\n".join(f'output: "{o}"' for o in outs) + f"\nruns: {len(runs)}\n"
    _emit(args, {"command": "run", "result": "ok",
                 "details": {"outputs": outs, "runs": len(runs)}}, text)
    return EX_OK


def cmd_analyze(args) -> int:
    t = _load(args.file)
    raw = t.parse_input_text(args.input)
    runs = enumerate_runs(t, raw, cap_runs=args.cap_runs,
                          cap_steps=args.cap_steps)
    if not runs:
        _emit(args, {"command": "analyze", "result": "absent", "details": {}},
              "input not in domain\n")
        return EX_ABSENT
    bound = _bound(args, t)
    lines = []
    details = []
    for i, run in enumerate(runs):
        lines.append(f"run {i}: {len(run.steps)} steps, "
                     f'output "{run.render_output()}"')
        loops = enumerate_loops(run)
        idem = [l for l in loops if l.idempotent]
        lines.append(f"  loops: {len(loops)} ({len(idem)} idempotent)")
        for loop in idem:
            for comp in components_of(run, loop):
                tr = trace_of(run, loop, comp)
                if tr.output:
                    lines.append(
                        f"  loop[{loop.x1},{loop.x2}] levels "
                        f"[{comp.min_node},{comp.max_node}] anchor "
                        f"({comp.anchor[0]},{comp.anchor[1]}) trace "
                        f'"{t.table.render(tr.output)}"')
        reports = check_p2(run, bound)
        unsafe = [r for r in reports if not r[1].safe]
        lines.append(f"  inversions: {len(reports)} ({len(unsafe)} unsafe)")
        details.append({"run": i, "loops": len(loops),
                        "idempotent": len(idem),
                        "inversions": len(reports), "unsafe": len(unsafe)})
    _emit(args, {"command": "analyze", "result": "ok",
                 "details": {"runs": details}}, "\n".join(lines) + "\n")
    return EX_OK


def cmd_pump(args) -> int:
    t = _load(args.file)
    raw = t.parse_input_text(args.input)
    runs = enumerate_runs(t, raw, cap_runs=args.cap_runs,
                          cap_steps=args.cap_steps)
    if not runs:
        _emit(args, {"command": "pump", "result": "absent", "details": {}},
              "input not in domain\n")
        return EX_ABSENT
    run = runs[args.run_index]
    loops = [l for l in enumerate_loops(run, idempotent_only=args.idempotent)]
    lines = []
    pumped = []
    for loop in loops:
        word, new_run = pump(t, run, loop, args.copies)
        lines.append(f"loop[{loop.x1},{loop.x2}] copies={args.copies} -> "
                     f'input "{t.table.render(word)}" output '
                     f'"{new_run.render_output()}"')
        pumped.append({"loop": [loop.x1, loop.x2],
                       "input": t.table.render(word),
                       "output": new_run.render_output()})
    _emit(args, {"command": "pump", "result": "ok",
                 "details": {"pumped": pumped}},
          ("\n".join(lines) + "\n") if lines else "no loops\n")
    return EX_OK


def cmd_decompose(args) -> int:
    t = _load(args.file)
    raw = t.parse_input_text(args.input)
    runs = enumerate_runs(t, raw, cap_runs=args.cap_runs,
                          cap_steps=args.cap_steps)
    if not runs:
        _emit(args, {"command": "decompose", "result": "absent",
                     "details": {}}, "input not in domain\n")
        return EX_ABSENT
    bound = _bound(args, t)
    run = runs[args.run_index]
    outcome = build_decomposition(run, bound)
    if outcome.decomposition is None:
        inv, rep = outcome.unsafe
        text = (f"no decomposition: unsafe inversion with word "
                f'"{t.table.render(rep.word)}"\n')
        _emit(args, {"command": "decompose", "result": "refuted",
                     "details": {"word": t.table.render(rep.word)}}, text)
        return EX_REFUTED
    _emit(args, {"command": "decompose", "result": "ok",
                 "details": {"pieces": [
                     {"kind": p.kind, "start": list(p.start),
                      "end": list(p.end)}
                     for p in outcome.decomposition.pieces]}},
          outcome.decomposition.render())
    return EX_OK


def cmd_simulate(args) -> int:
    t = _load(args.file)
    raw = t.parse_input_text(args.input)
    res = simulate_oneway(t, raw, bound=_bound(args, t),
                          cap_runs=args.cap_runs)
    if not res.present:
        _emit(args, {"command": "simulate-oneway", "result": "absent",
                     "details": {}}, "absent\n")
        return EX_ABSENT
    transcript = [{"position": e.position, "text": t.table.render(e.text),
                   "note": e.note} for e in res.transcript]
    text = f'output: "{t.table.render(res.output)}"\n'
    if args.transcript:
        text += "".join(f"  @{e['position']} \"{e['text']}\" ({e['note']})\n"
                        for e in transcript)
    _emit(args, {"command": "simulate-oneway", "result": "ok",
                 "details": {"output": t.table.render(res.output),
                             "transcript": transcript}}, text)
    return EX_OK


def cmd_decide(args) -> int:
    t = _load(args.file)
    bound = _bound(args, t)
    if args.mode == "oneway":
        verdict = decide_oneway_bounded(t, args.max_len, bound=bound,
                                        cap_runs=args.cap_runs)
    else:
        verdict = decide_sweeping_bounded(t, args.passes, args.max_len,
                                          bound=bound, cap_runs=args.cap_runs)
    details = {"verdict": verdict.kind, "max_len": verdict.max_len,
               "searched": verdict.searched, "note": verdict.note}
    if verdict.certificate is not None:
        cert = certificate_text(verdict.certificate)
        details["certificate"] = cert
        if args.cert:
            with open(args.cert, "w", encoding="utf-8") as fh:
                fh.write(cert)
        text = f"refuted (|u| = {len(verdict.certificate.input_text)})\n" + cert
    else:
        text = f"{verdict.kind} up to {verdict.max_len}"
        if verdict.note:
            text += f" ({verdict.note})"
        text += "\n"
    _emit(args, {"command": f"decide-{args.mode}", "verdict": verdict.kind,
                 "details": details}, text)
    if verdict.kind == "refuted":
        return EX_REFUTED
    return EX_OK


def cmd_verify_cert(args) -> int:
    t = _load(args.file)
    with open(args.cert, encoding="utf-8") as fh:
        cert = parse_certificate(fh.read())
    ok = verify_certificate(t, cert)
    _emit(args, {"command": "verify-cert",
                 "verdict": "valid" if ok else "invalid", "details": {}},
          ("valid" if ok else "invalid") + "\n")
    return EX_OK if ok else EX_REFUTED


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="untwist",
                                description=__doc__.split("\n")[0])
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--stats", action="store_true",
                   help="append wall-clock timing to text output")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, input_arg=False):
        sp.add_argument("file")
        if input_arg:
            sp.add_argument("--input", required=True)
        sp.add_argument("--cap-runs", type=int, default=10**5)
        sp.add_argument("--cap-steps", type=int, default=None)
        sp.add_argument("--period-bound", default="symbolic")

    common(sub.add_parser("parse"))
    common(sub.add_parser("constants"))
    sp = sub.add_parser("run")
    common(sp, input_arg=True)
    sp.add_argument("--dump-runs", default=None)
    sp = sub.add_parser("analyze")
    common(sp, input_arg=True)
    sp = sub.add_parser("pump")
    common(sp, input_arg=True)
    sp.add_argument("--copies", type=int, default=2)
    sp.add_argument("--run-index", type=int, default=0)
    sp.add_argument("--idempotent", action="store_true")
    sp = sub.add_parser("decompose")
    common(sp, input_arg=True)
    sp.add_argument("--run-index", type=int, default=0)
    sp = sub.add_parser("simulate-oneway")
    common(sp, input_arg=True)
    sp.add_argument("--transcript", action="store_true")
    sp = sub.add_parser("decide")
    sp.add_argument("mode", choices=("oneway", "sweeping"))
    common(sp)
    sp.add_argument("--max-len", type=int, required=True)
    sp.add_argument("--passes", type=int, default=None)
    sp.add_argument("--cert", default=None)
    sp = sub.add_parser("verify-cert")
    common(sp)
    sp.add_argument("--cert", required=True)
    return p


_DISPATCH = {
    "parse": cmd_parse, "constants": cmd_constants, "run": cmd_run,
    "analyze": cmd_analyze, "pump": cmd_pump, "decompose": cmd_decompose,
    "simulate-oneway": cmd_simulate, "decide": cmd_decide,
    "verify-cert": cmd_verify_cert,
}


def run_cli(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EX_USAGE if exc.code not in (0, None) else 0
    started = time.monotonic()
    try:
        code = _DISPATCH[args.command](args)
    except (ParseError, FunctionalityError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_DATA
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EX_CAP
    if args.stats and args.format == "text":
        print(f"elapsed: {time.monotonic() - started:.3f}s")
    return code


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
