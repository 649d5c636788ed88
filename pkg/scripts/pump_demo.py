#!/usr/bin/env python3
"""Show loop pumping against the trace-based prediction on one input."""
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from untwist.loops import (components_of, enumerate_loops,
                           predicted_pump_output, pump, trace_of)
from untwist.runs import enumerate_runs
from untwist.transducer import parse_transducer

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def main(name: str, text: str, m: int) -> None:
    t = parse_transducer((FIXTURES / f"{name}.tdx").read_text())
    run = enumerate_runs(t, t.parse_input_text(text))[0]
    print(f"input {text!r} -> output {run.render_output()!r}")
    for loop in enumerate_loops(run, idempotent_only=True):
        comps = components_of(run, loop)
        word, pumped = pump(t, run, loop, m + 1)
        predicted = predicted_pump_output(run, loop, comps, m)
        traces = [t.table.render(trace_of(run, loop, c).output)
                  for c in comps]
        status = "ok" if pumped.output == predicted else "MISMATCH"
        print(f"loop[{loop.x1},{loop.x2}] traces={traces} "
              f"pumped-input={t.table.render(word)!r} "
              f"pumped-output={pumped.render_output()!r} [{status}]")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "T_COPY_ABC",
         sys.argv[2] if len(sys.argv) > 2 else "abc",
         int(sys.argv[3]) if len(sys.argv) > 3 else 2)
