import json

import jsonschema
import pytest

from untwist.cli import run_cli

from .conftest import FIXTURE_DIR

SCHEMA = {
    "type": "object",
    "required": ["command", "details"],
    "properties": {
        "command": {"type": "string"},
        "verdict": {"type": "string"},
        "result": {"type": "string"},
        "details": {"type": "object"},
    },
    "anyOf": [{"required": ["verdict"]}, {"required": ["result"]}],
}


def fx(name: str) -> str:
    return str(FIXTURE_DIR / f"{name}.tdx")


def invoke(capsys, *argv) -> tuple[int, str]:
    code = run_cli(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_parse_roundtrip(capsys):
    code, out = invoke(capsys, "parse", fx("T_ID"))
    assert code == 0
    assert out.startswith("transducer T_ID")


def test_constants_text(capsys):
    code, out = invoke(capsys, "constants", fx("T_ID"))
    assert code == 0
    assert "h_max: 3" in out
    assert "2^12288" in out


def test_run_mirror(capsys):
    code, out = invoke(capsys, "run", fx("T_MIRROR"), "--input", "ab")
    assert code == 0
    assert 'output: "abba"' in out


def test_run_outside_domain_exit_2(capsys):
    code, out = invoke(capsys, "run", fx("T_COPY_ABC"), "--input", "ab")
    assert code == 2


def test_run_dump_runs(tmp_path, capsys):
    path = tmp_path / "runs.txt"
    code, _ = invoke(capsys, "run", fx("T_ID"), "--input", "ab",
                     "--dump-runs", str(path))
    assert code == 0
    text = path.read_text()
    assert text.startswith("run 0:\nstep 0:")
    assert 'output: "ab"' in text


def test_decide_oneway_refuted_exit_1(capsys):
    code, out = invoke(capsys, "decide", "oneway", fx("T_COPY_AB"),
                       "--max-len", "10")
    assert code == 1
    assert "untwist-certificate v1" in out


def test_decide_oneway_pass_exit_0(capsys):
    code, out = invoke(capsys, "decide", "oneway", fx("T_ID"),
                       "--max-len", "6")
    assert code == 0
    assert "no-counterexample up to 6" in out


def test_decide_sweeping(capsys):
    code, out = invoke(capsys, "decide", "sweeping", fx("T_MIRROR"),
                       "--max-len", "4", "--passes", "2")
    assert code == 0
    code, out = invoke(capsys, "decide", "sweeping", fx("T_MIRROR"),
                       "--max-len", "4", "--passes", "1")
    assert code == 1


def test_analyze_and_decompose(capsys):
    code, out = invoke(capsys, "analyze", fx("T_COPY_AB"), "--input", "ab")
    assert code == 0 and "unsafe" in out
    code, out = invoke(capsys, "decompose", fx("T_ID"), "--input", "ab")
    assert code == 0
    assert "piece 0" in out and "diagonal" in out
    code, out = invoke(capsys, "decompose", fx("T_COPY_AB"), "--input", "ab")
    assert code == 1


def test_simulate_cli(capsys):
    code, out = invoke(capsys, "simulate-oneway", fx("T_COPY_ABC"),
                       "--input", "abc")
    assert code == 0 and 'output: "abcabc"' in out
    code, out = invoke(capsys, "simulate-oneway", fx("T_COPY_AB"),
                       "--input", "ab")
    assert code == 2


def test_pump_cli(capsys):
    code, out = invoke(capsys, "pump", fx("T_COPY_ABC"), "--input", "abc",
                       "--copies", "2", "--idempotent")
    assert code == 0
    assert 'input "abcabc"' in out


def test_usage_error_exit_64(capsys):
    assert run_cli(["decide"]) == 64
    assert run_cli(["nonsense"]) == 64


def test_parse_error_exit_65(tmp_path, capsys):
    bad = tmp_path / "bad.tdx"
    bad.write_text("transducer x\ninput a\noutput a\nstates\ninitial q\n")
    assert run_cli(["parse", str(bad)]) == 65


def test_verify_cert_cli(tmp_path, capsys):
    cert_path = tmp_path / "cert.txt"
    code, _ = invoke(capsys, "decide", "oneway", fx("T_COPY_AB"),
                     "--max-len", "6", "--cert", str(cert_path))
    assert code == 1
    code, out = invoke(capsys, "verify-cert", fx("T_COPY_AB"),
                       "--cert", str(cert_path))
    assert code == 0 and out.strip() == "valid"
    # Tamper: flip one mismatch line.
    text = cert_path.read_text().replace("fail-at=1", "fail-at=0")
    cert_path.write_text(text)
    code, out = invoke(capsys, "verify-cert", fx("T_COPY_AB"),
                       "--cert", str(cert_path))
    assert code == 1 and out.strip() == "invalid"


def test_byte_identical_repeat_invocations(capsys):
    _, out1 = invoke(capsys, "decide", "oneway", fx("T_COPY_AB"),
                     "--max-len", "6")
    _, out2 = invoke(capsys, "decide", "oneway", fx("T_COPY_AB"),
                     "--max-len", "6")
    assert out1 == out2


@pytest.mark.parametrize("argv", [
    ("parse", "T_ID"),
    ("constants", "T_MIRROR"),
    ("run", "T_MIRROR", "--input", "ab"),
    ("analyze", "T_COPY_AB", "--input", "ab"),
    ("pump", "T_ID", "--input", "aa"),
    ("decompose", "T_ID", "--input", "ab"),
    ("simulate-oneway", "T_COPY_ABC", "--input", "abc"),
    ("decide", "oneway", "T_ID", "--max-len", "3"),
    ("decide", "sweeping", "T_MIRROR", "--max-len", "3", "--passes", "2"),
])
def test_json_output_schema(capsys, argv):
    argv = list(argv)
    file_pos = 1 if argv[0] != "decide" else 2
    argv[file_pos] = fx(argv[file_pos])
    code = run_cli(["--format", "json"] + argv)
    out = capsys.readouterr().out
    payload = json.loads(out)
    jsonschema.validate(payload, SCHEMA)
    assert payload["command"].startswith(argv[0].split("-")[0]) or \
        payload["command"] in ("decide-oneway", "decide-sweeping",
                               "simulate-oneway")
