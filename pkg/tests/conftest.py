import pathlib

import pytest

from untwist.transducer import Transducer, parse_transducer

FIXTURE_DIR = pathlib.Path(__file__).resolve().parent.parent / "fixtures"

FIXTURE_NAMES = ["T_ID", "T_COPY_ABC", "T_COPY_AB", "T_MIRROR", "T_RUNNING",
                 "T_ZIGZAG", "T_THREECOMP"]

# The five fixtures with normative behavioural contracts.
CORE_NAMES = ["T_ID", "T_COPY_ABC", "T_COPY_AB", "T_MIRROR", "T_RUNNING"]


def load_fixture(name: str) -> Transducer:
    return parse_transducer((FIXTURE_DIR / f"{name}.tdx").read_text())


@pytest.fixture(scope="session")
def fixtures() -> dict[str, Transducer]:
    return {name: load_fixture(name) for name in FIXTURE_NAMES}


@pytest.fixture(scope="session")
def t_id(fixtures):
    return fixtures["T_ID"]


@pytest.fixture(scope="session")
def t_copy_abc(fixtures):
    return fixtures["T_COPY_ABC"]


@pytest.fixture(scope="session")
def t_copy_ab(fixtures):
    return fixtures["T_COPY_AB"]


@pytest.fixture(scope="session")
def t_mirror(fixtures):
    return fixtures["T_MIRROR"]


@pytest.fixture(scope="session")
def t_running(fixtures):
    return fixtures["T_RUNNING"]


@pytest.fixture(scope="session")
def t_zigzag(fixtures):
    return fixtures["T_ZIGZAG"]


@pytest.fixture(scope="session")
def t_threecomp(fixtures):
    return fixtures["T_THREECOMP"]


def domain_words(t: Transducer, max_len: int):
    """All encoded words up to max_len that admit at least one run."""
    from itertools import product

    from untwist.runs import enumerate_runs

    alphabet = sorted(t.table.encode_symbol(s) for s in t.input_symbols)
    for n in range(max_len + 1):
        for tup in product(alphabet, repeat=n):
            word = "".join(tup)
            runs = enumerate_runs(t, word)
            if runs:
                yield word, runs
