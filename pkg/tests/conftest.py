import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dialectpos.corpus import Corpus, DEFAULT_TAGSET, TaggedSentence

TOKEN_ALPHABET = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789'@#.-"


def random_token(rng: random.Random) -> str:
    return "".join(rng.choice(TOKEN_ALPHABET) for _ in range(rng.randint(1, 8)))


def random_corpus(rng: random.Random, n_sentences=None, tagged=None) -> Corpus:
    if n_sentences is None:
        n_sentences = rng.randint(0, 8)
    sentences = []
    for _ in range(n_sentences):
        n = rng.randint(1, 7)
        tokens = tuple(random_token(rng) for _ in range(n))
        this_tagged = rng.random() < 0.5 if tagged is None else tagged
        gold = (
            tuple(rng.choice(DEFAULT_TAGSET.tags) for _ in range(n))
            if this_tagged else None
        )
        sentences.append(TaggedSentence(tokens, gold))
    return Corpus(tuple(sentences), DEFAULT_TAGSET)


# One pass/fail line per acceptance criterion at the end of the run.
_ACCEPTANCE_RESULTS: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    if "test_acceptance" not in report.nodeid:
        return
    _ACCEPTANCE_RESULTS[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_ACCEPTANCE_RESULTS.items()):
        mark = "PASS" if outcome == "passed" else outcome.upper()
        terminalreporter.write_line(f"[{mark}] {name}")


@pytest.fixture
def rng():
    return random.Random(20240817)
