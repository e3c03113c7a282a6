import random

import pytest
from hypothesis import settings

from slotshot.builder import build_dataset
from slotshot.negatives import generate_negatives
from slotshot.querify import join_schema
from slotshot.synth import generate_corpus

settings.register_profile("suite", deadline=None, max_examples=50)
settings.load_profile("suite")


class Pipeline:
    """A generated corpus pushed through alignment, querification and
    negative sampling, shared by tests that need realistic example pools."""

    def __init__(self, seed: int, n_entities: int, ratio: float):
        self.corpus = generate_corpus(seed, n_entities)
        self.entities = {e.id: e for e in self.corpus.entities}
        documents = {d.id: d for d in self.corpus.documents}
        self.instances, self.build_report = build_dataset(
            documents, self.entities, self.corpus.facts
        )
        self.positives = join_schema(
            self.corpus.templates, self.instances, self.entities
        )
        self.negatives, self.negatives_report = generate_negatives(
            self.instances, self.corpus.templates, self.entities, ratio, seed
        )
        self.examples = self.positives + self.negatives


@pytest.fixture(scope="session")
def small_pipeline() -> Pipeline:
    return Pipeline(seed=20259, n_entities=60, ratio=1.0)


@pytest.fixture(scope="session")
def large_pipeline() -> Pipeline:
    # ratio 0.5 asks for two negatives per positive, which clears the
    # ten-thousand floor the negative-safety check needs.
    return Pipeline(seed=417, n_entities=500, ratio=0.5)


@pytest.fixture()
def rng() -> random.Random:
    return random.Random(98121)


# Per-criterion verdict lines, printed after the usual summary whenever the
# acceptance module ran.

_ACCEPTANCE_RESULTS: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if report.when == "call":
        _ACCEPTANCE_RESULTS[name] = "PASS" if report.passed else "FAIL"
    elif report.when == "setup" and (report.failed or report.skipped):
        _ACCEPTANCE_RESULTS[name] = "FAIL" if report.failed else "SKIP"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance")
    width = max(len(n) for n in _ACCEPTANCE_RESULTS)
    for name, verdict in _ACCEPTANCE_RESULTS.items():
        terminalreporter.write_line(f"{name.ljust(width)}  {verdict}")
