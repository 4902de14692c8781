import os

import pytest

from coocmap.synth import generate_corpus


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """~2.5MB synthetic corpus for fast qualitative checks."""
    path = tmp_path_factory.mktemp("data") / "small.txt"
    generate_corpus(path, 2_500_000, seed=123)
    return str(path)


@pytest.fixture(scope="session")
def bench_corpus(tmp_path_factory):
    """~21MB corpus for the benchmark criteria.

    A user-supplied corpus (COOCMAP_CORPUS, >= 20MB of plain text) takes
    precedence; otherwise the deterministic synthetic language is used.
    """
    override = os.environ.get("COOCMAP_CORPUS")
    if override:
        return override
    path = tmp_path_factory.mktemp("data") / "bench.txt"
    generate_corpus(path, 21_000_000, seed=7)
    return str(path)
