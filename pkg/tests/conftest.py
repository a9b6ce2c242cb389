import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from synthcorpus import make_benchmark, separable_pairs  # noqa: E402


@pytest.fixture(scope="session")
def benchmark():
    """Seeded synthetic multilingual benchmark shared across the suite."""
    return make_benchmark(seed=7)


@pytest.fixture(scope="session")
def toy_pairs():
    return separable_pairs(n=24, seed=3)


@pytest.fixture(scope="session")
def trained_ranker(benchmark):
    """Document-mode ranker trained on the synthetic simplewiki-en train
    split, plus the held-out test split."""
    from readranker.corpus import split_train_test
    from readranker.ranker import ReadabilityRanker

    train, test = split_train_test(benchmark["simplewiki-en"], 0.8, seed=42)
    model = ReadabilityRanker(mode="document", seed=42).fit(train)
    return model, train, test
