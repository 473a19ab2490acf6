import pytest

from unravel.corpus import GeneratorConfig, generate_corpus
from unravel.rnn import LstmModel, build_vocab


@pytest.fixture(scope="session")
def desk_corpus():
    """The default 2,000 + 800 document corpus, shared across modules."""
    return generate_corpus(GeneratorConfig())


@pytest.fixture(scope="session")
def desk_vocab(desk_corpus):
    return build_vocab(desk_corpus)


@pytest.fixture()
def tiny_model_vocab(desk_corpus, desk_vocab):
    """Untrained small model over the desk vocabulary (fresh per test)."""
    return LstmModel(len(desk_vocab), d_e=8, d_h=6, seed=11), desk_vocab


@pytest.fixture(scope="session")
def small_corpus():
    """The smallest corpus the generator allows, for pipeline tests."""
    return generate_corpus(
        GeneratorConfig(
            keyword_docs=100,
            distractor_docs=40,
            seed=5,
            distractor_pool_size=400,
        )
    )


@pytest.fixture(scope="session")
def small_model_vocab(small_corpus):
    """Untrained small model over the small corpus (shared, read-only)."""
    vocab = build_vocab(small_corpus)
    return LstmModel(len(vocab), d_e=8, d_h=6, seed=11), vocab
