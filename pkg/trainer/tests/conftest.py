import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

# the corrector package's committed fixtures (shared transform contract)
PRIMARY_DATA = Path(__file__).resolve().parents[2] / "tests" / "data"


@pytest.fixture(scope="session")
def biencoder_checkpoint():
    from entfix_trainer import corpus
    from entfix_trainer.train_biencoder import train_biencoder

    triples = corpus.make_triples(200, seed=0)
    return train_biencoder(triples, epochs=10, batch_size=32, dim=64, seed=0)


@pytest.fixture(scope="session")
def ced_checkpoint():
    from entfix_trainer import corpus
    from entfix_trainer.train_ced import train_ced

    tagged = corpus.make_tagged(300, seed=0)
    return train_ced(tagged, epochs=10, seed=0)
