import random

import pytest

from entfix import _pykernels, kernels

try:
    from entfix import _ckernels
except ImportError:
    _ckernels = None


class TestBackendSelection:
    def test_backend_reported(self):
        assert kernels.BACKEND in ("c", "python")

    def test_env_override_forces_python(self, monkeypatch):
        import importlib
        import os

        monkeypatch.setenv("ENTFIX_PURE_PYTHON", "1")
        module = importlib.reload(kernels)
        try:
            assert module.BACKEND == "python"
        finally:
            monkeypatch.delenv("ENTFIX_PURE_PYTHON")
            importlib.reload(kernels)
        assert kernels.BACKEND in ("c", "python")
        del os


@pytest.mark.skipif(_ckernels is None, reason="compiled kernels unavailable")
class TestBackendParity:
    def test_random_sequences_agree(self):
        rng = random.Random(5)
        tokens = ["ka1", "mo2", "ri3", "<unk:x>", "zz"]
        for _ in range(500):
            a = tuple(rng.choices(tokens, k=rng.randint(0, 12)))
            b = tuple(rng.choices(tokens, k=rng.randint(0, 12)))
            assert _ckernels.levenshtein(a, b) == _pykernels.levenshtein(a, b)

    def test_batch_agrees(self):
        rng = random.Random(6)
        tokens = ["a", "b", "c", "d"]
        query = tuple(rng.choices(tokens, k=5))
        refs = [tuple(rng.choices(tokens, k=rng.randint(0, 8))) for _ in range(200)]
        assert _ckernels.levenshtein_batch(query, refs) == \
            _pykernels.levenshtein_batch(query, refs)

    def test_empty_inputs(self):
        assert _ckernels.levenshtein((), ()) == 0
        assert _ckernels.levenshtein((), ("a",)) == 1
        assert _ckernels.levenshtein_batch((), [(), ("a", "b")]) == [0, 2]
