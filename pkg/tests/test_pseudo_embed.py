import numpy as np
import pytest

from textrf.errors import InvalidArgument
from textrf.text import PromptStrategy, pseudo_cache, pseudo_embed
from textrf.text.pseudo import fnv1a64


def test_fnv1a64_reference_values():
    # published FNV-1a 64-bit test vectors
    assert fnv1a64(b"") == 0xCBF29CE484222325
    assert fnv1a64(b"a") == 0xAF63DC4C8601EC8C
    assert fnv1a64(b"foobar") == 0x85944171F73967E8


def test_deterministic():
    a = pseudo_embed("walk", 8, PromptStrategy.TLE)
    b = pseudo_embed("walk", 8, PromptStrategy.TLE)
    assert np.array_equal(a, b)


def test_unit_norm():
    for label in ("walk", "wave hands", "fall down"):
        v = pseudo_embed(label, 16, PromptStrategy.TCE)
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)


def test_strategy_changes_vector():
    a = pseudo_embed("walk", 8, PromptStrategy.TLE)
    b = pseudo_embed("walk", 8, PromptStrategy.TCE)
    assert not np.array_equal(a, b)


def test_label_changes_vector():
    a = pseudo_embed("walk", 8, PromptStrategy.TLE)
    b = pseudo_embed("run", 8, PromptStrategy.TLE)
    assert not np.array_equal(a, b)


def test_values_bounded_before_normalization():
    # raw stream maps to [-1, 1); after normalization entries stay in [-1, 1]
    v = pseudo_embed("anything", 64, PromptStrategy.TDE)
    assert np.all(np.abs(v) <= 1.0)


def test_prefix_stability():
    # first dim values of a longer embedding match the shorter one pre-normalization
    short = pseudo_embed("walk", 4, PromptStrategy.TLE)
    long = pseudo_embed("walk", 8, PromptStrategy.TLE)
    ratio = long[:4] / short  # both are the same stream scaled by different norms
    assert np.allclose(ratio, ratio[0])


def test_empty_label_rejected():
    with pytest.raises(InvalidArgument):
        pseudo_embed("", 8, PromptStrategy.TLE)
    with pytest.raises(InvalidArgument):
        pseudo_embed("x", 0, PromptStrategy.TLE)


def test_pseudo_cache_vector_counts():
    labels = ["walk", "run", "fall"]
    for strategy, expected_l in ((PromptStrategy.TLE, 1), (PromptStrategy.TCE, 1), (PromptStrategy.TDE, 3)):
        cache = pseudo_cache(labels, 8, strategy)
        assert cache.vectors_per_label == expected_l
        assert cache.labels == labels
        for vectors in cache.entries.values():
            for v in vectors:
                assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)
