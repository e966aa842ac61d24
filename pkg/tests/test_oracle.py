import numpy as np
import pytest

from ragc.oracle import (
    count_greedy,
    cross_check_selection,
    enumerate_maximal_repeats,
    fibonacci_word,
    naive_expand,
    pair_counts,
    repetitive_corpus,
)
from ragc.grammar import Run, Sequence


def maximal(t):
    return {e.substring: e.frequency for e in enumerate_maximal_repeats(t) if e.is_maximal}


def test_maximal_repeats_of_abcabcabc():
    m = maximal([1, 2, 3] * 3)
    assert m[(1, 2, 3)] == 3
    # the two copies of abcabc overlap, so greedy counting sees it once
    assert count_greedy([1, 2, 3] * 3, [1, 2, 3] * 2) == 1
    assert (1, 2, 3, 1, 2, 3) not in m


def test_maximal_repeats_small_cases():
    assert maximal([1, 2, 1, 2]) == {(1, 2): 2}
    assert enumerate_maximal_repeats([1, 2, 3]) == []


def test_oracle_refuses_large_input():
    with pytest.raises(ValueError):
        enumerate_maximal_repeats([1] * 257)


def test_greedy_counting():
    assert count_greedy([1, 1, 1, 1, 1], [1, 1]) == 2
    assert pair_counts([1, 1, 1]) == {(1, 1): 1}


def test_cross_check_examples():
    assert cross_check_selection([1, 1, 1, 1])
    assert cross_check_selection([1, 2, 3])
    assert cross_check_selection([1, 2, 3, 1, 2, 3, 1, 2, 3]).data["repeat"] == [1, 2, 3]


def test_naive_expand():
    assert naive_expand(b"ab", [Sequence((1, 2)), Run(3, 3)], [4, 1]) == b"abababa"


def test_fibonacci_words():
    assert [fibonacci_word(k) for k in range(5)] == [b"b", b"a", b"ab", b"aba", b"abaab"]
    assert len(fibonacci_word(20)) == 10946


def test_repetitive_corpus_shape():
    d = repetitive_corpus(copies=5, block=100, mutation_rate=0.01, seed=3)
    assert len(d) == 500
    diff = np.frombuffer(d[:100], np.uint8) != np.frombuffer(d[100:200], np.uint8)
    assert diff.sum() <= 3
