import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ragc.constructors import (
    MR,
    REPAIR,
    RLMR,
    compress_bytes,
    construct,
    construct_mr_repair,
    construct_repair,
    construct_rl_mr_repair,
)
from ragc.corpus import ingest_bytes
from ragc.grammar import Run, Sequence, expand, grammar_size, validate
from ragc.oracle import fibonacci_word, naive_construct

NAMES = {REPAIR: "repair", MR: "mr", RLMR: "rlmr"}

# (d, Σ|α|, |τ|, size) for F_k, k = 2..25, identical for all three
# constructors; computed once with oracle.naive_construct and frozen here.
FIB_TABLE = {2: (0, 0, 2, 4), 3: (0, 0, 3, 5)}
FIB_TABLE.update({k: (k - 3, 2 * (k - 3), 3, 2 * k - 1) for k in range(4, 26)})


def test_repair_abab():
    g = construct_repair([1, 2, 1, 2], 2)
    assert g.rules == (Sequence((1, 2)),)
    assert g.tau.tolist() == [3, 3]
    assert grammar_size(g) == 6


def test_no_repetition():
    for fn in (construct_repair, construct_mr_repair, construct_rl_mr_repair):
        g = fn([1, 2, 3], 3)
        assert g.d == 0 and g.tau.tolist() == [1, 2, 3] and grammar_size(g) == 6


def test_mr_abcabcabc():
    g = construct_mr_repair([1, 2, 3] * 3, 3)
    assert g.rules == (Sequence((1, 2, 3)),)
    assert g.tau.tolist() == [4, 4, 4]
    assert grammar_size(g) == 9


def test_mr_trims_repeat_with_equal_ends():
    g = compress_bytes(b"abaabaaba", "mr")
    assert g.rules[0] == Sequence((1, 2))
    assert expand(g) == b"abaabaaba"


def test_mr_halves_unary_text():
    g = compress_bytes(b"a" * 8, "mr")
    assert g.rules == (Sequence((1, 1)), Sequence((2, 2)))
    assert g.tau.tolist() == [3, 3]


def test_rl_unary_text():
    g = compress_bytes(b"a" * 8, "rlmr")
    assert g.rules == (Run(1, 8),)
    assert g.tau.tolist() == [2]
    assert grammar_size(g) == 5


def test_rl_adversarial_family_small():
    g = compress_bytes(b"aab" + b"a" * 4 + b"b" + b"a" * 8 + b"b", "rlmr")
    runs = [r for r in g.rules if isinstance(r, Run)]
    assert sorted(r.exponent for r in runs) == [2, 4, 8]
    assert validate(g) == []


def test_rl_dedups_equal_runs():
    g = compress_bytes(b"aaaabaaaab", "rlmr")
    assert [r for r in g.rules if isinstance(r, Run)] == [Run(1, 4)]
    assert expand(g) == b"aaaabaaaab"


@pytest.mark.parametrize("k", sorted(FIB_TABLE))
@pytest.mark.parametrize("algo", [REPAIR, MR, RLMR])
def test_fibonacci_table(k, algo):
    t, m = ingest_bytes(fibonacci_word(k))
    g = construct(t, m.sigma, algo, m.terminals)
    assert (g.d, g.rules_length(), g.tau.shape[0], grammar_size(g)) == FIB_TABLE[k]
    assert expand(g) == fibonacci_word(k)


@given(st.lists(st.integers(1, 3), max_size=80), st.sampled_from([REPAIR, MR, RLMR]))
def test_matches_reference_constructor(t, algo):
    g = construct(t, 3, algo)
    ref = naive_construct(t, 3, NAMES[algo])
    assert g == ref
    assert validate(g) == []


def test_small_heap_forces_compaction(rng):
    for _ in range(20):
        t = rng.integers(1, 4, 400)
        for algo in (REPAIR, MR, RLMR):
            g = construct(t, 3, algo, heap_capacity=1)
            assert g == naive_construct(t.tolist(), 3, NAMES[algo])


def test_random_bytes_round_trip(rng):
    for _ in range(20):
        data = rng.integers(0, rng.integers(1, 257), rng.integers(0, 3000)).astype(np.uint8).tobytes()
        for name in ("repair", "mr", "rlmr"):
            g = compress_bytes(data, name)
            assert expand(g) == data
            assert validate(g) == []


def test_rejects_symbols_outside_alphabet():
    with pytest.raises(ValueError):
        construct([1, 4], 3, REPAIR)
