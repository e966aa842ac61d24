import numpy as np
import pytest

from ragc.container import (
    ENCODINGS,
    Header,
    compress,
    decode_grammar,
    decompress,
    encodings_for,
    read_header,
    stats,
    write_header,
)
from ragc.errors import CorruptStreamError, UsageError
from ragc.oracle import fibonacci_word

CELLS = [(a, e) for a in ("repair", "mr", "rlmr") for e in encodings_for(a)]


def test_cell_count():
    assert len(CELLS) == 7 + 6 + 6


@pytest.mark.parametrize("algo,enc", CELLS)
@pytest.mark.parametrize("data", [b"", b"abab", b"a" * 8, b"\x00\xff" * 33, fibonacci_word(12)])
def test_round_trip(algo, enc, data):
    blob = compress(data, algo, enc, 8)
    assert blob[:4] == b"RAGC"
    assert decompress(blob) == data


def test_empty_input_is_header_only():
    blob = compress(b"", "repair", "fble")
    h, g = decode_grammar(blob)
    assert (h.n, h.d, h.tau_len, h.sigma) == (0, 0, 0, 0)
    assert len(blob) < 16


def test_unary_rl_poppt_pge_payload():
    blob = compress(b"a" * 8, "rlmr", "poppt-pge", 8)
    h, g = decode_grammar(blob)
    assert h.epsilon == 8 and g.run_rule_count == 1 and g.rules[0].exponent == 8


def test_header_round_trip():
    h = Header("mr", "huffman", 0, b"\x01\x07z", 123456, 77, 9)
    w = write_header(h)
    back, r = read_header(w.to_bytes())
    assert back == h and r.pos == len(w)


def test_incompatible_combination():
    with pytest.raises(UsageError, match="MR-RePair"):
        compress(b"abab", "mr", "pairpge")
    with pytest.raises(UsageError):
        compress(b"abab", "repair", "nope")
    with pytest.raises(UsageError):
        compress(b"abab", "repair", "pge", epsilon=0)


def test_bad_magic_and_version():
    blob = bytearray(compress(b"hello hello", "mr", "fble"))
    blob[0] ^= 1
    with pytest.raises(CorruptStreamError, match="magic"):
        decompress(bytes(blob))
    blob[0] ^= 1
    blob[4] = 9
    with pytest.raises(CorruptStreamError, match="version"):
        decompress(bytes(blob))


@pytest.mark.parametrize("algo,enc", CELLS)
def test_truncation_and_bit_flips_never_crash(algo, enc, rng):
    data = rng.integers(0, 6, 600).astype(np.uint8).tobytes() * 2
    blob = compress(data, algo, enc, 4)
    for cut in range(0, len(blob) - 1, max(1, len(blob) // 25)):
        with pytest.raises(CorruptStreamError):
            decompress(blob[:cut])
    for _ in range(60):
        damaged = bytearray(blob)
        i = int(rng.integers(8, len(blob)))
        damaged[i] ^= 1 << int(rng.integers(0, 8))
        try:
            out = decompress(bytes(damaged))
        except CorruptStreamError:
            continue
        assert len(out) == len(data)


def test_trailing_garbage_rejected():
    blob = compress(b"abcabc", "mr", "huffman")
    with pytest.raises(CorruptStreamError):
        decompress(blob + b"\x00\x00")


def test_stats_examples():
    s = stats(b"a" * 8, "rlmr")
    assert (s.d, s.tau_len, s.size) == (1, 1, 5)
    s = stats(b"abc", "repair", "fble")
    assert (s.d, s.tau_len, s.size) == (0, 3, 6)
    fib = fibonacci_word(20)
    s = stats(fib, "repair", "poppt-ible")
    assert s.size == s.sigma + s.rules_length + s.tau_len
    from_file = stats(compress(fib, "repair", "poppt-ible"))
    assert from_file == s
    assert s.ratio == pytest.approx(100 * s.encoded_bytes / len(fib))


def test_encodings_table_is_stable():
    assert ENCODINGS == {
        "32bit": 0,
        "fble": 1,
        "huffman": 2,
        "pge": 3,
        "pairpge": 4,
        "poppt-ible": 5,
        "poppt-pge": 6,
    }
