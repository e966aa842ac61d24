import pytest

from ragc.corpus import AlphabetMap, ingest_bytes, render_bytes
from ragc.errors import CorruptStreamError


def test_ingest_examples():
    t, m = ingest_bytes(b"aba")
    assert t.tolist() == [1, 2, 1] and m.terminals == b"ab"
    t, m = ingest_bytes(b"")
    assert t.tolist() == [] and m.sigma == 0
    t, m = ingest_bytes(b"cab")
    assert t.tolist() == [3, 1, 2] and m.terminals == b"abc"


def test_render_examples():
    assert render_bytes(AlphabetMap(b"ab"), [1, 2, 1]) == b"aba"
    assert render_bytes(AlphabetMap(b""), []) == b""
    with pytest.raises(CorruptStreamError):
        render_bytes(AlphabetMap(b"a"), [1, 5])


def test_all_byte_values_round_trip():
    data = bytes(range(255, -1, -1)) * 3
    t, m = ingest_bytes(data)
    assert m.sigma == 256
    assert m.byte_of(1) == 0
    assert render_bytes(m, t) == data
