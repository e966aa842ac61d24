"""Byte input to initial symbol text and back."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CorruptStreamError


@dataclass(frozen=True)
class AlphabetMap:
    """Occurring byte values in ascending order; byte ``terminals[i]`` is symbol i+1."""

    terminals: bytes

    @property
    def sigma(self) -> int:
        return len(self.terminals)

    @property
    def symbol_of(self) -> np.ndarray:
        table = np.zeros(256, np.int64)
        table[np.frombuffer(self.terminals, np.uint8)] = np.arange(1, self.sigma + 1)
        return table

    def byte_of(self, symbol: int) -> int:
        return self.terminals[symbol - 1]


def ingest_bytes(data: bytes) -> tuple[np.ndarray, AlphabetMap]:
    raw = np.frombuffer(bytes(data), np.uint8)
    present = np.flatnonzero(np.bincount(raw, minlength=256))
    amap = AlphabetMap(bytes(present.astype(np.uint8)))
    return amap.symbol_of[raw], amap


def render_bytes(amap: AlphabetMap, symbols) -> bytes:
    arr = np.asarray(symbols, dtype=np.int64).reshape(-1)
    if arr.size == 0:
        return b""
    bad = (arr < 1) | (arr > amap.sigma)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise CorruptStreamError(f"symbol {int(arr[i])} at index {i} outside 1..{amap.sigma}")
    table = np.frombuffer(amap.terminals, np.uint8)
    return table[arr - 1].tobytes()
