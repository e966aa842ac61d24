"""Packed gamma encoding and its pair-rule application.

A text is cut into blocks of ε symbols (the last one may be short).  Each
block is packed at the bit width of its largest symbol.  The width sequence D
is stored as first differences (magnitude+1, plus a sign bitmap), and the
magnitudes go through two rounds of run-length splitting before gamma coding.

Stream layout: γ(|t|+1) γ(ε) γ(|S1|+1) γ(|S2|+1) γ(packed bits+1), then
γ(S1) γ(S2) γ(L2), the packed symbols and finally the q sign bits.  The
packed-bit count lets the decoder reach the sign bits, which it needs to
rebuild D, before it reads the packed symbols.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bitio import BitReader, BitWriter, bit_width_array, rle_expand, rle_split
from .errors import CorruptStreamError, UnsupportedError
from .grammar import SEQ, Grammar
from .naive import is_pair_grammar

DEFAULT_EPSILON = 8


@dataclass(frozen=True)
class PgeBlocks:
    epsilon: int
    D: np.ndarray
    D_delta: np.ndarray
    D_pms: np.ndarray
    S1: np.ndarray
    L1: np.ndarray
    S2: np.ndarray
    L2: np.ndarray

    @property
    def q(self) -> int:
        return int(self.D.shape[0])


def block_widths(t: np.ndarray, epsilon: int) -> np.ndarray:
    if t.size == 0:
        return np.empty(0, np.int64)
    starts = np.arange(0, t.size, epsilon)
    return bit_width_array(np.maximum.reduceat(t, starts).astype(np.int64))


def block_sizes(n: int, epsilon: int) -> np.ndarray:
    q = -(-n // epsilon)
    sizes = np.full(q, epsilon, np.int64)
    if q:
        sizes[-1] = n - (q - 1) * epsilon
    return sizes


def pge_blocks(t, epsilon: int) -> PgeBlocks:
    t = np.asarray(t, dtype=np.int64)
    if epsilon < 1:
        raise ValueError("block size must be at least 1")
    if t.size and t.min() < 0:
        raise ValueError("packed gamma encoding needs non-negative symbols")
    D = block_widths(t, epsilon)
    step = np.diff(D, prepend=0)
    D_delta = np.abs(step) + 1
    D_pms = (step >= 0).astype(np.int64)
    S1, L1 = rle_split(D_delta)
    S2, L2 = rle_split(L1)
    return PgeBlocks(epsilon, D, D_delta, D_pms, S1, L1, S2, L2)


def pge_encode(t, epsilon: int = DEFAULT_EPSILON, out: BitWriter | None = None) -> BitWriter:
    t = np.asarray(t, dtype=np.int64)
    blk = pge_blocks(t, epsilon)
    widths = np.repeat(blk.D, block_sizes(t.size, epsilon))
    packed = int(widths.sum())
    w = out if out is not None else BitWriter(128 + packed)
    for v in (t.size + 1, epsilon, blk.S1.size + 1, blk.S2.size + 1, packed + 1):
        w.write_gamma(v)
    w.write_gamma_array(blk.S1)
    w.write_gamma_array(blk.S2)
    w.write_gamma_array(blk.L2)
    w.write_varwidth_array(t, widths)
    w.write_bitarray(blk.D_pms)
    return w


def pge_decode(r: BitReader) -> np.ndarray:
    start = r.pos
    n = r.read_gamma() - 1
    epsilon = r.read_gamma()
    n_s1 = r.read_gamma() - 1
    n_s2 = r.read_gamma() - 1
    packed = r.read_gamma() - 1
    if n > packed:
        raise CorruptStreamError("packed gamma: more symbols than packed bits", start)
    q = -(-n // epsilon)
    S1 = r.read_gamma_array(n_s1)
    S2 = r.read_gamma_array(n_s2)
    L2 = r.read_gamma_array(n_s2)
    if int(L2.sum()) != n_s1:
        raise CorruptStreamError("packed gamma: L2 does not sum to |S1|", start)
    if sum(int(a) * int(b) for a, b in zip(S2, L2)) != q or q > r.remaining:
        raise CorruptStreamError("packed gamma: L1 does not sum to the block count", start)
    L1 = rle_expand(S2, L2)
    D_delta = rle_expand(S1, L1)
    body = r.pos
    if packed > r.remaining:
        raise CorruptStreamError("packed gamma: packed section truncated", body)
    r.pos = body + packed
    D_pms = r.read_bitarray(q)
    end = r.pos
    sign = np.where(D_pms == 1, 1, -1)
    if q:
        sign[0] = 1
    D = np.cumsum(sign * (D_delta - 1))
    if q and (D.min() < 1 or D.max() > 63):
        raise CorruptStreamError("packed gamma: block width out of range", start)
    widths = np.repeat(D, block_sizes(n, epsilon))
    if int(widths.sum()) != packed:
        raise CorruptStreamError("packed gamma: block widths disagree with packed length", start)
    r.pos = body
    t = r.read_varwidth_array(widths)
    r.pos = end
    return t


# -- pair rules ---------------------------------------------------------------


def pair_split(g: Grammar) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """X (larger child), X_delta (difference), X_pms (1 iff the first child is X)."""
    if not is_pair_grammar(g):
        raise UnsupportedError("pair-PGE needs a grammar whose rules are all pairs (RePair output)")
    first, second = g.body[0::2], g.body[1::2]
    X = np.maximum(first, second)
    return X, np.abs(first - second), (X == first).astype(np.int64)


def pair_pge_encode(g: Grammar, epsilon: int = DEFAULT_EPSILON) -> BitWriter:
    X, X_delta, X_pms = pair_split(g)
    w = pge_encode(X, epsilon)
    w.write_gamma_array(X_delta + 1)
    w.write_bitarray(X_pms)
    pge_encode(g.tau, epsilon, out=w)
    return w


def pair_pge_decode(r: BitReader, terminals: bytes) -> Grammar:
    X = pge_decode(r)
    d = X.size
    X_delta = r.read_gamma_array(d) - 1
    X_pms = r.read_bitarray(d)
    tau = pge_decode(r)
    other = X - X_delta
    body = np.empty(2 * d, np.int64)
    body[0::2] = np.where(X_pms == 1, X, other)
    body[1::2] = np.where(X_pms == 1, other, X)
    kinds = np.full(d, SEQ, np.int8)
    offsets = np.arange(0, 2 * d + 1, 2, dtype=np.int64)
    return Grammar(terminals, kinds, offsets, body, tau)
