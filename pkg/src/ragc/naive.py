"""Delimited-text serialization of a grammar and its symbol-level codings.

The text is ``a_1 .. a_σ ⋄ α_1 ⋄ .. ⋄ α_d ⋄ τ`` (PerRule) or, for pair-only
grammars, ``a_1 .. a_σ ⋄ α_1 α_2 .. α_d ⋄ τ`` (PairsCompact).  Terminals are
written as their byte values, run rules as ``0 k base``.  The delimiter is
σ+d+2.  Byte values and run exponents may collide with the delimiter, so the
decoder parses by structure rather than splitting on it.

Every stream written here starts with γ(|text|+1) so it is self-delimiting.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numba import njit

from .bitio import BitReader, BitWriter, bit_width
from .errors import CorruptStreamError, UnsupportedError
from .grammar import RUN, SEQ, Grammar

RUN_MARKER = 0


class Style(Enum):
    PER_RULE = "per-rule"
    PAIRS_COMPACT = "pairs-compact"


@dataclass(frozen=True)
class DelimitedText:
    symbols: np.ndarray
    delimiter: int
    style: Style

    def __len__(self) -> int:
        return int(self.symbols.shape[0])


def is_pair_grammar(g: Grammar) -> bool:
    return g.run_rule_count == 0 and bool(np.all(np.diff(g.offsets) == 2))


@njit(cache=True)
def _rule_sections(kinds, offsets, body, delim):
    d = kinds.shape[0]
    nruns = 0
    for v in range(d):
        if kinds[v] == RUN:
            nruns += 1
    out = np.empty(body.shape[0] + nruns + d, np.int64)
    w = 0
    for v in range(d):
        lo = offsets[v]
        if kinds[v] == RUN:
            out[w] = RUN_MARKER
            out[w + 1] = body[lo + 1]
            out[w + 2] = body[lo]
            w += 3
        else:
            for j in range(lo, offsets[v + 1]):
                out[w] = body[j]
                w += 1
        out[w] = delim
        w += 1
    return out


def grammar_to_text(g: Grammar, style: Style = Style.PER_RULE) -> DelimitedText:
    sigma, d = g.sigma, g.d
    delim = sigma + d + 2
    term = np.frombuffer(g.terminals, np.uint8).astype(np.int64)
    if style is Style.PAIRS_COMPACT:
        if not is_pair_grammar(g):
            raise UnsupportedError("pairs-compact text needs a grammar whose rules are all pairs")
        parts = [term, [delim], g.body, [delim], g.tau]
    else:
        parts = [term, [delim], _rule_sections(g.kinds, g.offsets, g.body, delim), g.tau]
    symbols = np.concatenate([np.asarray(p, dtype=np.int64) for p in parts])
    return DelimitedText(symbols, delim, style)


@njit(cache=True)
def _parse_per_rule(sym, sigma, d, kinds, offsets, body):
    """Fill rule arrays from the rule sections; returns start of τ or -1 - error position."""
    delim = sigma + d + 2
    n = sym.shape[0]
    i = sigma + 1
    nb = 0
    for v in range(d):
        if i < n and sym[i] == 0:
            if i + 3 >= n or sym[i + 3] != delim:
                return -1 - i
            kinds[v] = 2
            body[nb] = sym[i + 2]
            body[nb + 1] = sym[i + 1]
            nb += 2
            i += 4
        else:
            kinds[v] = 1
            while i < n and sym[i] != delim:
                body[nb] = sym[i]
                nb += 1
                i += 1
            if i >= n:
                return -1 - i
            i += 1
        offsets[v + 1] = nb
    return i


def text_to_grammar(dt_symbols, sigma: int, d: int, style: Style) -> Grammar:
    """Inverse of :func:`grammar_to_text` given σ, d and the style."""
    sym = np.ascontiguousarray(dt_symbols, dtype=np.int64)
    delim = sigma + d + 2
    n = sym.shape[0]
    if n < sigma + 1 or sym[sigma] != delim:
        raise CorruptStreamError("delimited text: terminal section malformed")
    term = sym[:sigma]
    if term.size and (term.min() < 0 or term.max() > 255):
        raise CorruptStreamError("delimited text: terminal byte out of range")
    terminals = term.astype(np.uint8).tobytes()
    if style is Style.PAIRS_COMPACT:
        end = sigma + 1 + 2 * d
        if n < end + 1 or sym[end] != delim:
            raise CorruptStreamError("delimited text: pair section malformed")
        kinds = np.full(d, SEQ, np.int8)
        offsets = np.arange(0, 2 * d + 1, 2, dtype=np.int64)
        return Grammar(terminals, kinds, offsets, sym[sigma + 1 : end], sym[end + 1 :])
    kinds = np.empty(d, np.int8)
    offsets = np.zeros(d + 1, np.int64)
    body = np.empty(max(n, 1), np.int64)
    start = _parse_per_rule(sym, sigma, d, kinds, offsets, body)
    if start < 0:
        raise CorruptStreamError(f"delimited text: rule section malformed near symbol {-1 - start}")
    return Grammar(terminals, kinds, offsets, body[: offsets[d]].copy(), sym[start:])


# -- fixed-width codings -------------------------------------------------------


def encode_fixed(symbols, width: int | None = None) -> BitWriter:
    """γ(count+1), then for FBLE γ(width), then every symbol at that width.

    With ``width`` given (32-bit coding) no width field is written.
    """
    arr = np.asarray(symbols, dtype=np.int64)
    w = BitWriter(64 + arr.size * (width or 8))
    w.write_gamma(arr.size + 1)
    if width is None:
        width = bit_width(int(arr.max())) if arr.size else 1
        w.write_gamma(width)
    w.write_fixed_array(arr, width)
    return w


def decode_fixed(r: BitReader, width: int | None = None) -> np.ndarray:
    count = r.read_gamma() - 1
    if width is None:
        width = r.read_gamma()
        if width > 63:
            raise CorruptStreamError("fixed-width field wider than 63 bits", r.pos)
    return r.read_fixed_array(count, width)


def encode_32bit(dt: DelimitedText) -> BitWriter:
    return encode_fixed(dt.symbols, 32)


def decode_32bit(r: BitReader) -> np.ndarray:
    return decode_fixed(r, 32)


def encode_fble(dt: DelimitedText) -> BitWriter:
    return encode_fixed(dt.symbols)


def decode_fble(r: BitReader) -> np.ndarray:
    return decode_fixed(r)


# -- canonical Huffman -----------------------------------------------------------


def huffman_code_lengths(freq: dict[int, int]) -> dict[int, int]:
    """Code length per symbol; ties broken by symbol value so output is deterministic."""
    if not freq:
        return {}
    if len(freq) == 1:
        return {next(iter(freq)): 1}
    syms = sorted(freq)
    heap = [(freq[s], s, i) for i, s in enumerate(syms)]
    heapq.heapify(heap)
    parent = [0] * (2 * len(syms) - 1)
    node = len(syms)
    while len(heap) > 1:
        f1, k1, a = heapq.heappop(heap)
        f2, k2, b = heapq.heappop(heap)
        parent[a] = parent[b] = node
        heapq.heappush(heap, (f1 + f2, min(k1, k2), node))
        node += 1
    depth = [0] * node
    for i in range(node - 2, -1, -1):
        depth[i] = depth[parent[i]] + 1
    return {s: depth[i] for i, s in enumerate(syms)}


def canonical_codes(lengths: dict[int, int]) -> dict[int, tuple[int, int]]:
    """Map symbol -> (code, length), codes assigned in (length, symbol) order."""
    codes = {}
    code = prev = 0
    for s, n in sorted(lengths.items(), key=lambda kv: (kv[1], kv[0])):
        code <<= n - prev
        codes[s] = (code, n)
        code += 1
        prev = n
    return codes


@njit(cache=True)
def _huff_decode(buf, pos, nbits, first, count, base, syms, out):
    maxlen = first.shape[0] - 1
    for i in range(out.shape[0]):
        code = 0
        n = 0
        while True:
            if pos >= nbits:
                return -1
            code = (code << 1) | ((buf[pos >> 3] >> (7 - (pos & 7))) & 1)
            pos += 1
            n += 1
            if n > maxlen:
                return -2
            if code - first[n] < count[n]:
                out[i] = syms[base[n] + code - first[n]]
                break
    return pos


def encode_huffman(dt: DelimitedText | np.ndarray) -> BitWriter:
    """γ(count+1), γ(#distinct+1), (γ(symbol+1), γ(length)) per symbol, then codes."""
    arr = np.asarray(getattr(dt, "symbols", dt), dtype=np.int64)
    values, counts = np.unique(arr, return_counts=True)
    lengths = huffman_code_lengths(dict(zip(values.tolist(), counts.tolist())))
    codes = canonical_codes(lengths)
    w = BitWriter(64 + 4 * arr.size)
    w.write_gamma(arr.size + 1)
    w.write_gamma(len(codes) + 1)
    table = np.empty(2 * values.size, np.int64)
    table[0::2] = values + 1
    table[1::2] = [lengths[s] for s in values.tolist()]
    w.write_gamma_array(table)
    if arr.size:
        idx = np.searchsorted(values, arr)
        code_of = np.array([codes[s][0] for s in values.tolist()], np.int64)
        len_of = np.array([codes[s][1] for s in values.tolist()], np.int64)
        w.write_varwidth_array(code_of[idx], len_of[idx])
    return w


def decode_huffman(r: BitReader) -> np.ndarray:
    count = r.read_gamma() - 1
    distinct = r.read_gamma() - 1
    table = r.read_gamma_array(2 * distinct).reshape(-1, 2)
    syms = table[:, 0] - 1
    lens = table[:, 1]
    if count > r.remaining:
        raise CorruptStreamError("huffman payload shorter than its symbol count", r.pos)
    out = np.empty(count, np.int64)
    if count == 0:
        return out
    if distinct == 0 or lens.max() > 63:
        raise CorruptStreamError("huffman table malformed", r.pos)
    kraft = float(np.ldexp(1.0, -lens).sum())
    if kraft > 1.0 + 1e-12:
        raise CorruptStreamError("huffman code lengths violate Kraft inequality", r.pos)
    order = np.lexsort((syms, lens))
    syms, lens = syms[order], lens[order]
    maxlen = int(lens.max())
    count_by = np.bincount(lens, minlength=maxlen + 1).astype(np.int64)
    first = np.zeros(maxlen + 1, np.int64)
    base = np.zeros(maxlen + 1, np.int64)
    seen = 0
    for n in range(1, maxlen + 1):
        if n > 1:
            first[n] = (first[n - 1] + count_by[n - 1]) << 1
        base[n] = seen
        seen += count_by[n]
    pos = _huff_decode(r._buf, r.pos, r._nbits, first, count_by, base, syms, out)
    if pos < 0:
        raise CorruptStreamError("stream exhausted or invalid huffman code", r.pos)
    r.pos = int(pos)
    return out
