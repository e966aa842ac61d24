"""Self-describing compressed file: header plus one encoded grammar.

Byte layout::

    "RAGC" | version | algo | enc | epsilon          (8 bytes)
    γ(σ+1) | σ terminal bytes (8 bits each) | γ(n+1) | γ(d+1) | γ(|τ|+1)
    payload bits, zero padded to a byte boundary
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .bitio import BitReader, BitWriter
from .constructors import ALGOS, construct
from .corpus import ingest_bytes
from .errors import CorruptStreamError, UsageError
from .grammar import Grammar, check_derivable, expand, grammar_size
from .naive import (
    Style,
    decode_32bit,
    decode_fble,
    decode_huffman,
    encode_32bit,
    encode_fble,
    encode_huffman,
    grammar_to_text,
    text_to_grammar,
)
from .pge import DEFAULT_EPSILON, pair_pge_decode, pair_pge_encode, pge_decode, pge_encode
from .poppt import Form, UCoding, poppt_decode, poppt_encode

MAGIC = b"RAGC"
VERSION = 1
HEADER_BYTES = 8

ALGO_NAMES = {v: k for k, v in ALGOS.items()}
ENCODINGS = {
    "32bit": 0,
    "fble": 1,
    "huffman": 2,
    "pge": 3,
    "pairpge": 4,
    "poppt-ible": 5,
    "poppt-pge": 6,
}
ENC_NAMES = {v: k for k, v in ENCODINGS.items()}
USES_EPSILON = {"pge", "pairpge", "poppt-pge"}


def encodings_for(algo: str) -> list[str]:
    """Encodings valid for ``algo``; pair-PGE only handles RePair's pair rules."""
    return [e for e in ENCODINGS if e != "pairpge" or algo == "repair"]


def _code(table: dict, name, kind: str) -> int:
    if isinstance(name, int):
        if name not in table.values():
            raise UsageError(f"unknown {kind} id {name}")
        return name
    if name not in table:
        raise UsageError(f"unknown {kind} {name!r}; choose from {', '.join(table)}")
    return table[name]


def check_combination(algo: str, enc: str, epsilon: int) -> None:
    if enc == "pairpge" and algo != "repair":
        raise UsageError(
            "pairpge stores each rule as max/delta/side bit and needs pair rules; "
            "it cannot be applied to MR-RePair or RL-MR-RePair grammars"
        )
    if enc in USES_EPSILON and not 1 <= epsilon <= 255:
        raise UsageError(f"epsilon must lie in 1..255, got {epsilon}")


@dataclass(frozen=True)
class Header:
    algo: str
    encoding: str
    epsilon: int
    terminals: bytes
    n: int
    d: int
    tau_len: int

    @property
    def sigma(self) -> int:
        return len(self.terminals)


def write_header(h: Header) -> BitWriter:
    w = BitWriter(8 * (HEADER_BYTES + h.sigma) + 256)
    for b in MAGIC + bytes([VERSION, ALGOS[h.algo], ENCODINGS[h.encoding], h.epsilon]):
        w.write_bits(b, 8)
    w.write_gamma(h.sigma + 1)
    w.write_fixed_array(np.frombuffer(h.terminals, np.uint8), 8)
    w.write_gamma(h.n + 1)
    w.write_gamma(h.d + 1)
    w.write_gamma(h.tau_len + 1)
    return w


def read_header(blob: bytes) -> tuple[Header, BitReader]:
    blob = bytes(blob)
    if len(blob) < HEADER_BYTES:
        raise CorruptStreamError("file shorter than the fixed header", 8 * len(blob))
    if blob[:4] != MAGIC:
        raise CorruptStreamError("bad magic, not a RAGC file", 0)
    if blob[4] != VERSION:
        raise CorruptStreamError(f"unsupported version {blob[4]}", 32)
    algo, enc, eps = blob[5], blob[6], blob[7]
    if algo not in ALGO_NAMES:
        raise CorruptStreamError(f"unknown algorithm id {algo}", 40)
    if enc not in ENC_NAMES:
        raise CorruptStreamError(f"unknown encoding id {enc}", 48)
    r = BitReader(blob, pos=8 * HEADER_BYTES)
    sigma = r.read_gamma() - 1
    if sigma > 256:
        raise CorruptStreamError(f"alphabet size {sigma} exceeds 256", r.pos)
    terminals = r.read_fixed_array(sigma, 8).astype(np.uint8).tobytes()
    n = r.read_gamma() - 1
    d = r.read_gamma() - 1
    tau_len = r.read_gamma() - 1
    h = Header(ALGO_NAMES[algo], ENC_NAMES[enc], eps, terminals, n, d, tau_len)
    if ENC_NAMES[enc] == "pairpge" and h.algo != "repair":
        raise CorruptStreamError("pairpge payload declared for a non-RePair grammar", 48)
    return h, r


def _style(algo: str) -> Style:
    return Style.PAIRS_COMPACT if algo == "repair" else Style.PER_RULE


def _form(algo: str) -> Form:
    return Form.BINARY if algo == "repair" else Form.GENERAL


def encode_grammar(g: Grammar, algo: str, enc: str, epsilon: int, n: int) -> bytes:
    check_combination(algo, enc, epsilon)
    eps = epsilon if enc in USES_EPSILON else 0
    w = write_header(Header(algo, enc, eps, g.terminals, n, g.d, int(g.tau.shape[0])))
    if enc in ("32bit", "fble", "huffman", "pge"):
        dt = grammar_to_text(g, _style(algo))
        if enc == "32bit":
            payload = encode_32bit(dt)
        elif enc == "fble":
            payload = encode_fble(dt)
        elif enc == "huffman":
            payload = encode_huffman(dt)
        else:
            payload = pge_encode(dt.symbols, epsilon)
    elif enc == "pairpge":
        payload = pair_pge_encode(g, epsilon)
    else:
        coding = UCoding.IBLE if enc == "poppt-ible" else UCoding.PGE
        payload, _ = poppt_encode(g, _form(algo), coding, epsilon)
    w.extend(payload)
    return w.to_bytes()


def _decode_payload(h: Header, r: BitReader) -> Grammar:
    enc = h.encoding
    if enc in ("32bit", "fble", "huffman", "pge"):
        symbols = {"32bit": decode_32bit, "fble": decode_fble, "huffman": decode_huffman, "pge": pge_decode}[enc](r)
        g = text_to_grammar(symbols, h.sigma, h.d, _style(h.algo))
        if g.terminals != h.terminals:
            raise CorruptStreamError("terminal section disagrees with header alphabet", r.pos)
        return Grammar(h.terminals, g.kinds, g.offsets, g.body, g.tau)
    if enc == "pairpge":
        return pair_pge_decode(r, h.terminals)
    coding = UCoding.IBLE if enc == "poppt-ible" else UCoding.PGE
    return poppt_decode(r, h.terminals, _form(h.algo), coding, h.tau_len)


def decode_grammar(blob: bytes) -> tuple[Header, Grammar]:
    """Parse header and payload; the grammar is checked but not expanded."""
    h, r = read_header(blob)
    try:
        g = _decode_payload(h, r)
    except CorruptStreamError:
        raise
    except (ValueError, IndexError, OverflowError, MemoryError) as exc:
        raise CorruptStreamError(f"payload malformed: {exc}", r.pos) from exc
    if r.remaining >= 8:
        raise CorruptStreamError(f"{r.remaining} unread bits after payload", r.pos)
    if g.d != h.d or g.tau.shape[0] != h.tau_len:
        raise CorruptStreamError(
            f"payload has d={g.d}, |tau|={g.tau.shape[0]}; header says d={h.d}, |tau|={h.tau_len}"
        )
    problem = check_derivable(g, h.n)
    if problem:
        raise CorruptStreamError(f"grammar rejected: {problem}")
    return h, g


def compress_grammar(data: bytes, algo: str = "rlmr") -> Grammar:
    code = _code(ALGOS, algo, "algorithm")
    text, amap = ingest_bytes(data)
    return construct(text, amap.sigma, code, amap.terminals)


def compress(data: bytes, algo: str = "rlmr", enc: str = "poppt-pge", epsilon: int = DEFAULT_EPSILON) -> bytes:
    algo = ALGO_NAMES[_code(ALGOS, algo, "algorithm")]
    enc = ENC_NAMES[_code(ENCODINGS, enc, "encoding")]
    check_combination(algo, enc, epsilon)
    g = compress_grammar(data, algo)
    return encode_grammar(g, algo, enc, epsilon, len(data))


def decompress(blob: bytes) -> bytes:
    h, g = decode_grammar(blob)
    out = expand(g)
    if len(out) != h.n:
        raise CorruptStreamError(f"decoded {len(out)} bytes, header says {h.n}")
    return out


@dataclass(frozen=True)
class Stats:
    algo: str
    encoding: str
    n: int
    sigma: int
    d: int
    rules_length: int
    tau_len: int
    size: int
    run_rules: int
    encoded_bits: int
    encoded_bytes: int

    @property
    def ratio(self) -> float:
        """Compressed size over input size, in percent."""
        return 100.0 * self.encoded_bytes / self.n if self.n else 0.0

    def as_dict(self) -> dict:
        return {**asdict(self), "ratio": self.ratio}


def grammar_stats(g: Grammar, algo: str, enc: str, n: int, blob: bytes) -> Stats:
    return Stats(
        algo,
        enc,
        n,
        g.sigma,
        g.d,
        g.rules_length(),
        int(g.tau.shape[0]),
        grammar_size(g),
        g.run_rule_count,
        8 * len(blob),
        len(blob),
    )


def stats(source: bytes, algo: str = "rlmr", enc: str = "poppt-pge", epsilon: int = DEFAULT_EPSILON) -> Stats:
    """Report for a container, or for raw data compressed with ``algo``/``enc``."""
    source = bytes(source)
    if source[:4] == MAGIC:
        h, g = decode_grammar(source)
        return grammar_stats(g, h.algo, h.encoding, h.n, source)
    algo = ALGO_NAMES[_code(ALGOS, algo, "algorithm")]
    enc = ENC_NAMES[_code(ENCODINGS, enc, "encoding")]
    check_combination(algo, enc, epsilon)
    g = compress_grammar(source, algo)
    blob = encode_grammar(g, algo, enc, epsilon, len(source))
    return grammar_stats(g, algo, enc, len(source), blob)


__all__ = [
    "ENCODINGS",
    "Header",
    "Stats",
    "compress",
    "decode_grammar",
    "decompress",
    "encodings_for",
    "stats",
]
