"""Grammar data model shared by the constructors and every codec.

Symbol numbering: 0 is the run marker, 1..σ are terminals (ascending byte
value), σ+1..σ+d are variables in creation order and σ+d+1 is the start
symbol whose body is ``tau``.  Rule bodies live in one flat array so that the
numba kernels can walk them without touching Python objects; ``Grammar.rules``
materialises the typed view on demand.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Union

import numpy as np
from numba import njit

SEQ = 1
RUN = 2


@dataclass(frozen=True)
class Terminal:
    byte: int


@dataclass(frozen=True)
class Sequence:
    body: tuple[int, ...]


@dataclass(frozen=True)
class Run:
    base: int
    exponent: int


Rule = Union[Terminal, Sequence, Run]


class Grammar:
    """Immutable straight-line grammar (CFG or run-length CFG)."""

    def __init__(self, terminals: bytes, kinds, offsets, body, tau):
        self.terminals = bytes(terminals)
        self.kinds = np.asarray(kinds, dtype=np.int8)
        self.offsets = np.asarray(offsets, dtype=np.int64)
        self.body = np.asarray(body, dtype=np.int64)
        self.tau = np.asarray(tau, dtype=np.int64)
        for arr in (self.kinds, self.offsets, self.body, self.tau):
            arr.flags.writeable = False
        if self.offsets.shape[0] != self.kinds.shape[0] + 1:
            raise ValueError("offsets must have one more entry than kinds")

    @classmethod
    def from_rules(cls, terminals: bytes, rules: Iterable[Rule], tau: Iterable[int]) -> "Grammar":
        """Build from typed rules for variables σ+1, σ+2, ... in order."""
        kinds, offsets, body = [], [0], []
        for rule in rules:
            if isinstance(rule, Sequence):
                kinds.append(SEQ)
                body.extend(rule.body)
            elif isinstance(rule, Run):
                kinds.append(RUN)
                body.extend((rule.base, rule.exponent))
            else:
                raise TypeError(f"variables need Sequence or Run rules, got {rule!r}")
            offsets.append(len(body))
        return cls(terminals, kinds, offsets, body, list(tau))

    @property
    def sigma(self) -> int:
        return len(self.terminals)

    @property
    def d(self) -> int:
        return int(self.kinds.shape[0])

    @property
    def start_symbol(self) -> int:
        return self.sigma + self.d + 1

    @property
    def run_rule_count(self) -> int:
        return int(np.count_nonzero(self.kinds == RUN))

    def rule(self, symbol: int) -> Rule:
        if 1 <= symbol <= self.sigma:
            return Terminal(self.terminals[symbol - 1])
        i = symbol - self.sigma - 1
        if not 0 <= i < self.d:
            raise KeyError(symbol)
        lo, hi = int(self.offsets[i]), int(self.offsets[i + 1])
        if self.kinds[i] == RUN:
            return Run(int(self.body[lo]), int(self.body[lo + 1]))
        return Sequence(tuple(int(x) for x in self.body[lo:hi]))

    @cached_property
    def rules(self) -> tuple[Rule, ...]:
        return tuple(self.rule(self.sigma + 1 + i) for i in range(self.d))

    def rules_length(self) -> int:
        """Σ|αᵢ| over the variables, a run rule counting 3."""
        seq_len = int(np.sum(np.diff(self.offsets)[self.kinds == SEQ]))
        return seq_len + 3 * self.run_rule_count

    def __eq__(self, other) -> bool:
        if not isinstance(other, Grammar):
            return NotImplemented
        return (
            self.terminals == other.terminals
            and np.array_equal(self.kinds, other.kinds)
            and np.array_equal(self.offsets, other.offsets)
            and np.array_equal(self.body, other.body)
            and np.array_equal(self.tau, other.tau)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return (
            f"Grammar(sigma={self.sigma}, d={self.d}, runs={self.run_rule_count}, "
            f"|tau|={self.tau.shape[0]}, size={grammar_size(self)})"
        )


def grammar_size(g: Grammar) -> int:
    return g.sigma + g.rules_length() + int(g.tau.shape[0])


def validate(g: Grammar) -> list[str]:
    """Return every structural violation found; an empty list means valid."""
    problems = []
    sigma, d = g.sigma, g.d
    top = sigma + d
    if list(g.terminals) != sorted(set(g.terminals)):
        problems.append("terminal bytes are not distinct and ascending")
    seen = {}
    for i in range(d):
        v = sigma + 1 + i
        lo, hi = int(g.offsets[i]), int(g.offsets[i + 1])
        if g.kinds[i] == RUN:
            if hi - lo != 2:
                problems.append(f"rule {v}: malformed run body")
                continue
            base, k = int(g.body[lo]), int(g.body[lo + 1])
            if k < 1:
                problems.append(f"rule {v}: run exponent {k} < 1")
            if not 1 <= base <= top:
                problems.append(f"rule {v}: run base {base} out of range")
            elif base >= v:
                problems.append(f"rule {v}: ordering violation on {base}")
            key = (RUN, base, k)
        elif g.kinds[i] == SEQ:
            body = [int(x) for x in g.body[lo:hi]]
            if not body:
                problems.append(f"rule {v}: empty Sequence body")
            elif len(body) == 1:
                problems.append(f"rule {v}: Sequence body of length 1")
            for x in body:
                if not 1 <= x <= top:
                    problems.append(f"rule {v}: symbol {x} out of range")
                elif x >= v:
                    problems.append(f"rule {v}: ordering violation on {x}")
            key = (SEQ, *body)
        else:
            problems.append(f"rule {v}: unknown rule kind {int(g.kinds[i])}")
            continue
        if key in seen:
            problems.append(f"rule {v}: duplicate of rule {seen[key]}")
        else:
            seen[key] = v
    for x in g.tau.tolist():
        if not 1 <= x <= top:
            problems.append(f"start rule: symbol {x} out of range")
    return problems


@njit(cache=True)
def _expand_chunk(kinds, offsets, body, sigma, term, stk_sym, stk_pos, sp, out):
    w = 0
    cap = out.shape[0]
    while sp > 0 and w < cap:
        s = stk_sym[sp - 1]
        v = s - sigma - 1
        pos = stk_pos[sp - 1]
        lo = offsets[v]
        if kinds[v] == SEQ:
            n = offsets[v + 1] - lo
            if pos == n:
                sp -= 1
                continue
            child = body[lo + pos]
            stk_pos[sp - 1] = pos + 1
            if child <= sigma:
                out[w] = term[child - 1]
                w += 1
            else:
                stk_sym[sp] = child
                stk_pos[sp] = 0
                sp += 1
        else:
            base = body[lo]
            k = body[lo + 1]
            if base <= sigma:
                take = min(k - pos, cap - w)
                for j in range(take):
                    out[w + j] = term[base - 1]
                w += take
                pos += take
                stk_pos[sp - 1] = pos
                if pos == k:
                    sp -= 1
            elif pos == k:
                sp -= 1
            else:
                stk_pos[sp - 1] = pos + 1
                stk_sym[sp] = base
                stk_pos[sp] = 0
                sp += 1
    return w, sp


@njit(cache=True)
def _expanded_lengths(kinds, offsets, body, sigma):
    d = kinds.shape[0]
    lens = np.zeros(d, dtype=np.int64)
    for v in range(d):
        lo = offsets[v]
        if kinds[v] == SEQ:
            total = 0
            for j in range(lo, offsets[v + 1]):
                c = body[j]
                total += 1 if c <= sigma else lens[c - sigma - 1]
            lens[v] = total
        else:
            c = body[lo]
            lens[v] = body[lo + 1] * (1 if c <= sigma else lens[c - sigma - 1])
    return lens


def expanded_lengths(g: Grammar) -> np.ndarray:
    """Length of the text each variable derives (valid grammars only)."""
    return _expanded_lengths(g.kinds, g.offsets, g.body, g.sigma)


CHUNK = 1 << 20


def expand(g: Grammar, sink: Callable[[bytes], object] | None = None, chunk: int = CHUNK):
    """Derive the text of ``g``.

    Without a sink the whole text is returned as bytes; with one, the text is
    fed to it in chunks of at most ``chunk`` bytes and the total length is
    returned.  Works from an explicit stack, so grammar height never touches
    the interpreter's recursion limit.
    """
    parts = [] if sink is None else None
    emit = parts.append if sink is None else sink
    sigma, d = g.sigma, g.d
    kinds = np.append(g.kinds, np.int8(SEQ))
    offsets = np.append(g.offsets, g.offsets[-1] + g.tau.shape[0])
    body = np.concatenate((g.body, g.tau))
    term = np.frombuffer(g.terminals, dtype=np.uint8) if sigma else np.zeros(1, np.uint8)
    stk_sym = np.empty(d + 2, dtype=np.int64)
    stk_pos = np.empty(d + 2, dtype=np.int64)
    stk_sym[0] = sigma + d + 1
    stk_pos[0] = 0
    sp = 1
    out = np.empty(chunk, dtype=np.uint8)
    total = 0
    while sp > 0:
        w, sp = _expand_chunk(kinds, offsets, body, sigma, term, stk_sym, stk_pos, sp, out)
        if w:
            emit(out[:w].tobytes())
            total += int(w)
    if sink is None:
        return b"".join(parts)
    return total


@njit(cache=True)
def _check_arrays(kinds, offsets, body, tau, sigma, cap):
    """0 if every reference points backwards and the text length is <= cap, else an error code."""
    d = kinds.shape[0]
    lens = np.zeros(d, dtype=np.int64)
    for v in range(d):
        lo = offsets[v]
        hi = offsets[v + 1]
        if hi < lo or hi > body.shape[0]:
            return 1
        own = sigma + 1 + v
        if kinds[v] == SEQ:
            if hi - lo < 2:
                return 2
            total = 0
            for j in range(lo, hi):
                c = body[j]
                if c < 1 or c >= own:
                    return 3
                total += 1 if c <= sigma else lens[c - sigma - 1]
                if total > cap:
                    total = cap + 1
            lens[v] = total
        elif kinds[v] == RUN:
            if hi - lo != 2:
                return 2
            c = body[lo]
            k = body[lo + 1]
            if c < 1 or c >= own or k < 1:
                return 3
            unit = 1 if c <= sigma else lens[c - sigma - 1]
            lens[v] = cap + 1 if k > cap // unit else unit * k
        else:
            return 4
    total = 0
    for j in range(tau.shape[0]):
        c = tau[j]
        if c < 1 or c > sigma + d:
            return 3
        total += 1 if c <= sigma else lens[c - sigma - 1]
        if total > cap:
            return 5
    return 0


def check_derivable(g: Grammar, expected_length: int) -> str | None:
    """Cheap structural check before expansion; returns a message or None.

    Lengths saturate, so a hostile grammar cannot overflow or make us expand
    an exponentially long text.
    """
    code = _check_arrays(g.kinds, g.offsets, g.body, g.tau, g.sigma, expected_length)
    if code:
        return {
            1: "rule offsets are not monotone",
            2: "rule body has the wrong length",
            3: "symbol out of range or rule refers forward",
            4: "unknown rule kind",
            5: "grammar derives more text than expected",
        }[code]
    return None
