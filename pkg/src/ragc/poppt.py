"""Post-order partial parse trees: construction, bit encodings and decoding.

The tree is the parse tree of the start rule with every subtree below the
second and later occurrences of a variable cut off.  Internal nodes are
numbered in post-order; a leaf carries a terminal (1..σ), the post-order
number of an already-built variable (σ+p), or the run marker 0.

Binary form (pair grammars): a leaf is 0, an internal node 1.  τ is first
folded into a left-leaning chain of pairs whose nodes never appear as leaves.
General form: a node with c children emits c zeros then a 1, in post-order,
and one trailing 0 closes the stream.  The root of the general tree is the
start rule itself.

Run rules become nodes with two children, the marker leaf and the base.  The
exponents are kept in a side list in post-order of the run nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from numba import njit

from .bitio import BitReader, BitWriter, bit_width_array
from .errors import CorruptStreamError, InvariantError, UnsupportedError
from .grammar import RUN, SEQ, Grammar
from .naive import is_pair_grammar
from .pge import DEFAULT_EPSILON, pge_decode, pge_encode


class Form(Enum):
    BINARY = "binary"
    GENERAL = "general"


class UCoding(Enum):
    IBLE = "ible"
    PGE = "pge"


@dataclass(frozen=True)
class Poppt:
    B: np.ndarray
    U: np.ndarray
    internal_count: int
    run_exponents: np.ndarray
    form: Form

    def bitstring(self) -> str:
        return "".join("1" if b else "0" for b in self.B.tolist())


@njit(cache=True)
def _build(kinds, offsets, body, sigma, root, binary, B, U, exps):
    nv = kinds.shape[0]
    pid = np.zeros(nv, np.int64)
    stk = np.empty(nv + 1, np.int64)
    pos = np.empty(nv + 1, np.int64)
    nb = 0
    nu = 0
    ne = 0
    count = 0
    stk[0] = root
    pos[0] = 0
    sp = 1
    while sp > 0:
        v = stk[sp - 1] - sigma - 1
        p = pos[sp - 1]
        lo = offsets[v]
        nch = 2 if kinds[v] == RUN else offsets[v + 1] - lo
        if p == nch:
            if not binary:
                for _ in range(nch):
                    B[nb] = 0
                    nb += 1
            B[nb] = 1
            nb += 1
            count += 1
            pid[v] = count
            if kinds[v] == RUN:
                exps[ne] = body[lo + 1]
                ne += 1
            sp -= 1
            continue
        pos[sp - 1] = p + 1
        if kinds[v] == RUN:
            child = 0 if p == 0 else body[lo]
        else:
            child = body[lo + p]
        if child > sigma and pid[child - sigma - 1] == 0:
            stk[sp] = child
            pos[sp] = 0
            sp += 1
            continue
        B[nb] = 0 if binary else 1
        nb += 1
        U[nu] = child if child <= sigma else sigma + pid[child - sigma - 1]
        nu += 1
    if not binary:
        B[nb] = 0
        nb += 1
    return nb, nu, ne, count


def build_poppt(g: Grammar, form: Form = Form.GENERAL) -> Poppt:
    sigma, d = g.sigma, g.d
    tau = g.tau
    m = int(tau.shape[0])
    empty = np.empty(0, np.int64)
    if form is Form.BINARY and not is_pair_grammar(g):
        raise UnsupportedError("binary POPPT form needs a grammar whose rules are all pairs (RePair output)")
    if m == 0:
        return Poppt(np.empty(0, np.uint8), empty, 0, empty, form)
    if form is Form.BINARY:
        if m == 1 and tau[0] <= sigma:
            return Poppt(np.zeros(1, np.uint8), tau.copy(), 0, empty, form)
        # chain c_1 -> τ1 τ2, c_j -> c_{j-1} τ_{j+1}; root c_{m-1}, or τ1 itself when m == 1
        chain = np.empty(2 * (m - 1), np.int64)
        if m > 1:
            chain[0::2] = np.concatenate(([tau[0]], sigma + d + 1 + np.arange(m - 2)))
            chain[1::2] = tau[1:]
        kinds = np.concatenate((g.kinds, np.full(m - 1, SEQ, np.int8)))
        offsets = np.concatenate((g.offsets, g.offsets[-1] + 2 + 2 * np.arange(m - 1)))
        body = np.concatenate((g.body, chain))
        root = sigma + d + m - 1 if m > 1 else int(tau[0])
    else:
        kinds = np.append(g.kinds, np.int8(SEQ))
        offsets = np.append(g.offsets, g.offsets[-1] + m)
        body = np.concatenate((g.body, tau))
        root = sigma + d + 1
    cap = int(body.shape[0]) + 2
    B = np.empty(2 * cap + 1, np.uint8)
    U = np.empty(cap, np.int64)
    exps = np.empty(max(1, g.run_rule_count), np.int64)
    nb, nu, ne, count = _build(kinds, offsets, body, sigma, root, form is Form.BINARY, B, U, exps)
    return Poppt(B[:nb].copy(), U[:nu].copy(), int(count), exps[:ne].copy(), form)


def u_bound_violations(U, sigma: int) -> int:
    """Positions i (1-based) where U[i] > i + σ."""
    U = np.asarray(U, dtype=np.int64)
    return int(np.count_nonzero(U > np.arange(1, U.size + 1) + sigma))


def check_u_bound(U, sigma: int) -> None:
    bad = u_bound_violations(U, sigma)
    if bad:
        raise InvariantError(f"leaf label bound U[i] <= i+sigma violated at {bad} positions")


# -- decoding ---------------------------------------------------------------------


@njit(cache=True)
def _decode(B, U, exps, sigma, binary, kinds, offsets, body, stack, unary):
    """Returns (status, nodes, sp, ui, ei); status < 0 is an error code."""
    nbits = B.shape[0]
    nu = U.shape[0]
    ne = exps.shape[0]
    pos = 0
    sp = 0
    ui = 0
    ei = 0
    count = 0
    nb = 0
    offsets[0] = 0
    while pos < nbits:
        if binary:
            c = 0 if B[pos] == 0 else 2
            pos += 1
        else:
            c = 0
            while pos < nbits and B[pos] == 0:
                c += 1
                pos += 1
            if pos == nbits:
                if c != 1:
                    return -1, count, sp, ui, ei
                break
            pos += 1
        if c == 0:
            if ui >= nu:
                return -2, count, sp, ui, ei
            x = U[ui]
            ui += 1
            if x < 0 or x > sigma + count:
                return -3, count, sp, ui, ei
            stack[sp] = x
            sp += 1
            continue
        if sp < c:
            return -4, count, sp, ui, ei
        base = sp - c
        if stack[base] == 0:
            if c != 2 or stack[base + 1] == 0:
                return -5, count, sp, ui, ei
            if ei >= ne or exps[ei] < 1:
                return -6, count, sp, ui, ei
            kinds[count] = RUN
            body[nb] = stack[base + 1]
            body[nb + 1] = exps[ei]
            ei += 1
            nb += 2
        else:
            for j in range(c):
                x = stack[base + j]
                if x == 0:
                    return -5, count, sp, ui, ei
                body[nb] = x
                nb += 1
            kinds[count] = SEQ
            if c == 1:
                unary[0] += 1
                unary[1] = count
        count += 1
        offsets[count] = nb
        sp = base
        stack[sp] = sigma + count
        sp += 1
    return 0, count, sp, ui, ei


@njit(cache=True)
def _unchain(kinds, offsets, body, count, sigma, top, tau_len, tau):
    """Peel the left spine of the binary tree into τ and renumber the rest."""
    chain = np.zeros(count, np.uint8)
    node = top
    for j in range(tau_len - 1):
        if node <= sigma:
            return -1, 0, 0
        v = node - sigma - 1
        if kinds[v] != SEQ:
            return -1, 0, 0
        chain[v] = 1
        tau[tau_len - 1 - j] = body[offsets[v] + 1]
        node = body[offsets[v]]
    tau[0] = node
    newid = np.zeros(count, np.int64)
    k = 0
    for v in range(count):
        if not chain[v]:
            k += 1
            newid[v] = k
    nb = 0
    out = 0
    for v in range(count):
        if chain[v]:
            continue
        lo = offsets[v]
        hi = offsets[v + 1]
        kinds[out] = kinds[v]
        for j in range(lo, hi):
            x = body[j]
            if x > sigma and not (kinds[v] == RUN and j == lo + 1):
                if chain[x - sigma - 1]:
                    return -2, 0, 0
                x = sigma + newid[x - sigma - 1]
            body[nb] = x
            nb += 1
        out += 1
        offsets[out] = nb
    for j in range(tau_len):
        x = tau[j]
        if x > sigma:
            if chain[x - sigma - 1]:
                return -2, 0, 0
            tau[j] = sigma + newid[x - sigma - 1]
    return 0, out, nb


_DECODE_ERRORS = {
    -1: "tree bits do not end with the closing zero",
    -2: "leaf label sequence exhausted",
    -3: "leaf label refers to a node not yet built",
    -4: "node has fewer children than the stack holds",
    -5: "run marker in an invalid position",
    -6: "run exponent list exhausted or invalid",
}


def decode_poppt(
    B,
    U,
    run_exponents,
    sigma: int,
    form: Form = Form.GENERAL,
    tau_len: int | None = None,
    terminals: bytes | None = None,
) -> Grammar:
    """Rebuild a grammar (post-order variable ids) from a tree encoding.

    The binary form needs ``tau_len``: the chain is the top ``tau_len - 1``
    nodes of the root's left spine, and the spine may continue into τ[1].
    """
    if isinstance(B, str):
        B = [1 if c == "1" else 0 for c in B.replace(" ", "")]
    B = np.asarray(B, dtype=np.uint8)
    U = np.asarray(U, dtype=np.int64)
    exps = np.asarray(run_exponents, dtype=np.int64)
    if terminals is None:
        terminals = bytes(range(sigma))
    empty = np.empty(0, np.int64)
    if B.size == 0:
        if U.size or exps.size:
            raise CorruptStreamError("empty tree with leftover leaf labels or exponents")
        return Grammar(terminals, np.empty(0, np.int8), np.zeros(1, np.int64), empty, empty)
    n = int(B.size)
    kinds = np.empty(n + 1, np.int8)
    offsets = np.zeros(n + 2, np.int64)
    body = np.empty(n + 1, np.int64)
    stack = np.empty(n + 1, np.int64)
    unary = np.zeros(2, np.int64)
    binary = form is Form.BINARY
    status, count, sp, ui, ei = _decode(B, U, exps, sigma, binary, kinds, offsets, body, stack, unary)
    if status < 0:
        raise CorruptStreamError(f"tree decode: {_DECODE_ERRORS[status]}")
    if sp != 1:
        raise CorruptStreamError(f"tree decode: {sp} nodes left on the stack")
    if ui != U.size or ei != exps.size:
        raise CorruptStreamError("tree decode: unused leaf labels or exponents")
    if binary:
        if unary[0]:
            raise CorruptStreamError("tree decode: unary node in binary form")
        top = int(stack[0])
        if tau_len is None or tau_len < 1:
            raise ValueError("binary form decoding needs the length of tau")
        tau = np.empty(tau_len, np.int64)
        status, d, nb = _unchain(kinds, offsets, body, count, sigma, top, tau_len, tau)
        if status < 0:
            raise CorruptStreamError("tree decode: chain of the start rule is malformed")
        return Grammar(terminals, kinds[:d].copy(), offsets[: d + 1].copy(), body[:nb].copy(), tau)
    if count == 0 or stack[0] != sigma + count or kinds[count - 1] != SEQ:
        raise CorruptStreamError("tree decode: stream does not end at the start rule")
    if unary[0] > 1 or (unary[0] == 1 and unary[1] != count - 1):
        raise CorruptStreamError("tree decode: unary node below the root")
    d = count - 1
    tau = body[offsets[d] : offsets[count]].copy()
    return Grammar(terminals, kinds[:d].copy(), offsets[: d + 1].copy(), body[: offsets[d]].copy(), tau)


# -- leaf label codings -----------------------------------------------------------


def ible_widths(count: int, sigma: int) -> np.ndarray:
    return bit_width_array(np.arange(1, count + 1, dtype=np.int64) + sigma)


def encode_u_ible(U, sigma: int, out: BitWriter | None = None) -> BitWriter:
    U = np.asarray(U, dtype=np.int64)
    check_u_bound(U, sigma)
    w = out if out is not None else BitWriter(64 + 8 * U.size)
    w.write_varwidth_array(U, ible_widths(U.size, sigma))
    return w


def decode_u_ible(r: BitReader, count: int, sigma: int) -> np.ndarray:
    return r.read_varwidth_array(ible_widths(count, sigma))


def encode_u_pge(U, epsilon: int = DEFAULT_EPSILON, out: BitWriter | None = None) -> BitWriter:
    return pge_encode(U, epsilon, out)


def decode_u_pge(r: BitReader) -> np.ndarray:
    return pge_decode(r)


# -- payload ----------------------------------------------------------------------


def poppt_encode(
    g: Grammar, form: Form, coding: UCoding, epsilon: int = DEFAULT_EPSILON
) -> tuple[BitWriter, Poppt]:
    """γ(|B|+1) γ(|U|+1) γ(#runs+1), B, coded U, γ(exponents)."""
    t = build_poppt(g, form)
    check_u_bound(t.U, g.sigma)
    w = BitWriter(64 + 2 * t.B.size + 8 * t.U.size)
    w.write_gamma(t.B.size + 1)
    w.write_gamma(t.U.size + 1)
    w.write_gamma(t.run_exponents.size + 1)
    w.write_bitarray(t.B)
    if coding is UCoding.IBLE:
        encode_u_ible(t.U, g.sigma, w)
    else:
        encode_u_pge(t.U, epsilon, w)
    w.write_gamma_array(t.run_exponents)
    return w, t


def poppt_decode(r: BitReader, terminals: bytes, form: Form, coding: UCoding, tau_len: int) -> Grammar:
    sigma = len(terminals)
    nB = r.read_gamma() - 1
    nU = r.read_gamma() - 1
    nE = r.read_gamma() - 1
    if nB > r.remaining or nU > r.remaining:
        raise CorruptStreamError("tree bits truncated", r.pos)
    B = r.read_bitarray(nB).astype(np.uint8)
    if coding is UCoding.IBLE:
        U = decode_u_ible(r, nU, sigma)
    else:
        U = decode_u_pge(r)
        if U.size != nU:
            raise CorruptStreamError("leaf label count disagrees with header", r.pos)
    exps = r.read_gamma_array(nE)
    return decode_poppt(B, U, exps, sigma, form, tau_len, terminals)
