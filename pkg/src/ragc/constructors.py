"""RePair, MR-RePair and RL-MR-RePair on top of the replace engine."""

from __future__ import annotations

import numpy as np
from numba import njit, types
from numba.typed import Dict

from . import engine as E
from .corpus import ingest_bytes
from .errors import InvariantError
from .grammar import RUN, SEQ, Grammar

REPAIR = 0
MR = 1
RLMR = 2

ALGOS = {"repair": REPAIR, "mr": MR, "rlmr": RLMR}


@njit(cache=True)
def _grow(a, need):
    if need <= a.shape[0]:
        return a
    b = np.empty(max(need, 2 * a.shape[0]), a.dtype)
    b[: a.shape[0]] = a
    return b


@njit(cache=True)
def _construct(st, sigma, mode):
    slots, recs = st.slots, st.recs
    occ = st.aux[E.A_OCC]
    kinds = np.empty(64, np.int8)
    offsets = np.zeros(65, np.int64)
    body = np.empty(256, np.int64)
    d = 0
    nbody = 0
    runs = Dict.empty(key_type=types.int64, value_type=types.int64)
    rbuf = np.empty(2 * slots.shape[0] + 4, np.int64)
    starts = np.empty(0, np.int32)
    lens = np.empty(0, np.int32)
    while True:
        r = E.select_top(st)
        if r < 0:
            break
        f = E.collect_occurrences(st, r)
        if mode == REPAIR:
            key = recs[r, E.KEY]
            lo = 0
            m = 2
            rbuf[0] = key >> 32
            rbuf[1] = key & E.LOW
        else:
            lo, m = E.extend_occurrences(st, f, rbuf)
        x = rbuf[lo]
        if mode == RLMR and m == 2 and rbuf[lo + 1] == x:
            # replace every maximal run x^k, k >= 2, sharing variables per (x, k)
            nr = 0
            i = recs[r, E.HEAD]
            while i >= 0:
                nr += 1
                i = slots[i, E.ONXT]
            if starts.shape[0] < nr:
                starts = np.empty(nr, np.int32)
                lens = np.empty(nr, np.int32)
            i = recs[r, E.HEAD]
            for j in range(nr):
                starts[j] = i
                lens[j] = slots[i, E.RLEN]
                i = slots[i, E.ONXT]
            E.reserve_records(st, 2 * nr + 2)
            for j in range(nr):
                k = np.int64(lens[j])
                rk = (x << 32) | k
                if rk in runs:
                    v = runs[rk]
                else:
                    kinds = _grow(kinds, d + 1)
                    offsets = _grow(offsets, d + 2)
                    body = _grow(body, nbody + 2)
                    kinds[d] = RUN
                    body[nbody] = x
                    body[nbody + 1] = k
                    nbody += 2
                    d += 1
                    offsets[d] = nbody
                    v = sigma + d
                    runs[rk] = v
                if not E.replace_occurrence(st, starts[j], lens[j], v, lens[j], lens[j], True):
                    return kinds, offsets, body, d, -1
        else:
            if mode != REPAIR and m > 2 and rbuf[lo + m - 1] == x:
                m -= 1
            kinds = _grow(kinds, d + 1)
            offsets = _grow(offsets, d + 2)
            body = _grow(body, nbody + m)
            kinds[d] = SEQ
            body[nbody : nbody + m] = rbuf[lo : lo + m]
            nbody += m
            d += 1
            offsets[d] = nbody
            v = sigma + d
            lead, trail, allx = E.repeat_shape(rbuf[lo : lo + m])
            E.reserve_records(st, 2 * f + 2)
            for j in range(f):
                if not E.replace_occurrence(st, occ[j], m, v, lead, trail, allx):
                    return kinds, offsets, body, d, -1
        if st.meta[E.M_ERR] != 0:
            return kinds, offsets, body, d, -1
        E.flush_batch(st)
        E.push_record(st, r)
    return kinds, offsets, body, d, 0


def construct(t, sigma: int, algo: int, terminals: bytes | None = None, heap_capacity: int | None = None) -> Grammar:
    """Run constructor ``algo`` over symbol text ``t`` (symbols 1..sigma)."""
    arr = np.ascontiguousarray(t, dtype=np.int64)
    if arr.size and (arr.min() < 1 or arr.max() > sigma):
        raise ValueError("text symbols must lie in 1..sigma")
    if terminals is None:
        terminals = bytes(range(sigma))
    st = E.new_state(arr.shape[0], heap_capacity)
    E.build(st, arr)
    kinds, offsets, body, d, status = _construct(st, sigma, algo)
    if status != 0:
        raise InvariantError(f"replace engine failed (code {int(st.meta[E.M_ERR])})")
    tau = E.live_text(st)
    return Grammar(terminals, kinds[:d].copy(), offsets[: d + 1].copy(), body[: offsets[d]].copy(), tau)


def construct_repair(t, sigma: int, terminals: bytes | None = None) -> Grammar:
    return construct(t, sigma, REPAIR, terminals)


def construct_mr_repair(t, sigma: int, terminals: bytes | None = None) -> Grammar:
    return construct(t, sigma, MR, terminals)


def construct_rl_mr_repair(t, sigma: int, terminals: bytes | None = None) -> Grammar:
    return construct(t, sigma, RLMR, terminals)


def compress_bytes(data: bytes, algo: str | int) -> Grammar:
    """Ingest raw bytes and build a grammar with the named constructor."""
    code = ALGOS[algo] if isinstance(algo, str) else algo
    text, amap = ingest_bytes(data)
    return construct(text, amap.sigma, code, amap.terminals)
