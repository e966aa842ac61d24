"""Working text, pair index and the replacement primitive.

The text lives in a slot table whose row indices are original text
positions, so slot order is text order and "leftmost occurrence" is a plain
comparison.  Replaced ranges keep their first slot (now holding the new
variable) and tombstone the rest.

Pair bookkeeping:

* a pair ``(a, b)`` with ``a != b`` lists every slot where it starts;
* a pair ``(x, x)`` lists only the start slot of each maximal run ``x^L``
  with ``L >= 2`` and counts ``L // 2`` for it, which is exactly the greedy
  non-overlapping count.

Every occurrence list is kept sorted by slot, so its head is the leftmost
occurrence.  The most frequent pair is found through a lazy max-heap keyed on
``(count, -head)``: existing keys only ever get worse between pops, so stale
entries are corrected when they surface and only records that gained
occurrences are pushed after each replacement batch.

All state sits in six arrays.  numba passes every array in a tuple argument
separately on each non-inlined call, so a wide state tuple made the per-call
cost dominate; helpers below take only the arrays they touch.
"""

from __future__ import annotations

from collections import namedtuple

import numpy as np
from numba import njit

from .errors import InvariantError

LOW = 0xFFFFFFFF

# slot table columns
SYM, PRV, NXT, OPRV, ONXT, SREC, RLEN, RLINK = range(8)
# record table columns
KEY, COUNT, HEAD, TAIL = range(4)
# scratch rows
A_FREE, A_NEW, A_MARK, A_TMP, A_OCC, A_END = range(6)
# meta entries
M_NREC = 0   # record high-water mark
M_NFREE = 1  # free-list depth
M_HEAP = 2   # heap size
M_LIVE = 3   # live text length
M_NNEW = 4   # records marked during the current batch
M_HBITS = 5  # log2 of the active hash table size
M_ERR = 6    # first invariant failure code, 0 if none

State = namedtuple("State", ["slots", "recs", "aux", "htab", "heap", "meta"])


def new_state(n: int, heap_capacity: int | None = None) -> State:
    cap = n + 1
    # The hash buffer is sized for the worst case, but only a prefix of
    # 2**meta[M_HBITS] entries is active; it doubles at load 1/2.  A table
    # sized for n up front spends most lookups on cache misses.
    top_bits = max(4, int(2 * cap).bit_length())
    bits = min(top_bits, 12)
    hcap = 2 * cap + 64
    if heap_capacity is not None:
        # compaction needs room for every live record plus one batch
        hcap = max(heap_capacity, 2 * cap + 2)
    slots = np.full((cap, 8), -1, np.int32)
    slots[:, RLEN] = 0
    recs = np.full((cap, 4), -1, np.int64)
    recs[:, COUNT] = 0
    aux = np.zeros((6, cap), np.int32)
    htab = np.empty(1 << top_bits, np.int32)
    htab[: 1 << bits] = -1
    heap = np.zeros((hcap, 2), np.int64)
    meta = np.array([0, 0, 0, 0, 0, bits, 0], np.int64)
    return State(slots, recs, aux, htab, heap, meta)


# ---------------------------------------------------------------- hash table


@njit(cache=True)
def pair_key(a, b):
    return (np.int64(a) << 32) | np.int64(b)


@njit(cache=True)
def _is_equal_pair(key):
    return (key >> 32) == (key & LOW)


@njit(cache=True)
def _slot_of(key, bits):
    h = np.uint64(key) * np.uint64(0x9E3779B97F4A7C15)
    return np.int64(h >> np.uint64(64 - bits))


@njit(cache=True)
def find_rec(htab, recs, meta, key):
    bits = meta[M_HBITS]
    mask = (np.int64(1) << bits) - 1
    i = _slot_of(key, bits)
    while True:
        r = htab[i]
        if r < 0:
            return -1
        if recs[r, KEY] == key:
            return r
        i = (i + 1) & mask


@njit(cache=True)
def _hash_insert(htab, meta, key, rec):
    bits = meta[M_HBITS]
    mask = (np.int64(1) << bits) - 1
    i = _slot_of(key, bits)
    while htab[i] >= 0:
        i = (i + 1) & mask
    htab[i] = rec


@njit(cache=True)
def _hash_delete(htab, recs, meta, key):
    bits = meta[M_HBITS]
    mask = (np.int64(1) << bits) - 1
    i = _slot_of(key, bits)
    while recs[htab[i], KEY] != key:
        i = (i + 1) & mask
    j = i
    while True:
        j = (j + 1) & mask
        r = htab[j]
        if r < 0:
            break
        k = _slot_of(recs[r, KEY], bits)
        if i <= j:
            stays = i < k <= j
        else:
            stays = k > i or k <= j
        if not stays:
            htab[i] = r
            i = j
    htab[i] = -1


@njit(cache=True)
def reserve_records(st, extra):
    """Grow the active hash prefix so ``extra`` more records keep load <= 1/2."""
    meta = st.meta
    need = 2 * (meta[M_NREC] - meta[M_NFREE] + extra)
    bits = meta[M_HBITS]
    limit = st.htab.shape[0]
    if need <= (np.int64(1) << bits) or (np.int64(1) << bits) >= limit:
        return
    while (np.int64(1) << bits) < need and (np.int64(2) << bits) <= limit:
        bits += 1
    meta[M_HBITS] = bits
    st.htab[: np.int64(1) << bits] = -1
    for r in range(meta[M_NREC]):
        if st.recs[r, KEY] >= 0:
            _hash_insert(st.htab, meta, st.recs[r, KEY], r)


# ------------------------------------------------------------------- records


@njit(cache=True)
def _get_rec(htab, recs, aux, meta, key):
    r = find_rec(htab, recs, meta, key)
    if r >= 0:
        return r
    if meta[M_NFREE] > 0:
        meta[M_NFREE] -= 1
        r = aux[A_FREE, meta[M_NFREE]]
    else:
        r = meta[M_NREC]
        meta[M_NREC] += 1
    recs[r, KEY] = key
    recs[r, COUNT] = 0
    recs[r, HEAD] = -1
    recs[r, TAIL] = -1
    _hash_insert(htab, meta, key, r)
    return r


@njit(cache=True)
def _dec(htab, recs, aux, meta, r, amount):
    recs[r, COUNT] -= amount
    if recs[r, COUNT] == 0:
        if recs[r, HEAD] >= 0 and meta[M_ERR] == 0:
            meta[M_ERR] = 1
        _hash_delete(htab, recs, meta, recs[r, KEY])
        recs[r, KEY] = -1
        aux[A_FREE, meta[M_NFREE]] = r
        meta[M_NFREE] += 1


@njit(cache=True)
def _inc(recs, aux, meta, r, amount):
    recs[r, COUNT] += amount
    if aux[A_MARK, r] == 0:
        aux[A_MARK, r] = 1
        aux[A_NEW, meta[M_NNEW]] = r
        meta[M_NNEW] += 1


@njit(cache=True)
def _append(slots, recs, r, i):
    t = recs[r, TAIL]
    slots[i, OPRV] = t
    slots[i, ONXT] = -1
    if t >= 0:
        slots[t, ONXT] = i
    else:
        recs[r, HEAD] = i
    recs[r, TAIL] = i
    slots[i, SREC] = r


@njit(cache=True)
def _unlink(slots, recs, i):
    r = slots[i, SREC]
    a = slots[i, OPRV]
    b = slots[i, ONXT]
    if a >= 0:
        slots[a, ONXT] = b
    else:
        recs[r, HEAD] = b
    if b >= 0:
        slots[b, OPRV] = a
    else:
        recs[r, TAIL] = a
    slots[i, SREC] = -1


@njit(cache=True)
def _insert_after(slots, recs, a, i):
    r = slots[a, SREC]
    b = slots[a, ONXT]
    slots[i, OPRV] = a
    slots[i, ONXT] = b
    slots[a, ONXT] = i
    if b >= 0:
        slots[b, OPRV] = i
    else:
        recs[r, TAIL] = i
    slots[i, SREC] = r


@njit(cache=True)
def _swap_slot(slots, recs, old, new):
    r = slots[old, SREC]
    a = slots[old, OPRV]
    b = slots[old, ONXT]
    slots[new, OPRV] = a
    slots[new, ONXT] = b
    if a >= 0:
        slots[a, ONXT] = new
    else:
        recs[r, HEAD] = new
    if b >= 0:
        slots[b, OPRV] = new
    else:
        recs[r, TAIL] = new
    slots[new, SREC] = r
    slots[old, SREC] = -1


# ---------------------------------------------------------------------- heap


@njit(cache=True)
def _prio(recs, r):
    return (recs[r, COUNT] << 32) | (LOW - recs[r, HEAD])


@njit(cache=True)
def _sift_up(heap, i):
    p, r = heap[i, 0], heap[i, 1]
    while i > 0:
        j = (i - 1) >> 1
        if heap[j, 0] >= p:
            break
        heap[i, 0] = heap[j, 0]
        heap[i, 1] = heap[j, 1]
        i = j
    heap[i, 0] = p
    heap[i, 1] = r


@njit(cache=True)
def _sift_down(heap, i, size):
    p, r = heap[i, 0], heap[i, 1]
    while True:
        c = 2 * i + 1
        if c >= size:
            break
        if c + 1 < size and heap[c + 1, 0] > heap[c, 0]:
            c += 1
        if heap[c, 0] <= p:
            break
        heap[i, 0] = heap[c, 0]
        heap[i, 1] = heap[c, 1]
        i = c
    heap[i, 0] = p
    heap[i, 1] = r


@njit(cache=True)
def _push(heap, recs, meta, r):
    # callers guarantee room; see flush_batch
    i = meta[M_HEAP]
    heap[i, 0] = _prio(recs, r)
    heap[i, 1] = r
    meta[M_HEAP] = i + 1
    _sift_up(heap, i)


@njit(cache=True)
def compact_heap(st):
    heap, recs = st.heap, st.recs
    size = 0
    for r in range(st.meta[M_NREC]):
        if recs[r, KEY] >= 0 and recs[r, COUNT] >= 2:
            heap[size, 0] = _prio(recs, r)
            heap[size, 1] = r
            size += 1
    for i in range(size // 2 - 1, -1, -1):
        _sift_down(heap, i, size)
    st.meta[M_HEAP] = size


@njit(cache=True)
def select_top(st):
    """Pop until the top entry is current; return its record or -1."""
    heap, recs, meta = st.heap, st.recs, st.meta
    while meta[M_HEAP] > 0:
        p, r = heap[0, 0], heap[0, 1]
        size = meta[M_HEAP] - 1
        meta[M_HEAP] = size
        if size > 0:
            heap[0, 0] = heap[size, 0]
            heap[0, 1] = heap[size, 1]
            _sift_down(heap, 0, size)
        if recs[r, KEY] < 0 or recs[r, COUNT] < 2:
            continue
        cur = _prio(recs, r)
        if cur != p:
            _push(heap, recs, meta, r)
            continue
        return r
    return -1


@njit(cache=True)
def push_record(st, r):
    if st.meta[M_HEAP] + 1 > st.heap.shape[0]:
        compact_heap(st)
    if st.recs[r, KEY] >= 0 and st.recs[r, COUNT] >= 2:
        _push(st.heap, st.recs, st.meta, r)


@njit(cache=True)
def flush_batch(st):
    """Push every record that gained occurrences since the last flush."""
    heap, recs, aux, meta = st.heap, st.recs, st.aux, st.meta
    if meta[M_HEAP] + meta[M_NNEW] + 1 > heap.shape[0]:
        compact_heap(st)
    for i in range(meta[M_NNEW]):
        r = aux[A_NEW, i]
        aux[A_MARK, r] = 0
        if recs[r, KEY] >= 0 and recs[r, COUNT] >= 2:
            _push(heap, recs, meta, r)
    meta[M_NNEW] = 0


# --------------------------------------------------------------------- build


@njit(cache=True)
def build(st, t):
    slots, recs, aux, htab, meta = st.slots, st.recs, st.aux, st.htab, st.meta
    n = t.shape[0]
    top = 0
    for i in range(n):
        slots[i, SYM] = t[i]
        slots[i, PRV] = i - 1
        slots[i, NXT] = i + 1
        top = max(top, t[i])
    if n > 0:
        slots[n - 1, NXT] = -1
    meta[M_LIVE] = n
    reserve_records(st, min(n, top * top))
    i = 0
    while i < n - 1:
        x = t[i]
        if t[i + 1] == x:
            j = i + 1
            while j + 1 < n and t[j + 1] == x:
                j += 1
            L = j - i + 1
            slots[i, RLEN] = L
            slots[i, RLINK] = j
            slots[j, RLINK] = i
            r = _get_rec(htab, recs, aux, meta, pair_key(x, x))
            _append(slots, recs, r, i)
            recs[r, COUNT] += L // 2
            i = j
        else:
            r = _get_rec(htab, recs, aux, meta, pair_key(x, t[i + 1]))
            _append(slots, recs, r, i)
            recs[r, COUNT] += 1
            i += 1
    compact_heap(st)


# --------------------------------------------------------------- occurrences


@njit(cache=True)
def collect_occurrences(st, r):
    """Fill the occurrence scratch row with greedy start slots of record r."""
    slots, occ = st.slots, st.aux[A_OCC]
    i = st.recs[r, HEAD]
    c = 0
    if not _is_equal_pair(st.recs[r, KEY]):
        while i >= 0:
            occ[c] = i
            c += 1
            i = slots[i, ONXT]
    else:
        while i >= 0:
            half = slots[i, RLEN] // 2
            j = i
            for k in range(half):
                occ[c] = j
                c += 1
                if k + 1 < half:
                    j = slots[slots[j, NXT], NXT]
            i = slots[i, ONXT]
    return c


@njit(cache=True)
def extend_occurrences(st, f, rbuf):
    """Grow the f pair occurrences in the scratch row to a maximal repeat.

    Left first to saturation, then right.  Writes the repeat into ``rbuf``
    and returns (offset, length) of it there; the scratch row ends up
    holding the extended start slots.
    """
    slots = st.slots
    occ, oe = st.aux[A_OCC], st.aux[A_END]
    for i in range(f):
        oe[i] = slots[occ[i], NXT]
    # the repeat is assembled around the middle of rbuf
    mid = rbuf.shape[0] // 2
    lo = mid
    hi = mid + 2
    rbuf[mid] = slots[occ[0], SYM]
    rbuf[mid + 1] = slots[oe[0], SYM]
    while True:
        q = slots[occ[0], PRV]
        if q < 0:
            break
        c = slots[q, SYM]
        ok = True
        for i in range(1, f):
            q = slots[occ[i], PRV]
            if q < 0 or slots[q, SYM] != c or q == oe[i - 1]:
                ok = False
                break
        if not ok:
            break
        for i in range(f):
            occ[i] = slots[occ[i], PRV]
        lo -= 1
        rbuf[lo] = c
    while True:
        q = slots[oe[f - 1], NXT]
        if q < 0:
            break
        c = slots[q, SYM]
        ok = True
        for i in range(f - 1):
            q = slots[oe[i], NXT]
            if q < 0 or slots[q, SYM] != c or q == occ[i + 1]:
                ok = False
                break
        if not ok:
            break
        for i in range(f):
            oe[i] = slots[oe[i], NXT]
        rbuf[hi] = c
        hi += 1
    return lo, hi - lo


# --------------------------------------------------------------- replacement


@njit(cache=True)
def _link_left(slots, recs, aux, htab, meta, p, s, v):
    a = slots[p, SYM]
    if a != v:
        r = _get_rec(htab, recs, aux, meta, pair_key(a, v))
        _append(slots, recs, r, p)
        _inc(recs, aux, meta, r, 1)
        return
    q = slots[p, PRV]
    if q >= 0 and slots[q, SYM] == v:
        start = slots[p, RLINK]
        L = slots[start, RLEN]
        slots[start, RLEN] = L + 1
        slots[start, RLINK] = s
        slots[s, RLINK] = start
        _inc(recs, aux, meta, slots[start, SREC], (L + 1) // 2 - L // 2)
    else:
        slots[p, RLEN] = 2
        slots[p, RLINK] = s
        slots[s, RLINK] = p
        r = _get_rec(htab, recs, aux, meta, pair_key(v, v))
        _append(slots, recs, r, p)
        _inc(recs, aux, meta, r, 1)


@njit(cache=True)
def replace_occurrence(st, s, m, v, lead, trail, allx):
    """Collapse the m-slot range starting at slot s into v.

    ``lead``/``trail`` are the lengths of the repeat's leading and trailing
    single-symbol runs and ``allx`` says the repeat is one symbol repeated.
    Returns False (and touches nothing) if the range is not m live slots or
    overlaps a range already collapsed into v.  The caller must have
    reserved hash room for two new records.
    """
    slots, recs, aux, htab, meta = st.slots, st.recs, st.aux, st.htab, st.meta
    tmp = aux[A_TMP]
    i = s
    for k in range(m):
        if i < 0 or slots[i, SYM] < 0 or slots[i, SYM] == v:
            return False
        tmp[k] = i
        if k + 1 < m:
            i = slots[i, NXT]
    e = tmp[m - 1]
    x = slots[s, SYM]
    y = slots[e, SYM]
    p = slots[s, PRV]
    z = slots[e, NXT]
    a_left = p >= 0 and slots[p, SYM] == x
    b_right = z >= 0 and slots[z, SYM] == y
    a_start = -1
    a_end = -1
    la = 0
    l1 = 0
    b_start = -1
    b_end = -1
    lb = 0
    if a_left:
        if allx:
            j = p
            l1 = 1
            while slots[j, PRV] >= 0 and slots[slots[j, PRV], SYM] == x:
                j = slots[j, PRV]
                l1 += 1
            a_start = j
        else:
            a_start = slots[tmp[lead - 1], RLINK]
        la = slots[a_start, RLEN]
        a_end = slots[a_start, RLINK]
        if not allx:
            l1 = la - lead
    if b_right:
        if allx:
            b_start = a_start if a_left else s
        else:
            b_start = tmp[m - trail]
        lb = slots[b_start, RLEN]
        b_end = slots[b_start, RLINK]

    if p >= 0 and not a_left:
        r = slots[p, SREC]
        _unlink(slots, recs, p)
        _dec(htab, recs, aux, meta, r, 1)
    for k in range(m):
        i = tmp[k]
        r = slots[i, SREC]
        if r < 0 or (b_right and i == b_start):
            continue
        _unlink(slots, recs, i)
        if _is_equal_pair(recs[r, KEY]):
            _dec(htab, recs, aux, meta, r, slots[i, RLEN] // 2)
        else:
            _dec(htab, recs, aux, meta, r, 1)

    if a_left and b_right and allx:
        # the range sits strictly inside one run: split it in two
        r = slots[a_start, SREC]
        l2 = la - l1 - m
        if l2 >= 2:
            _insert_after(slots, recs, a_start, z)
            slots[z, RLEN] = l2
            slots[z, RLINK] = a_end
            slots[a_end, RLINK] = z
        if l1 >= 2:
            slots[a_start, RLEN] = l1
            slots[a_start, RLINK] = p
            slots[p, RLINK] = a_start
        else:
            _unlink(slots, recs, a_start)
        _dec(htab, recs, aux, meta, r, la // 2 - l1 // 2 - l2 // 2)
    else:
        if a_left:
            r = slots[a_start, SREC]
            if allx:
                l1 = la - m
            if l1 >= 2:
                slots[a_start, RLEN] = l1
                slots[a_start, RLINK] = p
                slots[p, RLINK] = a_start
                _dec(htab, recs, aux, meta, r, la // 2 - l1 // 2)
            else:
                _unlink(slots, recs, a_start)
                _dec(htab, recs, aux, meta, r, la // 2)
        if b_right:
            r = slots[b_start, SREC]
            l2 = lb - (m if allx else trail)
            if l2 >= 2:
                _swap_slot(slots, recs, b_start, z)
                slots[z, RLEN] = l2
                slots[z, RLINK] = b_end
                slots[b_end, RLINK] = z
                _dec(htab, recs, aux, meta, r, lb // 2 - l2 // 2)
            else:
                _unlink(slots, recs, b_start)
                _dec(htab, recs, aux, meta, r, lb // 2)

    for k in range(1, m):
        slots[tmp[k], SYM] = -1
    slots[s, SYM] = v
    slots[s, NXT] = z
    if z >= 0:
        slots[z, PRV] = s
    meta[M_LIVE] -= m - 1
    if p >= 0:
        _link_left(slots, recs, aux, htab, meta, p, s, v)
    if z >= 0:
        b = slots[z, SYM]
        if b == v:
            # only possible when ranges are processed out of text order
            if meta[M_ERR] == 0:
                meta[M_ERR] = 2
        else:
            r = _get_rec(htab, recs, aux, meta, pair_key(v, b))
            _append(slots, recs, r, s)
            _inc(recs, aux, meta, r, 1)
    return True


@njit(cache=True)
def live_text(st):
    out = np.empty(st.meta[M_LIVE], np.int64)
    if out.shape[0] == 0:
        return out
    i = 0
    c = 0
    while i >= 0:
        out[c] = st.slots[i, SYM]
        c += 1
        i = st.slots[i, NXT]
    return out


@njit(cache=True)
def repeat_shape(body):
    m = body.shape[0]
    lead = 1
    while lead < m and body[lead] == body[0]:
        lead += 1
    trail = 1
    while trail < m and body[m - 1 - trail] == body[m - 1]:
        trail += 1
    return lead, trail, lead == m


# ------------------------------------------------------------ python facade


class WorkText:
    """Live view of the slot table shared with a :class:`PairIndex`."""

    def __init__(self, state: State):
        self._st = state

    @property
    def live_length(self) -> int:
        return int(self._st.meta[M_LIVE])

    def live(self) -> list[int]:
        return live_text(self._st).tolist()

    def symbols_at(self, start: int, m: int) -> list[int]:
        slots = self._st.slots
        out, i = [], start
        for _ in range(m):
            if i < 0:
                raise InvariantError(f"range at slot {start} runs past the text end")
            out.append(int(slots[i, SYM]))
            i = int(slots[i, NXT])
        return out


class PairIndex:
    def __init__(self, state: State):
        self._st = state

    def _find(self, pair) -> int:
        st = self._st
        return find_rec(st.htab, st.recs, st.meta, pair_key(pair[0], pair[1]))

    def counts(self) -> dict[tuple[int, int], int]:
        recs = self._st.recs
        out = {}
        for r in range(int(self._st.meta[M_NREC])):
            key = int(recs[r, KEY])
            if key >= 0:
                out[(key >> 32, key & LOW)] = int(recs[r, COUNT])
        return out

    def count(self, pair: tuple[int, int]) -> int:
        r = self._find(pair)
        return 0 if r < 0 else int(self._st.recs[r, COUNT])

    def occurrences(self, pair: tuple[int, int]) -> list[int]:
        r = self._find(pair)
        if r < 0:
            return []
        return self._st.aux[A_OCC, : collect_occurrences(self._st, r)].tolist()

    def corrupt_count(self, pair: tuple[int, int], delta: int) -> None:
        """Test hook: skew one stored count without touching the text."""
        self._st.recs[self._find(pair), COUNT] += delta


def check_state(st: State) -> None:
    code = int(st.meta[M_ERR])
    if code:
        st.meta[M_ERR] = 0
        msg = {1: "record count reached zero with occurrences listed",
               2: "ranges were not replaced in text order"}[code]
        raise InvariantError(msg)


def build_index(t) -> tuple[WorkText, PairIndex]:
    arr = np.ascontiguousarray(t, dtype=np.int64)
    if arr.size and arr.min() < 1:
        raise ValueError("symbols must be >= 1")
    st = new_state(arr.shape[0])
    build(st, arr)
    return WorkText(st), PairIndex(st)


def most_frequent_pair(idx: PairIndex):
    st = idx._st
    r = select_top(st)
    if r < 0:
        # every remaining pair occurs once; report the leftmost, if any
        if st.meta[M_LIVE] < 2:
            return None
        a = int(st.slots[0, SYM])
        b = int(st.slots[st.slots[0, NXT], SYM])
        return (a, b), idx.count((a, b))
    push_record(st, r)
    key = int(st.recs[r, KEY])
    return (key >> 32, key & LOW), int(st.recs[r, COUNT])


def extend_to_maximal_repeat(wt: WorkText, idx: PairIndex, p) -> tuple[list[int], list[int]]:
    st = idx._st
    r = idx._find(p)
    if r < 0 or st.recs[r, COUNT] < 2:
        raise ValueError(f"pair {p} does not occur at least twice")
    f = collect_occurrences(st, r)
    rbuf = np.zeros(2 * st.slots.shape[0] + 4, np.int64)
    lo, m = extend_occurrences(st, f, rbuf)
    return rbuf[lo : lo + m].tolist(), st.aux[A_OCC, :f].tolist()


def replace_all(wt: WorkText, idx: PairIndex, occurrences, m: int, v: int) -> None:
    st = idx._st
    occs = sorted(int(s) for s in occurrences)
    if not occs:
        return
    if m < 2:
        raise ValueError("replaced ranges need at least two symbols")
    if v < 1:
        raise ValueError("replacement symbol must be >= 1")
    body = wt.symbols_at(occs[0], m)
    lead, trail, allx = repeat_shape(np.array(body, np.int64))
    reserve_records(st, 2 * len(occs) + 2)
    for s in occs:
        if st.slots[s, SYM] < 0 or wt.symbols_at(s, m) != body:
            raise InvariantError(f"range at slot {s} is not a live copy of {body}")
        if not replace_occurrence(st, s, m, v, lead, trail, allx):
            raise InvariantError(f"range at slot {s} overlaps another or is not live")
        check_state(st)
    flush_batch(st)
