"""Brute-force reference implementations used by the tests.

Nothing here shares code with the engine: texts are plain Python lists,
counts come from direct scans, and the reference constructors rebuild the
whole text after every step.  Slow on purpose.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .grammar import Grammar, Run, Sequence

MAX_ENUM = 256


def count_greedy(t: list[int], u: list[int] | tuple[int, ...]) -> int:
    """Greedy left-to-right non-overlapping occurrence count of u in t."""
    m = len(u)
    u = list(u)
    i = c = 0
    while i + m <= len(t):
        if t[i : i + m] == u:
            c += 1
            i += m
        else:
            i += 1
    return c


def greedy_positions(t: list[int], u) -> list[int]:
    m = len(u)
    u = list(u)
    out = []
    i = 0
    while i + m <= len(t):
        if t[i : i + m] == u:
            out.append(i)
            i += m
        else:
            i += 1
    return out


def pair_counts(t: list[int]) -> dict[tuple[int, int], int]:
    counts: Counter = Counter()
    last: dict[tuple[int, int], int] = {}
    for i in range(len(t) - 1):
        p = (t[i], t[i + 1])
        if p in last and last[p] == i - 1:
            continue  # overlaps the occurrence counted just before
        counts[p] += 1
        last[p] = i
    return dict(counts)


@dataclass(frozen=True)
class RepeatEntry:
    substring: tuple[int, ...]
    frequency: int
    left_maximal: bool
    right_maximal: bool

    @property
    def is_maximal(self) -> bool:
        return self.left_maximal and self.right_maximal


def enumerate_maximal_repeats(t) -> list[RepeatEntry]:
    """Every substring of length >= 2 occurring at least twice, with flags."""
    t = list(t)
    if len(t) > MAX_ENUM:
        raise ValueError(f"oracle refuses texts longer than {MAX_ENUM} symbols")
    alphabet = sorted(set(t))
    subs = {tuple(t[i:j]) for i in range(len(t)) for j in range(i + 2, len(t) + 1)}
    report = []
    for u in sorted(subs, key=lambda s: (len(s), s)):
        f = count_greedy(t, u)
        if f < 2:
            continue
        left = all(count_greedy(t, (c, *u)) < f for c in alphabet)
        right = all(count_greedy(t, (*u, c)) < f for c in alphabet)
        report.append(RepeatEntry(u, f, left, right))
    return report


def max_maximal_repeat_frequency(t) -> int:
    return max((e.frequency for e in enumerate_maximal_repeats(t) if e.is_maximal), default=0)


@dataclass
class CheckResult:
    ok: bool
    detail: str = ""
    data: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


def cross_check_selection(t) -> CheckResult:
    """Engine's selected repeat frequency against the brute-force maximum."""
    from .engine import build_index, extend_to_maximal_repeat, most_frequent_pair

    t = list(t)
    expected = max_maximal_repeat_frequency(t)
    wt, idx = build_index(t)
    top = most_frequent_pair(idx)
    if top is None or top[1] < 2:
        if expected == 0:
            return CheckResult(True)
        return CheckResult(False, f"engine selected nothing, oracle max is {expected}")
    pair, f = top
    r, occs = extend_to_maximal_repeat(wt, idx, pair)
    got = count_greedy(t, r)
    data = {"pair": pair, "repeat": r, "occurrences": occs, "engine": f, "oracle": expected}
    if f != expected or got != f or len(occs) != f:
        return CheckResult(
            False,
            f"pair {pair} count {f}, repeat {r} recount {got}, {len(occs)} occurrences, oracle max {expected}",
            data,
        )
    return CheckResult(True, "", data)


def scratch_rebuild_equals(wt, idx) -> CheckResult:
    fresh = pair_counts(wt.live())
    held = {p: c for p, c in idx.counts().items() if c}
    if fresh == held:
        return CheckResult(True)
    keys = sorted(set(fresh) | set(held))
    diff = [(k, fresh.get(k, 0), held.get(k, 0)) for k in keys if fresh.get(k, 0) != held.get(k, 0)]
    lines = ", ".join(f"{k}: scratch {a} vs index {b}" for k, a, b in diff[:10])
    return CheckResult(False, lines, {"diff": diff})


def naive_expand(terminals: bytes, rules: list, tau: list[int]) -> bytes:
    """Recursive expansion with memoisation; independent of grammar.expand."""
    sigma = len(terminals)
    memo: dict[int, bytes] = {}

    def ex(x: int) -> bytes:
        if x <= sigma:
            return terminals[x - 1 : x]
        if x not in memo:
            rule = rules[x - sigma - 1]
            if isinstance(rule, Run):
                memo[x] = ex(rule.base) * rule.exponent
            else:
                memo[x] = b"".join(ex(c) for c in rule.body)
        return memo[x]

    return b"".join(ex(x) for x in tau)


def _leftmost_best(t: list[int]) -> tuple[tuple[int, int], int] | None:
    counts = pair_counts(t)
    if not counts:
        return None
    first = {}
    for i in range(len(t) - 1):
        first.setdefault((t[i], t[i + 1]), i)
    best = max(counts, key=lambda p: (counts[p], -first[p]))
    return best, counts[best]


def _extend(t: list[int], starts: list[int], m: int) -> tuple[list[int], int]:
    starts = list(starts)
    f = len(starts)
    while True:
        q = [s - 1 for s in starts]
        if q[0] < 0 or any(
            x < 0 or t[x] != t[q[0]] or (i and x <= starts[i - 1] + m - 1) for i, x in enumerate(q)
        ):
            break
        starts = q
        m += 1
    while True:
        ends = [s + m for s in starts]
        if ends[-1] >= len(t) or any(
            t[e] != t[ends[0]] or (i + 1 < f and e >= starts[i + 1]) for i, e in enumerate(ends)
        ):
            break
        m += 1
    return starts, m


def _splice(t: list[int], starts: list[int], lengths: list[int], vs: list[int]) -> list[int]:
    out, i = [], 0
    for s, m, v in zip(starts, lengths, vs):
        out.extend(t[i:s])
        out.append(v)
        i = s + m
    out.extend(t[i:])
    return out


def _runs_of(t: list[int], x: int) -> list[tuple[int, int]]:
    runs, i = [], 0
    while i < len(t):
        if t[i] == x:
            j = i
            while j < len(t) and t[j] == x:
                j += 1
            if j - i >= 2:
                runs.append((i, j - i))
            i = j
        else:
            i += 1
    return runs


def naive_construct(t, sigma: int, algo: str, terminals: bytes | None = None) -> Grammar:
    """Reference constructor: same selection, extension and replacement rules
    as the engine, recomputed from scratch at every step."""
    t = list(t)
    rules: list = []
    run_vars: dict[tuple[int, int], int] = {}
    while True:
        top = _leftmost_best(t)
        if top is None or top[1] < 2:
            break
        (a, b), _ = top
        starts = greedy_positions(t, (a, b))
        m = 2
        if algo != "repair":
            starts, m = _extend(t, starts, 2)
        r = t[starts[0] : starts[0] + m]
        if algo == "rlmr" and m == 2 and r[0] == r[1]:
            runs = _runs_of(t, r[0])
            vs = []
            for _, k in runs:
                if (r[0], k) not in run_vars:
                    rules.append(Run(r[0], k))
                    run_vars[(r[0], k)] = sigma + len(rules)
                vs.append(run_vars[(r[0], k)])
            t = _splice(t, [s for s, _ in runs], [k for _, k in runs], vs)
            continue
        if algo != "repair" and m > 2 and r[0] == r[-1]:
            m -= 1
            r = r[:-1]
        rules.append(Sequence(tuple(r)))
        v = sigma + len(rules)
        t = _splice(t, starts, [m] * len(starts), [v] * len(starts))
    if terminals is None:
        terminals = bytes(range(sigma))
    return Grammar.from_rules(terminals, rules, t)


def fibonacci_word(k: int) -> bytes:
    """F_0 = "b", F_1 = "a", F_k = F_{k-1} F_{k-2}; |F_k| is the (k+1)-th Fibonacci number."""
    if k == 0:
        return b"b"
    prev, cur = b"b", b"a"
    for _ in range(k - 1):
        prev, cur = cur, cur + prev
    return cur


def repetitive_corpus(copies: int = 100, block: int = 10240, mutation_rate: float = 0.01, seed: int = 0) -> bytes:
    """``copies`` concatenated copies of one random block, then point mutations
    at ``mutation_rate`` of the positions (chosen with replacement)."""
    import numpy as np

    rng = np.random.default_rng(seed)
    base = rng.integers(0, 256, block, dtype=np.uint8)
    data = np.tile(base, copies)
    k = int(data.size * mutation_rate)
    pos = rng.integers(0, data.size, k)
    data[pos] = rng.integers(0, 256, k, dtype=np.uint8)
    return data.tobytes()
