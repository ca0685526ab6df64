"""Evaluation algorithms and their query-cost accounting.

Three evaluators over the ternary majority tree:

* full read: query all 3^h leaves;
* naive directional: at every node evaluate two random children, then the
  third if they disagree;
* two-level: evaluate one random grandchild under each of two random
  children first, use their values as an opinion about the children, then
  finish children with the completion subroutine, which exploits an
  already-evaluated child.

All are zero-error: they return the true value on every input.  Each random
decision goes through a context object; the sampling context draws one
choice from a seeded stream, while the expectation context averages the
same code path over all choices and memoizes subproblems, yielding exact
per-input expected query counts as rationals.  One body, two interpreters:
the two can never drift apart.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import sqrt
from typing import Optional, Union

import numpy as np

from .formula import Input, check_height, make_rng, sample_hard_bits

_PERMS3 = ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0))
_PERMS2 = ((0, 1), (1, 0))

#: two-sided 99% normal quantile for Monte Carlo confidence intervals
Z99 = 2.5758293035489004


class AlgorithmId(str, enum.Enum):
    FULL_READ = "full"
    NAIVE = "naive"
    DEPTH2 = "depth2"


#: exact-expectation height guards (state space of the choice tree)
EXPECTATION_HEIGHT_CAP = {AlgorithmId.DEPTH2: 3, AlgorithmId.NAIVE: 4}


class QueryOracle:
    """Counts and logs 1-based leaf queries against a wrapped input."""

    __slots__ = ("input", "log")

    def __init__(self, input: Input):
        self.input = input
        self.log: list[int] = []

    def query(self, leaf: int) -> int:
        bit = self.input.leaf(leaf)
        self.log.append(leaf)
        return bit

    @property
    def count(self) -> int:
        return len(self.log)

    def has_duplicates(self) -> bool:
        return len(set(self.log)) != len(self.log)


# ---------------------------------------------------------------------------
# Shared algorithm bodies.  Nodes are (depth, index); children of (d, i) are
# (d+1, 3i+j).  Bodies return the query cost; node values are communicated
# through ctx.value / ctx.set_value.
# ---------------------------------------------------------------------------

def _kids(node):
    d, i = node
    return ((d + 1, 3 * i), (d + 1, 3 * i + 1), (d + 1, 3 * i + 2))


def _evaluate_body(ctx, v):
    h = ctx.height(v)
    if h == 0:
        return ctx.query(v)
    kids = _kids(v)

    if h == 1:
        def base(ys):
            cost = ctx.evaluate(ys[0]) + ctx.evaluate(ys[1])
            if ctx.value(ys[0]) == ctx.value(ys[1]):
                ctx.set_value(v, ctx.value(ys[0]))
                return cost
            cost += ctx.evaluate(ys[2])
            ctx.set_value(v, ctx.value(ys[2]))
            return cost
        return ctx.with_perm3(kids, base)

    def outer(ys):
        y1, y2, y3 = ys

        def pick1(x1):
            def pick2(x2):
                cost = ctx.evaluate(x1) + ctx.evaluate(x2)
                if ctx.value(x1) != ctx.value(x2):
                    cost += ctx.evaluate(y3)
                    v3 = ctx.value(y3)
                    # exactly one grandchild opinion matches y3
                    assert (ctx.value(x1) == v3) != (ctx.value(x2) == v3)
                    if ctx.value(x1) == v3:
                        yb, xb, yo, xo = y1, x1, y2, x2
                    else:
                        yb, xb, yo, xo = y2, x2, y1, x1
                    cost += ctx.complete(yb, xb)
                    if ctx.value(yb) == v3:
                        ctx.set_value(v, v3)
                        return cost
                    cost += ctx.complete(yo, xo)
                    ctx.set_value(v, ctx.value(yo))
                    return cost
                cost += ctx.complete(y1, x1)
                if ctx.value(y1) == ctx.value(x1):
                    cost += ctx.complete(y2, x2)
                    if ctx.value(y2) == ctx.value(y1):
                        ctx.set_value(v, ctx.value(y1))
                        return cost
                    cost += ctx.evaluate(y3)
                    ctx.set_value(v, ctx.value(y3))
                    return cost
                cost += ctx.evaluate(y3)
                if ctx.value(y3) == ctx.value(y1):
                    ctx.set_value(v, ctx.value(y1))
                    return cost
                cost += ctx.complete(y2, x2)
                ctx.set_value(v, ctx.value(y2))
                return cost
            return ctx.with_pick(_kids(y2), pick2)
        return ctx.with_pick(_kids(y1), pick1)
    return ctx.with_perm3(kids, outer)


def _complete_body(ctx, v, y1):
    """Finish node v given the already-evaluated child y1 (never re-queries
    anything under y1)."""
    h = ctx.height(v)
    others = tuple(c for c in _kids(v) if c != y1)

    def ordered(pair):
        y2, y3 = pair
        if h == 1:
            cost = ctx.evaluate(y2)
            if ctx.value(y2) == ctx.value(y1):
                ctx.set_value(v, ctx.value(y1))
                return cost
            cost += ctx.evaluate(y3)
            ctx.set_value(v, ctx.value(y3))
            return cost

        def pick2(x2):
            cost = ctx.evaluate(x2)
            if ctx.value(y1) != ctx.value(x2):
                cost += ctx.evaluate(y3)
                if ctx.value(y1) == ctx.value(y3):
                    ctx.set_value(v, ctx.value(y1))
                    return cost
                cost += ctx.complete(y2, x2)
                ctx.set_value(v, ctx.value(y2))
                return cost
            cost += ctx.complete(y2, x2)
            if ctx.value(y1) == ctx.value(y2):
                ctx.set_value(v, ctx.value(y1))
                return cost
            cost += ctx.evaluate(y3)
            ctx.set_value(v, ctx.value(y3))
            return cost
        return ctx.with_pick(_kids(y2), pick2)
    return ctx.with_perm2(others, ordered)


def _naive_body(ctx, v):
    h = ctx.height(v)
    if h == 0:
        return ctx.query(v)

    def ordered(ys):
        cost = ctx.naive(ys[0]) + ctx.naive(ys[1])
        if ctx.value(ys[0]) == ctx.value(ys[1]):
            ctx.set_value(v, ctx.value(ys[0]))
            return cost
        cost += ctx.naive(ys[2])
        ctx.set_value(v, ctx.value(ys[2]))
        return cost
    return ctx.with_perm3(_kids(v), ordered)


class _ChoiceStream:
    """Buffered uniform draws from one seeded generator."""

    __slots__ = ("rng", "_bufs", "_pos")

    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self._bufs = {}
        self._pos = {}

    def draw(self, n: int) -> int:
        buf = self._bufs.get(n)
        pos = self._pos.get(n, 0)
        if buf is None or pos >= len(buf):
            buf = self.rng.integers(0, n, size=2048)
            self._bufs[n] = buf
            pos = 0
        self._pos[n] = pos + 1
        return int(buf[pos])


class _SampleCtx:
    """Runs an algorithm once, querying through an oracle."""

    __slots__ = ("oracle", "stream", "h", "val")

    def __init__(self, oracle: QueryOracle, stream: _ChoiceStream):
        self.oracle = oracle
        self.stream = stream
        self.h = oracle.input.height
        self.val: dict = {}

    def height(self, node):
        return self.h - node[0]

    def query(self, node):
        self.val[node] = self.oracle.query(node[1] + 1)
        return 1

    def value(self, node):
        return self.val[node]

    def set_value(self, node, bit):
        self.val[node] = bit

    def with_perm3(self, items, fn):
        p = _PERMS3[self.stream.draw(6)]
        return fn((items[p[0]], items[p[1]], items[p[2]]))

    def with_perm2(self, items, fn):
        p = _PERMS2[self.stream.draw(2)]
        return fn((items[p[0]], items[p[1]]))

    def with_pick(self, items, fn):
        return fn(items[self.stream.draw(len(items))])

    def evaluate(self, v):
        return _evaluate_body(self, v)

    def complete(self, v, y1):
        return _complete_body(self, v, y1)

    def naive(self, v):
        return _naive_body(self, v)


class _ExpectCtx:
    """Averages the same bodies over every choice; exact rational costs.

    Values come straight from the input (the algorithms are zero-error, so
    any value they determine equals the true one; set_value asserts that).
    Subproblem expectations are memoized: with no re-queries, the cost of a
    sub-call depends only on the call signature.
    """

    __slots__ = ("input", "h", "_memo")

    def __init__(self, input: Input):
        self.input = input
        self.h = input.height
        self._memo: dict = {}

    def height(self, node):
        return self.h - node[0]

    def query(self, node):
        return Fraction(1)

    def value(self, node):
        return int(self.input.level_values[node[0]][node[1]])

    def set_value(self, node, bit):
        assert bit == self.value(node), "algorithm determined a wrong value"

    def with_perm3(self, items, fn):
        total = sum(fn((items[a], items[b], items[c])) for a, b, c in _PERMS3)
        return Fraction(total, 6)

    def with_perm2(self, items, fn):
        return Fraction(fn((items[0], items[1])) + fn((items[1], items[0])), 2)

    def with_pick(self, items, fn):
        return Fraction(sum(fn(it) for it in items), len(items))

    def evaluate(self, v):
        key = ("E", v)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._memo[key] = _evaluate_body(self, v)
        return hit

    def complete(self, v, y1):
        key = ("C", v, y1)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._memo[key] = _complete_body(self, v, y1)
        return hit

    def naive(self, v):
        key = ("N", v)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._memo[key] = _naive_body(self, v)
        return hit


@dataclass(frozen=True)
class RunResult:
    alg: AlgorithmId
    value: int
    count: int
    log: tuple[int, ...]


_ROOT = (0, 0)


def run(alg: AlgorithmId, input: Input, rng=None) -> RunResult:
    """Execute one algorithm run; deterministic given the rng/seed."""
    alg = AlgorithmId(alg)
    oracle = QueryOracle(input)
    if alg is AlgorithmId.FULL_READ:
        bits = [oracle.query(i) for i in range(1, input.bits.size + 1)]
        level = bits
        while len(level) > 1:
            level = [1 if level[i] + level[i + 1] + level[i + 2] >= 2 else 0
                     for i in range(0, len(level), 3)]
        return RunResult(alg, level[0], oracle.count, tuple(oracle.log))
    ctx = _SampleCtx(oracle, _ChoiceStream(make_rng(rng)))
    if alg is AlgorithmId.NAIVE:
        ctx.naive(_ROOT)
    else:
        ctx.evaluate(_ROOT)
    return RunResult(alg, ctx.value(_ROOT), oracle.count, tuple(oracle.log))


Entry = Union[str, tuple]


def exact_expected_queries(alg: AlgorithmId, input: Input,
                           entry: Entry = "root") -> Fraction:
    """Exact expected query count on a fixed input.

    entry = "root" evaluates the root; entry = ("complete", i) finishes the
    root given child i in {0,1,2} already evaluated (that child's own cost
    excluded).  Heights are capped per algorithm to keep the choice tree
    enumerable.
    """
    alg = AlgorithmId(alg)
    if alg is AlgorithmId.FULL_READ:
        return Fraction(input.bits.size)
    cap = EXPECTATION_HEIGHT_CAP[alg]
    if input.height > cap:
        raise ValueError(f"exact expectation for {alg.value} capped at h <= {cap}")
    ctx = _ExpectCtx(input)
    if entry == "root":
        return ctx.naive(_ROOT) if alg is AlgorithmId.NAIVE else ctx.evaluate(_ROOT)
    if isinstance(entry, tuple) and len(entry) == 2 and entry[0] == "complete":
        if alg is not AlgorithmId.DEPTH2:
            raise ValueError("completion entry applies to the two-level algorithm")
        if input.height < 1:
            raise ValueError("completion entry needs height >= 1")
        return ctx.complete(_ROOT, (1, entry[1]))
    raise ValueError(f"unknown entry {entry!r}")


def naive_hard_expectation(h: int) -> Fraction:
    """Exact expected cost of the naive evaluator on a uniform hard input.

    Distribution-level recursion: with children values (b, b, 1-b) in
    uniform random order and independent uniform hard subtrees given their
    values, e_b(h) = 2 e_b(h-1) + (2/3) e_{1-b}(h-1), e_b(0) = 1.
    """
    check_height(h)
    e0, e1 = Fraction(1), Fraction(1)
    for _ in range(h):
        e0, e1 = (2 * e0 + Fraction(2, 3) * e1, 2 * e1 + Fraction(2, 3) * e0)
    assert e0 == e1
    return e0


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class McResult:
    alg: AlgorithmId
    h: int
    distribution: str
    trials: int
    seed: int
    mean_exact: Fraction
    mean: float
    stddev: float
    ci99: tuple[float, float]

    def to_record(self) -> dict:
        return {
            "alg": self.alg.value,
            "h": self.h,
            "distribution": self.distribution,
            "trials": self.trials,
            "seed": self.seed,
            "mean": self.mean,
            "mean_exact": f"{self.mean_exact.numerator}/{self.mean_exact.denominator}",
            "stddev": self.stddev,
            "ci99": list(self.ci99),
        }


_CHUNK = 4096


def _mc_chunk(alg: AlgorithmId, h: int, fixed: Optional[Input], seed: int,
              chunk_index: int, count: int) -> tuple[int, int]:
    """(sum, sum of squares) of query counts over one chunk of trials."""
    if alg is AlgorithmId.FULL_READ:
        n = 3 ** h
        return count * n, count * n * n
    stream = _ChoiceStream(make_rng(seed, 2, chunk_index))
    if fixed is None:
        gen = make_rng(seed, 1, chunk_index)
        roots = gen.integers(0, 2, size=count)
        batch = sample_hard_bits(h, count, roots, gen)
    total = sq = 0
    for t in range(count):
        inp = fixed if fixed is not None else Input(h, batch[t])
        ctx = _SampleCtx(QueryOracle(inp), stream)
        if alg is AlgorithmId.NAIVE:
            ctx.naive(_ROOT)
        else:
            ctx.evaluate(_ROOT)
        c = ctx.oracle.count
        total += c
        sq += c * c
    return total, sq


def monte_carlo(alg: AlgorithmId, h: int, distribution="uniform-hard",
                trials: int = 10000, seed: int = 0, threads: int = 1) -> McResult:
    """Empirical mean query count with a 99% confidence interval.

    Deterministic given the seed, independently of the thread count: trials
    are split into fixed chunks with per-chunk substreams, and the reduction
    runs in chunk order.
    """
    alg = AlgorithmId(alg)
    check_height(h)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if isinstance(distribution, Input):
        fixed, dist_name = distribution, "fixed"
        if fixed.height != h:
            raise ValueError("fixed input height mismatch")
    elif distribution == "uniform-hard":
        fixed, dist_name = None, "uniform-hard"
    else:
        raise ValueError(f"unknown distribution {distribution!r}")

    chunks = [(ci, min(_CHUNK, trials - ci * _CHUNK))
              for ci in range((trials + _CHUNK - 1) // _CHUNK)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(
                lambda c: _mc_chunk(alg, h, fixed, seed, c[0], c[1]), chunks))
    else:
        parts = [_mc_chunk(alg, h, fixed, seed, ci, cnt) for ci, cnt in chunks]
    total = sum(p[0] for p in parts)
    sq = sum(p[1] for p in parts)
    mean_exact = Fraction(total, trials)
    mean = total / trials
    if trials > 1:
        var = (sq - trials * mean * mean) / (trials - 1)
        stddev = sqrt(max(var, 0.0))
    else:
        stddev = 0.0
    half = Z99 * stddev / sqrt(trials)
    return McResult(alg, h, dist_name, trials, seed, mean_exact, mean, stddev,
                    (mean - half, mean + half))


# ---------------------------------------------------------------------------
# Exhaustive worst-case scans (small heights)
# ---------------------------------------------------------------------------

def all_inputs(h: int):
    if h > 2:
        raise ValueError("exhaustive input scan supported for h <= 2 only")
    n = 3 ** h
    for code in range(2 ** n):
        yield Input(h, [(code >> j) & 1 for j in range(n)])


def max_expected_evaluate(h: int) -> tuple[Fraction, list[Input]]:
    """Worst-case exact expectation of the two-level evaluator, with the
    maximizing inputs."""
    best = None
    argmax: list[Input] = []
    for inp in all_inputs(h):
        e = exact_expected_queries(AlgorithmId.DEPTH2, inp)
        if best is None or e > best:
            best, argmax = e, [inp]
        elif e == best:
            argmax.append(inp)
    return best, argmax


def max_expected_complete(h: int, minority: bool) -> Fraction:
    """Worst-case exact expectation of the completion subroutine given a
    minority (True) or majority (False) evaluated child."""
    best = None
    for inp in all_inputs(h):
        root = inp.value
        for i in range(3):
            child_val = int(inp.level_values[1][i])
            if (child_val != root) != minority:
                continue
            e = exact_expected_queries(AlgorithmId.DEPTH2, inp, ("complete", i))
            if best is None or e > best:
                best = e
    return best
