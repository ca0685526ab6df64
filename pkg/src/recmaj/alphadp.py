"""Stable-configuration dynamic program for the lower-bound constants.

Everything in this module works over the *negated* ternary majority tree
(a NOT-MAJ gate at every internal node), conditioned on 0-hard inputs.  In
that form a node always has children values (1,1,0) up to order, the unique
minority child carries the node's own value, the minority path is the all-0
chain from the root, and the sensitive leaves are the leaves whose root path
strictly alternates 0,1,0,...  The payoff of querying a leaf is

    2^-k * Pr[leaf is sensitive] - alpha * Pr[leaf is the absolute minority]

and the program maximizes the total expected payoff over adaptive querying
strategies (decision trees) that query at least one variable.  Because the
objective never looks at outputs, a strategy is just a query structure.

Two reductions make k = 4 tractable:

* forced actions: once the root value is determined, stop; a node determined
  to 1 is off the minority path, so reading its whole subtree is free of
  minority risk and weakly optimal; a node determined to 0 pins its siblings
  off the minority path, so their subtrees are read as well.  Configurations
  where no forced action applies and the root is open are *stable*.
* symmetry: a stable configuration is, up to tree automorphism, a multiset
  of stable child configurations of the next height down, optionally with
  one child absorbed (determined to 1 and fully read).  The class counts
  satisfy N_0 = 1, N_k = C(N_{k-1}+1, 2) + C(N_{k-1}+2, 3).

The negated-gate convention is what makes the recursion self-similar: the
restriction of a stable configuration to an undetermined child is directly
a stable configuration one level down, with no dual bookkeeping.  Plain
majority trees of even height have the same 0-hard leaf patterns, minority
leaf, and sensitive set, and odd heights match after a global bit flip, so
all quantities computed here transfer to the plain-majority convention.

All arithmetic is exact: class statistics are integer completion counts,
and each optimization pass runs on integers scaled by 2^k * den(alpha) *
count(class).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement, product
from math import comb
from typing import Callable, Iterator, Optional

MAX_K = 4

_N = 'n'            # three live children
_D = 'd'            # two live children plus one absorbed (determined-1, read)
_LEAF = 'leaf'


def stable_count(k: int) -> int:
    """N_k from the closed recurrence N_k = C(N+1,2) + C(N+2,3), N_0 = 1."""
    n = 1
    for _ in range(k):
        n = comb(n + 1, 2) + comb(n + 2, 3)
    return n


def _hard1_count(height: int) -> int:
    """Count of height-h hard assignments with a fixed root value."""
    return 3 ** ((3 ** height - 1) // 2)


class _Registry:
    """Interned stable classes across heights, with exact statistics.

    Per class: w0/w1 = number of hard completions of the restriction with
    subtree value 0/1; sq0/sq1 = sum over those completions of the number of
    *unqueried* leaves on value-alternating paths from the subtree root
    (the sub-sensitive leaves); unq = unqueried leaves; lab = number of raw
    (labelled) configurations in the automorphism class.
    """

    def __init__(self):
        self.by_key: dict[tuple, int] = {}
        self.kind: list[str] = []
        self.kids: list[tuple[int, ...]] = []
        self.height: list[int] = []
        self.w0: list[int] = []
        self.w1: list[int] = []
        self.sq0: list[int] = []
        self.sq1: list[int] = []
        self.unq: list[int] = []
        self.lab: list[int] = []
        self.leaf = self.intern(0, _LEAF, ())

    def intern(self, height: int, kind: str, kids: tuple[int, ...]) -> int:
        key = (height, kind, kids)
        cid = self.by_key.get(key)
        if cid is not None:
            return cid
        cid = len(self.kind)
        self.by_key[key] = cid
        self.kind.append(kind)
        self.kids.append(kids)
        self.height.append(height)
        if kind == _LEAF:
            w0 = w1 = sq0 = sq1 = unq = lab = 1
        else:
            st = [(self.w0[c], self.w1[c], self.sq0[c], self.sq1[c]) for c in kids]
            if kind == _D:
                st.append((0, 1, 0, 0))
            w0 = self._count(st, 0)
            w1 = self._count(st, 1)
            sq0 = self._sens(st, 0)
            sq1 = self._sens(st, 1)
            unq = sum(self.unq[c] for c in kids)
            lab = self._labelled(height, kind, kids)
        self.w0.append(w0)
        self.w1.append(w1)
        self.sq0.append(sq0)
        self.sq1.append(sq1)
        self.unq.append(unq)
        self.lab.append(lab)
        return cid

    @staticmethod
    def _count(st, b):
        total = 0
        for c in range(3):
            if st[c][b]:
                p = 1
                for o in range(3):
                    if o != c:
                        p *= st[o][1 - b]
                total += st[c][b] * p
        return total

    @staticmethod
    def _sens(st, b):
        total = 0
        for c in range(3):
            if st[c][b]:
                o1, o2 = (o for o in range(3) if o != c)
                total += st[c][b] * (st[o1][2 + 1 - b] * st[o2][1 - b]
                                     + st[o1][1 - b] * st[o2][2 + 1 - b])
        return total

    def _labelled(self, height, kind, kids):
        base = 1
        for c in kids:
            base *= self.lab[c]
        mult = {}
        for c in kids:
            mult[c] = mult.get(c, 0) + 1
        arrangements = 1
        if kind == _N:
            arrangements = 6
            for m in mult.values():
                arrangements //= {1: 1, 2: 2, 3: 6}[m]
        else:
            arrangements = 3 * (1 if len(set(kids)) == 1 else 2)
            base *= _hard1_count(height - 1)
        return arrangements * base

    def key_str(self, cid: int) -> str:
        if self.kind[cid] == _LEAF:
            return "U"
        inner = " ".join(sorted(self.key_str(c) for c in self.kids[cid]))
        return f"({self.kind[cid]} {inner})"


_REG = _Registry()
_LEVELS: list[list[int]] = [[_REG.leaf]]


def _build_levels(k: int) -> list[list[int]]:
    while len(_LEVELS) <= k:
        h = len(_LEVELS)
        prev = sorted(_LEVELS[-1])
        cur = [_REG.intern(h, _N, kk) for kk in combinations_with_replacement(prev, 3)]
        cur += [_REG.intern(h, _D, kk) for kk in combinations_with_replacement(prev, 2)]
        _LEVELS.append(cur)
    return _LEVELS


@lru_cache(maxsize=None)
def _orbits(cid: int) -> tuple[tuple[int, ...], ...]:
    """Unqueried-leaf orbits as chains of child class ids down to the leaf.

    Children with equal canonical keys are interchangeable, so one orbit per
    distinct child class and child-class orbit suffices.
    """
    if _REG.kind[cid] == _LEAF:
        return ((),)
    out = []
    for kid in sorted(set(_REG.kids[cid])):
        out.extend((kid,) + sub for sub in _orbits(kid))
    return tuple(out)


# ---------------------------------------------------------------------------
# One-step transitions.  transition(cid, orbit, b) conditions the subtree
# value on b, queries the orbit's representative leaf, cascades all forced
# actions, and reports exact branch sums:
#   w  = completions of the restriction (with value b) in the branch
#   gq = sum over those completions of sub-sensitive leaves read this step
#   gm = sum of indicators that the sub-minority was read (b = 0 only)
# 'cont' branches land in a stable class; 'det' branches determine the
# subtree value, with (lw, ls) = completion count and unread sub-sensitive
# sum of the leftover (the unread remainder, values pinned).
# ---------------------------------------------------------------------------

_TRANS: dict[tuple[int, tuple[int, ...], int], tuple] = {}


def _transition(cid: int, orb: tuple[int, ...], b: int,
                memo: bool = True) -> tuple:
    key = (cid, orb, b)
    if memo:
        hit = _TRANS.get(key)
        if hit is not None:
            return hit
    kind = _REG.kind[cid]
    if kind == _LEAF:
        res = ((1, 1, 1 if b == 0 else 0, 'det', (1, 0)),)
        if memo:
            _TRANS[key] = res
        return res

    kids = list(_REG.kids[cid])
    height = _REG.height[cid]
    has_abs = kind == _D
    cstar = orb[0]
    others = list(kids)
    others.remove(cstar)
    osibs = [(_REG.w0[o], _REG.w1[o], _REG.sq0[o], _REG.sq1[o]) for o in others]
    if has_abs:
        osibs.append((0, 1, 0, 0))

    acc: dict[tuple, list] = {}

    def emit(w, gq, gm, kd, data):
        if w:
            slot = acc.setdefault((kd, data), [0, 0, 0])
            slot[0] += w
            slot[1] += gq
            slot[2] += gm

    def cont_with(newkid):
        return R_intern(height, kind, tuple(sorted(others + [newkid])))

    def absorb():
        return R_intern(height, _D, tuple(sorted(others)))

    R_intern = _REG.intern
    sub_same = _transition(cstar, orb[1:], b)
    sub_flip = _transition(cstar, orb[1:], 1 - b)

    # case A: cstar is the minority child (value b)
    swa = osibs[0][1 - b] * osibs[1][1 - b]
    if swa:
        for (wc, gqc, gmc, kd, data) in sub_same:
            if kd == 'cont':
                emit(wc * swa, 0, gmc * swa, 'cont', cont_with(data))
            elif b == 0:
                # determined 0: read both siblings (value 1); parent
                # children (0,1,1) determine the parent to 0
                a, bb = osibs
                sib_gq = a[3] * bb[1] + a[1] * bb[3]
                emit(wc * swa, wc * sib_gq, gmc * swa, 'det', (data[0], 0))
            else:
                # determined 1 on the minority slot: read its leftover (no
                # sensitive credit across a minority link) and absorb it
                emit(wc * swa, 0, 0, 'cont', absorb())

    # case B: cstar is a majority child (value 1-b); minority among siblings
    swb = 0
    sib_det_gq = 0
    for j in (0, 1):
        wmin = osibs[j][b]
        if wmin:
            other = osibs[1 - j]
            swb += wmin * other[1 - b]
            sib_det_gq += wmin * other[2 + 1 - b]
    if swb:
        for (wc, gqc, gmc, kd, data) in sub_flip:
            if kd == 'cont':
                emit(wc * swb, gqc * swb, 0, 'cont', cont_with(data))
            elif b == 0:
                # cstar determined to 1: read its leftover, absorb
                lw, ls = data
                gq = (gqc + (wc // lw) * ls) * swb
                if not has_abs:
                    emit(wc * swb, gq, 0, 'cont', absorb())
                else:
                    # second absorbed child: parent determined to 0; the
                    # remaining sibling is pinned to value 0, unread
                    x = others[0]
                    emit(wc * swb, gq, 0, 'det', (_REG.w0[x], 0))
            else:
                # cstar determined to 0 under a value-1 parent: read both
                # siblings (values {0,1}); parent determined to 1, leftover
                # is cstar's unread remainder (still alternation-relevant)
                lw, ls = data
                gq = gqc * swb + wc * sib_det_gq
                emit(wc * swb, gq, 0, 'det', (lw, ls))

    res = tuple((w, gq, gm, kd, data)
                for (kd, data), (w, gq, gm) in sorted(acc.items(), key=repr))
    if memo:
        _TRANS[key] = res
    return res


# ---------------------------------------------------------------------------
# Per-k tables: classes in evaluation order plus per-action summaries
# ---------------------------------------------------------------------------

@dataclass
class _ClassTable:
    k: int
    order: list[int]                       # class ids, most-queried first
    root: int                              # the all-unqueried class id
    actions: dict[int, list]               # cid -> [(GQ, GM, ((succ, m), ...)), ...]
    orbit_lists: dict[int, tuple]          # cid -> orbit descriptors


_TABLES: dict[int, _ClassTable] = {}


def _class_table(k: int, progress: Optional[Callable[[str], None]] = None) -> _ClassTable:
    if k in _TABLES:
        return _TABLES[k]
    if not 1 <= k <= MAX_K:
        raise ValueError(f"supported range is 1 <= k <= {MAX_K}")
    levels = _build_levels(k)
    if progress:
        for h in range(1, k + 1):
            progress(f"height {h}: {len(levels[h])} stable classes")
    top = sorted(levels[k], key=lambda c: _REG.unq[c])
    root = top[-1]
    assert _REG.unq[root] == 3 ** k
    actions: dict[int, list] = {}
    orbit_lists: dict[int, tuple] = {}
    done = 0
    for cid in top:
        orbs = _orbits(cid)
        orbit_lists[cid] = orbs
        rows = []
        for orb in orbs:
            gq_tot = gm_tot = 0
            cont: dict[int, int] = {}
            # top-level transitions are not memoized (they are used once)
            for (w, gq, gm, kd, data) in _transition(cid, orb, 0,
                                                     memo=_REG.height[cid] < k):
                gq_tot += gq
                gm_tot += gm
                if kd == 'cont':
                    m, rem = divmod(w, _REG.w0[data])
                    assert rem == 0, "branch weight must be a multiple of the successor count"
                    cont[data] = cont.get(data, 0) + m
            rows.append((gq_tot, gm_tot, tuple(sorted(cont.items()))))
        actions[cid] = rows
        done += 1
        if progress and done % 50000 == 0:
            progress(f"height {k}: prepared {done}/{len(top)} classes")
    table = _ClassTable(k, top, root, actions, orbit_lists)
    _TABLES[k] = table
    return table


@dataclass(frozen=True)
class CanonicalClass:
    """A stable class: canonical key, orbit size, and completion counts."""

    key: str
    height: int
    member_count: int          # raw configurations in the automorphism orbit
    completions: int           # consistent 0-hard completions (value 0)
    completions_one: int       # hard completions with subtree value 1
    unqueried: int


def enumerate_stable(k: int) -> list[CanonicalClass]:
    """All stable classes at height k; the count matches stable_count(k)."""
    if not 0 <= k <= MAX_K:
        raise ValueError(f"supported range is 0 <= k <= {MAX_K}")
    levels = _build_levels(max(k, 1))
    out = [CanonicalClass(_REG.key_str(c), k, _REG.lab[c], _REG.w0[c],
                          _REG.w1[c], _REG.unq[c])
           for c in levels[k]]
    assert len(out) == stable_count(k)
    return out


@dataclass(frozen=True)
class DPEntry:
    """Optimal play from one stable class: conditional future statistics."""

    key: str
    rho: Fraction              # optimal future payoff (0 when stopping)
    p_q: Fraction              # expected sensitive bits queried from here on
    p_m: Fraction              # probability of querying the absolute minority
    action: Optional[str]      # orbit chain of the chosen query, None = stop


@dataclass
class DpResult:
    k: int
    alpha: Fraction
    max_rho: Fraction          # over strategies querying at least one leaf
    pi_q: Fraction             # statistics of the optimizer at the root
    pi_m: Fraction
    n_classes: int
    _table: _ClassTable = field(repr=False)
    _iv: dict = field(repr=False)
    _pq: dict = field(repr=False)
    _pm: dict = field(repr=False)
    _act: dict = field(repr=False)

    def entry(self, key: str) -> DPEntry:
        for cid in self._table.order:
            if _REG.key_str(cid) == key:
                return self._entry(cid)
        raise KeyError(key)

    def entries(self) -> Iterator[DPEntry]:
        for cid in self._table.order:
            yield self._entry(cid)

    def _entry(self, cid: int) -> DPEntry:
        w = _REG.w0[cid]
        scale = 2 ** self.k * self.alpha.denominator * w
        act = self._act[cid]
        action = None
        if act is not None:
            orb = self._table.orbit_lists[cid][act]
            action = " -> ".join(_REG.key_str(c) for c in orb) or "leaf"
        return DPEntry(_REG.key_str(cid), Fraction(self._iv[cid], scale),
                       Fraction(self._pq[cid], w), Fraction(self._pm[cid], w),
                       action)


def dp_optimize(k: int, alpha, progress: Optional[Callable[[str], None]] = None) -> DpResult:
    """Maximize rho_alpha over strategies querying at least one variable.

    Returns the exact maximum and the (pi_q, pi_m) statistics of the chosen
    optimizer.  Ties prefer stopping, then the first orbit in canonical
    order.  Classes are processed most-queried first, so every successor is
    already solved when needed.
    """
    alpha = Fraction(alpha)
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    table = _class_table(k, progress)
    p, q = alpha.numerator, alpha.denominator
    twok = 2 ** k
    iv: dict[int, int] = {}
    pq: dict[int, int] = {}
    pm: dict[int, int] = {}
    act: dict[int, Optional[int]] = {}
    for cid in table.order:
        best = None
        best_idx = None
        for idx, (gq, gm, cont) in enumerate(table.actions[cid]):
            val = q * gq - twok * p * gm
            pqv = gq
            pmv = gm
            for succ, m in cont:
                val += m * iv[succ]
                pqv += m * pq[succ]
                pmv += m * pm[succ]
            if best is None or val > best[0]:
                best = (val, pqv, pmv)
                best_idx = idx
        if cid != table.root and best[0] <= 0:
            iv[cid], pq[cid], pm[cid], act[cid] = 0, 0, 0, None
        else:
            iv[cid], pq[cid], pm[cid] = best
            act[cid] = best_idx
    root = table.root
    w0 = _REG.w0[root]
    max_rho = Fraction(iv[root], twok * q * w0)
    return DpResult(k, alpha, max_rho, Fraction(pq[root], w0), Fraction(pm[root], w0),
                    len(table.order), table, iv, pq, pm, act)


@dataclass(frozen=True)
class AlphaResult:
    k: int
    alpha: Fraction
    n_k: int
    iterations: tuple[Fraction, ...]   # successive estimates, last = alpha
    elapsed_s: float
    flagged: bool                      # True if more than 10 rounds were needed


def alpha(k: int, progress: Optional[Callable[[str], None]] = None,
          max_rounds: int = 50) -> AlphaResult:
    """Exact alpha_k by iterated optimization.

    Start at alpha = 0; while the maximum of rho_alpha is positive, replace
    alpha by pi_q / (2^k * pi_m) of the optimizer.  Each round strictly
    increases alpha and stays below alpha_k, and the loop ends exactly when
    the maximum hits zero.
    """
    t0 = time.monotonic()
    est = Fraction(0)
    trace: list[Fraction] = []
    for rounds in range(1, max_rounds + 1):
        if progress:
            progress(f"optimizing at alpha = {est}")
        res = dp_optimize(k, est, progress if rounds == 1 else None)
        if res.max_rho == 0:
            return AlphaResult(k, est, res.n_classes, tuple(trace),
                               time.monotonic() - t0, rounds > 10)
        assert res.max_rho > 0, "maximum must not drop below zero at alpha <= alpha_k"
        assert res.pi_m > 0
        est = res.pi_q / (2 ** k * res.pi_m)
        trace.append(est)
    raise RuntimeError(f"no fixed point within {max_rounds} rounds")


# ---------------------------------------------------------------------------
# Explicit-configuration layer (reference implementation, k <= 2).
#
# Everything below re-derives the same objects directly from leaf-state
# vectors and exhaustive completion sets, without the class machinery.  The
# tests hold the two implementations against each other.
# ---------------------------------------------------------------------------

def _notmaj_value(bits, k):
    level = list(bits)
    for _ in range(k):
        level = [1 - (level[i] + level[i + 1] + level[i + 2] >= 2)
                 for i in range(0, len(level), 3)]
    return level[0]


def _notmaj_hard(bits, k):
    level = list(bits)
    for _ in range(k):
        nxt = []
        for i in range(0, len(level), 3):
            a, b, c = level[i:i + 3]
            if a == b == c:
                return False
            nxt.append(1 - (a + b + c >= 2))
        level = nxt
    return True


@lru_cache(maxsize=None)
def _hard0_completions(k: int) -> tuple[tuple[int, ...], ...]:
    return tuple(bits for bits in product((0, 1), repeat=3 ** k)
                 if _notmaj_hard(bits, k) and _notmaj_value(bits, k) == 0)


def _minority_leaf(bits, k):
    lo, hi, h = 0, 3 ** k, k
    while h > 0:
        w = (hi - lo) // 3
        vals = [_notmaj_value(bits[lo + i * w: lo + (i + 1) * w], h - 1)
                for i in range(3)]
        parent = 1 - (sum(vals) >= 2)
        i = vals.index(parent)
        lo, hi, h = lo + i * w, lo + (i + 1) * w, h - 1
    return lo


def _sensitive_leaves(bits, k):
    out = set()

    def rec(lo, hi, h, want):
        if h == 0:
            out.add(lo)
            return
        w = (hi - lo) // 3
        for i in range(3):
            if _notmaj_value(bits[lo + i * w: lo + (i + 1) * w], h - 1) == 1 - want:
                rec(lo + i * w, lo + (i + 1) * w, h - 1, 1 - want)

    rec(0, 3 ** k, k, _notmaj_value(bits, k))
    return frozenset(out)


@dataclass(frozen=True)
class Configuration:
    """Partial assignment to the 3^k leaves of a height-k subinstance,
    negated-majority convention; states are None (unqueried), 0, or 1."""

    height: int
    states: tuple[Optional[int], ...]

    def __post_init__(self):
        if len(self.states) != 3 ** self.height:
            raise ValueError("state vector length must be 3^height")
        if self.height > 2:
            raise ValueError("the explicit layer supports k <= 2 only")

    def completions(self) -> list[tuple[int, ...]]:
        return [bits for bits in _hard0_completions(self.height)
                if all(s is None or s == bits[i] for i, s in enumerate(self.states))]

    def is_consistent(self) -> bool:
        return bool(self.completions())

    def _subtree_counts(self, lo: int, h: int) -> tuple[int, int]:
        """Local hard-completion counts (value 0, value 1) of one subtree."""
        if h == 0:
            s = self.states[lo]
            if s is None:
                return 1, 1
            return (1, 0) if s == 0 else (0, 1)
        w = 3 ** (h - 1)
        kid = [self._subtree_counts(lo + i * w, h - 1) for i in range(3)]
        out = []
        for b in (0, 1):
            tot = 0
            for c in range(3):
                p = kid[c][b]
                for o in range(3):
                    if o != c:
                        p *= kid[o][1 - b]
                tot += p
            out.append(tot)
        return out[0], out[1]

    def _forced_reads(self) -> set[int]:
        """Leaves a forced action would read right now (0-based)."""
        n = 3 ** self.height
        targets: set[int] = set()
        w0, w1 = self._subtree_counts(0, self.height)
        if w1 == 0:
            return targets      # root determined: stop, read nothing
        nodes = [(0, self.height)]
        idx = 0
        while idx < len(nodes):
            lo, h = nodes[idx]
            idx += 1
            if h == 0:
                continue
            w = 3 ** (h - 1)
            for i in range(3):
                nodes.append((lo + i * w, h - 1))
        for lo, h in nodes:
            if h == self.height:
                continue
            w = 3 ** h
            c0, c1 = self._subtree_counts(lo, h)
            span = set(range(lo, lo + w))
            unread = {i for i in span if self.states[i] is None}
            if c0 == 0 and unread:
                targets |= unread                      # determined to 1
            if c1 == 0:
                parent_lo = (lo // (3 * w)) * 3 * w    # determined to 0
                for j in range(3):
                    s_lo = parent_lo + j * w
                    if s_lo != lo:
                        targets |= {i for i in range(s_lo, s_lo + w)
                                    if self.states[i] is None}
        return targets

    def is_stable(self) -> bool:
        if not self.is_consistent():
            return False
        w0, w1 = self._subtree_counts(0, self.height)
        return w1 > 0 and not self._forced_reads()

    def class_key(self) -> str:
        """Canonical key of a stable configuration."""
        if not self.is_stable():
            raise ValueError("configuration is not stable")

        def key(lo, h):
            if h == 0:
                s = self.states[lo]
                return "U" if s is None else f"={s}"
            w = 3 ** (h - 1)
            c0c1 = [self._subtree_counts(lo + i * w, h - 1) for i in range(3)]
            live = []
            absorbed = 0
            for i in range(3):
                if c0c1[i][0] == 0:        # determined to 1, fully read
                    absorbed += 1
                else:
                    live.append(key(lo + i * w, h - 1))
            if absorbed:
                assert absorbed == 1
                return f"(d {' '.join(sorted(live))})"
            return f"(n {' '.join(sorted(live))})"

        return key(0, self.height)


@dataclass(frozen=True)
class ResolveResult:
    """Outcome of cascading the forced actions from a configuration."""

    outcomes: tuple[tuple[Fraction, object], ...]   # (weight, cfg or 'determined')
    delta_pq: Fraction     # expected sensitive bits read by forced actions
    delta_pm: Fraction     # expected minority reads (always zero)


def resolve(config: Configuration) -> ResolveResult:
    """Apply forced actions until stable or determined (reference path).

    Forced reads branch on the values revealed; outcomes are weighted by
    conditional 0-hard completion counts.  The expected sensitive-bit
    contribution of the forced reads is accumulated; the absolute minority
    is never read by a forced action, and that is asserted.
    """
    if not config.is_consistent():
        raise ValueError("configuration admits no 0-hard completion")
    k = config.height
    base = config.completions()
    total = len(base)
    outcomes: list[tuple[Fraction, object]] = []
    dpq = Fraction(0)
    dpm = Fraction(0)
    stack = [(config, base)]
    while stack:
        cfg, cons = stack.pop()
        w0, w1 = cfg._subtree_counts(0, k)
        if w1 == 0:
            outcomes.append((Fraction(len(cons), total), 'determined'))
            continue
        reads = cfg._forced_reads()
        if not reads:
            outcomes.append((Fraction(len(cons), total), cfg))
            continue
        weight = Fraction(len(cons), total)
        for x in cons:
            sens = _sensitive_leaves(x, k)
            mino = _minority_leaf(x, k)
            dpq += Fraction(len(reads & sens), total)
            dpm += Fraction(1 if mino in reads else 0, total)
        groups: dict[tuple, list] = {}
        for x in cons:
            groups.setdefault(tuple(x[i] for i in sorted(reads)), []).append(x)
        for pattern, sub in groups.items():
            states = list(cfg.states)
            for i, v in zip(sorted(reads), pattern):
                states[i] = v
            stack.append((Configuration(k, tuple(states)), sub))
    assert dpm == 0, "forced actions must never read the absolute minority"
    return ResolveResult(tuple(outcomes), dpq, dpm)


def reference_max_rho(k: int, alpha) -> Fraction:
    """Brute-force maximum of rho_alpha over all strategies (k <= 2).

    Plain value iteration over raw configurations with exhaustively computed
    conditional probabilities; no stability or symmetry reductions.  Used to
    validate dp_optimize.
    """
    if k > 2:
        raise ValueError("reference computation supported for k <= 2 only")
    alpha = Fraction(alpha)
    H = _hard0_completions(k)
    n = 3 ** k
    mins = {x: _minority_leaf(x, k) for x in H}
    sens = {x: _sensitive_leaves(x, k) for x in H}
    invk = Fraction(1, 2 ** k)

    @lru_cache(maxsize=None)
    def value(cfg: tuple, must_query: bool = False) -> Fraction:
        cons = [x for x in H if all(c is None or x[i] == c for i, c in enumerate(cfg))]
        W = len(cons)
        best = None if must_query else Fraction(0)
        for leaf in range(n):
            if cfg[leaf] is not None:
                continue
            ps = sum(1 for x in cons if leaf in sens[x])
            pmc = sum(1 for x in cons if mins[x] == leaf)
            tot = invk * Fraction(ps, W) - alpha * Fraction(pmc, W)
            for a in (0, 1):
                cnt = sum(1 for x in cons if x[leaf] == a)
                if cnt:
                    nxt = list(cfg)
                    nxt[leaf] = a
                    tot += Fraction(cnt, W) * value(tuple(nxt))
            if best is None or tot > best:
                best = tot
        return best

    return value(tuple([None] * n), must_query=True)
