"""Brute-force oracles: explicit decision trees over small hard-input sets.

These are the independent anchors for the dynamic program in `alphadp`:

* complete enumeration of the query structures on 3 variables (244 of them),
* exhaustive evaluation of rho_alpha(C) = 2^-k * pi_q(C) - alpha * pi_m(C)
  for explicit trees C over the 0-hard inputs of height k <= 2, where pi_q
  is the expected number of sensitive bits queried and pi_m the probability
  of querying the absolute minority,
* the ratio check behind the one-level argument (every 3-variable tree
  queries the encoded source position at most twice as often as the
  minority), and
* two hard-coded 9-variable trees: the rule-built optimizer C' with
  rho_alpha(C') = (48 - 14*alpha)/81, and the simpler anchor C0 whose rho
  vanishes at alpha = 3.

Trees carry no output labels: the objective depends only on which leaves
get queried.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional

from .formula import HardInput, Input, enumerate_hard

STOP = None


@dataclass(frozen=True)
class QueryNode:
    """Query a 1-based leaf; continue on `on_zero` / `on_one` (STOP = None)."""

    leaf: int
    on_zero: Optional["QueryNode"]
    on_one: Optional["QueryNode"]


ExplicitTree = Optional[QueryNode]


def tree_queries(tree: ExplicitTree, bits: Input) -> frozenset[int]:
    """Set of 1-based leaves queried when running the tree on an input."""
    seen = []
    node = tree
    while node is not None:
        if not 1 <= node.leaf <= bits.bits.size:
            raise ValueError(f"tree queries leaf {node.leaf} outside the input")
        if node.leaf in seen:
            raise ValueError(f"leaf {node.leaf} queried twice on one path")
        seen.append(node.leaf)
        node = node.on_one if bits.leaf(node.leaf) else node.on_zero
    return frozenset(seen)


def validate_no_repeats(tree: ExplicitTree, seen: frozenset[int] = frozenset()) -> None:
    if tree is None:
        return
    if tree.leaf in seen:
        raise ValueError(f"leaf {tree.leaf} repeats on a root path")
    nxt = seen | {tree.leaf}
    validate_no_repeats(tree.on_zero, nxt)
    validate_no_repeats(tree.on_one, nxt)


def format_tree(tree: ExplicitTree) -> str:
    """S-expression form, e.g. `(q 1 (q 2 STOP STOP) STOP)`."""
    if tree is None:
        return "STOP"
    return f"(q {tree.leaf} {format_tree(tree.on_zero)} {format_tree(tree.on_one)})"


def parse_tree(text: str) -> ExplicitTree:
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def parse() -> ExplicitTree:
        nonlocal pos
        tok = tokens[pos]
        if tok == "STOP":
            pos += 1
            return STOP
        if tok != "(":
            raise ValueError(f"unexpected token {tok!r}")
        if tokens[pos + 1] != "q":
            raise ValueError("expected (q leaf zero one)")
        leaf = int(tokens[pos + 2])
        pos += 3
        on_zero = parse()
        on_one = parse()
        if tokens[pos] != ")":
            raise ValueError("missing )")
        pos += 1
        return QueryNode(leaf, on_zero, on_one)

    tree = parse()
    if pos != len(tokens):
        raise ValueError("trailing tokens")
    return tree


# ---------------------------------------------------------------------------
# Exhaustive enumeration on 3 variables
# ---------------------------------------------------------------------------

#: 1 + sum_v trees(S-v)^2 over S = {1,2,3} gives 244; frozen golden value
TREE_COUNT_3VARS = 244


def enumerate_trees_k1() -> list[ExplicitTree]:
    """Every query structure on leaves {1,2,3} without repeats on a path."""

    def build(avail: frozenset[int]) -> list[ExplicitTree]:
        out: list[ExplicitTree] = [STOP]
        for v in sorted(avail):
            subs = build(avail - {v})
            out.extend(QueryNode(v, t0, t1) for t0 in subs for t1 in subs)
        return out

    trees = build(frozenset({1, 2, 3}))
    assert len(trees) == TREE_COUNT_3VARS
    return trees


@lru_cache(maxsize=None)
def _hard0(k: int) -> tuple[HardInput, ...]:
    return tuple(x for x in enumerate_hard(k, root_value=0))


def rho_exhaustive(tree: ExplicitTree, k: int,
                   alpha: Fraction) -> tuple[Fraction, Fraction, Fraction]:
    """(rho_alpha, pi_q, pi_m) of an explicit tree, averaged exactly over the
    0-hard inputs of height k (k <= 2)."""
    if k > 2:
        raise ValueError("exhaustive evaluation supported for k <= 2 only")
    inputs = _hard0(k)
    q_total = Fraction(0)
    m_hits = 0
    for x in inputs:
        queried = tree_queries(tree, x.input)
        q_total += len(queried & x.sensitive_bits)
        if x.absolute_minority in queried:
            m_hits += 1
    n = len(inputs)
    pi_q = q_total / n
    pi_m = Fraction(m_hits, n)
    return Fraction(1, 2 ** k) * pi_q - Fraction(alpha) * pi_m, pi_q, pi_m


def max_rho_over_trees_k1(alpha: Fraction) -> Fraction:
    """Max of rho_alpha over all 3-variable trees that query at least once."""
    best = None
    for tree in enumerate_trees_k1():
        if tree is None:
            continue
        rho, _, _ = rho_exhaustive(tree, 1, alpha)
        if best is None or rho > best:
            best = rho
    return best


# ---------------------------------------------------------------------------
# One-level ratio check.  The one-level gadget used here is
#     0 -> 001 (source at slot 1), 0 -> 100 (slot 2), 0 -> 010 (slot 3)
# i.e. c(y,1) = y 0 1, c(y,2) = 1 y 0, c(y,3) = 0 1 y evaluated at y = 0.
# For each 0-hard triple x it pins the unique source slot r1(x).
# ---------------------------------------------------------------------------

#: bits -> 1-based source position under the one-level gadget above
ONE_LEVEL_SOURCE_SLOT = {
    (0, 0, 1): 1,
    (1, 0, 0): 2,
    (0, 1, 0): 3,
}


def check_one_level_ratio() -> tuple[Fraction, list[tuple[str, Fraction]]]:
    """For every 3-variable tree, compare the probability of querying the
    encoded source slot against twice the probability of querying the
    minority, over the three 0-hard triples.

    Returns (max ratio over querying trees, offenders) where offenders lists
    trees whose source probability exceeds twice the minority probability
    (must be empty; the max ratio is exactly 2).
    """
    inputs = _hard0(1)
    offenders = []
    max_ratio = None
    for tree in enumerate_trees_k1():
        if tree is None:
            continue
        src = 0
        mino = 0
        for x in inputs:
            queried = tree_queries(tree, x.input)
            if ONE_LEVEL_SOURCE_SLOT[tuple(x.input.bits)] in queried:
                src += 1
            if x.absolute_minority in queried:
                mino += 1
        if src > 2 * mino:
            offenders.append((format_tree(tree), Fraction(src, max(mino, 1))))
        if mino:
            ratio = Fraction(src, mino)
            if max_ratio is None or ratio > max_ratio:
                max_ratio = ratio
    return max_ratio, offenders


# ---------------------------------------------------------------------------
# The 9-variable anchor trees.
#
# C' follows the optimal-play rules for 0-hard height-2 inputs with
# smallest-index tie-breaking.  Clauses are the leaf triples; a clause is
# determined once two equal bits are read.  Rules, in firing order:
#   stop when two clauses are determined to 0 (the root is then determined);
#   if a clause is determined to 1, read everything outside it;
#   if a clause contains a read 0 and is undetermined, finish that clause;
#   otherwise act per the stable-position table: with a determined majority
#   clause, stop; with three/two/one singleton-1 clauses, read an untouched
#   clause if one exists, else any unread bit; from nothing, read x1.
# ---------------------------------------------------------------------------

_CLAUSES = ((1, 2, 3), (4, 5, 6), (7, 8, 9))


def _clause_state(cfg: dict[int, int], clause) -> tuple[int, int, int]:
    zeros = sum(1 for v in clause if cfg.get(v) == 0)
    ones = sum(1 for v in clause if cfg.get(v) == 1)
    unread = sum(1 for v in clause if v not in cfg)
    return zeros, ones, unread


def _c_prime_action(cfg: dict[int, int]) -> Optional[int]:
    """Next leaf to query under the C' rules, or None to stop."""
    states = [_clause_state(cfg, cl) for cl in _CLAUSES]
    det0 = [i for i, (z, o, u) in enumerate(states) if z >= 2]
    det1 = [i for i, (z, o, u) in enumerate(states) if o >= 2]
    if len(det0) >= 2:
        return None
    for i in det1:
        for j, cl in enumerate(_CLAUSES):
            if j != i:
                for v in cl:
                    if v not in cfg:
                        return v
    for i, cl in enumerate(_CLAUSES):
        z, o, u = states[i]
        if z >= 1 and u >= 1 and z < 2 and o < 2:
            return next(v for v in cl if v not in cfg)
    # stable positions
    if det0:
        return None
    untouched = [i for i, (z, o, u) in enumerate(states) if u == 3]
    for i in untouched:
        if any(states[j][1] == 1 for j in range(3) if j != i):
            return _CLAUSES[i][0]
    if not untouched or len(untouched) == 3:
        for v in range(1, 10):
            if v not in cfg:
                return v
    return _CLAUSES[untouched[0]][0]


def _expand(action, cfg: dict[int, int], consistent) -> ExplicitTree:
    """Grow a tree from a rule engine, stopping on branches no 0-hard input
    reaches."""
    if not consistent(cfg):
        return STOP
    leaf = action(cfg)
    if leaf is None:
        return STOP
    lo = dict(cfg)
    lo[leaf] = 0
    hi = dict(cfg)
    hi[leaf] = 1
    return QueryNode(leaf, _expand(action, lo, consistent), _expand(action, hi, consistent))


@lru_cache(maxsize=1)
def build_c_prime() -> ExplicitTree:
    inputs = _hard0(2)

    def consistent(cfg):
        return any(all(x.input.leaf(v) == b for v, b in cfg.items()) for x in inputs)

    tree = _expand(_c_prime_action, {}, consistent)
    validate_no_repeats(tree)
    return tree


def _c_zero_action(cfg: dict[int, int]) -> Optional[int]:
    """Query x1; stop if it is 1; else finish the first clause; stop if its
    majority is 0; else read everything."""
    if 1 not in cfg:
        return 1
    if cfg[1] == 1:
        return None
    for v in (2, 3):
        if v not in cfg:
            return v
    if sum(cfg[v] for v in (1, 2, 3)) < 2:
        return None
    for v in range(4, 10):
        if v not in cfg:
            return v
    return None


@lru_cache(maxsize=1)
def build_c_zero() -> ExplicitTree:
    inputs = _hard0(2)

    def consistent(cfg):
        return any(all(x.input.leaf(v) == b for v, b in cfg.items()) for x in inputs)

    tree = _expand(_c_zero_action, {}, consistent)
    validate_no_repeats(tree)
    return tree
