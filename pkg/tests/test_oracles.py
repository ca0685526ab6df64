"""Explicit-tree oracles: enumeration, exhaustive payoff, anchor trees."""

from fractions import Fraction as F

import pytest

from recmaj.alphadp import dp_optimize
from recmaj.formula import Input
from recmaj.oracles import (
    STOP, QueryNode, TREE_COUNT_3VARS, build_c_prime, build_c_zero,
    check_one_level_ratio, enumerate_trees_k1, format_tree,
    max_rho_over_trees_k1, parse_tree, rho_exhaustive, tree_queries,
    validate_no_repeats,
)


def test_enumeration_count_golden():
    trees = enumerate_trees_k1()
    # golden value from trees(S) = 1 + sum_v trees(S - v)^2:
    # 1 var -> 2, 2 vars -> 9, 3 vars -> 1 + 3 * 81 = 244
    assert len(trees) == TREE_COUNT_3VARS == 244
    assert STOP in trees
    for t in trees:
        validate_no_repeats(t)


def test_equality_tree_present():
    # query x1; stop on 0; on 1 query x2 and stop
    target = parse_tree("(q 1 STOP (q 2 STOP STOP))")
    assert target in enumerate_trees_k1()


def test_sexpr_roundtrip():
    text = "(q 1 (q 2 STOP STOP) STOP)"
    assert format_tree(parse_tree(text)) == text
    assert format_tree(STOP) == "STOP"
    with pytest.raises(ValueError):
        parse_tree("(q 1 STOP)")


def test_tree_queries_errors():
    bad = QueryNode(4, STOP, STOP)
    with pytest.raises(ValueError):
        tree_queries(bad, Input.from_string("010"))
    repeat = QueryNode(1, QueryNode(1, STOP, STOP), STOP)
    with pytest.raises(ValueError):
        validate_no_repeats(repeat)


def test_rho_stop_is_zero():
    rho, pq, pm = rho_exhaustive(STOP, 1, F(1))
    assert rho == pq == pm == 0


def test_rho_rejects_large_k():
    with pytest.raises(ValueError):
        rho_exhaustive(STOP, 3, F(1))


@pytest.mark.parametrize("alpha", [F(0), F(1), F(3), F(24, 7), F(7, 2)])
def test_c_prime_payoff_is_linear(alpha):
    rho, pi_q, pi_m = rho_exhaustive(build_c_prime(), 2, alpha)
    assert rho == F(48 - 14 * alpha, 81)
    assert pi_q == F(64, 27) and pi_m == F(14, 81)


def test_c_prime_specifics():
    tree = build_c_prime()
    assert tree.leaf == 1
    assert rho_exhaustive(tree, 2, F(3))[0] == F(2, 27)
    assert rho_exhaustive(tree, 2, F(24, 7))[0] == 0


def test_c_zero_ratio_three():
    tree = build_c_zero()
    assert tree.leaf == 1
    rho, pi_q, pi_m = rho_exhaustive(tree, 2, F(3))
    assert rho == 0 and pi_m > 0
    # ratio pi_q / (2^k * pi_m) is exactly 3
    assert pi_q / (4 * pi_m) == 3


def test_one_level_ratio():
    max_ratio, offenders = check_one_level_ratio()
    assert offenders == []
    assert max_ratio == 2


def test_equality_tree_attains_ratio_two():
    # query x1; stop on 0; on 1 query x2: the source slot is hit twice as
    # often as the minority, so the one-level bound is tight
    tree = parse_tree("(q 1 STOP (q 2 STOP STOP))")
    hits_src = hits_min = 0
    from recmaj.oracles import ONE_LEVEL_SOURCE_SLOT, _hard0
    for x in _hard0(1):
        q = tree_queries(tree, x.input)
        hits_src += ONE_LEVEL_SOURCE_SLOT[tuple(x.input.bits)] in q
        hits_min += x.absolute_minority in q
    assert hits_src == 2 * hits_min == 2


def test_one_query_tree_ratio_one():
    # query x1 and stop: source slot hit only on 001 (count 1),
    # minority hit only on 100 (count 1)
    tree = parse_tree("(q 1 STOP STOP)")
    hits_src = hits_min = 0
    from recmaj.oracles import ONE_LEVEL_SOURCE_SLOT, _hard0
    for x in _hard0(1):
        q = tree_queries(tree, x.input)
        hits_src += ONE_LEVEL_SOURCE_SLOT[tuple(x.input.bits)] in q
        hits_min += x.absolute_minority in q
    assert hits_src == hits_min == 1


@pytest.mark.parametrize("alpha", [F(0), F(1), F(3, 2), F(2), F(3)])
def test_k1_tree_max_equals_program(alpha):
    assert max_rho_over_trees_k1(alpha) == dp_optimize(1, alpha).max_rho


@pytest.mark.parametrize("alpha", [F(0), F(2), F(3), F(16, 5), F(24, 7)])
def test_program_dominates_c_prime(alpha):
    rho_cp = rho_exhaustive(build_c_prime(), 2, alpha)[0]
    best = dp_optimize(2, alpha).max_rho
    assert best >= rho_cp
    if F(3) <= alpha <= F(24, 7):
        assert best == rho_cp
