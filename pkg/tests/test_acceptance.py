"""Acceptance gate: every criterion at its stated tolerance.

Each test prints one [PASS]/[FAIL] line in the terminal summary (see
conftest).  Exact values are asserted with rational equality; stochastic
checks use 3-sigma intervals around independently computed expectations.
"""

import json
import time
from fractions import Fraction as F

import numpy as np
import pytest

from conftest import record_criterion
from recmaj import algorithms, alphadp, cli, formula, oracles, recurrence

ALPHA_EXPECTED = {1: F(2), 2: F(24, 7), 3: F(12231, 2203),
                  4: F(2027349, 216164)}
N_EXPECTED = {1: 2, 2: 7, 3: 112, 4: 246792}


def check(label: str, ok: bool, detail: str) -> None:
    record_criterion(label, ok, detail)
    assert ok, f"criterion {label}: {detail}"


def run_alpha_cli(k: int, tmp_path) -> dict:
    out = tmp_path / f"alpha{k}.json"
    code = cli.main(["alpha", "--k", str(k), "--out", str(out)])
    assert code == 0
    return json.loads(out.read_text())


# criterion 1: exact alpha constants ----------------------------------------

def test_criterion_01_alpha_k123(tmp_path):
    t0 = time.monotonic()
    got = {k: run_alpha_cli(k, tmp_path) for k in (1, 2, 3)}
    elapsed = time.monotonic() - t0
    ok = all(F(got[k]["alpha"]) == ALPHA_EXPECTED[k] for k in (1, 2, 3))
    ok &= elapsed < 10
    check("01a", ok,
          f"alpha_1..3 = {[got[k]['alpha'] for k in (1, 2, 3)]} "
          f"exact, {elapsed:.1f}s (< 10s)")


@pytest.mark.slow
def test_criterion_01_alpha_k4(tmp_path):
    t0 = time.monotonic()
    got = run_alpha_cli(4, tmp_path)
    elapsed = time.monotonic() - t0
    ok = F(got["alpha"]) == ALPHA_EXPECTED[4] and elapsed < 1800
    check("01b", ok, f"alpha_4 = {got['alpha']} exact, "
                     f"{elapsed:.0f}s (< 1800s), n_4 = {got['n_k']}")


# criterion 2: stable class counts ------------------------------------------

def test_criterion_02_class_counts():
    counted = {k: len(alphadp.enumerate_stable(k)) for k in (1, 2, 3, 4)}
    closed = {k: alphadp.stable_count(k) for k in (1, 2, 3, 4)}
    ok = counted == N_EXPECTED and closed == N_EXPECTED
    check("02", ok, f"N_1..4 = {[counted[k] for k in (1, 2, 3, 4)]} "
                    f"(enumerated) and closed recurrence agrees")


# criterion 3: k=1 oracle equivalence ---------------------------------------

def test_criterion_03_k1_equivalence():
    t0 = time.monotonic()
    alphas = (F(0), F(1), F(3, 2), F(2), F(3))
    agree = all(oracles.max_rho_over_trees_k1(a) == alphadp.dp_optimize(1, a).max_rho
                for a in alphas)
    ratio, offenders = oracles.check_one_level_ratio()
    elapsed = time.monotonic() - t0
    ok = agree and not offenders and ratio == 2 and elapsed < 5
    check("03", ok, f"tree max == program for {len(alphas)} alphas; "
                    f"ratio sup = {ratio}; {elapsed:.1f}s (< 5s)")


# criterion 4: the 9-variable anchor tree -----------------------------------

def test_criterion_04_anchor_tree():
    t0 = time.monotonic()
    tree = oracles.build_c_prime()
    linear = all(oracles.rho_exhaustive(tree, 2, a)[0] == F(48 - 14 * a, 81)
                 for a in (F(0), F(1), F(3), F(24, 7), F(4)))
    vanishes = oracles.rho_exhaustive(tree, 2, F(24, 7))[0] == 0
    elapsed = time.monotonic() - t0
    ok = linear and vanishes and elapsed < 1
    check("04", ok, f"rho(C') = (48-14a)/81 over all 81 inputs, zero at 24/7; "
                    f"{elapsed:.2f}s (< 1s)")


# criterion 5: certified lower-bound bases ----------------------------------

def test_criterion_05_bound_bases():
    # the k=4 base is ~2.5714304; certifying strictness over 2.57143 needs
    # eight digits, which still satisfies the width <= 1e-6 requirement
    b4 = recurrence.lower_bound(4, ALPHA_EXPECTED[4], F(0), 1, digits=8)
    b2 = recurrence.lower_bound(2, ALPHA_EXPECTED[2], F(0), 1, digits=6)
    b1 = recurrence.lower_bound(1, ALPHA_EXPECTED[1], F(0), 1, digits=6)
    tol = F(1, 10 ** 6)
    ok = (b4.base_lo > F(257143, 100000) and b4.base_width <= tol
          and b2.base_lo > F(254006, 100000) and b2.base_width <= tol
          and b1.base_lo == F(5, 2) and b1.base_width <= tol)
    check("05", ok,
          f"bases: k=4 > 2.57143, k=2 > 2.54006, k=1 = 5/2 exactly; "
          f"widths <= 1e-6")


# criterion 6: recurrence table ---------------------------------------------

def test_criterion_06_recurrence_table():
    t0 = time.monotonic()
    table = recurrence.solve(40)
    base_ok = (table.T[0] == 1 and table.T[1] == F(8, 3)
               and table.SM[1] == F(3, 2) and table.Sm[1] == 2)
    order_ok = all(table.SM[h] <= table.Sm[h] and table.SM[h] <= table.T[h]
                   for h in range(1, 41))
    envelope_ok = all(table.T[h] <= recurrence.LEADING_COEFF
                      * recurrence.GROWTH_ALPHA ** h for h in range(41))
    r40 = recurrence.growth_ratio(table, 40)
    ratio_ok = F(264, 100) <= r40 <= recurrence.GROWTH_ALPHA
    elapsed = time.monotonic() - t0
    ok = base_ok and order_ok and envelope_ok and ratio_ok and elapsed < 1
    check("06", ok, f"base cases, ordering, envelope to h=40; "
                    f"T(40)/T(39) = {float(r40):.7f}; {elapsed:.2f}s (< 1s)")


# criterion 7: ansatz verification ------------------------------------------

def test_criterion_07_ansatz():
    t0 = time.monotonic()
    passed, violations = recurrence.verify_ansatz(recurrence.DEFAULT_ANSATZ)
    elapsed = time.monotonic() - t0
    ok = passed and elapsed < 1
    check("07", ok, f"all seven inequalities hold exactly; {elapsed:.2f}s (< 1s)")


# criterion 8: algorithm correctness and cost --------------------------------

def _all_inputs(h):
    n = 3 ** h
    for code in range(2 ** n):
        yield formula.Input(h, [(code >> j) & 1 for j in range(n)])


@pytest.mark.slow
def test_criterion_08_algorithms():
    t0 = time.monotonic()
    # zero error: exhaustive inputs for h <= 2, sampled hard inputs at h = 3;
    # every run gets its own fresh seed, >= 10^4 distinct seeds in total
    seed = 0
    algs = (algorithms.AlgorithmId.NAIVE, algorithms.AlgorithmId.DEPTH2)
    zero_ok = True
    for h in (0, 1, 2):
        for inp in _all_inputs(h):
            for alg in algs:
                for _ in range(10):
                    r = algorithms.run(alg, inp, seed)
                    seed += 1
                    zero_ok &= (r.value == inp.value
                                and len(set(r.log)) == len(r.log))
    rng = formula.make_rng(555)
    for _ in range(20):
        inp = formula.sample_hard(3, rng=rng).input
        for alg in algs:
            for _ in range(25):
                r = algorithms.run(alg, inp, seed)
                seed += 1
                zero_ok &= r.value == inp.value and len(set(r.log)) == len(r.log)
    seeds_used = seed

    # exact worst case at h=2 against the recurrence value
    table = recurrence.solve(2)
    worst, argmax = algorithms.max_expected_evaluate(2)
    bound_ok = worst <= table.T[2]
    equality = worst == table.T[2]

    # Monte Carlo at h=2 vs the exact average over the hard inputs
    xs = list(formula.enumerate_hard(2))
    exact_avg = sum(algorithms.exact_expected_queries(
        algorithms.AlgorithmId.DEPTH2, x.input) for x in xs) / len(xs)
    mc = algorithms.monte_carlo(algorithms.AlgorithmId.DEPTH2, 2,
                                trials=10 ** 6, seed=2024)
    half3 = 3 * mc.stddev / mc.trials ** 0.5
    mc_ok = abs(mc.mean - float(exact_avg)) <= half3

    # naive exact expectation over the hard distribution
    naive_ok = all(algorithms.naive_hard_expectation(h) == F(8, 3) ** h
                   for h in range(5))
    elapsed = time.monotonic() - t0
    ok = (zero_ok and seeds_used >= 10 ** 4 and bound_ok and mc_ok
          and naive_ok and elapsed < 120)
    check("08", ok,
          f"zero error over {seeds_used} seeded runs; "
          f"max_h2 = 571/81 {'==' if equality else '<'} T(2) "
          f"(equality recorded, not asserted); "
          f"MC 1e6 within 3 sigma ({mc.mean:.4f} vs {float(exact_avg):.4f}); "
          f"naive == (8/3)^h for h <= 4; {elapsed:.0f}s (< 120s)")


# criterion 9: encoding properties ------------------------------------------

def _batch_value(bits: np.ndarray, h: int) -> np.ndarray:
    level = bits
    for _ in range(h):
        level = (level.reshape(level.shape[0], -1, 3).sum(axis=2) >= 2)
        level = level.astype(np.uint8)
    return level[:, 0]


def test_criterion_09_encodings():
    t0 = time.monotonic()
    # exhaustive value preservation at h = k <= 2
    import itertools
    symbols = [(b, s) for b in (0, 1) for s in (1, 2, 3)]
    exhaustive_ok = True
    for y_bit in (0, 1):
        y = formula.HardInput(formula.Input(0, [y_bit]))
        for sym in symbols:
            x = formula.encode(y, formula.EncodingRandomness(1, 1, ((sym,),)))
            exhaustive_ok &= x.root_value == y_bit
        for lv0 in symbols:
            for lv1 in itertools.product(symbols, repeat=3):
                r = formula.EncodingRandomness(2, 2, ((lv0,), tuple(lv1)))
                exhaustive_ok &= formula.encode(y, r).root_value == y_bit

    # randomized value preservation: 1e5 batched cases across h <= 6
    rng = formula.make_rng(90210)
    cases = 0
    random_ok = True
    pairs = [(h, k) for h in range(1, 7) for k in range(1, h + 1)]
    per = (10 ** 5) // len(pairs) + 1
    for h, k in pairs:
        roots = rng.integers(0, 2, size=per)
        y = formula.sample_hard_bits(h - k, per, roots, rng)
        levels_b = [rng.integers(0, 2, size=(per, 3 ** (h - k + i)))
                    for i in range(k)]
        levels_s = [rng.integers(1, 4, size=(per, 3 ** (h - k + i)))
                    for i in range(k)]
        x = formula.encode_bits(y, levels_b, levels_s)
        random_ok &= bool((_batch_value(x, h) == roots).all())
        cases += per

    # exact pushforward uniformity and source-position uniformity
    counts = {}
    q_by_image = {}
    for y_bit in (0, 1):
        y = formula.HardInput(formula.Input(0, [y_bit]))
        for lv0 in symbols:
            for lv1 in itertools.product(symbols, repeat=3):
                r = formula.EncodingRandomness(2, 2, ((lv0,), tuple(lv1)))
                x = formula.encode(y, r)
                s = x.input.to_string()
                counts[s] = counts.get(s, 0) + 1
                q_by_image.setdefault(s, []).append(int(formula.q_positions(r)[0]))
    uniform_ok = len(counts) == 162 and set(counts.values()) == {16}
    qpos_ok = True
    for s, qs in q_by_image.items():
        hard = formula.HardInput(formula.Input.from_string(s))
        hist = {q: qs.count(q) for q in set(qs)}
        qpos_ok &= set(hist) == set(hard.sensitive_bits)
        qpos_ok &= len(set(hist.values())) == 1
    elapsed = time.monotonic() - t0
    ok = exhaustive_ok and random_ok and uniform_ok and qpos_ok and elapsed < 60
    check("09", ok,
          f"value preserved (exhaustive h=k<=2, {cases} random cases h<=6); "
          f"two-level image exactly uniform; source position uniform over "
          f"sensitive bits; {elapsed:.0f}s (< 60s)")


# criterion 10: binomial bound ----------------------------------------------

def test_criterion_10_binomial_bound():
    t0 = time.monotonic()
    ok = True
    for h in range(21):
        ok &= recurrence.binomial_bound(
            [F(1, 3) ** i for i in range(h + 1)], h) == F(7, 3) ** h
        ok &= recurrence.binomial_bound(
            [F(1, 2) ** i for i in range(h + 1)], h) == F(5, 2) ** h
    elapsed = time.monotonic() - t0
    ok = ok and elapsed < 1
    check("10", ok, f"(7/3)^h and (5/2)^h reproduced exactly for h <= 20; "
                    f"{elapsed:.2f}s (< 1s)")
