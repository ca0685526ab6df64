"""Batch command-line front end.

Every capability is a subcommand with a reproducible seed and
machine-readable output (JSON or CSV).  Identical invocations produce
byte-identical result files; each invocation that writes results also
writes exactly one manifest (subcommand, flags, seed, version, timestamps,
output checksums) next to them.

Exit codes: 0 success, 2 verification failure, 3 usage error, 4 resource
cap exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from . import algorithms, alphadp, formula, oracles, recurrence

EXIT_OK = 0
EXIT_VERIFY = 2
EXIT_USAGE = 3
EXIT_CAP = 4

SEED_ENV = "RECMAJ_SEED"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _parse_frac(text: str) -> Fraction:
    return Fraction(text)


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


@dataclass
class RunManifest:
    subcommand: str
    flags: dict
    seed: int | None
    version: str = __version__
    started_utc: str = ""
    finished_utc: str = ""
    outputs: dict = field(default_factory=dict)

    def write(self, path: Path) -> None:
        path.write_text(json.dumps(self.__dict__, sort_keys=True, indent=2) + "\n")


def _utcnow() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


class _Emitter:
    """Writes results to --out (plus a manifest) or to stdout."""

    def __init__(self, args, subcommand: str):
        flags = {k: v for k, v in vars(args).items()
                 if k not in ("func", "out") and v is not None}
        for k, v in flags.items():
            if isinstance(v, Fraction):
                flags[k] = _frac_str(v)
        self.out: Path | None = getattr(args, "out", None)
        self.manifest = RunManifest(subcommand, flags, getattr(args, "seed", None),
                                    started_utc=_utcnow())

    def emit(self, text: str) -> None:
        if self.out is None:
            sys.stdout.write(text)
            return
        self.out.write_text(text)
        self.manifest.outputs[str(self.out)] = hashlib.sha256(
            text.encode()).hexdigest()

    def finish(self) -> None:
        if self.out is not None:
            self.manifest.finished_utc = _utcnow()
            self.manifest.write(self.out.with_name(self.out.name + ".manifest.json"))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_sample(args) -> int:
    em = _Emitter(args, "sample")
    try:
        formula.check_height(args.h)
    except formula.HeightLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    rng = formula.make_rng(args.seed)
    lines = [f"# recmaj sample h={args.h} count={args.count} "
             f"root={args.root} seed={args.seed}"]
    for _ in range(args.count):
        lines.append(formula.sample_hard(args.h, args.root, rng).to_text().rstrip("\n"))
    em.emit("\n".join(lines) + "\n")
    em.finish()
    return EXIT_OK


def read_hard_inputs(text: str) -> list[formula.HardInput]:
    """Parse a fixture file: comment lines start with '#', records are a
    header line followed by a bits line."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if len(lines) % 2:
        raise ValueError("fixture must hold header/bits line pairs")
    return [formula.HardInput.from_text("\n".join(lines[i:i + 2]))
            for i in range(0, len(lines), 2)]


def _parse_h_range(text: str) -> list[int]:
    if ":" in text:
        a, b = text.split(":", 1)
        lo, hi = int(a), int(b)
        if lo > hi:
            raise ValueError("empty height range")
        return list(range(lo, hi + 1))
    return [int(text)]


def cmd_estimate(args) -> int:
    em = _Emitter(args, "estimate")
    try:
        heights = _parse_h_range(args.h)
        for h in heights:
            formula.check_height(h)
    except formula.HeightLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    alg = algorithms.AlgorithmId(args.alg)
    records = []
    for h in heights:
        res = algorithms.monte_carlo(alg, h, "uniform-hard", args.trials,
                                     args.seed, threads=args.threads)
        records.append(res.to_record())
    for prev, cur in zip(records, records[1:]):
        cur["growth_vs_previous_h"] = cur["mean"] / prev["mean"]
    em.emit(json.dumps(records if len(records) > 1 else records[0],
                       sort_keys=True, indent=2) + "\n")
    em.finish()
    return EXIT_OK


def cmd_expect(args) -> int:
    em = _Emitter(args, "expect")
    alg = algorithms.AlgorithmId(args.alg)
    if args.bits:
        inp = formula.Input.from_string(args.bits)
    else:
        inp = read_hard_inputs(Path(args.file).read_text())[0].input
    entry = "root"
    if args.context != "root":
        want_minority = args.context == "complete-minority"
        root = inp.value
        pick = None
        for i in range(3):
            if (int(inp.level_values[1][i]) != root) == want_minority:
                pick = i
                break
        if pick is None:
            print("error: no child matches the requested context", file=sys.stderr)
            return EXIT_USAGE
        entry = ("complete", pick)
    try:
        val = algorithms.exact_expected_queries(alg, inp, entry)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    em.emit(json.dumps({
        "alg": alg.value, "h": inp.height, "bits": inp.to_string(),
        "context": args.context, "expected": _frac_str(val),
    }, sort_keys=True, indent=2) + "\n")
    em.finish()
    return EXIT_OK


def cmd_recurrences(args) -> int:
    em = _Emitter(args, "recurrences")
    try:
        table = recurrence.solve(args.max_h)
    except AssertionError as exc:
        print(f"error: table invariant violated: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    rows = ["h,T,S_M,S_m,T_decimal"]
    for h in range(table.height + 1):
        sm = _frac_str(table.SM[h]) if h else ""
        smn = _frac_str(table.Sm[h]) if h else ""
        rows.append(f"{h},{_frac_str(table.T[h])},{sm},{smn},"
                    f"{recurrence.decimal_str(table.T[h], args.precision)}")
    em.emit("\n".join(rows) + "\n")
    em.finish()
    return EXIT_OK


def cmd_alpha(args) -> int:
    em = _Emitter(args, "alpha")
    if not 1 <= args.k <= alphadp.MAX_K:
        print(f"error: k must be in 1..{alphadp.MAX_K}", file=sys.stderr)
        return EXIT_CAP
    progress = (lambda msg: print(f"[alpha k={args.k}] {msg}", file=sys.stderr)) \
        if args.k >= 4 or args.verbose else None
    res = alphadp.alpha(args.k, progress=progress)
    em.emit(json.dumps({
        "k": res.k,
        "alpha": _frac_str(res.alpha),
        "n_k": res.n_k,
        "iterations": [_frac_str(x) for x in res.iterations],
        "elapsed_s": round(res.elapsed_s, 3),
        "flagged_slow_convergence": res.flagged,
    }, sort_keys=True, indent=2) + "\n")
    em.finish()
    return EXIT_OK


def cmd_bounds(args) -> int:
    em = _Emitter(args, "bounds")
    if args.alpha is not None:
        alpha_k = args.alpha
    else:
        if args.k > 3:
            print("note: computing alpha_4 from scratch; pass --alpha to skip",
                  file=sys.stderr)
        alpha_k = alphadp.alpha(args.k).alpha
    try:
        b = recurrence.lower_bound(args.k, alpha_k, args.delta, args.h,
                                   args.precision)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    em.emit(json.dumps({
        "k": args.k,
        "alpha_k": _frac_str(alpha_k),
        "delta": _frac_str(args.delta),
        "h": args.h,
        "precision": args.precision,
        "base_interval": [_frac_str(b.base_lo), _frac_str(b.base_hi)],
        "base_decimal": [recurrence.decimal_str(b.base_lo, args.precision),
                         recurrence.decimal_str(b.base_hi, args.precision)],
        "value_interval": [_frac_str(b.value_lo), _frac_str(b.value_hi)],
        "value_decimal": [recurrence.decimal_str(b.value_lo, args.precision),
                          recurrence.decimal_str(b.value_hi, args.precision)],
    }, sort_keys=True, indent=2) + "\n")
    em.finish()
    return EXIT_OK


def cmd_dump_classes(args) -> int:
    em = _Emitter(args, "dump-classes")
    if not 0 <= args.k <= 3:
        print("error: class dump supported for k <= 3", file=sys.stderr)
        return EXIT_CAP
    rows = [f"{c.key} {c.member_count} {c.completions}"
            for c in alphadp.enumerate_stable(args.k)]
    em.emit("\n".join(rows) + "\n")
    em.finish()
    return EXIT_OK


# ---------------------------------------------------------------------------
# verification suites
# ---------------------------------------------------------------------------

DEFAULT_EXPECTED = {
    "alpha": {"1": "2", "2": "24/7", "3": "12231/2203", "4": "2027349/216164"},
    "n_k": {"0": 1, "1": 2, "2": 7, "3": 112, "4": 246792},
    "tree_count_3vars": oracles.TREE_COUNT_3VARS,
    "one_level_max_ratio": "2",
    "anchor_rho_const": "48/81",
    "anchor_rho_slope": "-14/81",
    "T": {"0": "1", "1": "8/3", "2": "571/81"},
    "S_M": {"1": "3/2"},
    "S_m": {"1": "2", "2": "16/3"},
}


def _check(report: list, name: str, ok: bool, detail: str = "") -> bool:
    report.append(f"[{'ok' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else ""))
    return ok


def verify_oracles(expected: dict, report: list) -> bool:
    ok = True
    trees = oracles.enumerate_trees_k1()
    ok &= _check(report, "3-variable tree count",
                 len(trees) == expected["tree_count_3vars"],
                 f"{len(trees)} vs {expected['tree_count_3vars']}")
    ratio, offenders = oracles.check_one_level_ratio()
    ok &= _check(report, "one-level query ratio bounded by 2", not offenders,
                 f"offenders={len(offenders)}")
    ok &= _check(report, "one-level ratio attains its maximum",
                 ratio == Fraction(expected["one_level_max_ratio"]),
                 f"max ratio {ratio}")
    cp = oracles.build_c_prime()
    const = Fraction(expected["anchor_rho_const"])
    slope = Fraction(expected["anchor_rho_slope"])
    anchor_ok = all(oracles.rho_exhaustive(cp, 2, a)[0] == const + slope * a
                    for a in (Fraction(0), Fraction(1), Fraction(3), Fraction(24, 7)))
    ok &= _check(report, "9-variable anchor tree payoff matches its linear form",
                 anchor_ok)
    root = -const / slope
    ok &= _check(report, "anchor payoff vanishes at alpha_2",
                 oracles.rho_exhaustive(cp, 2, root)[0] == 0, f"root {root}")
    c0 = oracles.build_c_zero()
    rho0, _, pim0 = oracles.rho_exhaustive(c0, 2, Fraction(3))
    ok &= _check(report, "secondary anchor has ratio exactly 3",
                 rho0 == 0 and pim0 > 0)
    dp_ok = all(oracles.max_rho_over_trees_k1(a) == alphadp.dp_optimize(1, a).max_rho
                for a in (Fraction(0), Fraction(1), Fraction(3, 2), Fraction(2),
                          Fraction(3)))
    ok &= _check(report, "k=1 program equals exhaustive tree maximization", dp_ok)
    return ok


def verify_ansatz_suite(expected: dict, report: list) -> bool:
    ok = True
    passed, violations = recurrence.verify_ansatz(recurrence.DEFAULT_ANSATZ)
    ok &= _check(report, "reference growth constants satisfy all inequalities",
                 passed, "; ".join(violations))
    table = recurrence.solve(40)
    for name, col in (("T", table.T), ("S_M", table.SM), ("S_m", table.Sm)):
        for hs, val in expected[name].items():
            got = col[int(hs)]
            ok &= _check(report, f"{name}({hs}) = {val}", got == Fraction(val),
                         f"got {_frac_str(got)}")
    bound_ok = all(table.T[h] <= recurrence.LEADING_COEFF * recurrence.GROWTH_ALPHA ** h
                   for h in range(41))
    ok &= _check(report, "T(h) within the 1.007 * 2.64944^h envelope for h <= 40", bound_ok)
    r40 = recurrence.growth_ratio(table, 40)
    ok &= _check(report, "growth ratio at h=40 inside [2.64, 2.64944]",
                 Fraction(264, 100) <= r40 <= recurrence.GROWTH_ALPHA,
                 f"ratio {float(r40):.9f}")
    return ok


def verify_encodings(expected: dict, report: list, cases: int = 20000) -> bool:
    ok = True
    # exhaustive value preservation at h = k <= 2
    for k in (1, 2):
        good = True
        for y_bit in (0, 1):
            y = formula.HardInput(formula.Input(0, [y_bit]))
            for levels in _all_randomness(k):
                r = formula.EncodingRandomness(k, k, levels)
                if formula.encode(y, r).root_value != y_bit:
                    good = False
        ok &= _check(report, f"value preserved exhaustively at h=k={k}", good)
    # randomized value preservation up to h = 6
    rng = formula.make_rng(20240117)
    good = True
    done = 0
    while done < cases:
        h = int(rng.integers(1, 7))
        k = int(rng.integers(1, h + 1))
        y = formula.sample_hard(h - k, rng=rng)
        r = formula.EncodingRandomness.sample(h, k, rng)
        x = formula.encode(y, r)
        if x.root_value != y.root_value:
            good = False
            break
        done += 1
    ok &= _check(report, f"value preserved on {cases} random cases (h <= 6)", good)
    # exact pushforward uniformity at h = k = 2
    counts: dict[str, int] = {}
    for y_bit in (0, 1):
        y = formula.HardInput(formula.Input(0, [y_bit]))
        for levels in _all_randomness(2):
            x = formula.encode(y, formula.EncodingRandomness(2, 2, levels))
            counts[x.input.to_string()] = counts.get(x.input.to_string(), 0) + 1
    ok &= _check(report, "two-level image is exactly uniform over hard inputs",
                 len(counts) == 162 and len(set(counts.values())) == 1,
                 f"{len(counts)} images")
    # source position lands uniformly on the sensitive bits, conditioned on
    # the image (k <= 2)
    for k in (1, 2):
        per_image: dict[str, dict[int, int]] = {}
        for levels in _all_randomness(k):
            r = formula.EncodingRandomness(k, k, levels)
            y = formula.HardInput(formula.Input(0, [0]))
            x = formula.encode(y, r)
            q1 = int(formula.q_positions(r)[0])
            per_image.setdefault(x.input.to_string(), {}).setdefault(q1, 0)
            per_image[x.input.to_string()][q1] += 1
        good = True
        for s, dist in per_image.items():
            hard = formula.HardInput(formula.Input.from_string(s))
            if set(dist) != set(hard.sensitive_bits) or len(set(dist.values())) != 1:
                good = False
        ok &= _check(report, f"source position uniform over sensitive bits (k={k})",
                     good)
    return ok


def _all_randomness(k: int):
    """Every randomness tuple for encoding height 0 into height k (k <= 2)."""
    from itertools import product as iproduct
    symbols = [(b, s) for b in (0, 1) for s in (1, 2, 3)]
    level_sets = []
    for i in range(k):
        n = 3 ** (k - k + i)   # source height is 0
        level_sets.append([tuple(c) for c in iproduct(symbols, repeat=n)])
    for combo in iproduct(*level_sets):
        yield tuple(combo)


def verify_alpha_constants(expected: dict, report: list, kmax: int = 3) -> bool:
    ok = True
    for k in range(1, kmax + 1):
        res = alphadp.alpha(k)
        want = Fraction(expected["alpha"][str(k)])
        ok &= _check(report, f"alpha_{k} = {expected['alpha'][str(k)]}",
                     res.alpha == want, f"got {_frac_str(res.alpha)}")
        ok &= _check(report, f"N_{k} = {expected['n_k'][str(k)]}",
                     res.n_k == expected["n_k"][str(k)], f"got {res.n_k}")
        ok &= _check(report, f"closed recurrence reproduces N_{k}",
                     alphadp.stable_count(k) == expected["n_k"][str(k)])
    return ok


SUITES = {
    "oracles": (verify_oracles,),
    "ansatz": (verify_ansatz_suite,),
    "encodings": (verify_encodings,),
    "all": (verify_oracles, verify_ansatz_suite, verify_encodings,
            verify_alpha_constants),
}


def cmd_verify(args) -> int:
    expected = dict(DEFAULT_EXPECTED)
    if args.expect:
        expected.update(json.loads(Path(args.expect).read_text()))
    report: list[str] = []
    ok = True
    for fn in SUITES[args.suite]:
        ok &= fn(expected, report)
    print("\n".join(report))
    if not ok:
        print("verification FAILED", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    p = _Parser(prog="recmaj",
                description="exact-arithmetic toolkit for recursive 3-majority "
                            "query complexity")
    sub = p.add_subparsers(dest="cmd", required=True)

    def add(name, fn, **kw):
        sp = sub.add_parser(name, **kw)
        sp.set_defaults(func=fn)
        return sp

    sp = add("sample", cmd_sample, help="draw hard inputs")
    sp.add_argument("--h", type=int, required=True)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--root", type=int, choices=(0, 1), default=None)
    sp.add_argument("--seed", type=int, default=_default_seed())
    sp.add_argument("--out", type=Path, default=None)

    sp = add("estimate", cmd_estimate, help="Monte Carlo query counts")
    sp.add_argument("--alg", choices=[a.value for a in algorithms.AlgorithmId],
                    required=True)
    sp.add_argument("--h", required=True, help="height or range lo:hi")
    sp.add_argument("--trials", type=int, default=10000)
    sp.add_argument("--seed", type=int, default=_default_seed())
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--out", type=Path, default=None)

    sp = add("expect", cmd_expect, help="exact expected query count")
    sp.add_argument("--alg", choices=[a.value for a in algorithms.AlgorithmId],
                    required=True)
    sp.add_argument("--bits", default=None)
    sp.add_argument("--file", default=None)
    sp.add_argument("--context", default="root",
                    choices=("root", "complete-minority", "complete-majority"))
    sp.add_argument("--out", type=Path, default=None)

    sp = add("recurrences", cmd_recurrences, help="exact cost table as CSV")
    sp.add_argument("--max-h", type=int, default=40)
    sp.add_argument("--precision", type=int, default=6)
    sp.add_argument("--out", type=Path, default=None)

    sp = add("alpha", cmd_alpha, help="lower-bound constant alpha_k")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--verbose", action="store_true")
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--out", type=Path, default=None)

    sp = add("bounds", cmd_bounds, help="certified lower-bound intervals")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--alpha", type=_parse_frac, default=None,
                    help="alpha_k as num/den (computed when omitted)")
    sp.add_argument("--delta", type=_parse_frac, default=Fraction(0))
    sp.add_argument("--h", type=int, default=1)
    sp.add_argument("--precision", type=int, default=6)
    sp.add_argument("--out", type=Path, default=None)

    sp = add("verify", cmd_verify, help="self-check suites")
    sp.add_argument("--suite", choices=sorted(SUITES), default="all")
    sp.add_argument("--expect", default=None,
                    help="JSON file overriding expected constants")

    sp = add("dump-classes", cmd_dump_classes, help="stable classes fixture")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--out", type=Path, default=None)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except formula.HeightLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
