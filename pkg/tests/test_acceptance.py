"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings.  Tolerances and runtime budgets are pinned here, not
configurable.
"""

import json
import math
import random
import time
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

import pytest

from orbitheight.cli import list_catalog, main as cli_main, run_job
from orbitheight.commuting import check_commuting, grid_orbit, norm_sliced_diagnostics
from orbitheight.density import (
    EventuallyPeriodicSet,
    check_lemma_shifts,
    density,
    intersection,
    shift,
    shift_set,
    union,
)
from orbitheight.dfinite import (
    EVENTUALLY_PERIODIC,
    HEIGHT_GROWTH,
    classify_height_growth,
    encode_as_dynamics,
    expand_terms,
    parse_recurrence_job,
)
from orbitheight.dml import Subvariety, ap_decompose, return_set
from orbitheight.exact import height_rational, normalize_projective, segre_product
from orbitheight.orbit import (
    Limsup,
    Uniform,
    detect_window_repeat,
    epsilon_bounds,
    gap_diagnostics,
    iterate_orbit,
)
from orbitheight.poly import compose, parse_expression, parse_map, rf_equal
from orbitheight.schanuel import analytic_constant, count_points, count_points_oracle


@contextmanager
def criterion(num: int, name: str, budget_s: float):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"[FAIL] criterion {num}: {name}", flush=True)
        raise
    elapsed = time.perf_counter() - start
    assert elapsed < budget_s, f"criterion {num} took {elapsed:.2f}s, budget {budget_s}s"
    print(f"[PASS] criterion {num}: {name} ({elapsed:.2f}s)", flush=True)


def test_criterion_1_height_exactness():
    with criterion(1, "height exactness", 5.0):
        rng = random.Random(1001)
        for _ in range(50_000):
            k = rng.randint(2, 4)
            coords = [rng.randint(-10**6, 10**6) for _ in range(k)]
            if all(c == 0 for c in coords):
                coords[0] = 1
            lam = Fraction(rng.randint(1, 999), rng.randint(1, 999))
            if rng.random() < 0.5:
                lam = -lam
            base = normalize_projective(coords)
            scaled = normalize_projective([c * lam for c in coords])
            assert scaled == base  # exact
        for _ in range(50_000):
            a = normalize_projective(
                [rng.randint(-10**4, 10**4) for _ in range(2)] or [1]
            )
            b = normalize_projective(
                [rng.randint(-10**4, 10**4) for _ in range(3)] or [1]
            )
            prod = segre_product(a, b)  # constructor re-checks primitivity
            assert prod.max_abs() == a.max_abs() * b.max_abs()  # exact
        assert height_rational(Fraction(2, 3)) == pytest.approx(
            math.log(3), rel=1e-12
        )
        assert height_rational(Fraction(2**10)) == pytest.approx(
            10 * math.log(2), rel=1e-12
        )


def test_criterion_2_schanuel_reproduction():
    with criterion(2, "Schanuel point counts over Q", 60.0):
        assert count_points(1, 1).count == 4 == count_points_oracle(1, 1)
        assert count_points(1, 2).count == 8 == count_points_oracle(1, 2)
        assert count_points(2, 1).count == 13 == count_points_oracle(2, 1)
        p1 = count_points(1, 1000)
        c1 = analytic_constant(1)
        assert abs(p1.ratio - c1) <= 0.02 * c1
        p2 = count_points(2, 100)
        c2 = analytic_constant(2)
        assert abs(p2.ratio - c2) <= 0.05 * c2
        for threads in (2, 4):
            assert count_points(1, 1000, threads=threads).count == p1.count
            assert count_points(2, 100, threads=threads).count == p2.count


def test_criterion_3_limsup_sanity():
    with criterion(3, "limsup diagnostics on affine model maps", 10.0):
        x = ("x",)
        f = parse_expression("x", x)
        n = 10**4

        shift_trace = iterate_orbit(parse_map(["x+1"], x), f, [Fraction(1)], n)
        rep = gap_diagnostics(shift_trace)
        assert 1.0 <= rep.tail_sup <= 1.001

        doubling = iterate_orbit(parse_map(["2*x"], x), f, [Fraction(1)], n)
        rep2 = gap_diagnostics(doubling)
        assert rep2.tail_sup >= 0.9 * n * math.log(2) / math.log(n)

        ident = iterate_orbit(parse_map(["x"], x), f, [Fraction(5)], n)
        repeat = detect_window_repeat(ident, 2)
        assert repeat is not None and repeat.period == 1
        rep3 = gap_diagnostics(ident)
        assert rep3.tail_sup <= 0.2


def test_criterion_4_epsilon_bound_formulas():
    with criterion(4, "epsilon bound formulas, exact rationals", 5.0):
        for ell in range(0, 8):
            for deg in (1, 2, 3):
                assert epsilon_bounds(Limsup(ell, deg)) == Fraction(
                    1, deg * 2 ** (ell + 1)
                )
        for d in (0, 1, 2):
            for kappa in (Fraction(21, 10), Fraction(3), Fraction(7, 2)):
                expected = Fraction(1, 2 ** ((d + 1) ** 2 + 1)) / kappa
                assert epsilon_bounds(Uniform(d, kappa)) == expected
        assert epsilon_bounds(Uniform(1, Fraction(21, 10))) == Fraction(10, 672)


def _catalog_recurrences():
    root = Path(__file__).parent.parent / "src" / "orbitheight" / "catalog"
    out = {}
    for name in ("catalan", "factorial", "fibonacci", "motzkin", "period-3"):
        job = json.loads((root / f"{name}.json").read_text())
        out[name] = (parse_recurrence_job(job), job["N"])
    return out


def test_criterion_5_dfinite_classifier():
    with criterion(5, "D-finite growth classifier", 10.0):
        recs = _catalog_recurrences()

        verdict = classify_height_growth(expand_terms(recs["period-3"][0], 500))
        assert verdict.kind == EVENTUALLY_PERIODIC
        assert (verdict.preperiod, verdict.period) == (0, 3)
        assert verdict.verified_to == 500

        fac_terms = expand_terms(recs["factorial"][0], 200)
        v_fac = classify_height_growth(fac_terms, epsilon=1.0)
        assert v_fac.kind == HEIGHT_GROWTH and v_fac.tail_ratio >= 100

        cat_terms = expand_terms(recs["catalan"][0], 500)
        v_cat = classify_height_growth(cat_terms, epsilon=1.0)
        assert v_cat.kind == HEIGHT_GROWTH and v_cat.tail_ratio >= 50

        fib_terms = expand_terms(recs["fibonacci"][0], 500)
        v_fib = classify_height_growth(fib_terms)
        assert v_fib.kind == HEIGHT_GROWTH
        assert 30 <= v_fib.tail_ratio <= 45
        # brute-force exact-height oracle for the Fibonacci tail ratio
        oracle = max(
            height_rational(fib_terms[k]) / math.log(k) for k in range(250, 501)
        )
        assert v_fib.tail_ratio == pytest.approx(oracle, rel=1e-12)


def test_criterion_6_encoding_equivalence():
    with criterion(6, "recurrence-to-dynamics encoding equivalence", 30.0):
        for name, (rec, _n) in _catalog_recurrences().items():
            phi, observable, start, valid_from = encode_as_dynamics(rec)
            horizon = 500 - valid_from
            trace = iterate_orbit(phi, observable, start, horizon)
            assert trace.stop_reason == "completed", name
            terms = expand_terms(rec, 500)
            for k, row in enumerate(trace.rows):
                assert row.value.as_fraction() == terms[valid_from + k], name


def _random_epset(rng: random.Random) -> EventuallyPeriodicSet:
    m = rng.randint(1, 30)
    residues = [r for r in range(m) if rng.random() < 0.45]
    added = [rng.randrange(0, 4 * m) for _ in range(rng.randint(0, 3))]
    removed = [rng.randrange(0, 4 * m) for _ in range(rng.randint(0, 3))]
    return EventuallyPeriodicSet(m, residues, added, removed)


def test_criterion_7_density_module():
    with criterion(7, "exact density, shift sets, lemma witnesses", 5.0):
        rng = random.Random(4242)

        checked = 0
        while checked < 1000:
            s = _random_epset(rng)
            if density(s) == 0:
                continue
            sigma = shift_set(s)
            assert 0 in sigma
            assert density(sigma) >= Fraction(1, s.modulus) > 0
            checked += 1

        checked = 0
        while checked < 1000:
            s = _random_epset(rng)
            d = density(s)
            if d == 0:
                continue
            n_bound = int(1 / d) + 1
            f_size = n_bound + rng.randint(0, 5)
            f_set = rng.sample(range(0, 250), f_size)
            j, k = check_lemma_shifts(s, f_set, n_bound)
            assert j > k and (j - k) in shift_set(s)
            assert density(intersection(s, shift(s, j - k))) > 0
            checked += 1

        for _ in range(1000):
            a = _random_epset(rng)
            b = _random_epset(rng)
            i = rng.randint(0, 60)
            assert density(shift(a, i)) == density(a)  # exact
            assert density(union(a, b)) <= density(a) + density(b)  # exact


def test_criterion_8_commuting_example():
    with criterion(8, "commuting maps grid and norm slices", 30.0):
        variables = ("x", "y", "z")
        maps = [
            parse_map(["2*x", "y+1", "z"], variables),
            parse_map(["x*z", "y", "z+1"], variables),
        ]
        ok, witness = check_commuting(maps)
        assert ok and witness is None
        target = parse_map(["2*x*z", "y+1", "z+1"], variables)
        for composed in (compose(maps[0], maps[1]), compose(maps[1], maps[0])):
            assert all(
                rf_equal(a, b) for a, b in zip(composed.components, target.components)
            )

        f = parse_expression("x", variables)
        mtrace = grid_orbit(maps, f, [Fraction(1), Fraction(0), Fraction(0)], 60)
        assert not mtrace.undefined_at
        for (n1, n2), entry in mtrace.entries.items():
            expected = Fraction(0) if n2 > 0 else Fraction(2) ** n1
            assert entry.value.as_fraction() == expected  # exact closed form

        evens_set = EventuallyPeriodicSet(2, [0])
        report = norm_sliced_diagnostics(mtrace, evens_set, 2)
        assert abs(report.sup_ratio - 60 * math.log(2) / math.log(60)) <= 1e-9

        off_ray = norm_sliced_diagnostics(
            mtrace, evens_set, 2, index_filter=lambda idx: idx[1] > 0
        )
        assert off_ray.sup_ratio == 0.0


def test_criterion_9_weak_dml_decomposition():
    with criterion(9, "weak DML return-set decomposition", 10.0):
        xy = ("x", "y")
        alternation = parse_map(["x+1", "-y"], xy)
        y_eq = Subvariety((parse_expression("y-1", xy).num,))
        hits = return_set(alternation, [Fraction(0), Fraction(1)], y_eq, 20)
        decomp = ap_decompose(hits, 20)
        assert [(p.a, p.d) for p in decomp.progressions] == [(0, 2)]
        assert decomp.residual == ()

        shift_map = parse_map(["x+1"], ("x",))
        two_roots = Subvariety((parse_expression("(x-3)*(x-17)", ("x",)).num,))
        seq = []
        for horizon in (100, 200, 400):
            h = return_set(shift_map, [Fraction(0)], two_roots, horizon)
            seq.append(ap_decompose(h, horizon).residual_prefix_density)
        assert seq[0] == Fraction(2, 101)
        assert seq == [Fraction(2, 101), Fraction(2, 201), Fraction(2, 401)]
        assert all(later < Fraction(51, 100) * earlier for earlier, later in zip(seq, seq[1:]))

        doubling = parse_map(["2*x"], ("x",))
        eight = Subvariety((parse_expression("x-8", ("x",)).num,))
        seq2 = []
        for horizon in (50, 100, 200):
            h = return_set(doubling, [Fraction(1)], eight, horizon)
            seq2.append(ap_decompose(h, horizon).residual_prefix_density)
        assert seq2 == [Fraction(1, 51), Fraction(1, 101), Fraction(1, 201)]
        assert all(later < Fraction(51, 100) * earlier for earlier, later in zip(seq2, seq2[1:]))


def test_criterion_10_determinism_and_robustness(tmp_path):
    with criterion(10, "byte-identical reports, robust failures", 120.0):
        golden = Path(__file__).parent / "golden"
        for name in list_catalog():
            first_csv, first_json = run_job(name, out_dir=tmp_path / "run1")
            again_csv, again_json = run_job(
                name, out_dir=tmp_path / "run2", threads=3
            )
            assert first_csv.read_bytes() == again_csv.read_bytes() == (
                golden / first_csv.name
            ).read_bytes(), name
            assert first_json.read_bytes() == again_json.read_bytes() == (
                golden / first_json.name
            ).read_bytes(), name

        bad = tmp_path / "garbage.json"
        bad.write_text("{broken")
        out_dir = tmp_path / "never"
        assert cli_main(["run", str(bad), "--out", str(out_dir)]) == 2
        assert not out_dir.exists()
