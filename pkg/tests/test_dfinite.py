import math
from fractions import Fraction

import pytest

from orbitheight.dfinite import (
    EVENTUALLY_PERIODIC,
    HEIGHT_GROWTH,
    UNDECIDED,
    PRecurrence,
    classify_height_growth,
    encode_as_dynamics,
    expand_terms,
    parse_recurrence_job,
)
from orbitheight.errors import (
    HorizonTooShort,
    InvalidParameter,
    MissingInitialTerm,
    MissingSingularTerm,
)
from orbitheight.orbit import iterate_orbit
from orbitheight.poly import Polynomial


def catalan():
    return parse_recurrence_job(
        {"order": 1, "coeffs": ["-(4*n+2)", "n+2"], "initial": {"0": "1"}}
    )


def factorial():
    return parse_recurrence_job(
        {"order": 1, "coeffs": ["-(n+1)", "1"], "initial": {"0": "1"}}
    )


def fibonacci():
    return parse_recurrence_job(
        {"order": 2, "coeffs": ["-1", "-1", "1"], "initial": {"0": "0", "1": "1"}}
    )


def period3():
    return parse_recurrence_job(
        {"order": 3, "coeffs": ["-1", "0", "0", "1"], "initial": {"0": "1", "1": "7", "2": "7"}}
    )


def motzkin():
    return parse_recurrence_job(
        {"order": 2, "coeffs": ["-(3*n+3)", "-(2*n+5)", "n+4"], "initial": {"0": "1", "1": "1"}}
    )


def singular_step():
    # trailing coefficient n-3 vanishes at n=3; a_4 supplied explicitly
    return parse_recurrence_job(
        {"order": 1, "coeffs": ["-(n+1)", "n-3"], "initial": {"0": "1", "4": "7"}}
    )


def test_expand_catalan():
    assert expand_terms(catalan(), 5) == [1, 1, 2, 5, 14, 42]


def test_expand_factorial():
    assert expand_terms(factorial(), 5) == [1, 1, 2, 6, 24, 120]


def test_expand_period3():
    assert expand_terms(period3(), 8) == [1, 7, 7, 1, 7, 7, 1, 7, 7]


def test_expand_fibonacci_and_motzkin():
    assert expand_terms(fibonacci(), 10) == [0, 1, 1, 2, 3, 5, 8, 13, 21, 34, 55]
    assert expand_terms(motzkin(), 8) == [1, 1, 2, 4, 9, 21, 51, 127, 323]


def test_expand_rational_terms():
    rec = parse_recurrence_job(
        {"order": 1, "coeffs": ["-1", "n+1"], "initial": {"0": "1"}}
    )
    # a_{n+1} = a_n / (n+1), so a_n = 1/n!
    assert expand_terms(rec, 4) == [1, 1, Fraction(1, 2), Fraction(1, 6), Fraction(1, 24)]


def test_missing_initial_term():
    rec = PRecurrence(
        order=2,
        coeffs=(
            Polynomial.constant(("n",), -1),
            Polynomial.constant(("n",), -1),
            Polynomial.constant(("n",), 1),
        ),
        initial_terms={0: Fraction(0)},
    )
    with pytest.raises(MissingInitialTerm):
        expand_terms(rec, 5)


def test_missing_singular_term():
    rec = parse_recurrence_job(
        {"order": 1, "coeffs": ["-(n+1)", "n-3"], "initial": {"0": "1"}}
    )
    with pytest.raises(MissingSingularTerm) as exc:
        expand_terms(rec, 8)
    assert exc.value.n == 3


def test_singular_expansion():
    terms = expand_terms(singular_step(), 6)
    assert terms[:4] == [1, Fraction(-1, 3), Fraction(1, 3), -1]
    assert terms[4] == 7  # supplied across the singular index
    assert terms[5] == 35 and terms[6] == 105


def test_encode_catalan():
    phi, observable, start, valid_from = encode_as_dynamics(catalan())
    assert valid_from == 0
    assert start == (Fraction(0), Fraction(1))
    assert str(phi) == "(t + 1, (4*t*v0 + 2*v0)/(t + 2))"
    trace = iterate_orbit(phi, observable, start, 500)
    terms = expand_terms(catalan(), 500)
    for n in range(501):
        assert trace.rows[n].value.as_fraction() == terms[n]


def test_encode_fibonacci_constant_coeffs():
    phi, observable, start, valid_from = encode_as_dynamics(fibonacci())
    assert str(phi) == "(t + 1, v1, v0 + v1)"
    assert start == (Fraction(0), Fraction(0), Fraction(1))
    assert valid_from == 0


def test_encode_factorial():
    phi, observable, start, _ = encode_as_dynamics(factorial())
    assert str(phi) == "(t + 1, t*v0 + v0)"
    assert start == (Fraction(0), Fraction(1))


def test_encode_skips_singular_indices():
    rec = singular_step()
    phi, observable, start, valid_from = encode_as_dynamics(rec)
    assert valid_from == 4
    assert start == (Fraction(4), Fraction(7))
    trace = iterate_orbit(phi, observable, start, 60)
    terms = expand_terms(rec, 64)
    assert trace.stop_reason == "completed"
    for k in range(61):
        assert trace.rows[k].value.as_fraction() == terms[valid_from + k]


@pytest.mark.parametrize(
    "rec_factory,horizon",
    [(catalan, 500), (factorial, 200), (fibonacci, 500), (period3, 500), (motzkin, 500)],
)
def test_encoding_equivalence_catalog(rec_factory, horizon):
    rec = rec_factory()
    phi, observable, start, valid_from = encode_as_dynamics(rec)
    trace = iterate_orbit(phi, observable, start, horizon - valid_from)
    terms = expand_terms(rec, horizon)
    assert trace.stop_reason == "completed"
    for k, row in enumerate(trace.rows):
        assert row.value.as_fraction() == terms[valid_from + k]


def test_classify_period3():
    verdict = classify_height_growth(expand_terms(period3(), 500))
    assert verdict.kind == EVENTUALLY_PERIODIC
    assert (verdict.preperiod, verdict.period) == (0, 3)
    assert verdict.verified_to == 500
    # soundness of the claim
    terms = expand_terms(period3(), 500)
    for n in range(0, 500 - 3 + 1):
        assert terms[n] == terms[n + 3]


def test_classify_preperiodic():
    terms = [Fraction(9), Fraction(9)] + expand_terms(period3(), 400)
    verdict = classify_height_growth(terms)
    assert verdict.kind == EVENTUALLY_PERIODIC
    assert (verdict.preperiod, verdict.period) == (2, 3)


def test_classify_factorial():
    verdict = classify_height_growth(expand_terms(factorial(), 200), epsilon=1.0)
    assert verdict.kind == HEIGHT_GROWTH
    # oracle: exact big-integer height of 200! against the Stirling scale
    h200 = math.log(math.factorial(200))
    assert verdict.tail_ratio == pytest.approx(h200 / math.log(200), rel=1e-9)
    assert verdict.tail_ratio >= 100


def test_classify_catalan():
    verdict = classify_height_growth(expand_terms(catalan(), 500), epsilon=1.0)
    assert verdict.kind == HEIGHT_GROWTH
    c500 = math.comb(1000, 500) // 501
    assert verdict.tail_ratio == pytest.approx(math.log(c500) / math.log(500), rel=1e-9)
    assert verdict.tail_ratio >= 50


def test_classify_undecided():
    terms = [Fraction(n) for n in range(200)]
    verdict = classify_height_growth(terms, epsilon=2.0)
    assert verdict.kind == UNDECIDED


def test_classify_horizon_too_short():
    with pytest.raises(HorizonTooShort):
        classify_height_growth([Fraction(1)] * 5, n0=10)


def test_monotone_horizon_on_catalog():
    for factory in (catalan, factorial, fibonacci):
        terms = expand_terms(factory(), 400)
        r1 = classify_height_growth(terms[:201], epsilon=1.0).tail_ratio
        r2 = classify_height_growth(terms[:401], epsilon=1.0).tail_ratio
        assert r2 >= r1


def test_invalid_recurrences():
    with pytest.raises(InvalidParameter):
        PRecurrence(order=0, coeffs=(Polynomial.constant(("n",), 1),), initial_terms={})
    with pytest.raises(InvalidParameter):
        parse_recurrence_job({"order": 1, "coeffs": ["1", "0"], "initial": {"0": "1"}})
    with pytest.raises(InvalidParameter):
        parse_recurrence_job({"order": 1, "coeffs": ["1", "1/n"], "initial": {"0": "1"}})
