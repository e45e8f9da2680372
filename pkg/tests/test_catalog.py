import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from golden import CANONICAL
from oracles import jetpoly_to_sympy, rand_fraction, random_coefficients, sympy_euler_vanishes
from partnersym.catalog import (COEFFICIENT_NAMES, EQUATION_NAMES, CanonicalCase, CaseIForm,
                                PdeCoefficients, classify, general_residual, legmix_residual,
                                named_equation, residual_at)
from partnersym.exprcore import TPQY, TPYZ, TXYZ, ChartError, Point, parse_expression
from partnersym.jetalg import JetPoly, euler_operator, parse_jetpoly

seeds = st.integers(min_value=0, max_value=10**6)


def C(text):
    return PdeCoefficients.parse(text)


def test_parse_and_text():
    c = C("a1=1, a6=1, b0=-1")
    assert (c.a1, c.a6, c.b0, c.b3) == (1, 1, -1, 0)
    assert PdeCoefficients.parse(c.to_text()) == c
    for bad in ("a9=1", "a1", "a1=1,a1=2"):
        with pytest.raises(ValueError):
            C(bad)


def test_general_residual_examples():
    assert general_residual(C("a1=1,a6=1,b0=-1")) == parse_jetpoly(CANONICAL["mixed+"])
    assert general_residual(C("a6=1,b1=1,b4=1")) == parse_jetpoly(CANONICAL["second"])
    assert general_residual(PdeCoefficients()).is_zero()


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_general_residual_against_hand_expansion(seed):
    rng = random.Random(seed)
    c = random_coefficients(rng)
    t, x, y, z = sp.symbols("t x y z")
    u = sp.Function("u")(t, x, y, z)

    def d(a, b):
        return sp.diff(u, a, b)

    k = {n: sp.Rational(v.numerator, v.denominator) for n, v in c.as_dict().items()}
    ref = (k["a1"] * (d(t, y) * d(x, z) - d(t, z) * d(x, y))
           + k["a2"] * (d(t, x) * d(t, y) - d(t, t) * d(x, y))
           + k["a3"] * (d(t, y) * d(x, x) - d(t, x) * d(x, y))
           + k["a4"] * (d(t, x) * d(t, z) - d(t, t) * d(x, z))
           + k["a5"] * (d(t, z) * d(x, x) - d(t, x) * d(x, z))
           + k["a6"] * (d(t, t) * d(x, x) - d(t, x) ** 2)
           + k["b1"] * d(x, y) + k["b2"] * d(t, y) + k["b3"] * d(x, z) + k["b4"] * d(t, z)
           + k["b5"] * d(t, t) + 2 * k["b6"] * d(t, x) + k["b7"] * d(x, x) + k["b0"])
    ours, _ = jetpoly_to_sympy(general_residual(c))
    assert sp.expand(ours - ref) == 0


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_conservation_law_form(seed):
    assert euler_operator(general_residual(random_coefficients(random.Random(seed)))).is_zero()


def test_conservation_law_form_outside_cas():
    rng = random.Random(11)
    for _ in range(3):
        assert sympy_euler_vanishes(general_residual(random_coefficients(rng)))


def test_named_equations_match_canonical_text():
    assert named_equation("first-homogeneous").residual == parse_jetpoly(CANONICAL["first-homogeneous"])
    assert named_equation("first").residual == parse_jetpoly(CANONICAL["first"])
    assert named_equation("mixed", 1).residual == parse_jetpoly(CANONICAL["mixed+"])
    assert named_equation("mixed", -1).residual == parse_jetpoly(CANONICAL["mixed-"])
    assert named_equation("second").residual == parse_jetpoly(CANONICAL["second"])
    for eps, key in ((1, "husain-chiral+"), (-1, "husain-chiral-")):
        eq = named_equation("husain-chiral", eps)
        assert eq.chart == TPYZ and eq.residual == parse_jetpoly(CANONICAL[key], TPYZ)
    assert named_equation("husain", 1).residual == parse_jetpoly(CANONICAL["husain+"], TPYZ)
    for eps, key in ((1, "legmix+"), (-1, "legmix-")):
        eq = named_equation("legmix", eps)
        assert eq.chart == TPQY and eq.residual == parse_jetpoly(CANONICAL[key], TPQY)
        assert legmix_residual(eps) == eq.residual
    asym = named_equation("asymmetric", a=1, b=2, c=3).residual
    assert asym == parse_jetpoly("u_tx*u_ty - u_tt*u_xy + u_tz + 2*u_xz + 3*u_xx")


def test_named_equation_errors():
    with pytest.raises(ValueError):
        named_equation("heavenly")
    with pytest.raises(ValueError):
        named_equation("linear", coefficients=C("a1=1"))
    assert set(EQUATION_NAMES) >= {"first-homogeneous", "first", "mixed", "husain", "second",
                                   "linear", "asymmetric", "legmix"}


def test_linear_equation():
    eq = named_equation("linear", coefficients=C("b5=1,b6=2,b7=3,b0=4"))
    assert eq.residual == parse_jetpoly("u_tt + 4*u_tx + 3*u_xx + 4")
    assert eq.case is CanonicalCase.LinearEquation


# -- classification -----------------------------------------------------------


def test_classify_examples():
    assert classify(C("a6=1,b1=1,b4=1")).case is CanonicalCase.SecondHeavenly
    first = C("a1=1,b0=-1")
    assert classify(first).case is CanonicalCase.FirstHeavenly
    assert classify(CaseIForm(D=-1)).case is CanonicalCase.FirstHeavenly
    assert classify(C("a2=1,b4=1,b3=2,b7=5")).case is CanonicalCase.AsymmetricHeavenly
    assert classify(C("a6=1,b1=1,b2=1,b3=1,b4=1")).case is CanonicalCase.ThreeVariableReduction
    assert classify(C("a1=1,a6=1,b0=-1")).case is CanonicalCase.MixedHeavenly
    assert classify(PdeCoefficients()).case is CanonicalCase.LinearEquation
    assert classify(C("a1=1")).case is CanonicalCase.FirstHeavenlyHomogeneous


def test_case_one_subcases():
    assert classify(CaseIForm()).subcase == "Ia1"
    assert classify(CaseIForm(A=1, D=-1)).subcase == "Ia3"
    assert classify(CaseIForm(Gamma=2)).subcase == "Ib"
    unpublished = classify(C("a1=1,a3=1"))
    assert unpublished.case is CanonicalCase.MixedHeavenly and "unpublished" in unpublished.note


def test_free_term_after_shift():
    # b1..b4 are absorbed into a quadratic shift u = w + Q; the constant that survives
    # is checked by direct substitution
    rng = random.Random(5)
    for _ in range(5):
        b0, b1, b2, b3, b4 = (rand_fraction(rng) for _ in range(5))
        form = CaseIForm(b0=b0, b1=b1, b2=b2, b3=b3, b4=b4)
        t, x, y, z = sp.symbols("t x y z")
        w = sp.Function("w")(t, x, y, z)
        R = lambda q: sp.Rational(q.numerator, q.denominator)  # noqa: E731
        Q = R(b1) * t * z + R(b4) * x * y - R(b3) * t * y - R(b2) * x * z
        u = w + Q

        def d(a, b):
            return sp.diff(u, a, b)

        F = (d(t, y) * d(x, z) - d(t, z) * d(x, y) + R(b1) * d(x, y) + R(b2) * d(t, y)
             + R(b3) * d(x, z) + R(b4) * d(t, z) + R(b0))
        reduced = (sp.diff(w, t, y) * sp.diff(w, x, z) - sp.diff(w, t, z) * sp.diff(w, x, y)
                   + R(form.free_term()))
        assert sp.expand(F - reduced) == 0
    assert CaseIForm(b0=0, b1=1, b4=1).free_term() == 1
    assert classify(CaseIForm(b1=1, b4=1)).case is CanonicalCase.FirstHeavenly
    assert classify(CaseIForm(b1=1, b4=1, b2=1, b3=1)).case is CanonicalCase.FirstHeavenlyHomogeneous


def test_case_one_form_round_trip():
    c = C("a1=2,a6=4,b5=2,b6=1,b7=6,b1=2,b0=-2")
    form = CaseIForm.from_coefficients(c)
    assert (form.Gamma, form.A, form.B, form.C, form.b1, form.b0) == (2, 1, 3, 1, 1, -1)
    assert form.residual() * 2 == general_residual(c)
    with pytest.raises(ValueError):
        CaseIForm.from_coefficients(C("a1=1,a2=1"))


@settings(max_examples=1000, deadline=None)
@given(st.lists(st.integers(-2, 2), min_size=14, max_size=14))
def test_classify_total(values):
    c = PdeCoefficients(**dict(zip(COEFFICIENT_NAMES, values)))
    result = classify(c)
    assert isinstance(result.case, CanonicalCase)
    assert classify(c) == result


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-2, 2), min_size=14, max_size=14), st.randoms(use_true_random=False))
def test_b_permutation_respects_a_boundaries(values, rnd):
    c = PdeCoefficients(**dict(zip(COEFFICIENT_NAMES, values)))
    bs = values[6:]
    rnd.shuffle(bs)
    d = PdeCoefficients(**dict(zip(COEFFICIENT_NAMES, values[:6] + bs)))

    def family(case):
        if case in (CanonicalCase.FirstHeavenlyHomogeneous, CanonicalCase.FirstHeavenly,
                    CanonicalCase.MixedHeavenly):
            return "I"
        if case is CanonicalCase.AsymmetricHeavenly:
            return "IIc"
        if case is CanonicalCase.LinearEquation:
            return "IIb"
        return "IIa"

    assert family(classify(c).case) == family(classify(d).case)


def test_classify_rejects_symbolic():
    with pytest.raises(TypeError):
        classify(PdeCoefficients(a1=JetPoly.param("k")))


# -- residual evaluation ------------------------------------------------------


def test_residual_examples():
    pts = [Point.of(TXYZ, 1, 2, 3, 4), Point.of(TXYZ, Fraction(-1, 3), 0, 5, 7)]
    mixed = named_equation("mixed", 1)
    for pt in pts:
        assert residual_at(mixed, parse_expression("t*y + x*z"), pt) == 0
    v = parse_expression("t*y - p*q + q^2/2", TPQY)
    assert residual_at(named_equation("legmix", 1), v, Point.of(TPQY, 1, 2, 3, 4)) == 0
    lam = parse_expression("t*z + p*y - (t^2 + p^2)/4", TPYZ)
    assert residual_at(named_equation("husain", 1), lam, Point.of(TPYZ, 3, -1, 2, 5)) == 0


def test_residual_chart_mismatch():
    with pytest.raises(ChartError):
        residual_at(named_equation("mixed"), parse_expression("t*y", TPQY), Point.origin(TPQY))
