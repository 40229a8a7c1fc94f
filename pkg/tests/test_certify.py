"""Bernstein patches and positivity certificates."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from dulac.certify import (
    Box2,
    Certificate,
    Conclusion,
    Inconclusive,
    Positive,
    Violation,
    bendixson,
    bernstein_coefficients,
    certify_dulac,
    certify_positive,
)
from dulac.parse import parse_multiplier, parse_poly, parse_system
from dulac.poly import Poly

from conftest import batch_eval, polys, rand_poly, sample_box

UNIT = Box2(Fraction(0), Fraction(1), Fraction(0), Fraction(1))
SYM = Box2(Fraction(-1), Fraction(1), Fraction(-1), Fraction(1))

box_st_cache = [
    Box2(Fraction(-1), Fraction(1), Fraction(-1), Fraction(1)),
    Box2(Fraction(0), Fraction(3), Fraction(-2), Fraction(-1)),
    Box2(Fraction(-1, 2), Fraction(5, 2), Fraction(1, 3), Fraction(2)),
    Box2(Fraction(-4), Fraction(-1), Fraction(-1, 2), Fraction(1, 2)),
]


class TestBox2:
    def test_validation(self):
        with pytest.raises(ValueError):
            Box2(Fraction(1), Fraction(0), Fraction(0), Fraction(1))

    def test_split_covers(self):
        parts = SYM.split()
        assert len(parts) == 4
        assert {p.x_min for p in parts} == {Fraction(-1), Fraction(0)}
        assert all(SYM.contains_box(p) for p in parts)

    def test_dict_round_trip(self):
        b = Box2(Fraction(-1, 3), Fraction(2), Fraction(0), Fraction(7, 5))
        assert Box2.from_dict(b.to_dict()) == b


class TestBernsteinPatch:
    def test_constant(self):
        patch = bernstein_coefficients(Poly.const(1), SYM)
        assert patch.coefficients == ((Fraction(1),),)

    def test_linear_on_unit(self):
        patch = bernstein_coefficients(parse_poly("x"), UNIT)
        assert patch.coefficients == ((Fraction(0),), (Fraction(1),))

    def test_x_squared_on_sym(self):
        patch = bernstein_coefficients(parse_poly("x^2"), SYM)
        assert patch.degrees == (2, 0)
        flat = [c[0] for c in patch.coefficients]
        assert flat == [Fraction(1), Fraction(-1), Fraction(1)]

    def test_complex_rejected(self):
        with pytest.raises(ValueError):
            bernstein_coefficients(parse_poly("i*x"), SYM)

    @settings(max_examples=50)
    @given(polys(max_degree=4))
    def test_corner_interpolation(self, p):
        if not p.is_real:
            return
        for box in box_st_cache[:2]:
            patch = bernstein_coefficients(p, box)
            for corner, coeff in zip(box.corners(),
                                     patch.corner_coefficients()):
                assert coeff == p.evaluate_exact(*corner).re

    @settings(max_examples=50)
    @given(polys(max_degree=4))
    def test_range_enclosure(self, p):
        if not p.is_real:
            return
        rng = random.Random(5)
        for box in box_st_cache:
            patch = bernstein_coefficients(p, box)
            lo, hi = patch.min_coefficient, patch.max_coefficient
            x_min, x_max, y_min, y_max = box.as_floats()
            for _ in range(10):
                z = (rng.uniform(x_min, x_max), rng.uniform(y_min, y_max))
                v = p.evaluate(z).real
                assert float(lo) - 1e-9 <= v <= float(hi) + 1e-9

    def test_subdivision_is_exact(self):
        p = parse_poly("x^3*y - 2*x*y^2 + y - 1/3")
        patch = bernstein_coefficients(p, SYM)
        for child in patch.subdivide():
            direct = bernstein_coefficients(p, child.box)
            assert child.coefficients == direct.coefficients


class TestCertifyPositive:
    def test_positive_definite_plus_constant(self):
        cert = certify_positive(parse_poly("x^2 + y^2 + 1"), SYM)
        assert isinstance(cert.outcome, Positive)
        assert cert.outcome.max_depth_used <= 1

    def test_violation_at_corner(self):
        cert = certify_positive(parse_poly("x"), SYM)
        assert isinstance(cert.outcome, Violation)
        assert cert.outcome.witness[0] == Fraction(-1)
        assert cert.outcome.value == Fraction(-1)

    def test_van_der_pol_strip_carrier(self):
        box = Box2(Fraction(-19, 20), Fraction(19, 20), Fraction(-4), Fraction(4))
        cert = certify_positive(parse_poly("1 - x^2"), box)
        assert isinstance(cert.outcome, Positive)
        assert cert.outcome.max_depth_used <= 2
        patch = bernstein_coefficients(parse_poly("1 - x^2"), box)
        assert patch.min_coefficient == Fraction(39, 400)  # 0.0975 at x = 0.95

    def test_zero_polynomial_is_violation(self):
        cert = certify_positive(Poly.zero(), SYM)
        assert isinstance(cert.outcome, Violation)
        assert cert.outcome.value == 0

    def test_inconclusive_at_depth_limit(self):
        # vanishes at an interior non-dyadic point, positive at all vertices
        p = parse_poly("(3*x - 1)^2 + (3*y - 1)^2")
        cert = certify_positive(p, UNIT, max_depth=2)
        assert isinstance(cert.outcome, Inconclusive)
        assert cert.outcome.undecided_boxes > 0

    def test_violation_witness_exact(self):
        rng = random.Random(13)
        for _ in range(40):
            p = rand_poly(rng, 4)
            if not p.is_real:
                continue
            cert = certify_positive(p, SYM, max_depth=4)
            if isinstance(cert.outcome, Violation):
                wx, wy = cert.outcome.witness
                value = p.evaluate_exact(wx, wy).re
                assert value == cert.outcome.value
                assert value <= 0

    def test_positive_soundness_by_sampling(self):
        rng = random.Random(17)
        found = 0
        while found < 10:
            p = rand_poly(rng, 4) + Poly.const(rng.randint(5, 30))
            if not p.is_real:
                continue
            cert = certify_positive(p, SYM, max_depth=8)
            if not isinstance(cert.outcome, Positive):
                continue
            found += 1
            xs, ys = sample_box(SYM, 2000, seed=found)
            assert batch_eval(p, xs, ys).min() > 0

    def test_subdivision_refinement_monotone(self):
        rng = random.Random(23)
        for _ in range(10):
            p = rand_poly(rng, 3)
            if not p.is_real:
                continue
            p = p * p + Poly.const(Fraction(1, 7))  # positive by construction
            last = None
            for depth in range(4):
                patches = [bernstein_coefficients(p, SYM)]
                for _ in range(depth):
                    patches = [c for patch in patches
                               for c in patch.subdivide()]
                bound = min(pt.min_coefficient for pt in patches)
                if last is not None:
                    assert bound >= last
                last = bound

    def test_determinism(self):
        p = parse_poly("x^2 + y^2 - 1/2")
        a = certify_positive(p, SYM, max_depth=6)
        b = certify_positive(p, SYM, max_depth=6)
        assert a == b

    def test_full_dict_round_trip(self):
        for p, depth in [(parse_poly("x^2 + y^2 + 1"), 6),
                         (parse_poly("x"), 6),
                         (parse_poly("(3*x-1)^2 + (3*y-1)^2"), 1)]:
            cert = certify_positive(p, UNIT, max_depth=depth)
            again = Certificate.from_full_dict(cert.to_full_dict())
            assert again == cert


class TestDulacCertificates:
    def setup_method(self):
        self.vdp = parse_system("P = y\nQ = -x + mu*(1 - x^2)*y\nparam mu = 1")

    def test_bendixson_van_der_pol_strip(self):
        box = Box2(Fraction(-19, 20), Fraction(19, 20), Fraction(-4), Fraction(4))
        result = bendixson(self.vdp, box)
        assert result.conclusion is Conclusion.NO_PERIODIC_ORBIT_FULLY_CONTAINED
        assert result.certificate.carrier == parse_poly("1 - x^2")

    def test_bendixson_violation_on_big_box(self):
        box = Box2(Fraction(-3), Fraction(3), Fraction(-3), Fraction(3))
        result = bendixson(self.vdp, box)
        assert result.conclusion is Conclusion.NOT_CERTIFIED
        outcome = result.certificate.outcome
        assert isinstance(outcome, Violation)
        assert outcome.value <= 0
        assert abs(outcome.witness[0]) >= 1  # carrier 1 - x^2 needs |x| >= 1

    def test_bendixson_trivial_cases(self):
        radial = parse_system("P = x\nQ = y")
        result = bendixson(radial, Box2(Fraction(-5), Fraction(2),
                                        Fraction(-1), Fraction(7)))
        assert result.conclusion is Conclusion.NO_PERIODIC_ORBIT_FULLY_CONTAINED
        rot = parse_system("P = -y\nQ = x")
        result = bendixson(rot, SYM)
        assert result.conclusion is Conclusion.NOT_CERTIFIED
        assert isinstance(result.certificate.outcome, Violation)

    def test_certify_dulac_with_quadratic_multiplier(self):
        radial = parse_system("P = x\nQ = y")
        box = Box2(Fraction(1), Fraction(2), Fraction(1), Fraction(2))
        result = certify_dulac(radial, parse_multiplier("(x^2+y^2)/4"), box)
        assert result.conclusion is Conclusion.NO_PERIODIC_ORBIT_FULLY_CONTAINED
        assert result.certificate.carrier == parse_poly("x^2 + y^2")

    def test_conclusion_iff_positive(self):
        rng = random.Random(29)
        from conftest import rand_field
        for _ in range(25):
            system = rand_field(rng, 3)
            result = bendixson(system, SYM, max_depth=4)
            assert (result.conclusion is
                    Conclusion.NO_PERIODIC_ORBIT_FULLY_CONTAINED) == \
                result.certificate.is_positive

    def test_exp_multiplier_carrier(self):
        system = parse_system("P = 1\nQ = 1")
        mult = parse_multiplier("exp(-2*y)*1")
        result = certify_dulac(system, mult, SYM)
        assert result.certificate.carrier == parse_poly("-2")
        assert result.conclusion is Conclusion.NOT_CERTIFIED

    def test_schema_dict(self):
        box = Box2(Fraction(-19, 20), Fraction(19, 20), Fraction(-4), Fraction(4))
        d = bendixson(self.vdp, box).to_dict()
        assert d["certificate"]["outcome"] == "positive"
        assert d["certificate"]["witness"] is None
        assert "open box" in d["notes"][0]
