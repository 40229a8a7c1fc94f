"""Invariant curves, cofactors, and Darboux first integrals.

An invariant curve {f = 0} of X satisfies <grad f, X> = k*f for a unique
polynomial cofactor k.  Products of invariant functions and exponential
factors raised to complex powers give Darboux functions; when the
exponent-weighted cofactor sum vanishes identically the product is a first
integral.  Cofactor bookkeeping here is exact; drift checks along numeric
trajectories provide the empirical counterpart.
"""

from __future__ import annotations

import cmath
import math
import random
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .certify import Box2
from .errors import (
    ConstantInputError,
    DegenerateCurveWarning,
    DegreeBoundViolatedError,
    NoNontrivialRelationError,
    NotExponentialFactorError,
    NotInvariantError,
)
from .multiplier import Multiplier
from .poly import (
    CRAT_ONE,
    CRAT_ZERO,
    CRat,
    Poly,
    VectorField,
    div_product,
    divergence,
    lie_derivative,
    poly_divide,
)


@dataclass(frozen=True)
class InvariantCurve:
    """Invariant function f with its cofactor k: <grad f, X> = k*f exactly."""

    f: Poly
    k: Poly

    def to_dict(self) -> dict:
        return {"f": str(self.f), "k": str(self.k)}


@dataclass(frozen=True)
class ExponentialFactor:
    """exp(g/h) with cofactor k: h*<grad g, X> - g*<grad h, X> = k*h^2."""

    g: Poly
    h: Poly
    k: Poly

    def to_dict(self) -> dict:
        return {"g": str(self.g), "h": str(self.h), "k": str(self.k)}

    def __str__(self) -> str:
        if self.h == Poly.const(1):
            return f"exp({self.g})"
        return f"exp(({self.g})/({self.h}))"


def _fmt_exponent(c: CRat) -> str:
    if c.is_real:
        return str(c.re)
    sign = "-" if c.im < 0 else "+"
    mag = abs(c.im)
    istr = "i" if mag == 1 else f"{mag}*i"
    return f"({c.re} {sign} {istr})"


@dataclass(frozen=True)
class DarbouxExpr:
    """Product of invariant curves and exponential factors with exponents."""

    curve_factors: tuple  # of (InvariantCurve, CRat exponent)
    exp_factors: tuple  # of (ExponentialFactor, CRat exponent)

    def total_cofactor(self) -> Poly:
        total = Poly.zero()
        for curve, lam in self.curve_factors:
            total = total + curve.k * lam
        for ef, mu in self.exp_factors:
            total = total + ef.k * mu
        return total

    @property
    def is_first_integral(self) -> bool:
        return self.total_cofactor().is_zero

    def __str__(self) -> str:
        parts = [f"({c.f})^{_fmt_exponent(lam)}" for c, lam in self.curve_factors]
        parts += [f"{ef}^{_fmt_exponent(mu)}" for ef, mu in self.exp_factors]
        return " * ".join(parts) if parts else "1"

    def to_dict(self) -> dict:
        return {
            "curve_factors": [
                {**c.to_dict(), "exponent": [str(lam.re), str(lam.im)]}
                for c, lam in self.curve_factors
            ],
            "exp_factors": [
                {**e.to_dict(), "exponent": [str(mu.re), str(mu.im)]}
                for e, mu in self.exp_factors
            ],
            "expression": str(self),
            "total_cofactor": str(self.total_cofactor()),
        }


@dataclass(frozen=True)
class ResidualReport:
    """Exact residual of a defining identity plus an optional numeric check."""

    symbolic_residual: Poly
    numeric_max_drift: float = 0.0
    trajectories_checked: int = 0

    @property
    def is_exact(self) -> bool:
        return self.symbolic_residual.is_zero

    def to_dict(self) -> dict:
        return {
            "symbolic_residual": str(self.symbolic_residual),
            "exact": self.is_exact,
            "numeric_max_drift": self.numeric_max_drift,
            "trajectories_checked": self.trajectories_checked,
        }


# --- cofactors ----------------------------------------------------------------


def cofactor_of(f: Poly, system: VectorField,
                check_degeneracy: bool = True) -> InvariantCurve:
    """Extract the unique cofactor of an invariant function by exact division.

    Fails with NotInvariantError (carrying the remainder) when f does not
    divide <grad f, X>.  For real curves of degree >= 2 the degeneracy
    condition is probed numerically: a common zero of f and grad f that is
    not a zero of X is reported as a DegenerateCurveWarning.  The probe is
    advisory and can be switched off for bulk symbolic work.
    """
    if f.is_constant:
        raise ConstantInputError("invariant function must be nonconstant")
    lie = lie_derivative(f, system)
    k, remainder = poly_divide(lie, f)
    if not remainder.is_zero:
        raise NotInvariantError(
            f"<grad f, X> is not divisible by f (remainder {remainder})",
            remainder=remainder)
    if check_degeneracy and f.is_real and f.degree >= 2:
        _warn_degenerate_points(f, system)
    return InvariantCurve(f=f, k=k)


def _warn_degenerate_points(f: Poly, system: VectorField,
                            search_half_width: float = 5.0) -> None:
    from .flow import find_equilibria

    fx, fy = f.derive("x"), f.derive("y")
    if fx.is_zero and fy.is_zero:
        return
    if fx.is_constant and fy.is_constant:
        return  # gradient never vanishes
    w = Fraction(search_half_width)
    gradient_field = VectorField(p=fx, q=fy)
    for report in find_equilibria(gradient_field, Box2(-w, w, -w, w),
                                  grid_n=12, tol=1e-8):
        z = report.location
        if abs(f.evaluate(z).real) < 1e-6:
            speed = max(abs(system.p.evaluate(z).real),
                        abs(system.q.evaluate(z).real))
            if speed > 1e-6:
                warnings.warn(
                    f"singular point ({z.x:.6g}, {z.y:.6g}) of the curve is "
                    f"not a zero of the field",
                    DegenerateCurveWarning)


def exponential_factor_cofactor(g: Poly, h: Poly,
                                system: VectorField) -> ExponentialFactor:
    """Cofactor of exp(g/h): solve h*<grad g,X> - g*<grad h,X> = k*h^2.

    g and h are assumed coprime (not checked).  The cofactor must satisfy
    deg k <= d - 1 for d the field degree.
    """
    if h.is_zero:
        raise ValueError("h must be a nonzero polynomial")
    numerator = h * lie_derivative(g, system) - g * lie_derivative(h, system)
    k, remainder = poly_divide(numerator, h * h)
    if not remainder.is_zero:
        raise NotExponentialFactorError(
            f"defining identity has no polynomial cofactor (remainder {remainder})")
    bound = max(system.degree - 1, -1)
    if k.degree > bound:
        raise DegreeBoundViolatedError(
            f"cofactor degree {k.degree} exceeds d - 1 = {bound}")
    return ExponentialFactor(g=g, h=h, k=k)


# --- integrating factors --------------------------------------------------------


def check_integrating_factor(mu: Multiplier,
                             system: VectorField) -> ResidualReport:
    """Exact carrier of Div(mu*X); zero certifies an integrating factor."""
    return ResidualReport(symbolic_residual=mu.sign_carrier(system))


def check_inverse_integrating_factor(v: Poly,
                                     system: VectorField) -> ResidualReport:
    """Residual <grad V, X> - V*Div X; zero makes 1/V an integrating factor
    away from {V = 0} (V is then invariant with cofactor Div X)."""
    if v.is_zero:
        raise ValueError("V must be nonzero")
    residual = lie_derivative(v, system) - v * divergence(system)
    return ResidualReport(symbolic_residual=residual)


def dulac_cofactor_crosscheck(b: Poly, system: VectorField,
                              samples: int = 100,
                              seed: int = 0) -> ResidualReport:
    """Check the cofactor form of the Dulac identity.

    Symbolically: <grad B, X> - (Div(B*X) - B*Div X) is zero by the Leibniz
    rule.  Numerically the pointwise cofactor k(z) = -Div X + g/B (defined
    off {B = 0}) is sampled at random points and the worst defect
    |k(z)*B(z) - <grad B, X>(z)| is reported.
    """
    if b.is_zero:
        raise ValueError("B must be nonzero")
    g = div_product(b, system)
    lie_b = lie_derivative(b, system)
    residual = lie_b - (g - b * divergence(system))
    rng = random.Random(seed)
    div_x = divergence(system)
    defect = 0.0
    checked = 0
    attempts = 0
    while checked < samples and attempts < 50 * samples:
        attempts += 1
        z = (rng.uniform(-2, 2), rng.uniform(-2, 2))
        b_val = b.evaluate(z).real
        if abs(b_val) < 1e-6:
            continue
        k_val = -div_x.evaluate(z).real + g.evaluate(z).real / b_val
        defect = max(defect, abs(k_val * b_val - lie_b.evaluate(z).real))
        checked += 1
    return ResidualReport(symbolic_residual=residual,
                          numeric_max_drift=defect,
                          trajectories_checked=0)


# --- Darboux first integrals ------------------------------------------------------


def _kernel_basis(rows, n_cols):
    """Exact kernel basis of a matrix with CRat entries (RREF back-solve)."""
    work = [list(r) for r in rows]
    pivot_cols = []
    r = 0
    for c in range(n_cols):
        pivot = next((i for i in range(r, len(work)) if work[i][c]), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        inv = CRAT_ONE / work[r][c]
        work[r] = [v * inv for v in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c]:
                f = work[i][c]
                work[i] = [v - f * w for v, w in zip(work[i], work[r])]
        pivot_cols.append(c)
        r += 1
        if r == len(work):
            break
    free_cols = [c for c in range(n_cols) if c not in pivot_cols]
    basis = []
    for fc in free_cols:
        v = [CRAT_ZERO] * n_cols
        v[fc] = CRAT_ONE
        for pr, pc in enumerate(pivot_cols):
            v[pc] = -work[pr][fc]
        basis.append(v)
    return basis


def _normalize_integer_vector(vec):
    """Scale a rational vector to coprime integers with a positive lead."""
    denoms = [q.denominator for c in vec for q in (c.re, c.im) if q]
    if not denoms:
        return vec
    scale = 1
    for d in denoms:
        scale = scale * d // math.gcd(scale, d)
    scaled = [CRat(c.re * scale, c.im * scale) for c in vec]
    numer = 0
    for c in scaled:
        numer = math.gcd(numer, abs(c.re.numerator))
        numer = math.gcd(numer, abs(c.im.numerator))
    if numer > 1:
        scaled = [CRat(c.re / numer, c.im / numer) for c in scaled]
    for c in scaled:
        if c.re:
            if c.re < 0:
                scaled = [-v for v in scaled]
            break
        if c.im:
            if c.im < 0:
                scaled = [-v for v in scaled]
            break
    return scaled


def _vector_weight(vec) -> Fraction:
    return sum((abs(c.re) + abs(c.im) for c in vec), Fraction(0))


def _sort_key(vec):
    all_real = all(c.is_real for c in vec)
    return (not all_real, _vector_weight(vec),
            tuple((c.re, c.im) for c in vec))


def darboux_first_integral(curves: Sequence[InvariantCurve],
                           expf: Sequence[ExponentialFactor] = ()) -> DarbouxExpr:
    """Find exponents making the cofactor-weighted sum vanish identically.

    Stacks every cofactor monomial-wise into an exact linear map and computes
    its rational kernel.  Among kernel combinations of at most two basis
    vectors (including real/imaginary parts, so conjugate pairs can combine
    to real expressions) the all-real, smallest-integer-weight vector is
    preferred.  Raises NoNontrivialRelationError when only the zero vector
    works.
    """
    curves = tuple(curves)
    expf = tuple(expf)
    cofactors = [c.k for c in curves] + [e.k for e in expf]
    if not cofactors:
        raise ValueError("at least one invariant curve or exponential factor needed")
    monomials = sorted({exp for k in cofactors for exp in k.terms},
                       key=lambda e: (e[0] + e[1], e[0]))
    n = len(cofactors)
    rows = [[k.terms.get(mono, CRAT_ZERO) for k in cofactors]
            for mono in monomials]
    basis = _kernel_basis(rows, n)
    if not basis:
        raise NoNontrivialRelationError("cofactor relation has trivial kernel")

    def in_kernel(vec) -> bool:
        return all(
            sum((row[j] * vec[j] for j in range(n)), CRAT_ZERO) == CRAT_ZERO
            for row in rows)

    candidates = []

    def consider(vec):
        if any(vec) and in_kernel(vec):
            candidates.append(_normalize_integer_vector(vec))

    for v in basis:
        consider(v)
        consider([CRat(c.re) for c in v])
        consider([CRat(c.im) for c in v])
    for a in range(len(basis)):
        for b in range(a + 1, len(basis)):
            for sign in (1, -1):
                combo = [basis[a][j] + basis[b][j] * sign for j in range(n)]
                consider(combo)
                consider([CRat(c.re) for c in combo])
                consider([CRat(c.im) for c in combo])

    best = min(candidates, key=_sort_key)
    expr = DarbouxExpr(
        curve_factors=tuple((c, best[i]) for i, c in enumerate(curves)),
        exp_factors=tuple((e, best[len(curves) + i]) for i, e in enumerate(expf)),
    )
    if not expr.is_first_integral:
        raise AssertionError("kernel vector failed exact verification")
    return expr


# --- numeric drift ----------------------------------------------------------------


def verify_first_integral(h: DarbouxExpr, system: VectorField,
                          trajectories: int = 5, t_span: float = 10.0,
                          tol: float = 1e-10, seed: int = 0) -> ResidualReport:
    """Exact total cofactor plus drift of log H along random trajectories.

    H is evaluated through logarithms of the factors with continuous angle
    unwrapping, so complex curves and exponents are handled away from their
    zero sets; seeds landing within 1e-3 of any factor's zero set are
    resampled.  The reported drift is the largest relative change of log H
    along any checked trajectory.
    """
    from .flow import integrate

    symbolic = h.total_cofactor()
    rng = random.Random(seed)
    factor_polys = [c.f for c, _ in h.curve_factors]
    factor_polys += [e.h for e, _ in h.exp_factors]
    max_drift = 0.0
    checked = 0
    attempts = 0
    while checked < trajectories and attempts < 200 * max(trajectories, 1):
        attempts += 1
        z0 = (rng.uniform(-2, 2), rng.uniform(-2, 2))
        if any(abs(f.evaluate(z0)) < 1e-3 for f in factor_polys):
            continue
        traj = integrate(system, z0, t_span, tol)
        drift = _log_drift(h, traj.states)
        if drift is None:
            continue
        max_drift = max(max_drift, drift)
        checked += 1
    return ResidualReport(symbolic_residual=symbolic,
                          numeric_max_drift=max_drift,
                          trajectories_checked=checked)


def _log_drift(h: DarbouxExpr, states):
    """Max |log H(z_t) - log H(z_0)| / max(1, |log H(z_0)|) along a path."""
    w_values = [0j] * len(states)
    for curve, lam in h.curve_factors:
        lam_c = complex(lam)
        prev = curve.f.evaluate(states[0])
        if abs(prev) < 1e-12:
            return None
        theta = cmath.phase(prev)
        w_values[0] += lam_c * complex(math.log(abs(prev)), theta)
        for idx in range(1, len(states)):
            val = curve.f.evaluate(states[idx])
            if abs(val) < 1e-12:
                return None
            theta += cmath.phase(val / prev)
            w_values[idx] += lam_c * complex(math.log(abs(val)), theta)
            prev = val
    for ef, mu in h.exp_factors:
        mu_c = complex(mu)
        for idx, z in enumerate(states):
            h_val = ef.h.evaluate(z)
            if abs(h_val) < 1e-12:
                return None
            w_values[idx] += mu_c * (ef.g.evaluate(z) / h_val)
    base = w_values[0]
    scale = max(1.0, abs(base))
    return max(abs(w - base) for w in w_values) / scale
