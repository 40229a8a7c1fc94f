"""Rigorous positivity certificates on rectangles via Bernstein coefficients.

A polynomial with all-positive Bernstein coefficients on a box is positive
there; a nonpositive coefficient triggers quaternary midpoint subdivision.
All patch arithmetic is exact rational, so a Positive certificate is a
machine-checked proof and a Violation carries an exact witness vertex.
Wrapped around a multiplier's sign carrier this decides the no-periodic-orbit
criterion on the open box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional

from .multiplier import Multiplier, PolyMultiplier, multiplier_to_dict
from .poly import Point, Poly, VectorField

DEFAULT_MAX_DEPTH = 12

OPEN_BOX_NOTE = (
    "a Positive certificate excludes periodic orbits fully contained in the "
    "open box; an orbit meeting the boundary is not excluded"
)


@dataclass(frozen=True)
class Box2:
    """Axis-aligned rectangle with exact rational corners."""

    x_min: Fraction
    x_max: Fraction
    y_min: Fraction
    y_max: Fraction

    def __post_init__(self):
        for name in ("x_min", "x_max", "y_min", "y_max"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("box must satisfy x_min < x_max and y_min < y_max")

    @classmethod
    def from_floats(cls, x_min, x_max, y_min, y_max) -> "Box2":
        """Exact conversion: each float becomes the rational it represents."""
        return cls(Fraction(x_min), Fraction(x_max), Fraction(y_min), Fraction(y_max))

    @classmethod
    def centered(cls, cx: Fraction, cy: Fraction, half_width: Fraction) -> "Box2":
        cx, cy, w = Fraction(cx), Fraction(cy), Fraction(half_width)
        return cls(cx - w, cx + w, cy - w, cy + w)

    @property
    def x_mid(self) -> Fraction:
        return (self.x_min + self.x_max) / 2

    @property
    def y_mid(self) -> Fraction:
        return (self.y_min + self.y_max) / 2

    @property
    def width(self) -> Fraction:
        return self.x_max - self.x_min

    @property
    def height(self) -> Fraction:
        return self.y_max - self.y_min

    def corners(self):
        return (
            (self.x_min, self.y_min),
            (self.x_max, self.y_min),
            (self.x_min, self.y_max),
            (self.x_max, self.y_max),
        )

    def split(self):
        """Quaternary midpoint split, ordered (SW, SE, NW, NE)."""
        mx, my = self.x_mid, self.y_mid
        return (
            Box2(self.x_min, mx, self.y_min, my),
            Box2(mx, self.x_max, self.y_min, my),
            Box2(self.x_min, mx, my, self.y_max),
            Box2(mx, self.x_max, my, self.y_max),
        )

    def contains_point(self, z, strict: bool = False) -> bool:
        x, y = float(z[0]), float(z[1])
        if strict:
            return (self.x_min < x < self.x_max) and (self.y_min < y < self.y_max)
        return (self.x_min <= x <= self.x_max) and (self.y_min <= y <= self.y_max)

    def contains_box(self, other: "Box2") -> bool:
        return (self.x_min <= other.x_min and other.x_max <= self.x_max
                and self.y_min <= other.y_min and other.y_max <= self.y_max)

    def intersects(self, other: "Box2") -> bool:
        return not (other.x_max <= self.x_min or self.x_max <= other.x_min
                    or other.y_max <= self.y_min or self.y_max <= other.y_min)

    def as_floats(self):
        return (float(self.x_min), float(self.x_max),
                float(self.y_min), float(self.y_max))

    def to_dict(self) -> dict:
        return {"x_min": str(self.x_min), "x_max": str(self.x_max),
                "y_min": str(self.y_min), "y_max": str(self.y_max)}

    @classmethod
    def from_dict(cls, d: dict) -> "Box2":
        return cls(Fraction(d["x_min"]), Fraction(d["x_max"]),
                   Fraction(d["y_min"]), Fraction(d["y_max"]))

    def __str__(self) -> str:
        return f"[{self.x_min}, {self.x_max}] x [{self.y_min}, {self.y_max}]"


@dataclass(frozen=True)
class BernsteinPatch:
    """Exact Bernstein coefficients of a polynomial on a box.

    ``coefficients[i][j]`` is the coefficient of B_{i,m}(u) B_{j,n}(v) after
    the affine map of the box onto the unit square; corner coefficients equal
    the polynomial values at the box corners, and min/max coefficients
    enclose the range on the box.
    """

    box: Box2
    degrees: tuple
    coefficients: tuple  # (m+1) x (n+1) nested tuples of Fraction

    @property
    def min_coefficient(self) -> Fraction:
        return min(c for row in self.coefficients for c in row)

    @property
    def max_coefficient(self) -> Fraction:
        return max(c for row in self.coefficients for c in row)

    def corner_coefficients(self):
        """Values at (SW, SE, NW, NE) corners, aligned with box.corners()."""
        m, n = self.degrees
        c = self.coefficients
        return (c[0][0], c[m][0], c[0][n], c[m][n])

    def subdivide(self):
        """Split at the box midpoint; returns patches in box.split() order."""
        left, right = _split_rows(self.coefficients)
        sw_c, nw_c = _split_cols(left)
        se_c, ne_c = _split_cols(right)
        sw, se, nw, ne = self.box.split()
        deg = self.degrees
        return (
            BernsteinPatch(sw, deg, sw_c),
            BernsteinPatch(se, deg, se_c),
            BernsteinPatch(nw, deg, nw_c),
            BernsteinPatch(ne, deg, ne_c),
        )


def _split_rows(coeffs):
    """Exact de Casteljau halving along the row (x) index."""
    m = len(coeffs) - 1
    tri = list(coeffs)
    left = [tri[0]]
    right = [tri[-1]]
    for _ in range(m):
        tri = [tuple((a + b) / 2 for a, b in zip(tri[i], tri[i + 1]))
               for i in range(len(tri) - 1)]
        left.append(tri[0])
        right.append(tri[-1])
    right.reverse()
    return tuple(left), tuple(right)


def _split_cols(coeffs):
    transposed = tuple(zip(*coeffs))
    bottom, top = _split_rows(transposed)
    return tuple(zip(*bottom)), tuple(zip(*top))


def bernstein_coefficients(p: Poly, box: Box2) -> BernsteinPatch:
    """Exact Bernstein form of a real polynomial on a box.

    Degrees are (deg_x p, deg_y p); raises ValueError on complex coefficients.
    """
    if not p.is_real:
        raise ValueError("Bernstein certification requires real coefficients")
    m = max(p.deg_x, 0)
    n = max(p.deg_y, 0)

    # affine map of the unit square onto the box, composed exactly
    u_image = Poly.const(box.x_min) + Poly.x() * box.width
    v_image = Poly.const(box.y_min) + Poly.y() * box.height
    u_pow = [Poly.const(1)]
    for _ in range(m):
        u_pow.append(u_pow[-1] * u_image)
    v_pow = [Poly.const(1)]
    for _ in range(n):
        v_pow.append(v_pow[-1] * v_image)
    mapped = Poly.zero()
    for (i, j), c in p.terms.items():
        mapped = mapped + u_pow[i] * v_pow[j] * c

    a = [[mapped.real_coefficient(k, l) for l in range(n + 1)]
         for k in range(m + 1)]

    # power basis -> Bernstein basis, one axis at a time
    t = [[sum((Fraction(math.comb(i, k), math.comb(m, k)) * a[k][l]
               for k in range(i + 1)), Fraction(0))
          for l in range(n + 1)]
         for i in range(m + 1)]
    b = tuple(
        tuple(sum((Fraction(math.comb(j, l), math.comb(n, l)) * t[i][l]
                   for l in range(j + 1)), Fraction(0))
              for j in range(n + 1))
        for i in range(m + 1)
    )
    return BernsteinPatch(box=box, degrees=(m, n), coefficients=b)


# --- certificates -----------------------------------------------------------


@dataclass(frozen=True)
class Positive:
    max_depth_used: int
    box_count: int


@dataclass(frozen=True)
class Violation:
    witness: tuple  # (Fraction, Fraction), a subdivision vertex
    value: Fraction
    depth: int


@dataclass(frozen=True)
class Inconclusive:
    depth_limit: int
    undecided_boxes: int


Outcome = Positive | Violation | Inconclusive


@dataclass(frozen=True)
class Certificate:
    outcome: Outcome
    carrier: Poly
    box: Box2

    @property
    def is_positive(self) -> bool:
        return isinstance(self.outcome, Positive)

    @property
    def witness_point(self) -> Optional[Point]:
        if isinstance(self.outcome, Violation):
            return Point(float(self.outcome.witness[0]),
                         float(self.outcome.witness[1]))
        return None

    @property
    def depth(self) -> int:
        o = self.outcome
        if isinstance(o, Positive):
            return o.max_depth_used
        if isinstance(o, Violation):
            return o.depth
        return o.depth_limit

    def to_dict(self) -> dict:
        """Minimal stable-key form used at the top level of CLI reports."""
        o = self.outcome
        if isinstance(o, Positive):
            outcome = "positive"
            witness = None
        elif isinstance(o, Violation):
            outcome = "violation"
            witness = [str(o.witness[0]), str(o.witness[1])]
        else:
            outcome = "inconclusive"
            witness = None
        return {
            "outcome": outcome,
            "carrier": str(self.carrier),
            "witness": witness,
            "depth": self.depth,
        }

    def to_full_dict(self) -> dict:
        """Lossless form; from_full_dict reconstructs an equal Certificate."""
        d = self.to_dict()
        d["box"] = self.box.to_dict()
        o = self.outcome
        if isinstance(o, Positive):
            d["box_count"] = o.box_count
        elif isinstance(o, Violation):
            d["value"] = str(o.value)
        else:
            d["undecided_boxes"] = o.undecided_boxes
        return d

    @classmethod
    def from_full_dict(cls, d: dict) -> "Certificate":
        from .parse import parse_poly

        kind = d["outcome"]
        if kind == "positive":
            outcome = Positive(max_depth_used=d["depth"],
                               box_count=d["box_count"])
        elif kind == "violation":
            outcome = Violation(
                witness=(Fraction(d["witness"][0]), Fraction(d["witness"][1])),
                value=Fraction(d["value"]),
                depth=d["depth"],
            )
        else:
            outcome = Inconclusive(depth_limit=d["depth"],
                                   undecided_boxes=d["undecided_boxes"])
        return cls(outcome=outcome, carrier=parse_poly(d["carrier"]),
                   box=Box2.from_dict(d["box"]))


def certify_positive(p: Poly, box: Box2,
                     max_depth: int = DEFAULT_MAX_DEPTH) -> Certificate:
    """Decide p > 0 on the box by Bernstein subdivision.

    Positive is sound: every leaf patch has all-positive coefficients.
    Violation carries an exact subdivision vertex with p(vertex) <= 0.
    Inconclusive means max_depth was reached with undecided patches.
    The search order is a fixed depth-first traversal, so results are
    deterministic.
    """
    root = bernstein_coefficients(p, box)
    stack = [(root, 0)]
    leaf_count = 0
    max_used = 0
    undecided = 0
    while stack:
        patch, depth = stack.pop()
        witness = _corner_witness(p, patch)
        if witness is not None:
            vertex, value = witness
            return Certificate(Violation(witness=vertex, value=value, depth=depth),
                               carrier=p, box=box)
        if patch.min_coefficient > 0:
            leaf_count += 1
            max_used = max(max_used, depth)
            continue
        if depth >= max_depth:
            undecided += 1
            continue
        for child in reversed(patch.subdivide()):
            stack.append((child, depth + 1))
    if undecided:
        return Certificate(Inconclusive(depth_limit=max_depth,
                                        undecided_boxes=undecided),
                           carrier=p, box=box)
    return Certificate(Positive(max_depth_used=max_used, box_count=leaf_count),
                       carrier=p, box=box)


def _corner_witness(p: Poly, patch: BernsteinPatch):
    for corner, coeff in zip(patch.box.corners(), patch.corner_coefficients()):
        if coeff <= 0:
            value = p.evaluate_exact(corner[0], corner[1])
            return corner, value.re
    return None


# --- Dulac / Bendixson wrappers ---------------------------------------------


class Conclusion(Enum):
    NO_PERIODIC_ORBIT_FULLY_CONTAINED = "no_periodic_orbit_fully_contained"
    NOT_CERTIFIED = "not_certified"


@dataclass(frozen=True)
class DulacCertificate:
    certificate: Certificate
    multiplier: Multiplier
    system: VectorField
    conclusion: Conclusion

    def to_dict(self) -> dict:
        return {
            "certificate": self.certificate.to_dict(),
            "multiplier": multiplier_to_dict(self.multiplier),
            "box": self.certificate.box.to_dict(),
            "conclusion": self.conclusion.value,
            "notes": [OPEN_BOX_NOTE],
        }


def certify_dulac(system: VectorField, b: Multiplier, box: Box2,
                  max_depth: int = DEFAULT_MAX_DEPTH) -> DulacCertificate:
    """Certify Div(B*X) > 0 on the box and conclude on periodic orbits.

    The conclusion covers only orbits fully contained in the open box: a
    periodic solution running along the boundary is not ruled out.
    """
    carrier = b.sign_carrier(system)
    cert = certify_positive(carrier, box, max_depth)
    conclusion = (Conclusion.NO_PERIODIC_ORBIT_FULLY_CONTAINED
                  if cert.is_positive else Conclusion.NOT_CERTIFIED)
    return DulacCertificate(certificate=cert, multiplier=b, system=system,
                            conclusion=conclusion)


def bendixson(system: VectorField, box: Box2,
              max_depth: int = DEFAULT_MAX_DEPTH) -> DulacCertificate:
    """Dulac certificate with the constant multiplier B = 1."""
    return certify_dulac(system, PolyMultiplier(Poly.const(1)), box, max_depth)
