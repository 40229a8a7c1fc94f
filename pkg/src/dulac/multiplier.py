"""Structured multiplier candidates whose rescaled divergence has a polynomial sign.

A multiplier is either a polynomial p or an exponential form exp(g)*p.  In
both cases Div(B*X) factors as a strictly positive function times a
polynomial, the *sign carrier*, which is the object that gets certified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .poly import Poly, VectorField, div_product, lie_derivative


@dataclass(frozen=True)
class PolyMultiplier:
    """Plain polynomial multiplier B = p."""

    p: Poly

    def sign_carrier(self, system: VectorField) -> Poly:
        return div_product(self.p, system)

    def evaluate(self, z) -> float:
        return self.p.evaluate(z).real

    def __str__(self) -> str:
        return str(self.p)


@dataclass(frozen=True)
class ExpPolyMultiplier:
    """Exponential multiplier B = exp(g) * p.

    Div(B*X) = exp(g) * (Div(p*X) + p*<grad g, X>), so the sign of the
    divergence is carried by the polynomial factor.
    """

    g: Poly
    p: Poly

    def sign_carrier(self, system: VectorField) -> Poly:
        return div_product(self.p, system) + self.p * lie_derivative(self.g, system)

    def evaluate(self, z) -> float:
        return math.exp(self.g.evaluate(z).real) * self.p.evaluate(z).real

    def __str__(self) -> str:
        return f"exp({self.g})*{self.p}"


Multiplier = PolyMultiplier | ExpPolyMultiplier

BENDIXSON = PolyMultiplier(Poly.const(1))


def multiplier_to_dict(b: Multiplier) -> dict:
    if isinstance(b, ExpPolyMultiplier):
        return {"type": "exp_poly", "g": str(b.g), "p": str(b.p)}
    return {"type": "poly", "p": str(b.p)}


def multiplier_from_dict(d: dict) -> Multiplier:
    from .parse import parse_poly

    if d["type"] == "exp_poly":
        return ExpPolyMultiplier(g=parse_poly(d["g"]), p=parse_poly(d["p"]))
    return PolyMultiplier(p=parse_poly(d["p"]))
