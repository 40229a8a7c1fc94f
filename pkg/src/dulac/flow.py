"""Floating-point dynamics for planar polynomial fields.

Equilibrium location and classification, adaptive Runge-Kutta trajectory
integration with dense output, Poincare return maps, and limit-cycle
detection.  This is the empirical cross-check side of the package: nothing
here is rigorous, and certificates always win over these numbers.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy.integrate import RK45

from .certify import Box2
from .errors import CycleNotFoundError, NoReturnError, NotAnEquilibriumError
from .poly import Point, Poly, VectorField

EIGENVALUE_ZERO_THRESHOLD = 1e-9  # relative to the eigenvalue magnitude
DEDUP_RADIUS = 1e-6


class Classification(Enum):
    NODE = "node"
    SADDLE = "saddle"
    FOCUS = "focus"
    CENTER_CANDIDATE = "center_candidate"
    DEGENERATE = "degenerate"


class Stability(Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


class TrajectoryStatus(Enum):
    COMPLETED = "completed"
    LEFT_DOMAIN = "left_domain"
    STEP_FAILURE = "step_failure"


class CrossingDirection(Enum):
    POSITIVE_CROSSING = "positive"
    NEGATIVE_CROSSING = "negative"
    BOTH = "both"


@dataclass(frozen=True)
class EquilibriumReport:
    location: Point
    jacobian: tuple  # ((j11, j12), (j21, j22)) floats
    eigenvalues: tuple  # (complex, complex)
    classification: Classification
    hyperbolic: bool

    def to_dict(self) -> dict:
        return {
            "location": [self.location.x, self.location.y],
            "jacobian": [list(self.jacobian[0]), list(self.jacobian[1])],
            "eigenvalues": [[e.real, e.imag] for e in self.eigenvalues],
            "classification": self.classification.value,
            "hyperbolic": self.hyperbolic,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EquilibriumReport":
        return cls(
            location=Point(*d["location"]),
            jacobian=(tuple(d["jacobian"][0]), tuple(d["jacobian"][1])),
            eigenvalues=tuple(complex(re, im) for re, im in d["eigenvalues"]),
            classification=Classification(d["classification"]),
            hyperbolic=d["hyperbolic"],
        )


@dataclass(frozen=True)
class Trajectory:
    times: tuple
    states: tuple  # of Point
    tolerance: float
    status: TrajectoryStatus

    @property
    def endpoint(self) -> Point:
        return self.states[-1]

    def write_csv(self, stream) -> None:
        """CSV with header t,x,y at full float precision."""
        writer = csv.writer(stream)
        writer.writerow(["t", "x", "y"])
        for t, z in zip(self.times, self.states):
            writer.writerow([f"{t:.17g}", f"{z.x:.17g}", f"{z.y:.17g}"])


@dataclass(frozen=True)
class Section:
    """Oriented transversal line through ``anchor`` with unit ``normal``."""

    anchor: Point
    normal: tuple
    direction: CrossingDirection = CrossingDirection.BOTH

    def __post_init__(self):
        n = math.hypot(self.normal[0], self.normal[1])
        if abs(n - 1.0) > 1e-12:
            raise ValueError("section normal must have unit length (within 1e-12)")

    @classmethod
    def through(cls, anchor, direction_vector,
                crossing: CrossingDirection = CrossingDirection.BOTH) -> "Section":
        """Section at ``anchor`` whose normal is the normalized vector."""
        nx, ny = float(direction_vector[0]), float(direction_vector[1])
        n = math.hypot(nx, ny)
        if n == 0:
            raise ValueError("direction vector must be nonzero")
        return cls(anchor=Point(*anchor), normal=(nx / n, ny / n),
                   direction=crossing)

    @property
    def tangent(self) -> tuple:
        return (-self.normal[1], self.normal[0])

    def signed_distance(self, z) -> float:
        return ((z[0] - self.anchor.x) * self.normal[0]
                + (z[1] - self.anchor.y) * self.normal[1])

    def along(self, z) -> float:
        tx, ty = self.tangent
        return (z[0] - self.anchor.x) * tx + (z[1] - self.anchor.y) * ty

    def point_at(self, u: float) -> Point:
        tx, ty = self.tangent
        return Point(self.anchor.x + u * tx, self.anchor.y + u * ty)


@dataclass(frozen=True)
class LimitCycleReport:
    period: float
    points: tuple  # one full loop
    amplitude_x: float
    return_map_slope: float
    stability: Stability
    times: tuple = ()  # sampling times for the loop, aligned with points

    def to_dict(self) -> dict:
        return {
            "period": self.period,
            "amplitude_x": self.amplitude_x,
            "return_map_slope": self.return_map_slope,
            "stability": self.stability.value,
            "points": [[p.x, p.y] for p in self.points],
            "times": list(self.times),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LimitCycleReport":
        return cls(
            period=d["period"],
            points=tuple(Point(*p) for p in d["points"]),
            amplitude_x=d["amplitude_x"],
            return_map_slope=d["return_map_slope"],
            stability=Stability(d["stability"]),
            times=tuple(d["times"]),
        )

    def summary(self) -> dict:
        return {
            "period": self.period,
            "amplitude_x": self.amplitude_x,
            "return_map_slope": self.return_map_slope,
            "stability": self.stability.value,
            "n_points": len(self.points),
        }

    def write_csv(self, stream) -> None:
        writer = csv.writer(stream)
        writer.writerow(["t", "x", "y"])
        for t, z in zip(self.times, self.points):
            writer.writerow([f"{t:.17g}", f"{z.x:.17g}", f"{z.y:.17g}"])


# --- field compilation -------------------------------------------------------


def _compile_poly(p: Poly) -> Callable[[float, float], float]:
    terms = [(i, j, float(c.re)) for (i, j), c in p.terms.items()]

    def ev(x: float, y: float) -> float:
        total = 0.0
        for i, j, c in terms:
            total += c * x ** i * y ** j
        return total

    return ev


def compile_field(system: VectorField):
    """ODE right-hand side f(t, [x, y]) -> [P, Q] with plain float terms."""
    pf = _compile_poly(system.p)
    qf = _compile_poly(system.q)

    def fun(_t, z):
        return [pf(z[0], z[1]), qf(z[0], z[1])]

    return fun


# --- equilibria ---------------------------------------------------------------


def eigenvalues_2x2(j11: float, j12: float, j21: float, j22: float):
    """Closed-form eigenvalues of a real 2x2 matrix."""
    tr = j11 + j22
    det = j11 * j22 - j12 * j21
    disc = tr * tr - 4.0 * det
    if disc >= 0:
        root = math.sqrt(disc)
        return complex((tr + root) / 2.0), complex((tr - root) / 2.0)
    root = math.sqrt(-disc)
    return complex(tr / 2.0, root / 2.0), complex(tr / 2.0, -root / 2.0)


def _classify(eigs) -> tuple:
    l1, l2 = eigs
    scale = max(abs(l1), abs(l2))
    if scale == 0.0:
        return Classification.DEGENERATE, False
    thr = EIGENVALUE_ZERO_THRESHOLD * scale
    hyperbolic = min(abs(l1.real), abs(l2.real)) > thr
    if l1.imag != 0.0:
        if abs(l1.real) <= thr:
            return Classification.CENTER_CANDIDATE, False
        return Classification.FOCUS, hyperbolic
    if abs(l1) <= thr or abs(l2) <= thr:
        return Classification.DEGENERATE, False
    if l1.real * l2.real < 0:
        return Classification.SADDLE, hyperbolic
    return Classification.NODE, hyperbolic


def classify_equilibrium(system: VectorField, z) -> EquilibriumReport:
    """Classify a zero of the field from its symbolic Jacobian at z.

    A complex pair with real part below the relative threshold is reported as
    CENTER_CANDIDATE and never upgraded to a center: floats cannot certify a
    purely imaginary spectrum.
    """
    x, y = float(z[0]), float(z[1])
    if max(abs(system.p.evaluate((x, y)).real),
           abs(system.q.evaluate((x, y)).real)) > 1e-8:
        raise NotAnEquilibriumError(f"|X({x}, {y})| > 1e-8")
    px, py, qx, qy = system.jacobian()
    j11 = px.evaluate((x, y)).real
    j12 = py.evaluate((x, y)).real
    j21 = qx.evaluate((x, y)).real
    j22 = qy.evaluate((x, y)).real
    eigs = eigenvalues_2x2(j11, j12, j21, j22)
    classification, hyperbolic = _classify(eigs)
    return EquilibriumReport(
        location=Point(x, y),
        jacobian=((j11, j12), (j21, j22)),
        eigenvalues=eigs,
        classification=classification,
        hyperbolic=hyperbolic,
    )


def find_equilibria(system: VectorField, box: Box2, grid_n: int = 32,
                    tol: float = 1e-9) -> list:
    """Newton iteration from a grid of seeds; converged zeros are deduplicated.

    Returns classified reports sorted by location; may be empty.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    x_min, x_max, y_min, y_max = box.as_floats()
    px, py, qx, qy = system.jacobian()
    found: list = []
    for sx in np.linspace(x_min, x_max, grid_n):
        for sy in np.linspace(y_min, y_max, grid_n):
            z = _newton(system, (px, py, qx, qy), float(sx), float(sy), tol)
            if z is None:
                continue
            if not (x_min - 1e-9 <= z[0] <= x_max + 1e-9
                    and y_min - 1e-9 <= z[1] <= y_max + 1e-9):
                continue
            if any(math.hypot(z[0] - w[0], z[1] - w[1]) < DEDUP_RADIUS
                   for w in found):
                continue
            found.append(z)
    found.sort()
    return [classify_equilibrium(system, z) for z in found]


def _newton(system, jac_polys, x, y, tol, max_iter=50):
    px, py, qx, qy = jac_polys
    for _ in range(max_iter):
        fx = system.p.evaluate((x, y)).real
        fy = system.q.evaluate((x, y)).real
        if max(abs(fx), abs(fy)) <= tol:
            return (x, y)
        j11 = px.evaluate((x, y)).real
        j12 = py.evaluate((x, y)).real
        j21 = qx.evaluate((x, y)).real
        j22 = qy.evaluate((x, y)).real
        det = j11 * j22 - j12 * j21
        if abs(det) < 1e-14:
            return None
        x -= (j22 * fx - j12 * fy) / det
        y -= (-j21 * fx + j11 * fy) / det
        if not (math.isfinite(x) and math.isfinite(y)) or max(abs(x), abs(y)) > 1e8:
            return None
    return None


# --- integration ---------------------------------------------------------------


def _step_solver(system: VectorField, z0, t_span: float, tol: float):
    fun = compile_field(system)
    return RK45(fun, 0.0, [float(z0[0]), float(z0[1])], t_bound=t_span,
                rtol=tol, atol=tol, max_step=abs(t_span))


def integrate(system: VectorField, z0, t_span: float, tol: float = 1e-9,
              domain: Optional[Box2] = None) -> Trajectory:
    """Adaptive RK 5(4) integration from z0 over [0, t_span].

    Stops at t_span (COMPLETED), at the first exit from ``domain``
    (LEFT_DOMAIN, with the boundary crossing located on the dense output), or
    on integrator failure (STEP_FAILURE).  Negative t_span integrates
    backward.
    """
    if not 1e-13 <= tol <= 1e-3:
        raise ValueError("tol must lie in [1e-13, 1e-3]")
    if t_span == 0:
        raise ValueError("t_span must be nonzero")
    solver = _step_solver(system, z0, t_span, tol)
    times = [0.0]
    states = [Point(float(z0[0]), float(z0[1]))]
    status = TrajectoryStatus.COMPLETED
    while solver.status == "running":
        solver.step()
        if solver.status == "failed":
            status = TrajectoryStatus.STEP_FAILURE
            break
        z = Point(float(solver.y[0]), float(solver.y[1]))
        if domain is not None and not domain.contains_point(z):
            t_exit, z_exit = _locate_exit(solver.dense_output(), domain,
                                          solver.t_old, solver.t)
            times.append(t_exit)
            states.append(z_exit)
            status = TrajectoryStatus.LEFT_DOMAIN
            break
        times.append(float(solver.t))
        states.append(z)
    return Trajectory(times=tuple(times), states=tuple(states),
                      tolerance=tol, status=status)


def _locate_exit(dense, domain: Box2, t_in: float, t_out: float):
    """Bisect the dense output for the domain exit time."""
    lo, hi = t_in, t_out
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        z = dense(mid)
        if domain.contains_point((z[0], z[1])):
            lo = mid
        else:
            hi = mid
        if abs(hi - lo) < 1e-13 * max(1.0, abs(t_out)):
            break
    z = dense(hi)
    return hi, Point(float(z[0]), float(z[1]))


# --- Poincare sections ----------------------------------------------------------


def _direction_ok(direction: CrossingDirection, s_old: float, s_new: float) -> bool:
    if direction is CrossingDirection.POSITIVE_CROSSING:
        return s_old < 0 < s_new or (s_old < 0 and s_new == 0)
    if direction is CrossingDirection.NEGATIVE_CROSSING:
        return s_new < 0 < s_old or (s_old > 0 and s_new == 0)
    return (s_old < 0 < s_new) or (s_new < 0 < s_old) or \
        (s_new == 0 and s_old != 0)


def poincare_return(system: VectorField, section: Section, z0,
                    max_time: float = 100.0, tol: float = 1e-10):
    """First return of the trajectory from z0 to the section.

    z0 must lie on the section (within 1e-9).  The crossing is located by
    bisection on the step's dense output until the signed distance is below
    1e-10.  Raises NoReturnError if no crossing in the configured direction
    occurs within max_time.
    """
    if abs(section.signed_distance(z0)) > 1e-9:
        raise ValueError("z0 must lie on the section (within 1e-9)")
    solver = _step_solver(system, z0, max_time, tol)
    s_old = section.signed_distance(z0)
    armed = False
    while solver.status == "running":
        solver.step()
        if solver.status == "failed":
            raise NoReturnError("integration failed before a return")
        z = (float(solver.y[0]), float(solver.y[1]))
        s_new = section.signed_distance(z)
        if not armed:
            if abs(s_new) > 1e-6:
                armed = True
        elif _direction_ok(section.direction, s_old, s_new):
            t_cross, z_cross = _locate_crossing(
                solver.dense_output(), section, solver.t_old, solver.t)
            return z_cross, t_cross
        s_old = s_new
    raise NoReturnError(f"no section return within t = {max_time}")


def _locate_crossing(dense, section: Section, t_lo: float, t_hi: float):
    s_lo = section.signed_distance(dense(t_lo))
    lo, hi = t_lo, t_hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        z = dense(mid)
        s_mid = section.signed_distance((z[0], z[1]))
        if abs(s_mid) <= 1e-10:
            return mid, Point(float(z[0]), float(z[1]))
        if (s_mid > 0) == (s_lo > 0):
            lo = mid
        else:
            hi = mid
    z = dense(hi)
    return hi, Point(float(z[0]), float(z[1]))


# --- limit cycles ----------------------------------------------------------------


def detect_limit_cycle(system: VectorField, section: Section, seed,
                       max_iters: int = 25, tol: float = 1e-10,
                       max_time: float = 100.0) -> LimitCycleReport:
    """Fixed-point iteration of the return map with secant acceleration.

    Convergence is successive section crossings within 1e-9; the return-map
    slope comes from a divided difference of two nearby returns.  A slope
    within 1e-3 of 1 is reported MARGINAL (a non-isolated periodic family,
    e.g. a linear center, converges immediately with slope 1).
    """
    if abs(section.signed_distance(seed)) > 1e-9:
        raise ValueError("seed must lie on the section (within 1e-9)")

    def return_map(u: float):
        z = section.point_at(u)
        try:
            z_next, t_next = poincare_return(system, section, z, max_time, tol)
        except NoReturnError as exc:
            raise CycleNotFoundError(f"return map undefined: {exc}") from exc
        return section.along(z_next), t_next

    u_prev = section.along(seed)
    u_curr, _ = return_map(u_prev)
    f_prev = u_curr - u_prev
    u_star = None
    if abs(f_prev) <= 1e-9:
        u_star = u_curr
    else:
        for _ in range(max_iters):
            u_next, _ = return_map(u_curr)
            f_curr = u_next - u_curr
            if abs(f_curr) <= 1e-9:
                u_star = u_next
                break
            denom = f_curr - f_prev
            if abs(denom) > 1e-14:
                u_secant = u_curr - f_curr * (u_curr - u_prev) / denom
            else:
                u_secant = u_next
            u_prev, f_prev = u_curr, f_curr
            u_curr = u_secant
        if u_star is None:
            raise CycleNotFoundError(
                f"return map did not converge within {max_iters} iterations")

    # measure the period at the fixed point itself so the sampled loop closes
    _, period = return_map(u_star)
    z_star = section.point_at(u_star)
    times, points = _sample_loop(system, z_star, period, tol)
    amplitude = max(abs(p.x) for p in points)
    # probe step large enough that crossing-location error (~1e-10) stays
    # well below the divided difference
    h = 1e-4 * max(1.0, abs(u_star))
    u_h, _ = return_map(u_star + h)
    slope = (u_h - u_star) / h
    if abs(slope) < 1.0 - 1e-3:
        stability = Stability.STABLE
    elif abs(slope) > 1.0 + 1e-3:
        stability = Stability.UNSTABLE
    else:
        stability = Stability.MARGINAL
    return LimitCycleReport(period=period, points=points, amplitude_x=amplitude,
                            return_map_slope=slope, stability=stability,
                            times=times)


def _sample_loop(system: VectorField, z0: Point, period: float, tol: float,
                 subsamples: int = 4):
    """One full loop from z0, densely sampled from the step interpolants."""
    solver = _step_solver(system, z0, period, tol)
    times = [0.0]
    points = [z0]
    while solver.status == "running":
        solver.step()
        if solver.status == "failed":
            break
        dense = solver.dense_output()
        for k in range(1, subsamples + 1):
            t = solver.t_old + (solver.t - solver.t_old) * k / subsamples
            z = dense(t)
            times.append(float(t))
            points.append(Point(float(z[0]), float(z[1])))
    return tuple(times), tuple(points)
