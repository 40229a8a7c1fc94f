"""Best-effort region analysis: equilibria, local certificates, coverage, cycles.

The pipeline locates zeros of the field, synthesizes a local Dulac
multiplier at each hyperbolic one, greedily doubles every certified box
until certification fails or the region boundary is reached, attacks the
remaining tiles with the constant multiplier, and finally scans leftover
tiles for limit cycles from their centers.  The report is explicitly
best-effort: an uncovered tile means "unresolved", never "no orbit".
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .certify import Box2, Certificate, bendixson
from .errors import CycleNotFoundError, DulacError, NoReturnError
from .flow import (
    CrossingDirection,
    EquilibriumReport,
    LimitCycleReport,
    Section,
    detect_limit_cycle,
    find_equilibria,
)
from .multiplier import Multiplier, multiplier_from_dict, multiplier_to_dict
from .poly import VectorField
from .synthesis import certify_punctured_box, local_quadratic_multiplier

BEST_EFFORT_NOTE = (
    "best-effort analysis: uncovered regions are unresolved, and the absence "
    "of a detected cycle is not a proof of nonexistence"
)
P_CONNECTED_NOTE = (
    "the certified union need not be simply connected; on a p-connected "
    "region the criterion still allows up to p-1 closed orbits threading "
    "the holes"
)
MARGINAL_FAMILY_NOTE = (
    "marginal return-map slope: the detected orbit belongs to a non-isolated "
    "periodic family"
)


@dataclass
class AnalyzeConfig:
    grid_n: int = 32
    newton_tol: float = 1e-9
    min_radius: float = 1e-3
    local_max_depth: int = 8
    local_initial_half_width: float = 1.0
    max_growth_steps: int = 6
    tile_n: int = 10
    tile_depth: int = 6
    cycle_tol: float = 1e-10
    cycle_max_iters: int = 20
    cycle_max_time: float = 200.0
    max_cycle_seeds: int = 12


@dataclass(frozen=True)
class LocalCertificate:
    equilibrium: EquilibriumReport
    multiplier: Multiplier
    box: Box2
    certificate: Certificate

    def to_dict(self) -> dict:
        return {
            "equilibrium": self.equilibrium.to_dict(),
            "multiplier": multiplier_to_dict(self.multiplier),
            "box": self.box.to_dict(),
            "certificate": self.certificate.to_full_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LocalCertificate":
        return cls(
            equilibrium=EquilibriumReport.from_dict(d["equilibrium"]),
            multiplier=multiplier_from_dict(d["multiplier"]),
            box=Box2.from_dict(d["box"]),
            certificate=Certificate.from_full_dict(d["certificate"]),
        )


@dataclass(frozen=True)
class AnalysisReport:
    system: str
    equilibria: tuple
    local_certificates: tuple
    global_boxes_certified: tuple
    uncovered_regions: tuple
    limit_cycles: tuple
    notes: tuple

    @property
    def fully_certified(self) -> bool:
        return not self.uncovered_regions

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "equilibria": [e.to_dict() for e in self.equilibria],
            "local_certificates": [c.to_dict() for c in self.local_certificates],
            "global_boxes_certified": [b.to_dict()
                                       for b in self.global_boxes_certified],
            "uncovered_regions": [b.to_dict() for b in self.uncovered_regions],
            "limit_cycles": [c.to_dict() for c in self.limit_cycles],
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisReport":
        return cls(
            system=d["system"],
            equilibria=tuple(EquilibriumReport.from_dict(e)
                             for e in d["equilibria"]),
            local_certificates=tuple(LocalCertificate.from_dict(c)
                                     for c in d["local_certificates"]),
            global_boxes_certified=tuple(Box2.from_dict(b)
                                         for b in d["global_boxes_certified"]),
            uncovered_regions=tuple(Box2.from_dict(b)
                                    for b in d["uncovered_regions"]),
            limit_cycles=tuple(LimitCycleReport.from_dict(c)
                               for c in d["limit_cycles"]),
            notes=tuple(d["notes"]),
        )


def run_analyze(system: VectorField, region: Box2,
                config: AnalyzeConfig | None = None) -> AnalysisReport:
    cfg = config or AnalyzeConfig()
    notes: list = []
    min_r = Fraction(float(cfg.min_radius))

    # Step 1: zeros of the field
    equilibria = find_equilibria(system, region, cfg.grid_n, cfg.newton_tol)

    # Step 2: local multipliers at hyperbolic equilibria, then greedy doubling
    local_certs: list = []
    cores: list = []
    for eq in equilibria:
        if not eq.hyperbolic:
            notes.append(
                f"equilibrium ({eq.location.x:.6g}, {eq.location.y:.6g}) is "
                f"{eq.classification.value}; no local multiplier attempted")
            continue
        try:
            multiplier, carrier, (ex, ey) = local_quadratic_multiplier(
                system, eq.location)
        except DulacError as exc:
            notes.append(
                f"local synthesis failed at ({eq.location.x:.6g}, "
                f"{eq.location.y:.6g}): {exc}")
            continue
        cache: dict = {}
        cert = None
        w = Fraction(float(cfg.local_initial_half_width))
        while w >= min_r:
            cert = certify_punctured_box(carrier, ex, ey, w, min_r,
                                         cfg.local_max_depth, cache)
            if cert is not None:
                break
            w = w / 2
        if cert is None:
            notes.append(
                f"local certification failed at ({eq.location.x:.6g}, "
                f"{eq.location.y:.6g}) down to radius {cfg.min_radius}")
            continue
        # Step 3a: double per axis while the region holds and rings certify
        for _ in range(cfg.max_growth_steps):
            w2 = w * 2
            if not region.contains_box(Box2.centered(ex, ey, w2)):
                break
            grown = certify_punctured_box(carrier, ex, ey, w2, min_r,
                                          cfg.local_max_depth, cache)
            if grown is None:
                break
            w, cert = w2, grown
        local_certs.append(LocalCertificate(
            equilibrium=eq, multiplier=multiplier, box=cert.box,
            certificate=cert))
        cores.append((cert.box, Box2.centered(ex, ey, min_r)))

    # Step 3b: tile the region and attack remaining tiles with B = 1
    certified_tiles: list = []
    uncovered: list = []
    for tile in _tiles(region, cfg.tile_n):
        covered = any(
            box.contains_box(tile) and not tile.intersects(core)
            for box, core in cores)
        if covered:
            continue
        result = bendixson(system, tile, cfg.tile_depth)
        if result.certificate.is_positive:
            certified_tiles.append(tile)
        else:
            uncovered.append(tile)

    # Step 3c: scan uncovered tiles for limit cycles from their centers
    cycles: list = []
    marginal_seen = False
    for tile in _subsample(uncovered, cfg.max_cycle_seeds):
        center = (float(tile.x_mid), float(tile.y_mid))
        vx, vy = system(center)
        if math.hypot(vx, vy) < 1e-6:
            continue
        section = Section.through(center, (vx, vy),
                                  CrossingDirection.POSITIVE_CROSSING)
        try:
            report = detect_limit_cycle(system, section, center,
                                        cfg.cycle_max_iters, cfg.cycle_tol,
                                        cfg.cycle_max_time)
        except (CycleNotFoundError, NoReturnError, ValueError):
            continue
        if any(abs(report.period - c.period) < 1e-3 * max(1.0, c.period)
               for c in cycles):
            continue
        cycles.append(report)
        if report.stability.value == "marginal":
            marginal_seen = True

    if marginal_seen:
        notes.append(MARGINAL_FAMILY_NOTE)
    if (local_certs or certified_tiles) and uncovered:
        notes.append(P_CONNECTED_NOTE)
    notes.append(BEST_EFFORT_NOTE)

    boxes = [c.box for c in local_certs] + certified_tiles
    return AnalysisReport(
        system=system.source_text or str(system),
        equilibria=tuple(equilibria),
        local_certificates=tuple(local_certs),
        global_boxes_certified=tuple(boxes),
        uncovered_regions=tuple(uncovered),
        limit_cycles=tuple(cycles),
        notes=tuple(notes),
    )


def exit_code(report: AnalysisReport) -> int:
    """0 fully certified, 1 cycle detected, 2 inconclusive coverage."""
    if report.limit_cycles:
        return 1
    if report.uncovered_regions:
        return 2
    return 0


def _tiles(region: Box2, n: int):
    xs = [region.x_min + region.width * i / n for i in range(n + 1)]
    ys = [region.y_min + region.height * j / n for j in range(n + 1)]
    for j in range(n):
        for i in range(n):
            yield Box2(xs[i], xs[i + 1], ys[j], ys[j + 1])


def _subsample(items, limit: int):
    if len(items) <= limit:
        return list(items)
    if limit <= 1:
        return list(items[:limit])
    step = (len(items) - 1) / (limit - 1)
    indices = sorted({round(i * step) for i in range(limit)})
    return [items[i] for i in indices]
