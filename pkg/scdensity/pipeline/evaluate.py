import logging
import math
from typing import Dict, Optional

import numpy as np
import pandas as pd
from tqdm import tqdm

from scdensity.metrics.metric_collectors import (
    ComparisonReport, RegionErrorCollector, profile_integrals)
from scdensity.semiclassical.grids import Kind, Method
from scdensity.semiclassical.potentials import Region, Side, anchored_integral
from scdensity.semiclassical.quantize import gamma_ladder, gamma_scale
from scdensity.semiclassical.uniform import (
    derivative_jump_estimate, regional_asymptotics, semiclassical_terms)

FORBIDDEN_DEPTHS = (6.0, 8.0, 10.0)
MIN_FORBIDDEN_DEPTH = 8.0

SCAN_COLUMNS = [
    "gamma", "hbar", "n_particles", "fermi_energy", "bulk_linf_frac",
    "turning_value", "turning_law", "turning_ratio",
    "forbidden_ratio", "forbidden_ked_ratio",
    "jump_measured", "jump_predicted", "jump_ratio", "jump_limit", "jump_ratio_normalized",
]


class Evaluator:
    """Accuracy studies of the semiclassical profiles against the exact oracle."""

    def __init__(self, pipeline):
        self.pipeline = pipeline
        self.cfg = pipeline.cfg
        self.logger = logging.getLogger(__name__)

    @property
    def system(self):
        if self.pipeline.system is None:
            self.pipeline.init_system()
        return self.pipeline.system

    def compare(self) -> ComparisonReport:
        system = self.system
        grid = self.pipeline.init_grid()
        collector = RegionErrorCollector(system)
        methods = [m for m in self.pipeline.methods if m is not Method.EXACT]
        integrals: Dict[str, Dict[str, float]] = {}
        profiles = {}
        for kind in Kind:
            exact = self.pipeline.profile(Method.EXACT, kind, grid=grid)
            profiles[(Method.EXACT, kind)] = exact
            for method in methods:
                candidate = self.pipeline.profile(method, kind, grid=grid)
                profiles[(method, kind)] = candidate
                collector.compute(exact, candidate)

        for method in [Method.EXACT] + methods:
            integrals[method.value] = profile_integrals(
                system, profiles[(method, Kind.DENSITY)], profiles[(method, Kind.KED)])
        report = ComparisonReport(system=system.describe(), errors=collector.to_frame(),
                                  integrals=integrals)
        self.logger.info(f"Compared {len(methods)} methods on {grid.points} points")
        return report

    def _forbidden_ratios(self, base, scaled, gamma):
        """Median ratio of n^sc (and t^sc) to the continued small-gamma estimate deep in the tails."""
        geometry = scaled.fermi_geometry
        density, ked = [], []
        for k in FORBIDDEN_DEPTHS:
            for x_t, side, direction in ((geometry.x_minus, Side.LEFT, -1.0),
                                         (geometry.x_plus, Side.RIGHT, 1.0)):
                x = x_t + direction * k * scaled.length_scale
                lo, hi = scaled.potential.domain
                if not lo < x < hi:
                    continue
                orbit = anchored_integral(scaled.potential, x, scaled.fermi_energy, side,
                                          geometry, scaled.mass)
                if orbit.region is not Region.FORBIDDEN or orbit.magnitude / scaled.hbar < MIN_FORBIDDEN_DEPTH:
                    continue
                terms = semiclassical_terms(scaled, x)
                estimate = regional_asymptotics(base, x, gamma)
                density.append(terms.density / estimate.density)
                ked.append(terms.ked / estimate.ked)
        if not density:
            return math.nan, math.nan
        return float(np.median(density)), float(np.median(ked))

    def _scan_row(self, base, gamma) -> dict:
        scaled = gamma_scale(base, float(gamma))
        grid = self.pipeline.init_grid(scaled)
        exact = self.pipeline.profile(Method.EXACT, Kind.DENSITY, system=scaled, grid=grid)
        uniform = self.pipeline.profile(Method.UNIFORM, Kind.DENSITY, system=scaled, grid=grid)
        errors = RegionErrorCollector(scaled).compute(exact, uniform)

        x_plus = scaled.fermi_geometry.x_plus
        turning_value = semiclassical_terms(scaled, x_plus).density
        turning_law = regional_asymptotics(base, x_plus, float(gamma)).turning_density
        forbidden, forbidden_ked = self._forbidden_ratios(base, scaled, float(gamma))
        jump = derivative_jump_estimate(scaled)
        return {
            "gamma": float(gamma),
            "hbar": scaled.hbar,
            "n_particles": scaled.n_particles,
            "fermi_energy": scaled.fermi_energy,
            "bulk_linf_frac": errors[Region.ALLOWED.value]["linf_frac"],
            "turning_value": turning_value,
            "turning_law": turning_law,
            "turning_ratio": turning_value / turning_law,
            "forbidden_ratio": forbidden,
            "forbidden_ked_ratio": forbidden_ked,
            "jump_measured": jump.measured,
            "jump_predicted": jump.predicted,
            "jump_ratio": jump.ratio,
            "jump_limit": jump.limit,
            "jump_ratio_normalized": jump.normalized_ratio,
        }

    def gamma_scan(self, gammas: Optional[list] = None) -> pd.DataFrame:
        base = self.system
        gammas = gamma_ladder(self.cfg.scan.gamma_list if gammas is None else gammas)
        rows = []
        for gamma in tqdm(gammas, desc="gamma-scan", disable=not self.cfg.progress):
            row = self._scan_row(base, gamma)
            self.logger.info(
                f"gamma={gamma}: N={row['n_particles']} bulk error {row['bulk_linf_frac']:.3e}, "
                f"turning ratio {row['turning_ratio']:.4f}, "
                f"jump ratio {row['jump_ratio']:.3f} (limit {row['jump_limit']:.3f})")
            rows.append(row)
        return pd.DataFrame(rows, columns=SCAN_COLUMNS)
