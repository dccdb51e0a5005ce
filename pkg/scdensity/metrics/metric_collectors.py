import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid

from scdensity.semiclassical.grids import DensityProfile, Kind, Method
from scdensity.semiclassical.potentials import Region

TURNING_REGION_WIDTH = 3.0
FRACTION_FLOOR = 1e-12


def classify_regions(system, xs, turning_width: float = TURNING_REGION_WIDTH) -> np.ndarray:
    """Label every grid point allowed, turning or forbidden at the Fermi level.

    Points within ``turning_width`` length scales of x- or x+ are turning points;
    the rest split by the sign of E_F - v(x). The labels partition the grid.
    """
    xs = np.asarray(xs, dtype=float)
    geometry = system.fermi_geometry
    distance = np.minimum(np.abs(xs - geometry.x_minus), np.abs(xs - geometry.x_plus))
    kinetic = system.fermi_energy - system.potential(xs)
    labels = np.where(kinetic > 0, Region.ALLOWED.value, Region.FORBIDDEN.value).astype(object)
    labels[distance < turning_width * system.length_scale] = Region.TURNING.value
    return labels


def linf_abs(y_true, y_pred, xs=None):
    return float(np.max(np.abs(y_pred - y_true)))


def l2_abs(y_true, y_pred, xs=None):
    if xs is None or len(xs) < 2:
        return float(np.sqrt(np.sum((y_pred - y_true) ** 2)))
    return float(np.sqrt(trapezoid((y_pred - y_true) ** 2, xs)))


def linf_frac(y_true, y_pred, xs=None):
    scale = np.abs(y_true)
    mask = scale > FRACTION_FLOOR * max(scale.max(), FRACTION_FLOOR)
    if not np.any(mask):
        raise ValueError("reference vanishes on the region")
    return float(np.max(np.abs(y_pred[mask] - y_true[mask]) / scale[mask]))


def l2_frac(y_true, y_pred, xs=None):
    norm = l2_abs(y_true, np.zeros_like(y_true), xs)
    if norm == 0:
        raise ValueError("reference vanishes on the region")
    return l2_abs(y_true, y_pred, xs) / norm


def calculate_metric(metric_func, y_true, y_pred, **kwargs):
    result = None
    if len(y_pred) == len(y_true) and len(y_pred) > 0:
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                result = metric_func(y_true, y_pred, **kwargs)
        except ValueError:
            result = math.nan
    return result


class RegionErrorCollector(object):
    METRIC_NAMES = ["linf_abs", "l2_abs", "linf_frac", "l2_frac"]
    METRIC_FUNCS = {
        "linf_abs": linf_abs,
        "l2_abs": l2_abs,
        "linf_frac": linf_frac,
        "l2_frac": l2_frac,
    }
    REGIONS = [Region.ALLOWED.value, Region.TURNING.value, Region.FORBIDDEN.value]

    def __init__(self, system, turning_width: float = TURNING_REGION_WIDTH):
        self.system = system
        self.turning_width = turning_width
        self.reset()

    def reset(self):
        self.rows = []

    def compute(self, reference: DensityProfile, candidate: DensityProfile) -> Dict[str, Dict[str, float]]:
        assert np.array_equal(reference.xs, candidate.xs), "profiles must share one grid"
        assert reference.kind is candidate.kind, "cannot compare a density with a KED"
        labels = classify_regions(self.system, reference.xs, self.turning_width)
        results = {}
        for region in ["all"] + self.REGIONS:
            mask = np.ones(len(labels), dtype=bool) if region == "all" else labels == region
            xs = reference.xs[mask]
            metrics = {
                name: calculate_metric(func, reference.values[mask], candidate.values[mask], xs=xs)
                for name, func in self.METRIC_FUNCS.items()
            }
            metrics["points"] = int(mask.sum())
            results[region] = metrics
            self.rows.append({"kind": candidate.kind.value, "method": candidate.method.value,
                              "region": region, **metrics})
        return results

    def to_frame(self) -> pd.DataFrame:
        columns = ["kind", "method", "region", "points"] + self.METRIC_NAMES
        return pd.DataFrame(self.rows, columns=columns)


def profile_integrals(system, density: Optional[DensityProfile], ked: Optional[DensityProfile]) -> Dict[str, float]:
    """Particle number, kinetic energy and total energy int(v n + t) of one method."""
    result = {}
    if density is not None:
        result["particle_number"] = density.integral()
    if ked is not None:
        result["kinetic_energy"] = ked.integral()
    if density is not None and ked is not None:
        v = system.potential(density.xs)
        result["total_energy"] = float(trapezoid(v * density.values, density.xs)) + ked.integral()
    if density is not None and "energies" in density.metadata:
        result["eigen_sum"] = float(np.sum(density.metadata["energies"]))
    return result


@dataclass
class ComparisonReport:
    system: str
    errors: pd.DataFrame
    integrals: Dict[str, Dict[str, float]] = field(default_factory=dict)

    def integrals_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame.from_dict(self.integrals, orient="index")
        frame.index.name = "method"
        return frame.reset_index()

    def error(self, kind, method, region, metric="linf_frac") -> float:
        kind, method = Kind(kind).value, Method(method).value
        rows = self.errors[(self.errors.kind == kind) & (self.errors.method == method)
                           & (self.errors.region == region)]
        assert len(rows) == 1, f"no row for {kind}/{method}/{region}"
        return float(rows.iloc[0][metric])

    def summary(self) -> str:
        lines = [f"Comparison against the exact oracle for {self.system}"]
        for (kind, method), group in self.errors.groupby(["kind", "method"], sort=False):
            parts = []
            for _, row in group.iterrows():
                value = row["linf_frac"]
                text = "n/a" if value is None or not np.isfinite(value) else f"{value:.3e}"
                parts.append(f"{row['region']}={text}")
            lines.append(f"  {kind:<7s} {method:<10s} Linf frac: " + " ".join(parts))
        for method, values in self.integrals.items():
            text = " ".join(f"{k}={v:.10g}" for k, v in values.items())
            lines.append(f"  integrals {method:<10s} {text}")
        return "\n".join(lines)
