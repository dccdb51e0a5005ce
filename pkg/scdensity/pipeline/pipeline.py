import io
import logging
from logging import config as init_logging_config
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from omegaconf import OmegaConf

from scdensity.errors import ConfigError
from scdensity.reference.eigensolver import EigenSolution, solve_system
from scdensity.semiclassical.grids import DensityProfile, GridSpec, Kind, Method
from scdensity.semiclassical.potentials import BUILTIN_POTENTIALS, PotentialModel
from scdensity.semiclassical.quantize import QuantumSystem, build_system, spectrum_table
from scdensity.semiclassical.uniform import default_grid, profile
from scdensity.utils.common import init_obj, write_config_to_snapshot


class SemiclassicalPipeline:

    pipeline_name = "scdensity"

    def __init__(self, cfg):
        self.cfg = cfg
        self.logger = logging.getLogger(__name__)
        self.potential = None
        self.system = None
        self._solutions: Dict[tuple, EigenSolution] = {}

    def init_logging(self):
        logging_cfg = OmegaConf.to_container(self.cfg.logging, resolve=True)
        if self.cfg.output.snapshot_dir is not None:
            snapshot = write_config_to_snapshot(self.cfg, self.cfg.output.snapshot_dir)
            logging_cfg.setdefault("handlers", {})["file"] = {
                "class": "logging.FileHandler",
                "filename": str(Path(self.cfg.output.snapshot_dir) / "pipeline.log"),
                "formatter": next(iter(logging_cfg.get("formatters", {"simple": None}))),
            }
            logging_cfg.setdefault("root", {}).setdefault("handlers", []).append("file")
        if logging_cfg:
            init_logging_config.dictConfig(logging_cfg)
        if self.cfg.output.snapshot_dir is not None:
            self.logger.info(f"Config snapshot written to {snapshot}")

    def init_potential(self) -> PotentialModel:
        name = self.cfg.potential.name
        params = OmegaConf.to_container(self.cfg.potential.params, resolve=True)
        if name in BUILTIN_POTENTIALS:
            path = BUILTIN_POTENTIALS[name]
        elif "." in name:
            path = name
        else:
            raise ConfigError(
                f"unknown potential '{name}'; built-ins: {', '.join(sorted(BUILTIN_POTENTIALS))}",
                "init_potential")
        potential = init_obj(path, params)
        if not isinstance(potential, PotentialModel):
            raise ConfigError(f"{path} does not build a PotentialModel", "init_potential")
        self.potential = potential
        return potential

    def init_system(self) -> QuantumSystem:
        if self.potential is None:
            self.init_potential()
        sys_cfg = self.cfg.system
        self.system = build_system(self.potential, hbar=sys_cfg.hbar, mass=sys_cfg.mass,
                                   n_particles=sys_cfg.n_particles)
        self.logger.info(f"System: {self.system.describe()}")
        return self.system

    def init_grid(self, system: Optional[QuantumSystem] = None) -> GridSpec:
        system = self.system if system is None else system
        grid_cfg = self.cfg.grid
        auto = default_grid(system, points=grid_cfg.points, margin=grid_cfg.margin)
        x_min = auto.x_min if grid_cfg.x_min is None else float(grid_cfg.x_min)
        x_max = auto.x_max if grid_cfg.x_max is None else float(grid_cfg.x_max)
        if x_min >= x_max:
            raise ConfigError(f"empty grid [{x_min}, {x_max}]", "init_grid")
        return GridSpec(x_min, x_max, int(grid_cfg.points))

    def reference_solution(self, system: Optional[QuantumSystem] = None) -> EigenSolution:
        system = self.system if system is None else system
        key = (system.n_particles, system.hbar)
        if key not in self._solutions:
            ref = self.cfg.reference
            self._solutions[key] = solve_system(system, depth=ref.depth, points=ref.points,
                                                richardson=ref.richardson)
            shift = self._solutions[key].richardson_shift
            self.logger.info(f"Exact oracle for N={key[0]} hbar={key[1]:g}: Richardson shift {shift:.3e}")
        return self._solutions[key]

    @property
    def methods(self) -> List[Method]:
        return [Method(m) for m in self.cfg.methods]

    def profile(self, method, kind, system: Optional[QuantumSystem] = None,
                grid: Optional[GridSpec] = None) -> DensityProfile:
        system = self.system if system is None else system
        grid = self.init_grid(system) if grid is None else grid
        method = Method(method)
        reference = self.reference_solution(system) if method is Method.EXACT else None
        return profile(system, grid, method, kind, n_jobs=self.cfg.n_jobs,
                       progress=self.cfg.progress, reference=reference)

    def profiles(self, kind, methods=None) -> List[DensityProfile]:
        if self.system is None:
            self.init_system()
        grid = self.init_grid()
        methods = self.methods if methods is None else methods
        return [self.profile(method, kind, grid=grid) for method in methods]

    def profile_table(self, kind):
        """Profiles of the configured methods joined on x, plus their integrals for the footer."""
        kind = Kind(kind)
        profiles = self.profiles(kind)
        frame = pd.DataFrame({"x": profiles[0].xs})
        footer = {}
        for item in profiles:
            frame[item.column] = item.values
            footer[f"integral {item.column}"] = item.metadata["integral"]
            self.logger.info(f"int {item.column} dx = {item.metadata['integral']:.10g}")
        return frame, footer

    def spectrum(self) -> pd.DataFrame:
        """WKB levels lambda = 0..N-1 and the Fermi row N-1/2 against the exact eigenvalues."""
        if self.system is None:
            self.init_system()
        system = self.system
        n = system.n_particles
        lambdas = [float(j) for j in range(n)] + [n - 0.5]
        frame = spectrum_table(system.potential, system.hbar, lambdas, system.mass).to_frame()
        exact = self.reference_solution().energies[:n]
        frame["e_exact"] = [exact[int(lam)] if float(lam).is_integer() else np.nan
                            for lam in frame["lambda"]]
        frame["difference"] = frame["e_wkb"] - frame["e_exact"]
        return frame

    def render_csv(self, frame: pd.DataFrame, footer: Optional[Dict[str, float]] = None) -> str:
        """'#'-prefixed resolved config, the table, then '#'-prefixed footer values."""
        float_format = self.cfg.output.float_format
        header = "".join(f"# {line}\n" for line in OmegaConf.to_yaml(self.cfg).splitlines())
        buffer = io.StringIO()
        frame.to_csv(buffer, index=False, float_format=float_format, na_rep="nan")
        text = header + buffer.getvalue()
        for key, value in (footer or {}).items():
            text += f"# {key} = {float_format % value}\n"
        return text

    def write_csv(self, frame: pd.DataFrame, footer: Optional[Dict[str, float]] = None,
                  path=None) -> Optional[Path]:
        text = self.render_csv(frame, footer)
        path = self.cfg.output.path if path is None else path
        if path is None:
            print(text, end="")
            return None
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        self.logger.info(f"Wrote {len(frame)} rows to {path}")
        return path
