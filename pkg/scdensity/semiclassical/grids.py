from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid


class Method(str, Enum):
    UNIFORM = "uniform"
    TF = "tf"
    EXACT = "exact"
    LANGER_SUM = "langer_sum"


class Kind(str, Enum):
    DENSITY = "density"
    KED = "ked"

    @property
    def column_prefix(self) -> str:
        return "n" if self is Kind.DENSITY else "t"


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    points: int

    def __post_init__(self):
        assert self.x_max > self.x_min, f"empty grid [{self.x_min}, {self.x_max}]"
        assert self.points >= 3, "a grid needs at least three points"

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.points - 1)

    def positions(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.points)

    def refined(self) -> "GridSpec":
        return GridSpec(self.x_min, self.x_max, 2 * self.points - 1)


@dataclass
class DensityProfile:
    xs: np.ndarray
    values: np.ndarray
    method: Method
    kind: Kind = Kind.DENSITY
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.xs = np.asarray(self.xs, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        assert self.xs.shape == self.values.shape, "grid and values differ in shape"
        assert np.all(np.diff(self.xs) > 0), "profile grid must be strictly increasing"
        self.method = Method(self.method)
        self.kind = Kind(self.kind)
        self.metadata.setdefault("integral", self.integral())

    @property
    def column(self) -> str:
        return f"{self.kind.column_prefix}_{self.method.value}"

    def integral(self) -> float:
        return float(trapezoid(self.values, self.xs))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"x": self.xs, self.column: self.values})
