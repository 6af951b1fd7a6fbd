"""Run configuration shared by the CLI, the suite and the scripts."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from .errors import SchemaError


@dataclass(frozen=True)
class RunConfig:
    t_prec: int = 10
    x_window: tuple[int, int] = (-12, 12)
    degree_cap: int = 4
    bounds: tuple[int, int, int, int] = (8, 8, 8, 8)
    seed: int = 0
    const_bounds: tuple[int, int, int, int] = field(default=(6, 6, 6, 6))

    def __post_init__(self):
        if self.t_prec < 1:
            raise SchemaError("t_prec must be positive")
        lo, hi = self.x_window
        if lo > 0 or hi < 0 or lo >= hi:
            raise SchemaError("x_window must satisfy lo <= 0 <= hi and lo < hi")
        if self.degree_cap < 0:
            raise SchemaError("degree_cap must be >= 0")
        if len(self.bounds) != 4 or any(b < 0 for b in self.bounds):
            raise SchemaError("bounds must be four non-negative integers")
        object.__setattr__(self, "x_window", tuple(self.x_window))
        object.__setattr__(self, "bounds", tuple(self.bounds))
        object.__setattr__(self, "const_bounds", tuple(self.const_bounds))

    def to_json(self) -> dict:
        d = asdict(self)
        d["x_window"] = list(self.x_window)
        d["bounds"] = list(self.bounds)
        d["const_bounds"] = list(self.const_bounds)
        return d
