"""Growth curves on geometric radius grids: the common currency of the CLI."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from monogrow.hamiltonian import AngleProfile, HamburgerSpec
from monogrow.lower_bounds import jump_series, lower_bound_at
from monogrow.monodromy import max_modulus
from monogrow.regvar import estimate_modulus
from monogrow.upper_bounds import modulus_recipe, optimize_bound

CURVE_TAGS = ("lower", "maxmod", "upper:opt", "upper:recipe")


@dataclass(frozen=True)
class RadiusGrid:
    r_min: float
    r_max: float
    count: int

    def __post_init__(self):
        if not (0.0 < self.r_min < self.r_max):
            raise ValueError("need 0 < r_min < r_max")
        if self.count < 2:
            raise ValueError("need at least two grid points")

    def values(self) -> np.ndarray:
        k = np.arange(self.count)
        return self.r_min * (self.r_max / self.r_min) ** (k / (self.count - 1))


@dataclass(frozen=True)
class GrowthCurve:
    """(r, tag, value) rows; r strictly increasing outer, tags alphabetical."""

    rows: tuple[tuple[float, str, float], ...]

    def __post_init__(self):
        for _, tag, value in self.rows:
            if math.isnan(value) or value == math.inf:
                raise ValueError("curve values must not be NaN or +inf")

    def column(self, tag: str):
        rs = [r for r, t, _ in self.rows if t == tag]
        vs = [v for _, t, v in self.rows if t == tag]
        return np.asarray(rs), np.asarray(vs)

    def tags(self):
        return sorted({t for _, t, _ in self.rows})

    def to_csv_text(self) -> str:
        lines = ["r,tag,value"]
        for r, tag, value in self.rows:
            val = "-inf" if value == -math.inf else repr(value)
            lines.append(f"{r!r},{tag},{val}")
        return "\n".join(lines) + "\n"

    def to_json_rows(self):
        return [
            {"r": r, "tag": tag, "value": (None if value == -math.inf else value)}
            for r, tag, value in self.rows
        ]


def default_modulus_grid(profile: AngleProfile) -> np.ndarray:
    a, b = profile.domain
    span = b - a
    return np.geomspace(span * 1e-4, span / 4.0, 17)


def run_curves(spec, grid: RadiusGrid, which, *, companion: HamburgerSpec | None = None,
               modulus=None, samples: int = 64, opt_strategy: str = "dyadic_scan",
               t_floor: float = 0.0) -> GrowthCurve:
    """Evaluate the requested curves on the grid.

    lower needs a Hamburger spec (itself or a companion); upper:recipe needs
    an angle profile and a modulus (estimated from the profile when not
    given); maxmod and upper:opt apply to any det-zero spec.
    """
    which = sorted(set(which))
    unknown = [w for w in which if w not in CURVE_TAGS]
    if unknown:
        raise ValueError(f"unknown curve tag {unknown[0]!r}; valid: {', '.join(CURVE_TAGS)}")
    if not which:
        raise ValueError("no curves requested")

    series = None
    if "lower" in which:
        ham = spec if isinstance(spec, HamburgerSpec) else companion
        if ham is None:
            raise ValueError("the lower curve needs a Hamburger spec or a companion spec")
        series = jump_series(ham)

    if ("upper:recipe" in which or "upper:opt" in which) and modulus is None \
            and isinstance(spec, AngleProfile):
        try:
            modulus = estimate_modulus(spec, default_modulus_grid(spec), t_floor=t_floor)
        except ValueError as exc:
            if "upper:recipe" in which:
                raise ValueError(f"cannot build the recipe bound: {exc}") from exc
            modulus = None
    if "upper:recipe" in which:
        if not isinstance(spec, AngleProfile):
            raise ValueError("the recipe bound applies to angle profiles only")
        if modulus is None:
            raise ValueError("the recipe bound needs a modulus of continuity")

    rows = []
    for r in grid.values():
        r = float(r)
        per_tag = {}
        if "lower" in which:
            per_tag["lower"] = lower_bound_at(series, r)
        if "maxmod" in which:
            per_tag["maxmod"] = max_modulus(spec, r, samples=samples)
        if "upper:opt" in which:
            _, val = optimize_bound(spec, r, opt_strategy, modulus=modulus)
            per_tag["upper:opt"] = val.total_at(r)
        if "upper:recipe" in which:
            _, val = modulus_recipe(spec, r, modulus)
            per_tag["upper:recipe"] = val.total_at(r)
        for tag in sorted(per_tag):
            rows.append((r, tag, float(per_tag[tag])))
    return GrowthCurve(tuple(rows))
