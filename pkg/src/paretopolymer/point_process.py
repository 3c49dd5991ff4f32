"""Point measures on (0, inf) x R^d.

Covers the rescaled lattice process built from a potential field, the
limiting Poisson process with intensity alpha f^{-1-alpha} df dy (sampled in
a finite window), cone-set counts, box maxima, restrictions and the
Gamma-ratio representation of Pareto order statistics.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy import integrate

from .model import ModelParams, PotentialField, box_site_count, derive_scales

PROVENANCES = ("RescaledField", "SampledPPP", "Synthetic")


@dataclass(frozen=True, eq=False)
class PointMeasure:
    """Finite point configuration ``sum_i delta_(marks[i], locations[i])``.

    ``window`` records the truncation a sampler used, e.g.
    ``{"f_min": 0.5, "R": 10.0}``; None means the configuration is complete.
    """

    marks: np.ndarray
    locations: np.ndarray
    d: int
    provenance: str = "Synthetic"
    window: dict | None = None

    def __post_init__(self):
        marks = np.array(self.marks, dtype=float).reshape(-1)
        locs = np.array(self.locations, dtype=float).reshape(len(marks), self.d)
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if np.any(~(marks > 0)):
            raise ValueError("all marks must be positive")
        if self.provenance != "RescaledField" and len(marks) > 1:
            rows = np.column_stack([marks, locs])
            if len(np.unique(rows, axis=0)) != len(rows):
                raise ValueError("points must be pairwise distinct")
        marks.setflags(write=False)
        locs.setflags(write=False)
        object.__setattr__(self, "marks", marks)
        object.__setattr__(self, "locations", locs)

    @classmethod
    def from_points(cls, points, d: int, provenance: str = "Synthetic", window=None) -> "PointMeasure":
        """Build from an iterable of ``(f, y)`` with y a scalar (d=1) or a d-vector."""
        points = list(points)
        marks = [p[0] for p in points]
        locs = [np.atleast_1d(np.asarray(p[1], dtype=float)) for p in points]
        locs = np.array(locs, dtype=float).reshape(len(points), d)
        return cls(marks=marks, locations=locs, d=d, provenance=provenance, window=window)

    @classmethod
    def empty(cls, d: int, provenance: str = "Synthetic", window=None) -> "PointMeasure":
        return cls(np.zeros(0), np.zeros((0, d)), d, provenance, window)

    def __len__(self) -> int:
        return len(self.marks)

    def __iter__(self) -> Iterator[tuple[float, np.ndarray]]:
        return iter(zip(self.marks, self.locations))

    @property
    def l1_norms(self) -> np.ndarray:
        return np.abs(self.locations).sum(axis=1)

    def subset(self, mask_or_index) -> "PointMeasure":
        return PointMeasure(
            self.marks[mask_or_index], self.locations[mask_or_index], self.d, self.provenance, self.window
        )

    def top(self, n: int) -> "PointMeasure":
        """The ``n`` points with largest marks."""
        idx = np.sort(np.argsort(-self.marks, kind="stable")[:n])
        return self.subset(idx)

    def index_of(self, f: float, y) -> int | None:
        """Index of the point equal to (f, y) as floats, or None."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        hit = np.flatnonzero((self.marks == f) & np.all(self.locations == y, axis=1))
        return int(hit[0]) if hit.size else None

    def to_json(self) -> str:
        return json.dumps(
            {
                "schema": "pm/1",
                "d": self.d,
                "provenance": self.provenance,
                "window": self.window,
                "points": [[float(f), *map(float, y)] for f, y in self],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "PointMeasure":
        doc = json.loads(text)
        if doc.get("schema") != "pm/1":
            raise ValueError(f"unsupported schema {doc.get('schema')!r}")
        d = doc["d"]
        pts = np.asarray(doc["points"], dtype=float).reshape(-1, d + 1)
        return cls(pts[:, 0], pts[:, 1:], d, doc["provenance"], doc.get("window"))


@dataclass(frozen=True)
class ConeSet:
    """The set {(f, y): f > s |y|_1 + h}."""

    h: float
    s: float

    def __post_init__(self):
        if not (self.h > 0 and self.s > 0):
            raise ValueError("cone height and slope must be positive")

    def contains(self, marks, locations) -> np.ndarray:
        locations = np.asarray(locations, dtype=float)
        return np.asarray(marks) > self.s * np.abs(locations).reshape(len(locations), -1).sum(axis=1) + self.h


# ---------------------------------------------------------------------------
# constructions


def rescale_field(field: PotentialField, params: ModelParams) -> PointMeasure:
    """Points (xi(z) / r_t^{d/alpha}, z / r_t), one per site, in row-major site order."""
    if field.d != params.d:
        raise ValueError(f"field has d={field.d}, params have d={params.d}")
    if math.isfinite(field.alpha) and field.alpha != params.alpha:
        raise ValueError(f"field has alpha={field.alpha}, params have alpha={params.alpha}")
    r_t = derive_scales(params).r_t
    marks = field.values.reshape(-1) / r_t ** (params.d / params.alpha)
    locs = field.sites() / r_t
    return PointMeasure(marks, locs, params.d, "RescaledField")


def sample_ppp(d: int, alpha: float, f_min: float, R: float, rng: np.random.Generator) -> PointMeasure:
    """The Poisson process with intensity alpha f^{-1-alpha} df dy on [f_min, inf) x [-R, R]^d."""
    if not f_min > 0:
        raise ValueError(f"f_min must be positive (total intensity is infinite), got {f_min}")
    if not R > 0:
        raise ValueError(f"R must be positive, got {R}")
    lam = f_min ** (-alpha) * (2.0 * R) ** d
    n = rng.poisson(lam)
    locs = rng.uniform(-R, R, size=(n, d))
    marks = f_min * (1.0 - rng.random(n)) ** (-1.0 / alpha)
    return PointMeasure(marks, locs, d, "SampledPPP", {"f_min": float(f_min), "R": float(R)})


def sample_rescaled_window(
    params: ModelParams, box_radius: int, f_min: float, rng: np.random.Generator
) -> PointMeasure:
    """Exact draw of the rescaled field's points with mark >= f_min, on a box of radius ``box_radius``.

    Same law as ``restrict``-ing ``rescale_field(sample_field(...))`` to marks
    >= f_min, but only the exceedances are drawn, so boxes far beyond the dense
    limit are cheap.
    """
    s = derive_scales(params)
    norm = s.r_t ** (params.d / params.alpha)
    threshold = f_min * norm
    n_sites = box_site_count(params.d, box_radius)
    p = 1.0 if threshold <= 1.0 else threshold ** (-params.alpha)
    k = int(rng.binomial(n_sites, p))
    flat = rng.choice(n_sites, size=k, replace=False) if k else np.zeros(0, dtype=np.int64)
    flat = np.sort(flat)
    side = 2 * box_radius + 1
    sites = np.stack(np.unravel_index(flat, (side,) * params.d), axis=1) - box_radius
    base = max(threshold, 1.0)
    xi = base * (1.0 - rng.random(k)) ** (-1.0 / params.alpha)
    window = {"f_min": float(f_min), "R": box_radius / s.r_t}
    return PointMeasure(xi / norm, sites / s.r_t, params.d, "RescaledField", window)


def sample_uniform_ppp(lam: float, d: int, rng: np.random.Generator) -> np.ndarray:
    """Homogeneous Poisson process of intensity ``lam`` on (0, 1)^d, as an (N, d) array."""
    n = rng.poisson(lam)
    return rng.random((n, d))


# ---------------------------------------------------------------------------
# functionals


def count_in_cone(P: PointMeasure, cone: ConeSet) -> int:
    return int(np.count_nonzero(cone.contains(P.marks, P.locations)))


def in_box(P: PointMeasure, R: float) -> np.ndarray:
    return np.all(np.abs(P.locations) <= R, axis=1)


def max_in_box(P: PointMeasure, R: float) -> float:
    """Largest mark among points with y in [-R, R]^d; 0.0 when there are none."""
    inside = in_box(P, R)
    return float(P.marks[inside].max()) if inside.any() else 0.0


def restrict(P: PointMeasure, L: float) -> PointMeasure:
    """Keep the points with f >= 1/L and y in [-L, L]^d."""
    if not L > 0:
        raise ValueError(f"L must be positive, got {L}")
    keep = (P.marks >= 1.0 / L) & in_box(P, L)
    return P.subset(keep)


def cone_intensity(cone: ConeSet, alpha: float, d: int, R: float | None = None) -> float:
    """Mean number of limiting-process points in the cone, optionally with y in [-R, R]^d.

    The mark integral gives (s|y|+h)^{-alpha}; the location integral is done
    numerically (radially over l1-spheres for the whole space).
    """
    h, s = cone.h, cone.s

    def g(*y):
        return (s * sum(abs(v) for v in y) + h) ** (-alpha)

    if R is None:
        # l1-sphere of radius r in R^d has surface measure 2^d r^{d-1} / (d-1)!
        c = 2.0**d / math.factorial(d - 1)
        val, _ = integrate.quad(lambda r: c * r ** (d - 1) * (s * r + h) ** (-alpha), 0, np.inf, epsabs=1e-13, epsrel=1e-12)
        return val
    if d == 1:
        val, _ = integrate.quad(g, 0, R, epsabs=1e-13, epsrel=1e-12)
        return 2.0 * val
    # symmetric in every coordinate: integrate the positive orthant
    val, _ = integrate.nquad(g, [[0, R]] * d, opts={"epsabs": 1e-11, "epsrel": 1e-10})
    return 2.0**d * val


def pareto_order_statistics(n: int, alpha: float, rng: np.random.Generator, size=None) -> np.ndarray:
    """Descending order statistics of n i.i.d. Pareto(alpha), via (Gamma_{n+1}/Gamma_i)^{1/alpha}.

    With ``size`` given, returns shape (size, n), one sample per row.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    shape = (n + 1,) if size is None else (size, n + 1)
    gam = np.cumsum(rng.exponential(size=shape), axis=-1)
    return (gam[..., -1:] / gam[..., :-1]) ** (1.0 / alpha)
