"""Model parameters, scaling functions and the i.i.d. Pareto potential."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

#: Boxes with more sites than this are evaluated lazily, site by site.
DENSE_SITE_LIMIT = 10**7
_MAX_SITES = 2**63 - 1


@dataclass(frozen=True)
class ModelParams:
    """Dimension ``d``, Pareto exponent ``alpha``, repulsion ``theta``, horizon ``t``."""

    d: int
    alpha: float
    theta: float
    t: float

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d!r}")
        if not self.alpha > self.d:
            raise ValueError(f"need alpha > d, got alpha={self.alpha}, d={self.d}")
        if not self.theta > 0:
            raise ValueError(f"theta must be positive, got {self.theta}")
        if not self.t > 0:
            raise ValueError(f"t must be positive, got {self.t}")

    @property
    def q(self) -> float:
        return self.d / (self.alpha - self.d)

    def scales(self) -> "ScaleSet":
        return derive_scales(self)

    def to_dict(self) -> dict:
        return {"d": self.d, "alpha": self.alpha, "theta": self.theta, "t": self.t}


class ScaleSet(NamedTuple):
    q: float
    beta_t: float
    r_t: float
    gamma_t: float


def derive_scales(params: ModelParams) -> ScaleSet:
    """q, beta_t, r_t and gamma_t = r_t log t for ``params``.

    Raises ValueError for t <= 1, where log t <= 0 makes the scales meaningless,
    and OverflowError when r_t or beta_t is not representable as a float.
    """
    d, alpha, theta, t = params.d, params.alpha, params.theta, params.t
    if not alpha > d:
        raise ValueError(f"need alpha > d, got alpha={alpha}, d={d}")
    if not t > 1:
        raise ValueError(f"scales need t > 1, got t={t}")
    q = d / (alpha - d)
    log_t = math.log(t)
    log_r = (1 + q) * (log_t - math.log(log_t))
    log_beta = math.log(theta) + (q - 1) * log_t - q * math.log(log_t)
    if max(log_r + math.log(log_t), abs(log_beta)) > 700:
        raise OverflowError(f"scales for q={q:.3g}, t={t:.3g} exceed the float64 range")
    beta_t = theta * t ** (q - 1) / log_t**q
    r_t = (t / log_t) ** (1 + q)
    return ScaleSet(q=q, beta_t=beta_t, r_t=r_t, gamma_t=r_t * log_t)


def scaling_identity_errors(params: ModelParams) -> tuple[float, float]:
    """Relative errors of r_t^{d/alpha} t = r_t log t and beta_t t^2 = theta r_t log t."""
    s = derive_scales(params)
    lhs1 = s.r_t ** (params.d / params.alpha) * params.t
    lhs2 = s.beta_t * params.t**2
    rhs1 = s.gamma_t
    rhs2 = params.theta * s.gamma_t
    return abs(lhs1 - rhs1) / abs(rhs1), abs(lhs2 - rhs2) / abs(rhs2)


def pareto_from_uniform(u, alpha: float):
    """Inverse CDF of F(r) = 1 - r^{-alpha} on [1, inf)."""
    return (1.0 - np.asarray(u, dtype=float)) ** (-1.0 / alpha)


def sample_pareto(alpha: float, rng: np.random.Generator, size=None):
    """Pareto(alpha) draw(s) by inversion, (1-U)^{-1/alpha} with U in [0, 1)."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    u = rng.random(size)
    out = pareto_from_uniform(u, alpha)
    return float(out) if size is None else out


# ---------------------------------------------------------------------------
# potential field


def _philox_key(seed: int) -> np.ndarray:
    return np.random.SeedSequence(int(seed)).generate_state(2, np.uint64)


def _raw_to_uniform(raw: np.ndarray) -> np.ndarray:
    return (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53


def _counter_uniforms_dense(seed: int, n: int) -> np.ndarray:
    bg = np.random.Philox(key=_philox_key(seed), counter=np.zeros(4, dtype=np.uint64))
    return _raw_to_uniform(bg.random_raw(n))


def _counter_uniforms_at(seed: int, flat: np.ndarray) -> np.ndarray:
    # output i of the stream lives in counter block i // 4, lane i % 4
    key = _philox_key(seed)
    flat = np.asarray(flat, dtype=np.uint64)
    blocks, inverse = np.unique(flat // np.uint64(4), return_inverse=True)
    raws = np.empty((blocks.size, 4), dtype=np.uint64)
    for j, b in enumerate(blocks):
        ctr = np.array([b, 0, 0, 0], dtype=np.uint64)
        raws[j] = np.random.Philox(key=key, counter=ctr).random_raw(4)
    return _raw_to_uniform(raws[inverse, (flat % np.uint64(4)).astype(np.intp)])


def box_site_count(d: int, box_radius: int) -> int:
    return (2 * int(box_radius) + 1) ** int(d)


@dataclass(frozen=True, eq=False)
class PotentialField:
    """Potential values on the lattice box [-R, R]^d.

    Seeded fields are counter-based: the value at a site depends only on
    (seed, alpha, box_radius, site), so dense and lazily evaluated boxes
    agree bit for bit. ``seed`` is None for fields built from explicit values.
    """

    d: int
    box_radius: int
    alpha: float
    seed: int | None = None
    _values: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def from_values(cls, values, *, alpha: float = math.inf, seed=None) -> "PotentialField":
        """Field from an array of shape (2R+1,)*d indexed by site + R."""
        arr = np.array(values, dtype=float)
        if arr.ndim == 0 or len(set(arr.shape)) != 1 or arr.shape[0] % 2 != 1:
            raise ValueError(f"values must be a cube with odd side, got shape {arr.shape}")
        arr.setflags(write=False)
        return cls(d=arr.ndim, box_radius=(arr.shape[0] - 1) // 2, alpha=alpha, seed=seed, _values=arr)

    @property
    def side(self) -> int:
        return 2 * self.box_radius + 1

    @property
    def n_sites(self) -> int:
        return box_site_count(self.d, self.box_radius)

    @property
    def is_dense(self) -> bool:
        return self._values is not None

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            raise ValueError(f"field with {self.n_sites} sites is lazy; use value_at()")
        return self._values

    def contains(self, sites) -> np.ndarray:
        sites = np.atleast_2d(np.asarray(sites, dtype=np.int64))
        return np.all(np.abs(sites) <= self.box_radius, axis=1)

    def flat_index(self, sites) -> np.ndarray:
        """Row-major index of each site; raises IndexError outside the box."""
        sites = np.atleast_2d(np.asarray(sites, dtype=np.int64))
        if sites.shape[1] != self.d:
            raise ValueError(f"sites have dimension {sites.shape[1]}, field has {self.d}")
        if not np.all(self.contains(sites)):
            bad = sites[~self.contains(sites)][0]
            raise IndexError(f"site {tuple(bad)} outside box of radius {self.box_radius}")
        shifted = sites + self.box_radius
        flat = np.zeros(len(sites), dtype=np.int64)
        for j in range(self.d):
            flat = flat * self.side + shifted[:, j]
        return flat

    def sites(self) -> np.ndarray:
        """All sites of the box in row-major order, shape (n_sites, d)."""
        if self.n_sites > DENSE_SITE_LIMIT:
            raise ValueError("box too large to enumerate")
        ax = np.arange(-self.box_radius, self.box_radius + 1)
        grids = np.meshgrid(*([ax] * self.d), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def value_at(self, sites) -> np.ndarray:
        flat = self.flat_index(sites)
        if self._values is not None:
            return self._values.reshape(-1)[flat]
        return pareto_from_uniform(_counter_uniforms_at(self.seed, flat), self.alpha)

    def to_json(self) -> str:
        return json.dumps(
            {
                "schema": "field/1",
                "d": self.d,
                "alpha": None if math.isinf(self.alpha) else self.alpha,
                "box_radius": self.box_radius,
                "seed": self.seed,
                "values": self.values.reshape(-1).tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "PotentialField":
        doc = json.loads(text)
        if doc.get("schema") != "field/1":
            raise ValueError(f"unsupported schema {doc.get('schema')!r}")
        side = 2 * doc["box_radius"] + 1
        vals = np.asarray(doc["values"], dtype=float).reshape((side,) * doc["d"])
        alpha = math.inf if doc["alpha"] is None else doc["alpha"]
        return cls.from_values(vals, alpha=alpha, seed=doc["seed"])


def sample_field(params: ModelParams | tuple, box_radius: int, seed: int) -> PotentialField:
    """One Pareto(alpha) value per site of [-R, R]^d, reproducible from ``seed``.

    ``params`` may be a ModelParams or a ``(d, alpha)`` pair. Boxes above
    DENSE_SITE_LIMIT sites are returned lazy.
    """
    d, alpha = (params.d, params.alpha) if isinstance(params, ModelParams) else params
    if box_radius < 0 or int(box_radius) != box_radius:
        raise ValueError(f"box_radius must be a nonnegative integer, got {box_radius!r}")
    n = box_site_count(d, box_radius)
    if n > _MAX_SITES:
        raise OverflowError(f"box with (2*{box_radius}+1)^{d} sites is not addressable")
    if n > DENSE_SITE_LIMIT:
        return PotentialField(d=d, box_radius=int(box_radius), alpha=alpha, seed=int(seed))
    vals = pareto_from_uniform(_counter_uniforms_dense(seed, n), alpha).reshape((2 * box_radius + 1,) * d)
    vals.setflags(write=False)
    return PotentialField(d=d, box_radius=int(box_radius), alpha=alpha, seed=int(seed), _values=vals)
