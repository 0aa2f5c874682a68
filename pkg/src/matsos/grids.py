"""Sampling plans for grid sweeps, seminorm pairs and ball sampling.

A GridSpec fixes everything a checker needs to be deterministic: the domain
box, the lattice resolution (or the sample budget once a full lattice would
be too large), exclusion balls (the punctured origin, possibly measured on a
subset of coordinates), and the pair-sampling policy used by the Holder
seminorm estimators.  Identical specs always produce identical samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Exclusion", "GridSpec", "MisconfiguredGridError"]


class MisconfiguredGridError(ValueError):
    """The sampling plan excludes everything it was asked to sample."""


@dataclass(frozen=True)
class Exclusion:
    """Exclude points with |x restricted to `axes`| < radius (all axes if None)."""

    radius: float
    axes: tuple[int, ...] | None = None

    def keep(self, pts):
        if self.radius <= 0:
            return np.ones(len(pts), dtype=bool)
        sub = pts if self.axes is None else pts[:, list(self.axes)]
        return np.linalg.norm(sub, axis=1) >= self.radius


@dataclass(frozen=True)
class GridSpec:
    """Deterministic sampling plan over a box.

    Parameters
    ----------
    box : ((lo, hi), ...) per coordinate
    resolution : lattice points per axis; if resolution**dim exceeds
        `max_points` the lattice is replaced by `max_points` uniform draws
        from the seeded generator
    exclusions : punctured regions; default is a ball of radius
        `exclude_radius` about the origin in all coordinates
    exclude_radius : shorthand for the default exclusion
    pair_base : base separation for seminorm pair sampling (default: 1/8 of
        the smallest box extent); pairs are drawn at separations
        pair_base / 2**k for k = 0..pair_scales-1
    points : explicit sample points, bypassing lattice generation (still
        subject to exclusions)
    """

    box: tuple
    resolution: int = 9
    exclude_radius: float = 0.0
    exclusions: tuple = ()
    max_points: int = 4096
    pair_base: float | None = None
    pair_scales: int = 11
    pairs_per_scale: int = 8
    seed: int = 0
    points: tuple | None = None

    def __post_init__(self):
        box = tuple((float(lo), float(hi)) for lo, hi in self.box)
        for lo, hi in box:
            if not lo < hi:
                raise MisconfiguredGridError(f"empty box side ({lo}, {hi})")
        object.__setattr__(self, "box", box)
        excl = tuple(self.exclusions)
        if self.exclude_radius > 0:
            excl = excl + (Exclusion(self.exclude_radius),)
        object.__setattr__(self, "exclusions", excl)

    @property
    def dim(self):
        return len(self.box)

    def _rng(self, salt=0):
        return np.random.default_rng((self.seed, salt))

    def sample_points(self):
        """All kept sample points, shape (N, dim)."""
        if self.points is not None:
            pts = np.asarray(self.points, dtype=float).reshape(-1, self.dim)
        elif self.resolution**self.dim <= self.max_points:
            axes = [np.linspace(lo, hi, self.resolution) for lo, hi in self.box]
            mesh = np.meshgrid(*axes, indexing="ij")
            pts = np.stack([m.ravel() for m in mesh], axis=1)
        else:
            lo = np.array([b[0] for b in self.box])
            hi = np.array([b[1] for b in self.box])
            u = self._rng(1).random((self.max_points, self.dim))
            pts = lo + u * (hi - lo)
        keep = np.ones(len(pts), dtype=bool)
        for e in self.exclusions:
            keep &= e.keep(pts)
        pts = pts[keep]
        if len(pts) == 0:
            raise MisconfiguredGridError(
                "exclusions removed every sample point of the grid"
            )
        return pts

    # -- pair sampling for Holder seminorms ---------------------------------

    def default_pair_base(self):
        if self.pair_base is not None:
            return float(self.pair_base)
        return min(hi - lo for lo, hi in self.box) / 8.0

    def sample_pairs(self, center):
        """Pairs (y, z) concentrating at `center` on a dyadic scale ladder.

        Returns arrays (Y, Z) of shape (npairs, dim).  Scales run through
        pair_base / 2**k; each scale contributes `pairs_per_scale` random
        pairs inside the ball of that radius around the center plus one
        pair anchored at the center itself (so one-sided ratios like
        |h(y) - h(center)| / |y - center|^d are always represented).

        Pair i of scale k is a pure function of (seed, k, i), so the pair
        set for a smaller `pairs_per_scale` is a subset of the set for a
        larger one: seminorm estimates are monotone in the pair budget by
        construction.
        """
        center = np.asarray(center, dtype=float)
        base = self.default_pair_base()
        ys, zs = [], []
        for k in range(self.pair_scales):
            r = base / 2.0**k
            for i in range(self.pairs_per_scale):
                rng = np.random.default_rng((self.seed, 2, k, i))
                u = rng.normal(size=self.dim)
                u /= max(np.linalg.norm(u), 1e-300)
                v = rng.normal(size=self.dim)
                v /= max(np.linalg.norm(v), 1e-300)
                ys.append(center + r * u * rng.random())
                zs.append(center + r * v * rng.random())
            rng = np.random.default_rng((self.seed, 3, k))
            d = rng.normal(size=self.dim)
            d /= max(np.linalg.norm(d), 1e-300)
            ys.append(center + r * d)
            zs.append(center.copy())
        return np.array(ys), np.array(zs)

    def ball_points(self, center, radius, count=64):
        """Deterministic points of the closed ball B(center, radius).

        Includes the center, the two boundary points along the center
        direction (which for the balls B(x/2, |x|/2) of the monotonicity
        test are the origin and x itself), and seeded interior points.
        """
        center = np.asarray(center, dtype=float)
        rng = self._rng(3)
        pts = [center]
        n = np.linalg.norm(center)
        if n > 0:
            d = center / n
            pts.append(center + radius * d)
            pts.append(center - radius * d)
        while len(pts) < count:
            u = rng.normal(size=self.dim)
            nu = np.linalg.norm(u)
            if nu == 0:
                continue
            pts.append(center + radius * (u / nu) * rng.random() ** (1.0 / self.dim))
        return np.array(pts)

    def radii(self, pts):
        return np.linalg.norm(pts, axis=1)
