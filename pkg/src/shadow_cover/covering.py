"""Covering projection R^n -> T^n = R^n / Z^n and unique local lifts."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidArgument, NoUniqueLift


@dataclass(frozen=True)
class CoveringChart:
    """The standard integer lattice with the Euclidean metric.

    ``eps0`` is the injectivity radius of the projection (half the shortest
    lattice vector). Lifts are only accepted inside ``safety * eps0`` so that
    points sitting on the cut locus up to roundoff are rejected.
    """

    dim: int
    eps0: float = 0.5
    safety: float = 0.98

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidArgument("dimension must be positive")
        if not 0.0 < self.eps0 <= 0.5:
            raise InvalidArgument("eps0 must lie in (0, 1/2] for the integer lattice")
        if not 0.0 < self.safety <= 1.0:
            raise InvalidArgument("safety factor must lie in (0, 1]")

    @property
    def radius(self) -> float:
        return self.eps0 * self.safety

    def project(self, x):
        return project(x)

    def torus_distance(self, a, b) -> float:
        return torus_distance(a, b)

    def lift_near(self, base, anchor):
        return lift_near(base, anchor, chart=self)


def project(x) -> np.ndarray:
    """Reduce cover coordinates modulo 1 into [0, 1)."""
    x = np.asarray(x, dtype=float)
    r = x - np.floor(x)
    # x slightly below an integer can round up to exactly 1.0
    return np.where(r >= 1.0, 0.0, r)


def wrap(d) -> np.ndarray:
    """Shortest lattice representative of a displacement, in [-1/2, 1/2)."""
    d = np.asarray(d, dtype=float)
    return d - np.floor(d + 0.5)


def torus_distance(a, b) -> float:
    # for the cubic lattice the nearest translate is chosen per coordinate
    return float(np.linalg.norm(wrap(np.asarray(a, float) - np.asarray(b, float))))


def lift_near(base, anchor, chart: CoveringChart | None = None) -> np.ndarray:
    """Return the preimage of ``base`` within ``eps0`` of ``anchor``."""
    anchor = np.asarray(anchor, dtype=float)
    base = np.asarray(base, dtype=float)
    chart = chart or CoveringChart(anchor.size)
    offset = wrap(base - project(anchor))
    dist = float(np.linalg.norm(offset))
    if not dist < chart.radius:
        raise NoUniqueLift(
            f"torus distance {dist:.6g} between base and anchor is not below {chart.radius:.6g}"
        )
    return anchor + offset


def lift_pseudo_orbit(seq: Sequence, system, seed, k_lo: int = 0,
                      chart: CoveringChart | None = None):
    """Lift a torus pseudo-orbit ``seq`` (indices ``k_lo, k_lo+1, ...``) to the cover.

    Returns a :class:`~shadow_cover.orbit.PseudoOrbit` whose point at ``k_lo``
    is ``seed`` and whose points project onto ``seq``. The lattice cell of each
    point is tracked exactly, so the lift stays faithful even after the cover
    coordinates have grown beyond double precision.
    """
    from .orbit import PseudoOrbit, _lat_mul

    seq = [np.asarray(s, dtype=float) for s in seq]
    if not seq:
        raise InvalidArgument("empty torus sequence")
    n = system.dim
    chart = chart or CoveringChart(n)
    seed = np.asarray(seed, dtype=float)
    if seed.shape != (n,) or any(s.shape != (n,) for s in seq):
        raise InvalidArgument("dimension mismatch between system, seed and sequence")
    if torus_distance(project(seed), seq[0]) > 1e-12:
        raise InvalidArgument("seed does not project to the first torus point")

    fracs = [project(seq[0])]
    cells = [tuple(int(c) for c in np.rint(seed - fracs[0]))]
    jumps = [np.zeros(n)]
    L = system.linear_part
    for k in range(1, len(seq)):
        prev_frac, prev_cell = fracs[-1], cells[-1]
        image = system.apply(prev_frac)
        target = project(seq[k])
        offset = wrap(target - project(image))
        dist = float(np.linalg.norm(offset))
        if not dist < chart.radius:
            raise NoUniqueLift(
                f"jump at index {k_lo + k} has torus size {dist:.6g} >= {chart.radius:.6g}"
            )
        # the lift is image + offset; its cell relative to the current one
        shift = np.rint(image + offset - target)
        jump = (image - target) - shift
        cell = tuple(int(a) + int(b) for a, b in zip(_lat_mul(L, prev_cell), shift))
        fracs.append(target)
        cells.append(cell)
        jumps.append(jump)
    return PseudoOrbit(system, k_lo, cells, np.array(fracs), np.array(jumps))

