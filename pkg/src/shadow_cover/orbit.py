"""Compactly perturbed pseudo-orbits on the cover.

A :class:`PseudoOrbit` stores, for every index of its window, the point
``x_k = cell_k + frac_k`` with an exact integer lattice cell and a fractional
offset in ``[0, 1)``, together with the jump ``e_k = f(x_{k-1}) - x_k``.
Outside the window the sequence continues as the exact orbit of the end
points, so ``e_k = 0`` there.

Jumps are primary data: the fractional offsets are derived from them by
stepping the map, and every operator evaluates ``f(x_{k-1} + v) - x_k`` as
``e_k + (f(frac_{k-1} + v) - f(frac_{k-1}))``. Cover coordinates of true
orbits grow like the unstable eigenvalue to the power ``|k|``; this
representation keeps all floating point work at unit scale.
"""
from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from .errors import InvalidArgument, OrbitEscapes
from .sequences import VectorSequence

_CELL_LIMIT = 2 ** 1000


def _lat_mul(M, cell):
    n = len(cell)
    return tuple(sum(int(M[i][j]) * cell[j] for j in range(n)) for i in range(n))


def _split(y: np.ndarray, k: int):
    if not np.all(np.isfinite(y)):
        raise OrbitEscapes(f"non-finite iterate at index {k}")
    fl = np.floor(y)
    r = y - fl
    hit = r >= 1.0
    if np.any(hit):
        r = np.where(hit, 0.0, r)
        fl = fl + hit
    return tuple(int(c) for c in fl), r


def _check_cell(cell, k):
    if any(abs(c) > _CELL_LIMIT for c in cell):
        raise OrbitEscapes(f"cover coordinates overflow double range at index {k}")
    return cell


def step_forward(system, cell, frac, jump, k=None):
    """State at ``k + 1`` given the state at ``k`` and the jump ``e_{k+1}``."""
    shift, r = _split(system.apply(frac) - jump, k)
    base = _lat_mul(system.linear_part, cell)
    return _check_cell(tuple(a + b for a, b in zip(base, shift)), k), r


def step_backward(system, cell, frac, jump, k=None):
    """State at ``k - 1`` given the state at ``k`` and the jump ``e_k``."""
    shift, r = _split(system.apply_inverse(frac + jump), k)
    base = _lat_mul(system.linear_inverse, cell)
    return _check_cell(tuple(a + b for a, b in zip(base, shift)), k), r


def to_float(cell, frac) -> np.ndarray:
    with np.errstate(over="raise"):
        try:
            return np.array([float(c) for c in cell]) + frac
        except OverflowError as exc:
            raise OrbitEscapes("cover point exceeds double range") from exc


class PseudoOrbit:
    """Two-sided limit pseudo-orbit with exact-orbit tails outside ``[k_lo, k_hi]``."""

    def __init__(self, system, k_lo: int, cells: Sequence, fracs, jumps):
        fracs = np.array(fracs, dtype=float)
        jumps = np.array(jumps, dtype=float)
        n = system.dim
        if fracs.ndim != 2 or fracs.shape[1] != n or len(fracs) == 0:
            raise InvalidArgument("pseudo-orbit needs a nonempty (K, dim) array of points")
        if jumps.shape != fracs.shape or len(cells) != len(fracs):
            raise InvalidArgument("cells, fractional parts and jumps must have equal length")
        if np.any(jumps[0] != 0.0):
            raise InvalidArgument("the first jump must vanish (backward tail is an exact orbit)")
        if np.any(fracs < 0) or np.any(fracs >= 1):
            raise InvalidArgument("fractional parts must lie in [0, 1)")
        self.system = system
        self.k_lo = int(k_lo)
        self.cells = [tuple(int(c) for c in cell) for cell in cells]
        fracs.setflags(write=False)
        jumps.setflags(write=False)
        self.fracs = fracs
        self.jumps = jumps

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_points(cls, system, points, k_lo: int = 0) -> "PseudoOrbit":
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != system.dim:
            raise InvalidArgument("points must be a (K, dim) array")
        cells, fracs = [], []
        for k, p in enumerate(pts):
            cell, r = _split(p, k_lo + k)
            cells.append(cell)
            fracs.append(r)
        fracs = np.array(fracs)
        jumps = np.zeros_like(fracs)
        L = system.linear_part
        for i in range(1, len(pts)):
            lattice = np.array([a - b for a, b in zip(_lat_mul(L, cells[i - 1]), cells[i])], float)
            jumps[i] = (system.apply(fracs[i - 1]) - fracs[i]) + lattice
        return cls(system, k_lo, cells, fracs, jumps)

    @classmethod
    def from_jumps(cls, system, anchor_index: int, anchor_point, k_lo: int, k_hi: int,
                   jumps: Mapping[int, object] | None = None) -> "PseudoOrbit":
        """Build ``x`` from ``x_anchor`` and the prescribed jumps (zero where absent).

        ``x_{k+1} = f(x_k) - e_{k+1}`` forward and ``x_{k-1} = f^{-1}(x_k + e_k)``
        backward. If the anchor lies outside the window the exact orbit is
        followed to the window first. ``e_{k_lo}`` is forced to zero.
        """
        if k_hi < k_lo:
            raise InvalidArgument("empty window")
        n = system.dim
        jumps = {int(k): np.asarray(v, float) for k, v in (jumps or {}).items()}
        for k in jumps:
            if not k_lo < k <= k_hi:
                raise InvalidArgument(f"jump index {k} outside ({k_lo}, {k_hi}]")
        zero = np.zeros(n)
        cell, frac = _split(np.asarray(anchor_point, float), anchor_index)
        start = min(max(anchor_index, k_lo), k_hi)
        k = anchor_index
        while k < start:
            cell, frac = step_forward(system, cell, frac, zero, k)
            k += 1
        while k > start:
            cell, frac = step_backward(system, cell, frac, zero, k)
            k -= 1
        K = k_hi - k_lo + 1
        cells = [None] * K
        fracs = np.zeros((K, n))
        jarr = np.zeros((K, n))
        for j, v in jumps.items():
            jarr[j - k_lo] = v
        i0 = start - k_lo
        cells[i0], fracs[i0] = cell, frac
        for i in range(i0 + 1, K):
            cells[i], fracs[i] = step_forward(system, cells[i - 1], fracs[i - 1], jarr[i], k_lo + i - 1)
        for i in range(i0 - 1, -1, -1):
            cells[i], fracs[i] = step_backward(system, cells[i + 1], fracs[i + 1], jarr[i + 1], k_lo + i + 1)
        return cls(system, k_lo, cells, fracs, jarr)

    # -- window -------------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.system.dim

    @property
    def k_hi(self) -> int:
        return self.k_lo + len(self.fracs) - 1

    @property
    def window(self) -> tuple[int, int]:
        return self.k_lo, self.k_hi

    def __len__(self):
        return len(self.fracs)

    @property
    def points(self) -> np.ndarray:
        """Cover coordinates as floats (lossy once cells exceed 2**53)."""
        return np.array([to_float(c, r) for c, r in zip(self.cells, self.fracs)])

    def state(self, k: int):
        """``(cell, frac)`` at any index, following the exact tails outside the window."""
        k = int(k)
        zero = np.zeros(self.dim)
        if k < self.k_lo:
            cell, frac = self.cells[0], self.fracs[0]
            for j in range(self.k_lo, k, -1):
                cell, frac = step_backward(self.system, cell, frac, zero, j)
            return cell, frac
        if k > self.k_hi:
            cell, frac = self.cells[-1], self.fracs[-1]
            for j in range(self.k_hi, k):
                cell, frac = step_forward(self.system, cell, frac, zero, j)
            return cell, frac
        i = k - self.k_lo
        return self.cells[i], self.fracs[i]

    def point(self, k: int) -> np.ndarray:
        return to_float(*self.state(k))

    def jump(self, k: int) -> np.ndarray:
        i = int(k) - self.k_lo
        if 0 <= i < len(self.jumps):
            return self.jumps[i]
        return np.zeros(self.dim)

    def extended(self, lo: int, hi: int) -> "PseudoOrbit":
        """Same pseudo-orbit materialized on ``[min(lo, k_lo), max(hi, k_hi)]``."""
        lo, hi = min(lo, self.k_lo), max(hi, self.k_hi)
        if lo == self.k_lo and hi == self.k_hi:
            return self
        zero = np.zeros(self.dim)
        cells = list(self.cells)
        fracs = list(self.fracs)
        jumps = list(self.jumps)
        for j in range(self.k_hi, hi):
            c, r = step_forward(self.system, cells[-1], fracs[-1], zero, j)
            cells.append(c)
            fracs.append(r)
            jumps.append(zero)
        front_c, front_r = [], []
        c, r = self.cells[0], self.fracs[0]
        for j in range(self.k_lo, lo, -1):
            c, r = step_backward(self.system, c, r, zero, j)
            front_c.append(c)
            front_r.append(r)
        cells = front_c[::-1] + cells
        fracs = front_r[::-1] + fracs
        jumps = [zero] * len(front_c) + jumps
        return PseudoOrbit(self.system, lo, cells, np.array(fracs), np.array(jumps))

    def padded(self, pad: int) -> "PseudoOrbit":
        return self.extended(self.k_lo - pad, self.k_hi + pad)

    def errors(self) -> VectorSequence:
        return VectorSequence(self.k_lo, self.jumps, self.dim)

    def __eq__(self, other):
        if not isinstance(other, PseudoOrbit):
            return NotImplemented
        return (self.k_lo == other.k_lo and self.cells == other.cells
                and np.array_equal(self.fracs, other.fracs)
                and np.array_equal(self.jumps, other.jumps))

    def __repr__(self):
        return f"PseudoOrbit({self.system!r}, window={self.window})"


def pseudo_orbit_errors(orbit: PseudoOrbit) -> VectorSequence:
    """``e_k = f(x_{k-1}) - x_k``; zero outside the window by the tail contract."""
    return orbit.errors()


def lattice_difference(cell_a, cell_b) -> np.ndarray:
    return np.array([float(a - b) for a, b in zip(cell_a, cell_b)])


__all__ = ["PseudoOrbit", "pseudo_orbit_errors", "step_forward", "step_backward", "to_float",
           "lattice_difference"]
