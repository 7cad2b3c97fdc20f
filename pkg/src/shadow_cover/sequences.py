"""Finitely supported tangent-vector sequences with the sup norm.

These stand in for elements of the space of sequences vanishing at infinity:
values are stored on a contiguous window and are zero outside it.
"""
from __future__ import annotations

from typing import Mapping

import numpy as np

from .errors import DimensionMismatch, InvalidArgument


class VectorSequence:
    """Sequence ``(v_k)`` with ``v_k = values[k - k_lo]`` and zero outside the window.

    Instances are treated as immutable; the constructor copies its input and
    trims boundary entries whose norm is exactly zero.
    """

    __slots__ = ("k_lo", "values", "dim")

    def __init__(self, k_lo: int, values, dim: int | None = None, trim: bool = True):
        vals = np.array(values, dtype=float)
        if vals.size == 0:
            if dim is None:
                dim = vals.shape[1] if vals.ndim == 2 else None
            if dim is None:
                raise InvalidArgument("dimension required for an empty sequence")
            vals = vals.reshape(0, dim)
        if vals.ndim != 2:
            raise InvalidArgument("values must be a (length, dim) array")
        if dim is not None and vals.shape[1] != dim:
            raise DimensionMismatch(f"expected vectors of dimension {dim}, got {vals.shape[1]}")
        k_lo = int(k_lo)
        if trim:
            nz = np.flatnonzero(np.any(vals != 0.0, axis=1))
            if nz.size == 0:
                vals = vals[:0]
            else:
                vals = vals[nz[0]:nz[-1] + 1]
                k_lo += int(nz[0])
        vals.setflags(write=False)
        self.k_lo = k_lo
        self.values = vals
        self.dim = vals.shape[1]

    # -- construction -------------------------------------------------------

    @classmethod
    def zeros(cls, dim: int) -> "VectorSequence":
        return cls(0, np.zeros((0, dim)), dim)

    @classmethod
    def delta(cls, k: int, vector) -> "VectorSequence":
        vec = np.asarray(vector, float)
        return cls(k, vec[None, :])

    @classmethod
    def from_dict(cls, entries: Mapping[int, object], dim: int) -> "VectorSequence":
        if not entries:
            return cls.zeros(dim)
        lo, hi = min(entries), max(entries)
        vals = np.zeros((hi - lo + 1, dim))
        for k, v in entries.items():
            vals[k - lo] = v
        return cls(lo, vals, dim)

    # -- window -------------------------------------------------------------

    @property
    def k_hi(self) -> int:
        return self.k_lo + len(self.values) - 1

    @property
    def window(self) -> tuple[int, int]:
        return self.k_lo, self.k_hi

    @property
    def is_zero(self) -> bool:
        return len(self.values) == 0

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k: int) -> np.ndarray:
        i = int(k) - self.k_lo
        if 0 <= i < len(self.values):
            return self.values[i]
        return np.zeros(self.dim)

    def on(self, lo: int, hi: int) -> np.ndarray:
        """Dense copy of the entries for indices ``lo..hi`` (zeros outside the support)."""
        out = np.zeros((max(hi - lo + 1, 0), self.dim))
        if self.is_zero or hi < lo:
            return out
        a, b = max(lo, self.k_lo), min(hi, self.k_hi)
        if a <= b:
            out[a - lo:b - lo + 1] = self.values[a - self.k_lo:b - self.k_lo + 1]
        return out

    def items(self):
        for i, v in enumerate(self.values):
            yield self.k_lo + i, v

    def norms(self) -> np.ndarray:
        # rescale so that tiny or huge entries do not underflow or overflow when squared
        scale = np.abs(self.values).max(axis=1, keepdims=True)
        scale[scale == 0] = 1.0
        return scale[:, 0] * np.linalg.norm(self.values / scale, axis=1)

    # -- algebra ------------------------------------------------------------

    def __add__(self, other):
        return combine(self, other, 1.0, 1.0)

    def __sub__(self, other):
        return combine(self, other, 1.0, -1.0)

    def __mul__(self, alpha):
        return VectorSequence(self.k_lo, float(alpha) * self.values, self.dim)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __eq__(self, other):
        if not isinstance(other, VectorSequence):
            return NotImplemented
        return (self.dim == other.dim and len(self) == len(other)
                and (self.is_zero or self.k_lo == other.k_lo)
                and np.array_equal(self.values, other.values))

    def __repr__(self):
        if self.is_zero:
            return f"VectorSequence(zero, dim={self.dim})"
        return f"VectorSequence([{self.k_lo}, {self.k_hi}], dim={self.dim}, sup={sup_norm(self):.3g})"


def sup_norm(v: VectorSequence) -> float:
    if v.is_zero:
        return 0.0
    return float(v.norms().max())


def combine(a: VectorSequence, b: VectorSequence, alpha: float, beta: float) -> VectorSequence:
    """``alpha * a + beta * b`` on the union window."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimensions {a.dim} and {b.dim} differ")
    if a.is_zero:
        return VectorSequence(b.k_lo, beta * b.values, b.dim)
    if b.is_zero:
        return VectorSequence(a.k_lo, alpha * a.values, a.dim)
    lo, hi = min(a.k_lo, b.k_lo), max(a.k_hi, b.k_hi)
    return VectorSequence(lo, alpha * a.on(lo, hi) + beta * b.on(lo, hi), a.dim)


def shift(v: VectorSequence, s: int) -> VectorSequence:
    """``result_k = v_{k-s}``."""
    if v.is_zero:
        return v
    return VectorSequence(v.k_lo + int(s), v.values, v.dim, trim=False)
