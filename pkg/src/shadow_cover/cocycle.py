"""Hyperbolic cocycle along a pseudo-orbit.

For each index the cocycle holds the splitting at ``x_k``, the connecting
isomorphism ``I_k`` from the tangent space at ``f(x_{k-1})`` to the one at
``x_k``, and ``A_k = I_{k+1} Df(x_k)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument
from .orbit import PseudoOrbit


@dataclass(frozen=True, eq=False)
class HyperbolicCocycle:
    """Per-index linear data on the window ``[k_lo, k_hi]``.

    ``proj_s[i]`` etc. belong to index ``k_lo + i``. ``A[i]``, ``A_inv[i]``,
    ``Df[i]`` belong to index ``k_lo + i`` (``i < K - 1``) and ``I[i]`` to index
    ``k_lo + i + 1``, so that ``A[i] = I[i] @ Df[i]``. ``proj_s_pre[i]`` is the
    stable projection at ``f(x_{k_lo + i})``. ``A_stable[i]`` is
    ``proj_s[i + 1] @ A[i]`` and ``A_inv_unstable[i]`` is ``proj_u[i] @ A_inv[i]``;
    the series sweeps use these so that rounding never seeds the growing
    direction.
    """

    k_lo: int
    proj_s: np.ndarray
    proj_u: np.ndarray
    proj_c: np.ndarray | None
    A: np.ndarray
    A_inv: np.ndarray
    I: np.ndarray
    Df: np.ndarray
    proj_s_pre: np.ndarray
    proj_u_pre: np.ndarray
    lambda_: float
    N: float
    stable_dim: int
    A_stable: np.ndarray
    A_inv_unstable: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def k_hi(self) -> int:
        return self.k_lo + len(self.proj_s) - 1

    @property
    def window(self) -> tuple[int, int]:
        return self.k_lo, self.k_hi

    @property
    def dim(self) -> int:
        return self.proj_s.shape[1]

    @property
    def has_center(self) -> bool:
        return self.proj_c is not None

    def A_at(self, k: int) -> np.ndarray:
        i = k - self.k_lo
        if not 0 <= i < len(self.A):
            raise IndexError(f"A_{k} not available on window {self.window}")
        return self.A[i]

    def norm_bound(self) -> float:
        """Upper bound ``N (1 + lambda) / (1 - lambda)`` for the series inverse."""
        return self.N * (1 + self.lambda_) / (1 - self.lambda_)

    def check(self, samples: int = 8, seed: int = 0) -> dict:
        """Measure the cocycle invariants; all values should be near zero or <= 1."""
        out = {
            "construction": 0.0, "stable_to_stable": 0.0, "unstable_to_unstable": 0.0,
            "max_singular_I": 0.0, "stable_contraction": 0.0, "unstable_contraction": 0.0,
            "identity_deviation": 0.0,
        }
        if len(self.A) == 0:
            return out
        n = self.dim
        out["construction"] = float(np.abs(self.A - self.I @ self.Df).max())
        Pu_post = self.proj_u[1:]
        Ps_post = self.proj_s[1:]
        out["stable_to_stable"] = float(np.abs(Pu_post @ self.I @ self.proj_s_pre).max())
        out["unstable_to_unstable"] = float(np.abs(Ps_post @ self.I @ self.proj_u_pre).max())
        out["max_singular_I"] = float(np.linalg.norm(self.I, 2, axis=(-2, -1)).max())
        out["identity_deviation"] = float(np.linalg.norm(self.I - np.eye(n), 2, axis=(-2, -1)).max())
        rng = np.random.Generator(np.random.Philox(seed))
        g = rng.standard_normal((samples, len(self.A), n))
        vs = np.einsum("kij,skj->ski", self.proj_s[:-1], g)
        ws = np.einsum("kij,skj->ski", self.proj_u[1:], g)
        vn = np.linalg.norm(vs, axis=-1)
        wn = np.linalg.norm(ws, axis=-1)
        Av = np.linalg.norm(np.einsum("kij,skj->ski", self.A, vs), axis=-1)
        Aw = np.linalg.norm(np.einsum("kij,skj->ski", self.A_inv, ws), axis=-1)
        good_v, good_w = vn > 1e-12, wn > 1e-12
        if good_v.any():
            out["stable_contraction"] = float((Av[good_v] / vn[good_v]).max())
        if good_w.any():
            out["unstable_contraction"] = float((Aw[good_w] / wn[good_w]).max())
        return out


def _connecting_map(target, source):
    """Map source basis vectors onto target ones with matching indices, norm capped at 1."""
    raw = target.basis @ np.linalg.inv(source.basis)
    c = min(1.0, 1.0 / float(np.linalg.norm(raw, 2)))
    return c * raw


def build_cocycle(system, orbit: PseudoOrbit, pad: int = 0) -> HyperbolicCocycle:
    """Assemble the cocycle on ``orbit`` (materialized ``pad`` indices further on each side)."""
    if pad < 0:
        raise InvalidArgument("pad must be nonnegative")
    if orbit.system is not system:
        raise InvalidArgument("orbit belongs to a different system")
    if pad:
        orbit = orbit.padded(pad)
    K, n = orbit.fracs.shape
    fracs = orbit.fracs
    splits = system.splittings_at(fracs)
    proj_s = np.array([s.proj_s for s in splits])
    proj_u = np.array([s.proj_u for s in splits])
    proj_c = np.array([s.proj_c for s in splits]) if splits[0].proj_c is not None else None
    stable_dim = splits[0].stable_basis.shape[1]

    Df = np.array(system.derivative(fracs[:-1])).reshape(K - 1, n, n)
    I = np.broadcast_to(np.eye(n), (K - 1, n, n)).copy()
    proj_s_pre = proj_s[1:].copy()
    proj_u_pre = proj_u[1:].copy()
    if not system.is_linear and K > 1:
        moved = np.flatnonzero(np.any(orbit.jumps[1:] != 0.0, axis=1))
        if moved.size:
            images = system.apply(fracs[moved])
            pre = system.splittings_at(images - np.floor(images))
            for i, sp in zip(moved, pre):
                I[i] = _connecting_map(splits[i + 1], sp)
                proj_s_pre[i] = sp.proj_s
                proj_u_pre[i] = sp.proj_u
    A = I @ Df
    A_inv = np.linalg.inv(A) if K > 1 else np.zeros((0, n, n))
    A_stable = proj_s[1:] @ A
    A_inv_unstable = proj_u[:-1] @ A_inv
    for arr in (proj_s, proj_u, A, A_inv, I, Df, proj_s_pre, proj_u_pre, A_stable, A_inv_unstable):
        arr.setflags(write=False)
    return HyperbolicCocycle(orbit.k_lo, proj_s, proj_u, proj_c, A, A_inv, I, Df,
                             proj_s_pre, proj_u_pre, float(system.lambda_),
                             float(system.proj_bound), stable_dim, A_stable, A_inv_unstable)
