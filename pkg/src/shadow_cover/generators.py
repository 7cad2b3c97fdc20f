"""Deterministic two-sided limit pseudo-orbits: exact, spliced and noisy."""
from __future__ import annotations

import numpy as np

from .errors import InvalidArgument
from .orbit import PseudoOrbit


def _point(system, p, name="p"):
    p = np.asarray(p, dtype=float)
    if p.shape != (system.dim,):
        raise InvalidArgument(f"{name} must have {system.dim} coordinates")
    if not np.all(np.isfinite(p)):
        raise InvalidArgument(f"{name} must be finite")
    return p


def _window(k_lo, k_hi):
    if k_hi < k_lo:
        raise InvalidArgument(f"empty window [{k_lo}, {k_hi}]")
    return int(k_lo), int(k_hi)


def gen_exact(system, p, k_lo: int, k_hi: int) -> PseudoOrbit:
    """Exact orbit with ``x_0 = p`` (index 0 may lie outside the window)."""
    k_lo, k_hi = _window(k_lo, k_hi)
    return PseudoOrbit.from_jumps(system, 0, _point(system, p), k_lo, k_hi)


def gen_spliced(system, p, q, k_lo: int, k_hi: int) -> PseudoOrbit:
    """Orbit of ``p`` for ``k < 0`` and of ``q`` for ``k >= 0``; one jump at index 0."""
    k_lo, k_hi = _window(k_lo, k_hi)
    if not k_lo < 0 < k_hi:
        raise InvalidArgument(f"splice index 0 must lie strictly inside [{k_lo}, {k_hi}]")
    p = _point(system, p, "p")
    q = _point(system, q, "q")
    # e_0 = f(x_{-1}) - x_0 = p - q since x_{-1} = f^{-1}(p)
    return PseudoOrbit.from_jumps(system, 0, q, k_lo, k_hi, {0: p - q})


def _ball(rng: np.random.Generator, count: int, dim: int, radius: float) -> np.ndarray:
    g = rng.standard_normal((count, dim))
    nrm = np.linalg.norm(g, axis=1, keepdims=True)
    nrm[nrm == 0] = 1.0
    r = radius * rng.random((count, 1)) ** (1.0 / dim)
    return g / nrm * r


def noise_draws(dim: int, count: int, noise_sup: float, rng_seed: int) -> np.ndarray:
    """The noise vectors used by :func:`gen_noisy`, regenerated from the seed."""
    rng = np.random.Generator(np.random.Philox(int(rng_seed)))
    return _ball(rng, count, dim, float(noise_sup))


def gen_noisy(system, p, window: tuple[int, int], noise_sup: float, rng_seed: int) -> PseudoOrbit:
    """``x_{k+1} = f(x_k) + eta_k`` for ``k_lo < k < k_hi`` with ``eta_k`` uniform in a ball.

    ``x_0 = p`` when 0 lies in the window. Draws are made in increasing ``k``
    from a counter-based generator seeded with ``rng_seed``.
    """
    k_lo, k_hi = _window(*window)
    if not noise_sup >= 0:
        raise InvalidArgument("noise_sup must be nonnegative")
    p = _point(system, p)
    ks = list(range(k_lo + 1, k_hi))
    jumps = {}
    if noise_sup > 0 and ks:
        eta = noise_draws(system.dim, len(ks), noise_sup, rng_seed)
        jumps = {k + 1: -e for k, e in zip(ks, eta)}
    return PseudoOrbit.from_jumps(system, 0, p, k_lo, k_hi, jumps)
