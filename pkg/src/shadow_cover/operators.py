"""Operators on finitely supported sequences along a pseudo-orbit.

``F(v)_k = f(x_{k-1} + v_{k-1}) - x_k``, ``T(v)_k = A_{k-1} v_{k-1}``, the
series inverse of ``Id - T`` and ``G = (Id - T)^{-1} (F - T)``.
"""
from __future__ import annotations

import math

import numpy as np

from . import kernels
from .cocycle import HyperbolicCocycle
from .errors import (CocycleWindowTooSmall, DimensionMismatch, InvalidArgument,
                     NoCenterDirection, SingularSystem, SupportEscapesWindow)
from .orbit import PseudoOrbit, pseudo_orbit_errors
from .sequences import VectorSequence, sup_norm

DEFAULT_TAIL_TOL = 1e-12


def _check_dim(v: VectorSequence, n: int):
    if v.dim != n:
        raise DimensionMismatch(f"sequence has dimension {v.dim}, expected {n}")


def _inside(v: VectorSequence, lo: int, hi: int, what: str):
    if v.is_zero:
        return
    if v.k_lo < lo or v.k_hi > hi:
        raise SupportEscapesWindow(f"support {v.window} of {what} leaves [{lo}, {hi}]")


def tail_extent(lambda_: float, N: float, norm: float, tail_tol: float) -> int:
    """Indices past the support after which the series terms fall below ``tail_tol``."""
    if tail_tol <= 0:
        raise InvalidArgument("tail_tol must be positive")
    if norm == 0.0:
        return 0
    ratio = tail_tol * (1 - lambda_) / (N * norm)
    if ratio >= 1.0:
        return 0
    return int(math.ceil(math.log(ratio) / math.log(lambda_)))


# -- F ----------------------------------------------------------------------

def apply_F(orbit: PseudoOrbit, v: VectorSequence) -> VectorSequence:
    _check_dim(v, orbit.dim)
    o_lo, o_hi = orbit.window
    _inside(v, o_lo, o_hi, "v")
    if v.is_zero:
        return pseudo_orbit_errors(orbit)
    hi = max(o_hi, v.k_hi + 1)
    out = np.zeros((hi - o_lo + 1, orbit.dim))
    out[:len(orbit)] = orbit.jumps
    src = slice(v.k_lo - o_lo, v.k_hi - o_lo + 1)
    out[v.k_lo - o_lo + 1:v.k_hi - o_lo + 2] += orbit.system.apply_delta(orbit.fracs[src], v.values)
    return VectorSequence(o_lo, out, orbit.dim)


def residual_F(orbit: PseudoOrbit, v: VectorSequence, window: tuple[int, int] | None = None) -> float:
    """``sup |F(v)_k - v_k|``, optionally restricted to indices in ``window``."""
    d = apply_F(orbit, v) - v
    if window is None:
        return sup_norm(d)
    lo, hi = window
    if hi < lo:
        return 0.0
    vals = d.on(lo, hi)
    return float(np.linalg.norm(vals, axis=1).max()) if len(vals) else 0.0


# -- T ----------------------------------------------------------------------

def apply_T(cocycle: HyperbolicCocycle, v: VectorSequence) -> VectorSequence:
    _check_dim(v, cocycle.dim)
    if v.is_zero:
        return v
    _inside(v, cocycle.k_lo, cocycle.k_hi - 1, "v (A_k needed on its support)")
    i0 = v.k_lo - cocycle.k_lo
    vals = np.einsum("kij,kj->ki", cocycle.A[i0:i0 + len(v)], v.values)
    return VectorSequence(v.k_lo + 1, vals, v.dim)


def apply_Id_minus_T(cocycle: HyperbolicCocycle, v: VectorSequence) -> VectorSequence:
    return v - apply_T(cocycle, v)


# -- series inverse -----------------------------------------------------------

def apply_Ginv(cocycle: HyperbolicCocycle, w: VectorSequence,
               tail_tol: float = DEFAULT_TAIL_TOL) -> VectorSequence:
    """Series inverse of ``Id - T`` (with the center part dropped when present).

    Each computed entry is exact for finitely supported ``w``; the output runs
    past the support of ``w`` until the entries fall below ``tail_tol``.
    """
    _check_dim(w, cocycle.dim)
    if tail_tol <= 0:
        raise InvalidArgument("tail_tol must be positive")
    if w.is_zero:
        return w
    c_lo, c_hi = cocycle.window
    _inside(w, c_lo, c_hi, "w")
    m = tail_extent(cocycle.lambda_, cocycle.N, sup_norm(w), tail_tol)
    lo, hi = max(c_lo, w.k_lo - m), min(c_hi, w.k_hi + m)
    W = w.on(lo, hi)
    a, b = lo - c_lo, hi - c_lo + 1
    s_part = kernels.forward_recurrence(cocycle.A_stable[a:b - 1],
                                        np.einsum("kij,kj->ki", cocycle.proj_s[a:b], W))
    u_part = kernels.backward_recurrence(cocycle.A_inv_unstable[a:b - 1],
                                         np.einsum("kij,kj->ki", cocycle.proj_u[a:b], W))
    out = s_part - u_part
    norms = np.linalg.norm(out, axis=1)
    if lo > w.k_lo - m and lo < w.k_lo and norms[0] >= tail_tol:
        raise CocycleWindowTooSmall(
            f"series tail still {norms[0]:.3g} at the lower cocycle end {c_lo}; need {w.k_lo - m}")
    if hi < w.k_hi + m and hi > w.k_hi and norms[-1] >= tail_tol:
        raise CocycleWindowTooSmall(
            f"series tail still {norms[-1]:.3g} at the upper cocycle end {c_hi}; need {w.k_hi + m}")
    if (lo > w.k_lo - m and lo == w.k_lo) or (hi < w.k_hi + m and hi == w.k_hi):
        raise CocycleWindowTooSmall("support of w touches the cocycle boundary; no room for tails")
    # drop sub-tolerance entries from the outer ends of the tail regions
    first, last = 0, len(out) - 1
    while first < w.k_lo - lo and norms[first] < tail_tol:
        first += 1
    while last > w.k_hi - lo and norms[last] < tail_tol:
        last -= 1
    return VectorSequence(lo + first, out[first:last + 1], w.dim)


def lemma_defect(cocycle: HyperbolicCocycle, v: VectorSequence,
                 tail_tol: float = DEFAULT_TAIL_TOL) -> float:
    """``max_k |A_k G(v)_k - G(v)_{k+1} + v_{k+1}|`` over the output of the series."""
    g = apply_Ginv(cocycle, v, tail_tol)
    if g.is_zero:
        return sup_norm(v)
    lo, hi = g.k_lo, min(g.k_hi, cocycle.k_hi - 1)
    G = g.on(lo, hi + 1)
    V = v.on(lo + 1, hi + 1)
    A = cocycle.A[lo - cocycle.k_lo:hi - cocycle.k_lo + 1]
    d = np.einsum("kij,kj->ki", A, G[:-1]) - G[1:] + V
    return float(np.linalg.norm(d, axis=1).max())


# -- dense oracle -------------------------------------------------------------

def _assemble(cocycle: HyperbolicCocycle, lo: int, hi: int) -> np.ndarray:
    """Rows: equations ``v_k - A_{k-1} v_{k-1}`` for ``k = lo..hi+1`` with zero boundary values."""
    n = cocycle.dim
    K = hi - lo + 1
    M = np.zeros(((K + 1) * n, K * n))
    eye = np.eye(n)
    for j in range(K):
        M[j * n:(j + 1) * n, j * n:(j + 1) * n] = eye
        M[(j + 1) * n:(j + 2) * n, j * n:(j + 1) * n] = -cocycle.A[lo + j - cocycle.k_lo]
    return M


def _factor(cocycle: HyperbolicCocycle, lo: int, hi: int):
    key = ("dense", lo, hi)
    hit = cocycle._cache.get(key)
    if hit is not None:
        return hit
    M = _assemble(cocycle, lo, hi)
    Q, R = np.linalg.qr(M)
    sv = np.linalg.svd(R, compute_uv=False)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
    hit = (M, Q, R, cond)
    cocycle._cache[key] = hit
    return hit


def dense_solve(cocycle: HyperbolicCocycle, w, pad: int | None = None,
                tail_tol: float = DEFAULT_TAIL_TOL, return_info: bool = False,
                max_cond: float = 1e12, max_residual: float = 1e-8):
    """Solve ``(Id - T) v = w`` by dense least squares on the padded window.

    The unknowns live on the support of ``w`` widened by ``pad``; one extra
    equation past the right end asks ``A_hi v_hi = 0``, so that both zero
    boundary values are imposed. ``w`` may be a list of sequences, which share
    one factorization.
    """
    batch = isinstance(w, (list, tuple))
    ws = list(w) if batch else [w]
    if not ws:
        return []
    n = cocycle.dim
    for x in ws:
        _check_dim(x, n)
    live = [x for x in ws if not x.is_zero]
    if not live:
        out = [VectorSequence.zeros(n) for _ in ws]
        info = {"cond": 1.0, "residual": 0.0, "window": None}
        res = out if batch else out[0]
        return (res, info) if return_info else res
    wl = min(x.k_lo for x in live)
    wh = max(x.k_hi for x in live)
    if pad is None:
        pad = 3 * tail_extent(cocycle.lambda_, cocycle.N, max(sup_norm(x) for x in live), tail_tol)
    if pad < 0:
        raise InvalidArgument("pad must be nonnegative")
    lo, hi = wl - pad, wh + pad
    if lo < cocycle.k_lo or hi > cocycle.k_hi - 1:
        raise CocycleWindowTooSmall(
            f"dense window [{lo}, {hi + 1}] exceeds cocycle data {cocycle.window}")
    M, Q, R, cond = _factor(cocycle, lo, hi)
    if cond > max_cond:
        raise SingularSystem(f"dense system condition number {cond:.3g} exceeds {max_cond:.3g}")
    rhs = np.stack([x.on(lo, hi + 1).ravel() for x in ws], axis=1)
    sol = np.linalg.solve(R, Q.T @ rhs)
    scale = np.linalg.norm(rhs, axis=0)
    scale[scale == 0] = 1.0
    resid = float((np.linalg.norm(M @ sol - rhs, axis=0) / scale).max())
    if resid > max_residual:
        raise SingularSystem(
            f"dense system is inconsistent (relative residual {resid:.3g}); "
            "the cocycle has a non-hyperbolic direction")
    out = [VectorSequence(lo, sol[:, j].reshape(-1, n), n) for j in range(len(ws))]
    info = {"cond": cond, "residual": resid, "window": (lo, hi)}
    res = out if batch else out[0]
    return (res, info) if return_info else res


# -- G and the center defect --------------------------------------------------

def apply_G(orbit: PseudoOrbit, cocycle: HyperbolicCocycle, v: VectorSequence,
            tail_tol: float = DEFAULT_TAIL_TOL) -> VectorSequence:
    return apply_Ginv(cocycle, apply_F(orbit, v) - apply_T(cocycle, v), tail_tol)


def ph_defect(cocycle: HyperbolicCocycle, w: VectorSequence,
              tail_tol: float = DEFAULT_TAIL_TOL) -> VectorSequence:
    """``(Id - T) G(w) - w``; equals minus the center part of ``w``."""
    if not cocycle.has_center:
        raise NoCenterDirection("cocycle has no center projections")
    return apply_Id_minus_T(cocycle, apply_Ginv(cocycle, w, tail_tol)) - w


def center_part(cocycle: HyperbolicCocycle, w: VectorSequence) -> VectorSequence:
    if not cocycle.has_center:
        raise NoCenterDirection("cocycle has no center projections")
    if w.is_zero:
        return w
    _inside(w, cocycle.k_lo, cocycle.k_hi, "w")
    i0 = w.k_lo - cocycle.k_lo
    return VectorSequence(w.k_lo, np.einsum("kij,kj->ki", cocycle.proj_c[i0:i0 + len(w)], w.values), w.dim)
