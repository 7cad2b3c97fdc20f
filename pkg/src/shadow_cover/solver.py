"""Shadowing points of two-sided limit pseudo-orbits.

``solve_fixed_point`` iterates ``G`` from the zero sequence, ``solve_product``
intersects the unstable leaf of the backward tail with the stable leaf of the
forward tail (linear systems only), and ``verify_shadowing`` measures how the
orbit of a candidate point approaches the pseudo-orbit.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from .cocycle import build_cocycle
from .covering import lift_pseudo_orbit, project, wrap
from .errors import (CocycleWindowTooSmall, InvalidArgument, NoConvergence, NotLinear,
                     NotProductDecomposable, SupportEscapesWindow)
from .operators import apply_G, residual_F, tail_extent
from .orbit import PseudoOrbit, _split, step_backward, step_forward
from .sequences import VectorSequence, sup_norm

log = logging.getLogger("shadow_cover")

_UNIT = np.finfo(float).eps


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-10
    max_iter: int = 100
    tail_tol: float = 1e-12
    verify_window_pad: int = 50

    def __post_init__(self):
        if not self.tol > 0:
            raise InvalidArgument("tol must be positive")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise InvalidArgument("max_iter must be a positive integer")
        if not self.tail_tol > 0:
            raise InvalidArgument("tail_tol must be positive")
        if self.verify_window_pad < 0:
            raise InvalidArgument("verify_window_pad must be nonnegative")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ShadowingResult:
    z: np.ndarray
    v_star: VectorSequence
    residual: float
    iterations: int
    decay: list
    converged: bool
    residual_history: list = field(default_factory=list)
    z_cell: tuple = ()
    z_frac: np.ndarray | None = None
    pad: int = 0
    torus_decay: list | None = None

    def to_dict(self) -> dict:
        return {
            "z": [float(c) for c in self.z],
            "residual": float(self.residual),
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "decay": [[int(k), float(d)] for k, d in self.decay],
        }


def _state_plus(cell, frac, v):
    shift, r = _split(np.asarray(frac, float) + np.asarray(v, float), 0)
    return tuple(a + b for a, b in zip(cell, shift)), r


def solve_fixed_point(orbit: PseudoOrbit, config: SolverConfig | None = None,
                      v0: VectorSequence | None = None) -> ShadowingResult:
    """Iterate ``v <- G(v)`` until ``F(v) = v`` to within ``config.tol``.

    A step is accepted as final when the residual ``|F(v) - v|`` is below
    ``tol`` and either the last change or the bound ``|G| * residual`` on the
    next change is below ``tol``. Linear systems therefore stop after one step.
    """
    config = config or SolverConfig()
    system = orbit.system
    n = orbit.dim
    v_start = v0 if v0 is not None else VectorSequence.zeros(n)
    size = max(sup_norm(orbit.errors()), sup_norm(v_start), config.tail_tol)
    pad = 2 * tail_extent(system.lambda_, system.proj_bound, size, config.tail_tol) + 4
    last_exc = None
    for _attempt in range(3):
        try:
            return _iterate(orbit, config, v_start, pad)
        except (CocycleWindowTooSmall, SupportEscapesWindow) as exc:
            log.info("solver window too small at pad %d (%s); doubling", pad, exc)
            last_exc = exc
            pad *= 2
    raise last_exc


def _iterate(orbit, config, v, pad) -> ShadowingResult:
    system = orbit.system
    wide = orbit.padded(pad)
    cocycle = build_cocycle(system, wide)
    bound = cocycle.norm_bound()
    history = []
    converged = False
    r = residual_F(wide, v)
    it = 0
    for it in range(1, config.max_iter + 1):
        v_new = apply_G(wide, cocycle, v, config.tail_tol)
        if not np.all(np.isfinite(v_new.values)):
            log.info("iterate %d is not finite; stopping", it)
            break
        step = sup_norm(v_new - v)
        v = v_new
        r = residual_F(wide, v)
        history.append(r)
        log.debug("iteration %d: step %.3e residual %.3e", it, step, r)
        if r < config.tol and (step < config.tol or bound * r < config.tol):
            converged = True
            break
    cell0, frac0 = wide.state(0)
    z_cell, z_frac = _state_plus(cell0, frac0, v[0]) if np.all(np.isfinite(v[0])) else (cell0, frac0)
    z = np.array([float(c) for c in z_cell]) + z_frac
    lo, hi = orbit.k_lo - config.verify_window_pad, orbit.k_hi + config.verify_window_pad
    decay = [(k, float(np.linalg.norm(v[k]))) for k in range(lo, hi + 1)]
    result = ShadowingResult(z, v, float(r), it, decay, converged, history,
                             z_cell, z_frac, pad)
    if not converged:
        raise NoConvergence(
            f"no fixed point within {config.max_iter} iterations (residual {r:.3e})", result)
    return result


def solve_product(orbit: PseudoOrbit) -> np.ndarray:
    """Point whose orbit is backward asymptotic to ``x_{k_lo}`` and forward to ``x_{k_hi}``."""
    system = orbit.system
    if not system.is_linear:
        raise NotLinear("the product construction needs a linear system")
    sp = system.splitting_at(np.zeros(system.dim))
    if sp.proj_c is not None:
        raise NotProductDecomposable("a center direction leaves the leaf intersection undetermined")
    if not np.isfinite(sp.cond) or sp.cond > 1e12:
        raise NotProductDecomposable(f"stable/unstable basis is singular (cond {sp.cond:.3g})")
    L = system.linear_part.astype(float)
    Linv = system.linear_inverse.astype(float)
    Ps, Pu = sp.proj_s, sp.proj_u

    def transport(P, x, k):
        # component of the time-0 point of the exact orbit through x at time k
        y = P @ x
        M, steps = (L, -k) if k < 0 else (Linv, k)
        for _ in range(steps):
            y = P @ (M @ y)
        return y

    s = transport(Ps, orbit.point(orbit.k_lo), orbit.k_lo)
    u = transport(Pu, orbit.point(orbit.k_hi), orbit.k_hi)
    return s + u


# -- verification -------------------------------------------------------------

@dataclass
class DecayReport:
    table: list
    interior_max: float
    rate_backward: float | None
    rate_forward: float | None
    floor: list
    ok: bool
    differences: VectorSequence
    message: str = ""

    def to_rows(self):
        return [(k, d, f) for (k, d), f in zip(self.table, self.floor)]


def _orbit_states(system, cell, frac, k0: int, lo: int, hi: int) -> dict:
    zero = np.zeros(system.dim)
    states = {k0: (cell, np.asarray(frac, float))}
    c, r = cell, states[k0][1]
    for k in range(k0, hi):
        c, r = step_forward(system, c, r, zero, k)
        states[k + 1] = (c, r)
    c, r = states[k0]
    for k in range(k0, lo, -1):
        c, r = step_backward(system, c, r, zero, k)
        states[k - 1] = (c, r)
    return states


def _fit_rate(ks, ds):
    """Per-step factor from least squares on ``log d`` against ``|k|``."""
    if len(ks) < 2:
        return None
    slope = np.polyfit(np.abs(np.asarray(ks, float)), np.log(ds), 1)[0]
    return float(np.exp(slope))


def _tail_rate(kk, dd, ff):
    """Fit on a tail ordered outward; ``None`` when too few distances are resolved."""
    if np.all(dd == 0):
        return 0.0
    good = dd > ff
    stop = len(kk) if np.all(good) else int(np.argmin(good))
    kk, dd = kk[:stop], dd[:stop]
    if len(kk) < 3:
        return None
    half = len(kk) // 2
    return _fit_rate(kk[half:], dd[half:])


def orbit_differences(orbit: PseudoOrbit, z, lo: int, hi: int) -> VectorSequence:
    """``f^k(z) - x_k`` for ``k`` in ``[lo, hi]``; ``z`` is a point or a ``(cell, frac)`` pair."""
    system = orbit.system
    if isinstance(z, tuple) and len(z) == 2 and not np.isscalar(z[0]):
        cell, frac = z
    else:
        cell, frac = _split(np.asarray(z, float), 0)
    zs = _orbit_states(system, cell, frac, 0, min(lo, 0), max(hi, 0))
    wide = orbit.extended(lo, hi)
    vals = np.zeros((hi - lo + 1, orbit.dim))
    for k in range(lo, hi + 1):
        zc, zr = zs[k]
        xc, xr = wide.state(k)
        vals[k - lo] = np.array([float(a - b) for a, b in zip(zc, xc)]) + (zr - xr)
    return VectorSequence(lo, vals, orbit.dim, trim=False)


def verify_shadowing(orbit: PseudoOrbit, z, pad: int = 50, resolve_factor: float = 1e3) -> DecayReport:
    """Distances ``|f^k(z) - x_k|`` over the window widened by ``pad``.

    Rounding in the iterates grows like the map's expansion, so each distance
    is compared with a floor ``resolve_factor * u * growth^|k| * (1 + |z|)``;
    tail rates are fitted only to distances above the floor, using the outer
    half of the resolved part of each tail.
    """
    if pad < 0:
        raise InvalidArgument("pad must be nonnegative")
    lo, hi = orbit.k_lo - pad, orbit.k_hi + pad
    diff = orbit_differences(orbit, z, lo, hi)
    d = np.linalg.norm(diff.on(lo, hi), axis=1)
    system = orbit.system
    z_pt = np.asarray(z[1] if isinstance(z, tuple) else z, float)
    z_size = 1.0 + float(np.linalg.norm(z_pt))
    ks = np.arange(lo, hi + 1)
    growth = np.where(ks >= 0, system.forward_growth, system.backward_growth)
    floor = resolve_factor * _UNIT * z_size * growth ** np.abs(ks).astype(float)
    table = [(int(k), float(x)) for k, x in zip(ks, d)]
    interior = d[(ks >= orbit.k_lo) & (ks <= orbit.k_hi)]
    interior_max = float(interior.max()) if interior.size else 0.0

    # tails start where the pseudo-orbit errors stop
    jumps_nz = [k for k in range(orbit.k_lo, orbit.k_hi + 1) if np.any(orbit.jump(k) != 0)]
    f_start = jumps_nz[-1] if jumps_nz else orbit.k_hi
    b_start = jumps_nz[0] - 1 if jumps_nz else orbit.k_lo
    fwd = ks >= f_start
    bwd = ks <= b_start
    rf = _tail_rate(ks[fwd], d[fwd], floor[fwd])
    rb = _tail_rate(ks[bwd][::-1], d[bwd][::-1], floor[bwd][::-1])
    ok = all(r is None or r < 1.0 for r in (rf, rb))
    msg = "" if ok else "tail distances do not decrease"
    return DecayReport(table, interior_max, rb, rf, floor.tolist(), ok, diff, msg)


# -- pipelines ----------------------------------------------------------------

def lift_and_solve(torus_orbit, system, seed, config: SolverConfig | None = None, k_lo: int = 0):
    """Lift a torus pseudo-orbit, solve on the cover and project the point back."""
    config = config or SolverConfig()
    orbit = lift_pseudo_orbit(torus_orbit, system, seed, k_lo=k_lo)
    result = solve_fixed_point(orbit, config)
    # torus distance between pi(f^k z) and pi(x_k) is the wrapped fixed-point entry
    result.torus_decay = [(k, float(np.linalg.norm(wrap(result.v_star[k])))) for k, _ in result.decay]
    return project(result.z), result


@dataclass
class ProbeReport:
    spread: float
    converged: list
    points: list

    def __float__(self):
        return self.spread


def uniqueness_probe(orbit: PseudoOrbit, config: SolverConfig | None = None, trials: int = 10,
                     seed: int = 0, scale: float = 1e-3) -> ProbeReport:
    """Solve from ``trials`` random small starting sequences and compare the points found."""
    if trials < 2:
        raise InvalidArgument("uniqueness_probe needs at least two trials")
    config = config or SolverConfig()
    rng = np.random.Generator(np.random.Philox(int(seed)))
    n, K = orbit.dim, len(orbit)
    points, flags = [], []
    for _ in range(trials):
        g = rng.standard_normal((K, n))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        v0 = VectorSequence(orbit.k_lo, g * scale * rng.random((K, 1)) ** (1.0 / n), n)
        try:
            res = solve_fixed_point(orbit, config, v0=v0)
        except NoConvergence:
            flags.append(False)
            continue
        flags.append(True)
        points.append(res.z)
    spread = max((float(np.linalg.norm(a - b)) for a, b in itertools.combinations(points, 2)),
                 default=0.0)
    return ProbeReport(spread, flags, points)
