"""Lifted toral maps with derivative and hyperbolic splitting data.

Two families are provided: integer automorphisms ``x -> L x`` and their
periodic perturbations ``x -> L x + eps * phi(x)`` with ``phi`` a
trigonometric polynomial. Both are equivariant, ``f(x + m) = f(x) + L m`` for
integer ``m``, which is what lets orbits be stored as an exact lattice cell
plus a fractional offset (see :mod:`shadow_cover.orbit`).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import ConeCheckFailed, InvalidArgument, NotHyperbolic

log = logging.getLogger(__name__)

UNIT_CIRCLE_TOL = 1e-9


# ---------------------------------------------------------------------------
# splittings

@dataclass(frozen=True)
class Splitting:
    """Invariant decomposition of a tangent space.

    Bases are stored column-wise. ``proj_c`` is ``None`` for a hyperbolic
    splitting.
    """

    stable_basis: np.ndarray
    unstable_basis: np.ndarray
    center_basis: np.ndarray | None
    proj_s: np.ndarray
    proj_u: np.ndarray
    proj_c: np.ndarray | None
    cond: float

    @classmethod
    def from_bases(cls, stable, unstable, center=None) -> "Splitting":
        stable = np.atleast_2d(np.asarray(stable, float))
        unstable = np.atleast_2d(np.asarray(unstable, float))
        blocks = [stable, unstable] + ([np.asarray(center, float)] if center is not None else [])
        B = np.hstack(blocks)
        n = B.shape[0]
        if B.shape != (n, n):
            raise InvalidArgument("bases do not span complementary subspaces")
        cond = float(np.linalg.cond(B))
        if not np.isfinite(cond) or cond > 1e12:
            raise InvalidArgument(f"stacked basis is numerically singular (cond={cond:.3g})")
        Binv = np.linalg.inv(B)
        s, u = stable.shape[1], unstable.shape[1]
        proj_s = B[:, :s] @ Binv[:s]
        proj_u = B[:, s:s + u] @ Binv[s:s + u]
        proj_c = B[:, s + u:] @ Binv[s + u:] if center is not None else None
        return cls(stable, unstable, center if center is None else np.asarray(center, float),
                   proj_s, proj_u, proj_c, cond)

    @property
    def basis(self) -> np.ndarray:
        blocks = [self.stable_basis, self.unstable_basis]
        if self.center_basis is not None:
            blocks.append(self.center_basis)
        return np.hstack(blocks)

    def check(self) -> dict:
        n = self.proj_s.shape[0]
        total = self.proj_s + self.proj_u + (self.proj_c if self.proj_c is not None else 0.0)
        out = {
            "sum_to_identity": float(np.abs(total - np.eye(n)).max()),
            "idempotent_s": float(np.abs(self.proj_s @ self.proj_s - self.proj_s).max()),
            "idempotent_u": float(np.abs(self.proj_u @ self.proj_u - self.proj_u).max()),
            "cond": self.cond,
        }
        return out


def _orient(B: np.ndarray) -> np.ndarray:
    """Fix the sign of each column so its largest entry is positive."""
    B = np.array(B, dtype=float)
    for j in range(B.shape[1]):
        i = int(np.argmax(np.abs(B[:, j])))
        if B[i, j] < 0:
            B[:, j] = -B[:, j]
    return B


def _schur_subspace(M: np.ndarray, select) -> np.ndarray:
    T, Z, sdim = scipy.linalg.schur(M, output="real", sort=lambda re, im: select(abs(complex(re, im))))
    return Z[:, :sdim]


def linear_subspaces(L, tol: float = UNIT_CIRCLE_TOL):
    """Orthonormal bases of the stable, unstable and center subspaces of ``L``."""
    L = np.asarray(L, dtype=float)
    eig = np.linalg.eigvals(L)
    mods = np.abs(eig)
    Es = _schur_subspace(L, lambda r: r < 1 - tol)
    Eu = _schur_subspace(L, lambda r: r > 1 + tol)
    Ec = _schur_subspace(L, lambda r: abs(r - 1) <= tol)
    return _orient(Es), _orient(Eu), (_orient(Ec) if Ec.shape[1] else None), eig, mods


# ---------------------------------------------------------------------------
# systems

def _int_matrix(L) -> np.ndarray:
    A = np.asarray(L)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidArgument("linear part must be a square matrix")
    if not np.allclose(A, np.rint(A)):
        raise InvalidArgument("linear part must have integer entries")
    A = np.rint(A).astype(np.int64)
    det = int(round(np.linalg.det(A)))
    if abs(det) != 1:
        raise InvalidArgument(f"|det L| must be 1, got {det}")
    return A


def _int_inverse(L: np.ndarray) -> np.ndarray:
    inv = np.rint(np.linalg.inv(L)).astype(np.int64)
    if not np.array_equal(inv @ L, np.eye(L.shape[0], dtype=np.int64)):
        raise InvalidArgument("linear part has no integer inverse")
    return inv


def _hyperbolic_constants(mods):
    stable = mods[mods < 1 - UNIT_CIRCLE_TOL]
    unstable = mods[mods > 1 + UNIT_CIRCLE_TOL]
    lam = max(stable.max(initial=0.0), (1.0 / unstable).max(initial=0.0))
    return float(lam)


class CoverMapSystem:
    """Common behaviour of lifted maps; subclasses provide the dynamics."""

    dim: int
    linear_part: np.ndarray
    linear_inverse: np.ndarray
    lambda_: float
    proj_bound: float
    forward_growth: float
    backward_growth: float
    is_linear: bool = False
    partially_hyperbolic: bool = False
    name: str = "system"

    def apply(self, x):
        raise NotImplementedError

    def apply_inverse(self, y):
        raise NotImplementedError

    def apply_delta(self, x, v):
        """``f(x + v) - f(x)`` evaluated without cancellation against ``L x``."""
        raise NotImplementedError

    def derivative(self, x):
        raise NotImplementedError

    def splitting_at(self, x) -> Splitting:
        raise NotImplementedError

    def splittings_at(self, points) -> list[Splitting]:
        return [self.splitting_at(p) for p in np.asarray(points, float)]

    def params(self) -> dict:
        return {}


class LinearSystem(CoverMapSystem):
    """``x -> L x`` for an integer matrix ``L`` with ``|det L| = 1``."""

    is_linear = True

    def __init__(self, L, partially_hyperbolic: bool = False, name: str = "matrix"):
        L = _int_matrix(L)
        self.linear_part = L
        self.linear_inverse = _int_inverse(L)
        self.dim = L.shape[0]
        self.name = name
        Lf = L.astype(float)
        Es, Eu, Ec, eig, mods = linear_subspaces(Lf)
        self.eigenvalues = eig
        if Ec is not None and not partially_hyperbolic:
            raise NotHyperbolic(
                f"eigenvalue moduli {np.round(mods, 12).tolist()} touch the unit circle"
            )
        if Es.shape[1] == 0 or Eu.shape[1] == 0:
            raise NotHyperbolic("both stable and unstable directions are required")
        self.partially_hyperbolic = Ec is not None
        self.splitting = Splitting.from_bases(Es, Eu, Ec)
        self.lambda_ = _hyperbolic_constants(mods)
        self.proj_bound = max(1.0, float(np.linalg.norm(self.splitting.proj_s, 2)),
                              float(np.linalg.norm(self.splitting.proj_u, 2)))
        self.forward_growth = float(np.linalg.norm(Lf, 2))
        self.backward_growth = float(np.linalg.norm(self.linear_inverse.astype(float), 2))
        self._Lf = Lf
        self._Linvf = self.linear_inverse.astype(float)

    def apply(self, x):
        return np.asarray(x, float) @ self._Lf.T

    def apply_inverse(self, y):
        return np.asarray(y, float) @ self._Linvf.T

    def apply_delta(self, x, v):
        return np.asarray(v, float) @ self._Lf.T

    def derivative(self, x):
        x = np.asarray(x, float)
        return np.broadcast_to(self._Lf, x.shape[:-1] + self._Lf.shape).copy()

    def splitting_at(self, x) -> Splitting:
        return self.splitting

    def splittings_at(self, points) -> list[Splitting]:
        return [self.splitting] * len(points)

    def params(self) -> dict:
        return {"matrix": self.linear_part.tolist(), "partially_hyperbolic": self.partially_hyperbolic}

    def __repr__(self):
        return f"LinearSystem({self.linear_part.tolist()})"


@dataclass(frozen=True)
class Mode:
    frequency: tuple
    amplitude: tuple
    phase: float = 0.0


def parse_modes(spec: Sequence) -> list[Mode]:
    """Accept ``{"frequency": [...], "amplitude": [...]}`` records or tuples."""
    modes = []
    for item in spec:
        if isinstance(item, Mode):
            modes.append(item)
            continue
        if isinstance(item, dict):
            freq, amp, phase = item["frequency"], item["amplitude"], item.get("phase", 0.0)
        else:
            freq, amp, *rest = item
            phase = rest[0] if rest else 0.0
        if not np.allclose(freq, np.rint(freq)):
            raise InvalidArgument("perturbation frequencies must be integer vectors")
        modes.append(Mode(tuple(int(round(f)) for f in freq), tuple(float(a) for a in amp), float(phase)))
    return modes


DEFAULT_MODES = (Mode((0, 1), (1.0 / (2.0 * np.pi), 0.0)),)


class PerturbedSystem(CoverMapSystem):
    """``x -> L x + eps * sum_j a_j sin(2 pi w_j . x + phase_j)``.

    Splittings come from finite-time refinement: the linear unstable subspace
    is pushed forward along ``refine_steps`` backward iterates of the point, the
    stable one backward along forward iterates.
    """

    def __init__(self, L, eps: float, modes=DEFAULT_MODES, refine_steps: int = 20,
                 gamma: float = 1.0, name: str = "perturbed"):
        L = _int_matrix(L)
        self.linear_part = L
        self.linear_inverse = _int_inverse(L)
        self.dim = n = L.shape[0]
        self.eps = float(eps)
        self.modes = parse_modes(modes)
        self.refine_steps = int(refine_steps)
        self.gamma = float(gamma)
        self.name = name
        self.is_linear = self.eps == 0.0
        if self.refine_steps < 1:
            raise InvalidArgument("refine_steps must be >= 1")
        self._freq = np.array([m.frequency for m in self.modes], float).reshape(-1, n)
        self._amp = np.array([m.amplitude for m in self.modes], float).reshape(-1, n)
        self._phase = np.array([m.phase for m in self.modes], float)
        self._Lf = L.astype(float)
        self._Linvf = self.linear_inverse.astype(float)

        base = LinearSystem(L)
        self.base = base
        self.eigenvalues = base.eigenvalues
        self._Es = base.splitting.stable_basis
        self._Eu = base.splitting.unstable_basis
        self.dphi_bound = float(2 * np.pi * sum(np.linalg.norm(a) * np.linalg.norm(w)
                                                for a, w in zip(self._amp, self._freq)))
        pert = abs(self.eps) * self.dphi_bound
        self.forward_growth = base.forward_growth + pert
        smin = float(np.linalg.svd(self._Lf, compute_uv=False).min())
        self.backward_growth = 1.0 / (smin - pert) if smin > pert else np.inf

        self._cone_check()
        self.lambda_, self.proj_bound = self._certify_constants(base)

    # -- dynamics -----------------------------------------------------------

    def _phase_arg(self, x):
        return 2 * np.pi * (x @ self._freq.T) + self._phase

    def phi(self, x):
        x = np.asarray(x, float)
        return np.sin(self._phase_arg(x)) @ self._amp

    def dphi(self, x):
        x = np.asarray(x, float)
        c = np.cos(self._phase_arg(x))
        return 2 * np.pi * np.einsum("...j,ji,jk->...ik", c, self._amp, self._freq)

    def apply(self, x):
        x = np.asarray(x, float)
        return x @ self._Lf.T + self.eps * self.phi(x)

    def apply_delta(self, x, v):
        x = np.asarray(x, float)
        v = np.asarray(v, float)
        return v @ self._Lf.T + self.eps * (self.phi(x + v) - self.phi(x))

    def derivative(self, x):
        return self._Lf + self.eps * self.dphi(x)

    def apply_inverse(self, y, tol: float = 1e-15, max_iter: int = 60):
        y = np.asarray(y, float)
        cell = np.floor(y)
        r = y - cell
        x = r @ self._Linvf.T
        for _ in range(max_iter):
            res = self.apply(x) - r
            step = np.linalg.solve(self.derivative(x), res[..., None])[..., 0]
            x = x - step
            if np.all(np.abs(step) <= tol * (1.0 + np.abs(x))):
                break
        else:
            if not np.all(np.abs(self.apply(x) - r) < 1e-12):
                raise ConeCheckFailed("Newton inversion of the perturbed map did not converge")
        return x + cell @ self._Linvf.T

    # -- splittings ---------------------------------------------------------

    def _refine(self, points, steps=None):
        """Return (stable, unstable) orthonormal bases of shape (P, n, d)."""
        steps = self.refine_steps if steps is None else steps
        pts = np.asarray(points, float).reshape(-1, self.dim)
        P = pts.shape[0]
        back = [pts]
        fwd = [pts]
        y = z = pts - np.floor(pts)
        for _ in range(steps):
            y = self.apply_inverse(y)
            y = y - np.floor(y)
            back.append(y)
            z = self.apply(z)
            z = z - np.floor(z)
            fwd.append(z)
        Qu = np.broadcast_to(self._Eu, (P,) + self._Eu.shape)
        for j in range(steps, 0, -1):
            Qu, _ = np.linalg.qr(self.derivative(back[j]) @ Qu)
        Qs = np.broadcast_to(self._Es, (P,) + self._Es.shape)
        for j in range(steps - 1, -1, -1):
            Qs, _ = np.linalg.qr(np.linalg.solve(self.derivative(fwd[j]), Qs))
        return Qs, Qu

    def _bases(self, points, steps=None):
        Qs, Qu = self._refine(points, steps)
        # project the fixed linear bases so that basis indices match between points
        Bs = Qs @ (np.swapaxes(Qs, -1, -2) @ self._Es)
        Bu = Qu @ (np.swapaxes(Qu, -1, -2) @ self._Eu)
        return Bs, Bu

    def splittings_at(self, points) -> list[Splitting]:
        pts = np.asarray(points, float).reshape(-1, self.dim)
        if self.eps == 0.0:
            return [self.base.splitting] * len(pts)
        Bs, Bu = self._bases(pts)
        return [Splitting.from_bases(bs, bu) for bs, bu in zip(Bs, Bu)]

    def splitting_at(self, x) -> Splitting:
        return self.splittings_at(np.asarray(x, float)[None])[0]

    # -- certification ------------------------------------------------------

    def sample_points(self, count: int = 576, seed: int = 7) -> np.ndarray:
        if self.dim == 2:
            side = int(round(np.sqrt(count)))
            g = (np.arange(side) + 0.5) / side
            return np.stack(np.meshgrid(g, g, indexing="ij"), -1).reshape(-1, 2)
        rng = np.random.Generator(np.random.Philox(seed))
        return rng.random((count, self.dim))

    def _cone_check(self):
        pts = self.sample_points()
        E = np.hstack([self._Es, self._Eu])
        Einv = np.linalg.inv(E)
        s = self._Es.shape[1]
        g = self.gamma
        M = Einv @ self.derivative(pts) @ E
        Minv = np.linalg.inv(M)

        def norms(A):
            return np.linalg.norm(A, 2, axis=(-2, -1))

        def smin(A):
            return np.linalg.svd(A, compute_uv=False)[..., -1]

        # unstable cone {|a| <= g |b|} under M, stable cone {|b| <= g |a|} under M^-1
        exp_u = smin(M[:, s:, s:]) - norms(M[:, s:, :s]) * g
        spread_u = norms(M[:, :s, :s]) * g + norms(M[:, :s, s:])
        exp_s = smin(Minv[:, :s, :s]) - norms(Minv[:, :s, s:]) * g
        spread_s = norms(Minv[:, s:, s:]) * g + norms(Minv[:, s:, :s])
        ok = (exp_u > 1) & (spread_u < g * exp_u) & (exp_s > 1) & (spread_s < g * exp_s)
        if not np.all(ok):
            bad = pts[~ok][0]
            raise ConeCheckFailed(
                f"cone field is not strictly invariant at {np.round(bad, 4).tolist()} "
                f"(eps={self.eps:g}); perturbation too large for certified hyperbolicity"
            )
        # refinement must have settled: compare with one extra step
        Bs1, Bu1 = self._bases(pts[:64])
        Bs2, Bu2 = self._bases(pts[:64], self.refine_steps + 1)
        drift = max(np.abs(Bs1 - Bs2).max(), np.abs(Bu1 - Bu2).max())
        if not drift < 1e-10:
            raise ConeCheckFailed(f"cone refinement has not converged (drift {drift:.3g})")

    def _certify_constants(self, base: LinearSystem):
        lam_lin = base.lambda_
        mods = np.abs(base.eigenvalues)
        gap = float(mods.max() - mods.min())
        lam = lam_lin + abs(self.eps) * self.dphi_bound * (1.0 + 1.0 / gap)
        if not lam < 1:
            raise ConeCheckFailed(f"contraction margin pushes lambda to {lam:.4g} >= 1")
        pts = self.sample_points()
        observed = self.sampled_contraction(pts)
        if observed > lam:
            raise ConeCheckFailed(
                f"sampled contraction {observed:.6g} exceeds certified lambda {lam:.6g}"
            )
        splits = self.splittings_at(pts)
        N = max(max(np.linalg.norm(sp.proj_s, 2), np.linalg.norm(sp.proj_u, 2)) for sp in splits)
        log.debug("perturbed system eps=%g: lambda=%.6g (observed %.6g), N=%.6g",
                  self.eps, lam, observed, N)
        self.observed_contraction = observed
        return float(lam), float(max(1.0, N))

    def sampled_contraction(self, pts) -> float:
        """Max one-step contraction of stable vectors and of unstable vectors under the inverse."""
        pts = np.asarray(pts, float)
        Bs, _ = self._bases(pts)
        img = self.apply(pts)
        _, Bu_img = self._bases(img)
        D = self.derivative(pts)
        st = np.linalg.norm(D @ Bs, axis=-2) / np.linalg.norm(Bs, axis=-2)
        un = np.linalg.norm(np.linalg.solve(D, Bu_img), axis=-2) / np.linalg.norm(Bu_img, axis=-2)
        return float(max(st.max(), un.max()))

    def params(self) -> dict:
        return {
            "matrix": self.linear_part.tolist(),
            "eps": self.eps,
            "phi": [{"frequency": list(m.frequency), "amplitude": list(m.amplitude), "phase": m.phase}
                    for m in self.modes],
        }

    def __repr__(self):
        return f"PerturbedSystem({self.linear_part.tolist()}, eps={self.eps})"


# ---------------------------------------------------------------------------
# constructors

CAT = ((2, 1), (1, 1))
PH3 = ((2, 1, 0), (1, 1, 0), (0, 0, 1))


def make_linear_system(L, partially_hyperbolic: bool = False) -> LinearSystem:
    return LinearSystem(L, partially_hyperbolic=partially_hyperbolic)


def make_perturbed_system(L, eps: float, phi=DEFAULT_MODES, refine_steps: int = 20) -> PerturbedSystem:
    return PerturbedSystem(L, eps, phi, refine_steps=refine_steps)


def cat_map() -> LinearSystem:
    return LinearSystem(CAT, name="cat")


def ph3_map() -> LinearSystem:
    return LinearSystem(PH3, partially_hyperbolic=True, name="ph3")


def adapted_coordinates(system_or_matrix):
    """Linear change of coordinates making the invariant subspaces orthogonal.

    Returns ``(to_adapted, from_adapted)`` as matrices. Columns of
    ``from_adapted`` are unit basis vectors ordered unstable, center, stable
    (descending eigenvalue modulus), so an already adapted diagonal matrix
    gets the identity.
    """
    if isinstance(system_or_matrix, CoverMapSystem):
        L = system_or_matrix.linear_part.astype(float)
        allow_center = system_or_matrix.partially_hyperbolic
    else:
        L = np.asarray(system_or_matrix, float)
        allow_center = False
    Es, Eu, Ec, eig, mods = linear_subspaces(L)
    if Ec is not None and not allow_center:
        raise NotHyperbolic("eigenvalues on the unit circle")
    if Es.shape[1] == 0 or Eu.shape[1] == 0:
        raise NotHyperbolic("both stable and unstable directions are required")
    blocks = [Eu] + ([Ec] if Ec is not None else []) + [Es]
    E = np.hstack(blocks)
    for j in range(E.shape[1]):
        if abs(E[j, j]) > 1e-12 and E[j, j] < 0:
            E[:, j] = -E[:, j]
    return np.linalg.inv(E), E
