"""Command line interface: ``shadow-cover gen|solve|verify|oracle``.

Exit codes: 0 success, 2 the solver did not converge or a verification
failed, 3 invalid input of any kind.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import io as sio
from .cocycle import build_cocycle
from .errors import InvalidArgument, NoConvergence, ShadowError
from .generators import gen_exact, gen_noisy, gen_spliced
from .operators import apply_Ginv, apply_Id_minus_T, dense_solve, residual_F
from .orbit import _split
from .sequences import VectorSequence, sup_norm
from .solver import (SolverConfig, orbit_differences, solve_fixed_point, solve_product,
                     verify_shadowing)

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 2, 3
log = logging.getLogger("shadow_cover")

# options whose values may start with a minus sign
_VALUE_FLAGS = ("--p", "--q", "--window", "--z")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _vector(text: str) -> np.ndarray:
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise InvalidArgument(f"expected comma-separated reals, got {text!r}") from None
    if not all(np.isfinite(vals)):
        raise InvalidArgument(f"non-finite coordinate in {text!r}")
    return np.array(vals)


def _window(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition(":")
    try:
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise InvalidArgument(f"window must look like lo:hi, got {text!r}") from None
    if not sep or hi < lo:
        raise InvalidArgument(f"invalid window {text!r}")
    return lo, hi


def _join_values(argv: list[str]) -> list[str]:
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def _emit(text: str, path):
    fh, close = _open_out(path)
    try:
        fh.write(text)
    finally:
        if close:
            fh.close()


def _read_orbit(path, system=None):
    if path is None:
        raise InvalidArgument("an input orbit file is required (--in)")
    with open(path, encoding="utf-8") as fh:
        return sio.read_orbit(fh, system)


# -- commands -----------------------------------------------------------------

def cmd_gen(args) -> int:
    system = sio.parse_system(args.system)
    lo, hi = _window(args.window)
    p = _vector(args.p) if args.p is not None else np.zeros(system.dim)
    if args.kind == "exact":
        orbit = gen_exact(system, p, lo, hi)
    elif args.kind == "spliced":
        if args.q is None:
            raise InvalidArgument("--kind spliced needs --q")
        orbit = gen_spliced(system, p, _vector(args.q), lo, hi)
    else:
        if args.noise is None:
            raise InvalidArgument("--kind noisy needs --noise")
        orbit = gen_noisy(system, p, (lo, hi), args.noise, args.seed)
    _emit("".join(line + "\n" for line in sio.orbit_lines(orbit)), args.out)
    return EXIT_OK


def _product_result(orbit, config):
    z = solve_product(orbit)
    lo, hi = orbit.k_lo - config.verify_window_pad, orbit.k_hi + config.verify_window_pad
    diff = orbit_differences(orbit, z, lo, hi)
    residual = residual_F(orbit.extended(lo, hi), diff, window=(lo + 1, hi))
    decay = [(k, float(np.linalg.norm(diff[k]))) for k in range(lo, hi + 1)]
    return {"z": list(z), "residual": residual, "iterations": 0, "converged": True, "decay": decay}


def cmd_solve(args) -> int:
    system = sio.parse_system(args.system) if args.system else None
    orbit = _read_orbit(args.input, system)
    config = SolverConfig(tol=args.tol, max_iter=args.max_iter)
    code = EXIT_OK
    doc = None
    if args.algorithm in ("fixed-point", "both"):
        try:
            res = solve_fixed_point(orbit, config)
        except NoConvergence as exc:
            if exc.result is None:
                raise
            res = exc.result
            code = EXIT_FAIL
            print(f"NoConvergence: {exc}", file=sys.stderr)
        doc = res.to_dict()
    if args.algorithm in ("product", "both"):
        prod = _product_result(orbit, config)
        if doc is None:
            doc = prod
        else:
            doc["agreement"] = float(np.linalg.norm(np.asarray(doc["z"]) - np.asarray(prod["z"])))
    doc["algorithm"] = args.algorithm
    doc["system"] = orbit.system.name
    doc["window"] = list(orbit.window)
    doc["config"] = config.to_dict()
    _emit(sio.dumps(doc) + "\n", args.out)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            sio.write_csv(doc["decay"], fh)
    return code


def cmd_verify(args) -> int:
    orbit = _read_orbit(args.input)
    if args.z is not None:
        z = _vector(args.z)
    elif args.result is not None:
        with open(args.result, encoding="utf-8") as fh:
            try:
                z = np.asarray(json.load(fh)["z"], float)
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise InvalidArgument(f"result file lacks a usable 'z': {exc}") from None
    else:
        raise InvalidArgument("verify needs --z or --result")
    if z.shape != (orbit.dim,):
        raise InvalidArgument("z has the wrong dimension")
    cell, frac = _split(z, 0)
    rep = verify_shadowing(orbit, (cell, frac), args.pad)
    doc = {"ok": rep.ok, "interior_max": rep.interior_max,
           "rate_backward": rep.rate_backward, "rate_forward": rep.rate_forward,
           "decay": [[k, d] for k, d in rep.table]}
    _emit(sio.dumps(doc) + "\n", args.out)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            sio.write_csv(rep.to_rows(), fh, header=("k", "distance", "floor"))
    if not rep.ok:
        print(f"verification failed: {rep.message}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_oracle(args) -> int:
    """Series inverse against the dense solve and the inverse identities."""
    system = sio.parse_system(args.system)
    if system.partially_hyperbolic:
        raise InvalidArgument("the oracle suite needs a hyperbolic system")
    half = args.half_width
    orbit = gen_exact(system, np.full(system.dim, 0.1), -half, half)
    cocycle = build_cocycle(system, orbit, pad=args.pad + 2)
    rng = np.random.Generator(np.random.Philox(args.seed))
    ws = [VectorSequence(-half, rng.standard_normal((2 * half + 1, system.dim)), system.dim)
          for _ in range(args.samples)]
    dense = dense_solve(cocycle, ws, pad=args.pad)
    worst = {"inverse_left": 0.0, "inverse_right": 0.0, "dense_agreement": 0.0, "norm_ratio": 0.0}
    for w, d in zip(ws, dense):
        g = apply_Ginv(cocycle, w, args.tail_tol)
        worst["inverse_left"] = max(worst["inverse_left"], sup_norm(apply_Id_minus_T(cocycle, g) - w))
        worst["inverse_right"] = max(worst["inverse_right"],
                                     sup_norm(apply_Ginv(cocycle, apply_Id_minus_T(cocycle, w),
                                                         args.tail_tol) - w))
        worst["dense_agreement"] = max(worst["dense_agreement"], sup_norm(g - d))
        worst["norm_ratio"] = max(worst["norm_ratio"], sup_norm(g) / sup_norm(w))
    bound = cocycle.norm_bound()
    passed = (worst["inverse_left"] < 1e-10 and worst["inverse_right"] < 1e-10
              and worst["dense_agreement"] < 1e-10 and worst["norm_ratio"] <= bound + 1e-9)
    doc = dict(worst, norm_bound=bound, passed=passed, samples=args.samples)
    _emit(sio.dumps(doc) + "\n", args.out)
    return EXIT_OK if passed else EXIT_FAIL


# -- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="shadow-cover", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a pseudo-orbit file")
    g.add_argument("--system", default="cat")
    g.add_argument("--kind", choices=("exact", "spliced", "noisy"), default="exact")
    g.add_argument("--p")
    g.add_argument("--q")
    g.add_argument("--window", default="-10:10")
    g.add_argument("--noise", type=float)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="compute the shadowing point of an orbit file")
    s.add_argument("input", nargs="?")
    s.add_argument("--in", dest="input_flag")
    s.add_argument("--system")
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--max-iter", type=int, default=100)
    s.add_argument("--algorithm", choices=("fixed-point", "product", "both"), default="fixed-point")
    s.add_argument("--out")
    s.add_argument("--csv")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="measure how a point's orbit approaches an orbit file")
    v.add_argument("input", nargs="?")
    v.add_argument("--in", dest="input_flag")
    v.add_argument("--z")
    v.add_argument("--result")
    v.add_argument("--pad", type=int, default=50)
    v.add_argument("--out")
    v.add_argument("--csv")
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", help="check the series inverse against the dense solve")
    o.add_argument("--system", default="cat")
    o.add_argument("--samples", type=int, default=20)
    o.add_argument("--half-width", type=int, default=10)
    o.add_argument("--pad", type=int, default=90)
    o.add_argument("--tail-tol", type=float, default=1e-14)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--out")
    o.set_defaults(func=cmd_oracle)
    return ap


def _configure_logging():
    level = os.environ.get("SHADOW_COVER_LOG", "").lower()
    levels = {"debug": logging.DEBUG, "info": logging.INFO}
    logger = logging.getLogger("shadow_cover")
    if level in levels:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        logger.addHandler(handler)
        logger.setLevel(levels[level])
    elif level == "off":
        logger.disabled = True


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(_join_values(argv))
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INVALID
    if hasattr(args, "input_flag"):
        if args.input and args.input_flag and args.input != args.input_flag:
            print("error: give the input file once", file=sys.stderr)
            return EXIT_INVALID
        args.input = args.input or args.input_flag
    try:
        if getattr(args, "tol", 1.0) <= 0 or getattr(args, "max_iter", 1) < 1:
            raise InvalidArgument("--tol must be positive and --max-iter at least 1")
        return args.func(args)
    except (ShadowError, ValueError, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # unexpected failures still honour the exit-code contract
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
