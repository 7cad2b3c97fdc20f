"""System descriptions and the on-disk formats for orbits and results.

Orbit files are JSON lines: a header record followed by one record per index.
Besides the float point ``x`` each record carries the exact lattice cell, the
fractional offset and the jump, which is what makes a round trip bit-exact
even when ``x`` itself has lost precision.
"""
from __future__ import annotations

import json
import math
from typing import IO, Iterable

import numpy as np

from .errors import InvalidArgument
from .orbit import PseudoOrbit
from .systems import (CAT, DEFAULT_MODES, PH3, LinearSystem, PerturbedSystem, parse_modes)

ORBIT_FORMAT = "pseudo-orbit/1"


# -- systems ------------------------------------------------------------------

def _square(values: list[float]) -> list[list[int]]:
    n = int(round(math.sqrt(len(values))))
    if n * n != len(values) or n < 2:
        raise InvalidArgument(f"matrix needs a square number (>= 4) of entries, got {len(values)}")
    if any(v != int(v) for v in values):
        raise InvalidArgument("matrix entries must be integers")
    return [[int(values[i * n + j]) for j in range(n)] for i in range(n)]


def parse_system(spec: str):
    """``cat``, ``ph3``, ``perturbed:<eps>`` or ``matrix:a,b,c,d,...`` (row major)."""
    spec = spec.strip()
    name, _, arg = spec.partition(":")
    if name == "cat" and not arg:
        return LinearSystem(CAT, name="cat")
    if name == "ph3" and not arg:
        return LinearSystem(PH3, partially_hyperbolic=True, name="ph3")
    if name == "perturbed":
        try:
            eps = float(arg)
        except ValueError:
            raise InvalidArgument(f"bad perturbation size in {spec!r}") from None
        return PerturbedSystem(CAT, eps, DEFAULT_MODES)
    if name == "matrix":
        try:
            vals = [float(t) for t in arg.split(",")]
        except ValueError:
            raise InvalidArgument(f"bad matrix entries in {spec!r}") from None
        return LinearSystem(_square(vals), name="matrix")
    raise InvalidArgument(f"unknown system {spec!r}")


def system_header(system) -> tuple[str, dict]:
    name = system.name
    params = system.params()
    return name, params


def system_from_header(name: str, params: dict):
    try:
        if name == "cat":
            return LinearSystem(CAT, name="cat")
        if name == "ph3":
            return LinearSystem(PH3, partially_hyperbolic=True, name="ph3")
        if name == "perturbed":
            return PerturbedSystem(params["matrix"], float(params["eps"]),
                                   parse_modes(params.get("phi", DEFAULT_MODES)))
        if name == "matrix":
            return LinearSystem(params["matrix"], bool(params.get("partially_hyperbolic", False)))
    except (KeyError, TypeError) as exc:
        raise InvalidArgument(f"malformed system parameters: {exc}") from None
    raise InvalidArgument(f"unknown system {name!r} in header")


def same_system(a, b) -> bool:
    return a.name == b.name and a.params() == b.params()


# -- serialization ------------------------------------------------------------

def dumps(obj) -> str:
    """Compact JSON with every float written to 17 significant digits."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise InvalidArgument("non-finite value cannot be serialized")
        s = format(x, ".17g")
        if "." not in s and "e" not in s and "n" not in s:
            s += ".0"
        return s
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(dumps(v) for v in obj) + "]"
    raise InvalidArgument(f"cannot serialize {type(obj).__name__}")


def orbit_lines(orbit: PseudoOrbit) -> Iterable[str]:
    name, params = system_header(orbit.system)
    yield dumps({"format": ORBIT_FORMAT, "system": name, "dim": orbit.dim, "params": params})
    pts = orbit.points
    for i in range(len(orbit)):
        yield dumps({
            "k": orbit.k_lo + i,
            "x": pts[i],
            "cell": list(orbit.cells[i]),
            "frac": orbit.fracs[i],
            "jump": orbit.jumps[i],
        })


def write_orbit(orbit: PseudoOrbit, fh: IO[str]):
    for line in orbit_lines(orbit):
        fh.write(line + "\n")


def read_orbit(fh: IO[str], system=None) -> PseudoOrbit:
    """Parse an orbit file; ``system`` (if given) must match the header."""
    lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise InvalidArgument("empty orbit file")
    try:
        header = json.loads(lines[0])
        records = [json.loads(ln) for ln in lines[1:]]
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"orbit file is not valid JSON lines: {exc}") from None
    if not isinstance(header, dict) or header.get("format") != ORBIT_FORMAT:
        raise InvalidArgument(f"missing or unsupported header (expected format {ORBIT_FORMAT})")
    file_system = system_from_header(header.get("system"), header.get("params") or {})
    if system is not None and not same_system(system, file_system):
        raise InvalidArgument(
            f"system {system.name!r} does not match the file header {header.get('system')!r}")
    system = file_system
    n = header.get("dim")
    if n != system.dim:
        raise InvalidArgument(f"header dimension {n} does not match the system")
    if not records:
        raise InvalidArgument("orbit file has no points")
    try:
        ks = [int(r["k"]) for r in records]
    except (KeyError, TypeError, ValueError):
        raise InvalidArgument("every record needs an integer 'k'") from None
    if ks != list(range(ks[0], ks[0] + len(ks))):
        raise InvalidArgument("records must be sorted by k and contiguous")
    try:
        if all("cell" in r and "frac" in r and "jump" in r for r in records):
            cells = [tuple(int(c) for c in r["cell"]) for r in records]
            fracs = np.array([r["frac"] for r in records], float)
            jumps = np.array([r["jump"] for r in records], float)
            if fracs.shape != (len(ks), n) or jumps.shape != (len(ks), n):
                raise InvalidArgument("record vectors have the wrong dimension")
            return PseudoOrbit(system, ks[0], cells, fracs, jumps)
        pts = np.array([r["x"] for r in records], float)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidArgument):
            raise
        raise InvalidArgument(f"malformed orbit record: {exc}") from None
    if pts.shape != (len(ks), n):
        raise InvalidArgument("record vectors have the wrong dimension")
    return PseudoOrbit.from_points(system, pts, ks[0])


def write_csv(rows, fh: IO[str], header=("k", "distance")):
    fh.write(",".join(header) + "\n")
    for row in rows:
        fh.write(",".join(dumps(v) for v in row) + "\n")
