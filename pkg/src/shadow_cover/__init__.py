"""Two-sided limit shadowing for hyperbolic maps on the universal cover of the torus.

Pseudo-orbits with compactly supported jumps are shadowed by solving the
fixed-point problem ``v = G(v)`` in the space of finitely supported tangent
sequences, with ``G = (Id - T)^{-1} (F - T)`` evaluated by a series inverse.
"""
from .cocycle import HyperbolicCocycle, build_cocycle
from .covering import CoveringChart, lift_near, lift_pseudo_orbit, project, torus_distance, wrap
from .errors import (CocycleWindowTooSmall, ConeCheckFailed, DimensionMismatch, InvalidArgument,
                     NoCenterDirection, NoConvergence, NotHyperbolic, NotLinear,
                     NotProductDecomposable, NoUniqueLift, OrbitEscapes, ShadowError,
                     SingularSystem, SupportEscapesWindow)
from .generators import gen_exact, gen_noisy, gen_spliced
from .kernels import BACKEND
from .operators import (apply_F, apply_G, apply_Ginv, apply_Id_minus_T, apply_T, center_part,
                        dense_solve, lemma_defect, ph_defect, residual_F, tail_extent)
from .orbit import PseudoOrbit, pseudo_orbit_errors
from .sequences import VectorSequence, combine, shift, sup_norm
from .solver import (DecayReport, ProbeReport, ShadowingResult, SolverConfig, lift_and_solve,
                     orbit_differences, solve_fixed_point, solve_product, uniqueness_probe,
                     verify_shadowing)
from .systems import (CoverMapSystem, LinearSystem, PerturbedSystem, Splitting,
                      adapted_coordinates, cat_map, make_linear_system, make_perturbed_system,
                      ph3_map)

__version__ = "0.1.0"
