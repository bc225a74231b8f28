"""SI/SIR epidemics carried by k random walks on random regular graphs."""

from .epidemic import EpidemicTrace, run_epidemic, run_scripted
from .igraph import (ParticleGraph, WeightedInteractionGraph, build_from_schedule, build_psi,
                     build_upsilon, components, threshold, weighted_distances)
from .kernels import BACKEND
from .rrg import RegularGraph, check_typical, generate_regular, second_eigenvalue
from .walker import WalkState, coincident_pairs, init_general_position, step

__version__ = "0.1.0"
