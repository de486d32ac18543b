"""Consensus solvability for synchronous dynamic networks under oblivious message adversaries."""

from .complex import ProtocolComplex, build, chromatic_subdivision, iis_equivalence_check, pseudosphere
from .digraph import Adversary, CommGraph, NotRootedError, random_rooted_adversary, sccs
from .nerve import nerve_decide
from .oracle import OracleCapExceeded, analyze, min_termination_rounds, simulate
from .rrg import rrg_decide, rrg_recursive

__version__ = "0.1.0"

__all__ = [
    "Adversary",
    "CommGraph",
    "NotRootedError",
    "OracleCapExceeded",
    "ProtocolComplex",
    "analyze",
    "build",
    "chromatic_subdivision",
    "iis_equivalence_check",
    "min_termination_rounds",
    "nerve_decide",
    "pseudosphere",
    "random_rooted_adversary",
    "rrg_decide",
    "rrg_recursive",
    "sccs",
    "simulate",
]
