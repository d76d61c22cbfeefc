"""Exact computations with stable quadratic modules of finite Waldhausen categories."""

from .errors import CheckFailure, InconsistentPresentation, SchemaError
from .exactlin import FpAbelianGroup, hnf, snf
from .nil2 import Nil2Group, Nil2Word, NormalSubgroup
from .squad import (FreeSquad, Homotopy, SquadMorphism, SquadPresentation, check_homotopy,
                    check_morphism)
from .waldcat import (ExactFunctorData, FiniteWaldhausenCategory, NaturalWeakEquivalence,
                      check_tau, d_star, d_star_functor, d_star_homotopy, hopf, k0, k1)

__version__ = "0.1.0"

__all__ = [
    "CheckFailure", "InconsistentPresentation", "SchemaError", "FpAbelianGroup", "hnf", "snf",
    "Nil2Group", "Nil2Word", "NormalSubgroup", "FreeSquad", "Homotopy", "SquadMorphism",
    "SquadPresentation", "check_homotopy", "check_morphism", "ExactFunctorData",
    "FiniteWaldhausenCategory", "NaturalWeakEquivalence", "check_tau", "d_star", "d_star_functor",
    "d_star_homotopy", "hopf", "k0", "k1",
]
