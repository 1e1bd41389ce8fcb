"""linrel: a finite-dimensional calculus for linear relations.

Subspaces carry the geometry (gaps, annihilators, complements), linear
relations are graph subspaces of X (+) Y with the full algebra (inverse,
scalar multiple, sum, adjoint, images), and the metric layer provides
quotient seminorms, the minimum modulus, nullity/deficiency counts and
relative bounds.  On top sit the subspace chains with the index nu(A:B)
and a stability lab that sweeps pencils A - lambda B and verifies the
perturbation and stability bounds numerically.
"""

__version__ = "0.1.0"

from . import chains, metrics, relation, serialize, stability, subspace, suites
from .metrics import RelativeBound
from .relation import LinearRelation
from .stability import InstanceSpec, SweepReport
from .subspace import Subspace

__all__ = [
    "__version__",
    "subspace", "relation", "metrics", "chains", "stability", "suites",
    "serialize",
    "Subspace", "LinearRelation", "RelativeBound", "InstanceSpec", "SweepReport",
]
