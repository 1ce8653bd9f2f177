"""Sample-efficient quadratic Fourier analysis over F_2^n.

The package bundles three layers:

* query-access function spaces and GF(2)/symplectic linear algebra
  (:mod:`pfrkit.funcspace`, :mod:`pfrkit.gf2`, :mod:`pfrkit.symplectic`);
* the quadratic Goldreich-Levin family — stabilizer list decoding, the
  algorithmic U^3 inverse theorem, Reed-Muller order-2 self-correction, and
  greedy quadratic decomposition (:mod:`pfrkit.lagsearch`, :mod:`pfrkit.qgl`);
* the polynomial Freiman-Ruzsa covering pipeline and affine-homomorphism
  recovery (:mod:`pfrkit.pfr`), with brute-force ground-truth oracles for
  desk-scale validation (:mod:`pfrkit.oracle`).
"""

from .config import PAPER, PRACTICAL, Preset, dense_cap, get_preset
from .errors import (
    BoundednessError,
    ContainmentError,
    DecompositionError,
    DenseCapError,
    DepthLimitError,
    DimensionMismatchError,
    InfeasibleParameterError,
    IsotropyError,
    ParameterError,
    PfrkitError,
)
from .funcspace import BoundedFunction, DenseFunction, QueryCounter, fwht, load_table, save_table
from .gf2 import AffineMap, BitMatrix, BitVector, Subspace
from .lagsearch import list_decode_stabilizers
from .pfr import (
    CoverResult,
    SampleableSet,
    hom_test,
    pfr_cover,
    pfr_parameters,
    structured_hom,
)
from .qgl import pgi, quadratic_decompose, quadratic_goldreich_levin, rm_self_correct
from .quadratic import QuadraticPolynomial, StabilizerState
from .rng import RngStream

__all__ = [
    "PAPER",
    "PRACTICAL",
    "Preset",
    "dense_cap",
    "get_preset",
    "PfrkitError",
    "BoundednessError",
    "ContainmentError",
    "DecompositionError",
    "DenseCapError",
    "DepthLimitError",
    "DimensionMismatchError",
    "InfeasibleParameterError",
    "IsotropyError",
    "ParameterError",
    "BoundedFunction",
    "DenseFunction",
    "QueryCounter",
    "fwht",
    "load_table",
    "save_table",
    "AffineMap",
    "BitMatrix",
    "BitVector",
    "Subspace",
    "list_decode_stabilizers",
    "CoverResult",
    "SampleableSet",
    "hom_test",
    "pfr_cover",
    "pfr_parameters",
    "structured_hom",
    "pgi",
    "quadratic_decompose",
    "quadratic_goldreich_levin",
    "rm_self_correct",
    "QuadraticPolynomial",
    "StabilizerState",
    "RngStream",
]

__version__ = "0.1.0"
