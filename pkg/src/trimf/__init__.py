"""Graded matrix factorizations of triangle singularities x^a + y^b + z^c and the
vector bundles on weighted projective lines they encode."""
from .covers import CoverSpec, DomesticBundleId, domestic_cover, ext_cover, ext_hull
from .frame import build_frame, mf_domestic, mf_rank2_general, search_specialization
from .gmf import MatrixFactorization, is_indecomposable, is_symmetric, verify
from .lgroup import LElement, WeightTriple, constants, normalize
from .poly import QQ, Field

__version__ = "0.1.0"

__all__ = [
    "QQ",
    "CoverSpec",
    "DomesticBundleId",
    "Field",
    "LElement",
    "MatrixFactorization",
    "WeightTriple",
    "build_frame",
    "constants",
    "domestic_cover",
    "ext_cover",
    "ext_hull",
    "is_indecomposable",
    "is_symmetric",
    "mf_domestic",
    "mf_rank2_general",
    "normalize",
    "search_specialization",
    "verify",
]
