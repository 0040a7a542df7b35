"""Assouad and pointwise Assouad dimensions of self-conformal, self-affine and
atomic measures, with certified ball-measure enclosures."""

__version__ = "0.1.0"

from .bounds import Bounds
from .dims import (DimReport, ScaleProfile, assouad_place_dependent, assouad_selfsimilar_formula,
                   bm_assouad_formula, bm_minkowski_formula, doubling_scan, estimate_local_dims,
                   estimate_pointwise_assouad, minkowski_upper_estimate, osc_guard,
                   selfsimilar_formula_for)
from .errors import (AssouadError, DoublingGuardError, InconclusiveError, RefusalError,
                     ResolutionError, SeparationError)
from .gallery import GalleryMeasure, gallery_by_id, sparse_doubling, two_sided_geometric
from .measures import (AtomicMeasure, ConstantWeights, IfsMeasure, LinearWeights, SoftmaxWeights,
                       ball_measure, cylinder_measure)
from .sponge import SpongeMeasure, SpongeSpec, reference_carpet
from .symbolic import PeriodicWord, SymbolWord
from .systems import (IfsSpec, cantor_system, check_ssc, declare_osc, moebius_system,
                      similarity_system)

__all__ = [
    "__version__", "Bounds", "DimReport", "ScaleProfile", "assouad_place_dependent",
    "assouad_selfsimilar_formula", "bm_assouad_formula", "bm_minkowski_formula", "doubling_scan",
    "estimate_local_dims", "estimate_pointwise_assouad", "minkowski_upper_estimate", "osc_guard",
    "selfsimilar_formula_for", "AssouadError", "DoublingGuardError", "InconclusiveError",
    "RefusalError", "ResolutionError", "SeparationError", "GalleryMeasure", "gallery_by_id",
    "sparse_doubling", "two_sided_geometric", "AtomicMeasure", "ConstantWeights", "IfsMeasure",
    "LinearWeights", "SoftmaxWeights", "ball_measure", "cylinder_measure", "SpongeMeasure",
    "SpongeSpec", "reference_carpet", "PeriodicWord", "SymbolWord", "IfsSpec", "cantor_system",
    "check_ssc", "declare_osc", "moebius_system", "similarity_system",
]
