"""List decoding of quantum CSS codes amplified by expander-based distance amplification."""

from .ael import AelCode, ael_build, ael_distance, certificate_sweep, distance_certificate, partial_minimizer
from .css import CssCode, SyndromeTransformer, code_422, list_codewords, qgrs_code, steane_code, trivial_code
from .decode import (
    DecodeParams,
    ListDecoder,
    OuterDecoder,
    experiment_run,
    list_decode_derandomized,
    list_decode_randomized,
    repetition_count,
)
from .duality import DualityMap, complement_dual_maps, field_downgrade
from .errors import AelqError, CapExceeded, InvariantViolation, SpecError
from .fqlinalg import Subspace, rref
from .gf import FieldSpec, field_make
from .graph import BipartiteGraph, graph_complete, graph_random_regular, sigma2
from .pseudo import Pseudocodeword, correlation_round, covering_optimize, johnson_radius, theta_star
from .specs import WorkspaceConfig

__version__ = "0.1.0"

__all__ = [
    "AelCode", "ael_build", "ael_distance", "certificate_sweep", "distance_certificate", "partial_minimizer",
    "CssCode", "SyndromeTransformer", "code_422", "list_codewords", "qgrs_code", "steane_code", "trivial_code",
    "DecodeParams", "ListDecoder", "OuterDecoder", "experiment_run", "list_decode_derandomized",
    "list_decode_randomized", "repetition_count",
    "DualityMap", "complement_dual_maps", "field_downgrade",
    "AelqError", "CapExceeded", "InvariantViolation", "SpecError",
    "Subspace", "rref", "FieldSpec", "field_make",
    "BipartiteGraph", "graph_complete", "graph_random_regular", "sigma2",
    "Pseudocodeword", "correlation_round", "covering_optimize", "johnson_radius", "theta_star",
    "WorkspaceConfig",
]
