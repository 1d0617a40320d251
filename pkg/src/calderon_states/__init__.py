"""Discrete Calderon projectors and the quasi-free states they define on the circle."""

from calderon_states.calderon import (
    BoundaryMatrices,
    CalderonPair,
    TraceMaps,
    boundary_matrices,
    build_pair,
    calderon_pair,
    green_identity_defect,
    identity_report,
    trace_maps,
)
from calderon_states.config import RunConfig, parse_config
from calderon_states.discretize import DiscreteDomain, build_domain, inner_products
from calderon_states.elliptic import assemble_K, assemble_K0, sectoriality_defect, solve_K0
from calderon_states.geometry import MetricFamily, check_wick_domain, coeffs_at
from calderon_states.state import StateCovariances, ccr_defect, covariances, purity_defect

__all__ = [
    "BoundaryMatrices", "CalderonPair", "DiscreteDomain", "MetricFamily", "RunConfig",
    "StateCovariances", "TraceMaps", "assemble_K", "assemble_K0", "boundary_matrices",
    "build_domain", "build_pair", "calderon_pair", "ccr_defect", "check_wick_domain",
    "coeffs_at", "covariances", "green_identity_defect", "identity_report", "inner_products",
    "parse_config", "purity_defect", "sectoriality_defect", "solve_K0", "trace_maps",
]
