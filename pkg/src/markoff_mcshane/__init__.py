"""Markoff maps on the Farey tree and numerical checks of McShane-type identities."""

from .appendix_series import (GeometricPair, neighbor_parameters, one_sided_closed,
                              partial_sum_oracle, property_suite, two_sided_closed,
                              vertex_fan_sum)
from .bowditch import BQConfig, BQReport, check_bq, check_theta_invariance, find_sink, is_escaping
from .farey import (ROOT, DirectedEdge, IntegerMatrix2, Slope, TreeVertex, anosov_apply,
                    circular_set, orbit_representatives, parity_class, regions_within)
from .identities import (SeriesResult, Weights, anosov_fixed_seed, h_mu, h_mu_p, psi_edge_value,
                         sqrt_principal, sum_branch, sum_main, sum_relative, sum_tricolor,
                         weighted_edge_values, z_branch)
from .markoff import MarkoffMap, MarkoffTriple, from_matrices, from_seed, lift_to_matrices
from .scan import ScanConfig, ScanResult, run_scan

__all__ = [
    "BQConfig", "BQReport", "DirectedEdge", "GeometricPair", "IntegerMatrix2", "MarkoffMap",
    "MarkoffTriple", "ROOT", "ScanConfig", "ScanResult", "SeriesResult", "Slope", "TreeVertex",
    "Weights", "anosov_apply", "anosov_fixed_seed", "check_bq", "check_theta_invariance",
    "circular_set", "find_sink", "from_matrices", "from_seed", "h_mu", "h_mu_p", "is_escaping",
    "lift_to_matrices", "neighbor_parameters", "one_sided_closed", "orbit_representatives",
    "parity_class", "partial_sum_oracle", "property_suite", "psi_edge_value", "regions_within",
    "run_scan", "sqrt_principal", "sum_branch", "sum_main", "sum_relative", "sum_tricolor",
    "two_sided_closed", "vertex_fan_sum", "weighted_edge_values", "z_branch",
]
