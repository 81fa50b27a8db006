"""Lifting constructions: the family G_n and its improvement solvers, the
block system beyond the minimal break, order-p kink data and the lambda
objective."""

from .family import (ApproxResult, GFamilyPoint, HPResult, ImproveResult, approx_residue, from_T, gamma,
                     hp_step_count, improve_hp, improve_once, to_T)
from .kink import (HerbrandMap, KinkResult, KummerData, base_lift_zp, delta_profile, herbrand_transfer,
                   kink_basis, kink_table_round_trip, m_tilde, mu_lambda, restriction_identity,
                   restriction_series)
from .partb import (BlockMatrix, DiskReport, PartBResult, disk_condition, gmin_lift, matrix_A_gamma, matrix_C,
                    minimal_setup, normalized_coefficients, partB_assemble, partB_solve)
from .search import LambdaSetup, LambdaValue, SearchResult, lambda_of_G, n2_setup, search_gmin

__all__ = [
    "ApproxResult", "GFamilyPoint", "HPResult", "ImproveResult", "approx_residue", "from_T", "gamma",
    "hp_step_count", "improve_hp", "improve_once", "to_T",
    "HerbrandMap", "KinkResult", "KummerData", "base_lift_zp", "delta_profile", "herbrand_transfer",
    "kink_basis", "kink_table_round_trip", "m_tilde", "mu_lambda", "restriction_identity", "restriction_series",
    "BlockMatrix", "DiskReport", "PartBResult", "disk_condition", "gmin_lift", "matrix_A_gamma", "matrix_C",
    "minimal_setup", "normalized_coefficients", "partB_assemble", "partB_solve",
    "LambdaSetup", "LambdaValue", "SearchResult", "lambda_of_G", "n2_setup", "search_gmin",
]
