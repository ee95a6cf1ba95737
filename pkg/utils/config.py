
# Configuration for the geometric independent-set toolkit

GEOMETRY_CONFIG = {
    # Absolute tolerance used by every predicate; tangency within it counts as touching
    "eps_geom": 1e-9,
}

FAMILY_CONFIG = {
    # Union complexity U(m) = rho * m
    "pseudo_disk_rho": 6.0,
    # Admissible regions with k boundary crossings: U(m) = 3k * m
    "admissible_factor": 3,
    # Sum of x_i x_j over G1 pairs is at most 4 E(H); doubled as in the resistance bound
    "rectangle_g1_constant": 8.0,
}

LP_CONFIG = {
    "eps": 1e-4,
    "method": "highs",
    "mwu_max_iterations": 2_000_000,
    # coarsest multiplicative step; halved every phase down to eps/3
    "mwu_initial_step": 0.1,
    # phase length in units of ln(2m) / step
    "mwu_phase_factor": 2.0,
    "feasibility_tol": 1e-12,
}

ROUNDING_CONFIG = {
    "c_tau": 13.0,
    "seed": 0,
}

LOCAL_SEARCH_CONFIG = {
    # Used when the family has no linear union-complexity bound
    "default_b": 2,
    "max_exchanges": None,
}

ORACLE_CONFIG = {
    "max_mwis_n": 30,
    "max_lp_size": 25,
    "max_exhaustive_n": 20,
}

GENERATOR_CONFIG = {
    # Log-uniform size multipliers; the common scale is solved from the density
    "disks": {"low": 0.5, "high": 2.0},
    "squares": {"low": 0.5, "high": 2.0},
    "rects": {"low": 0.2, "high": 5.0},
    "weight_min": 1.0,
    "weight_max": 10.0,
}

BENCH_CONFIG = {
    "columns": [
        "instance_id", "family", "n", "algorithm", "seed", "weight",
        "lp_value", "oracle_value", "ratio_to_lp", "ratio_to_oracle",
        "time_ms", "status",
    ],
    "timing_columns": ["time_ms"],
    "workers": 1,
}

ALGORITHMS = [
    "local-search", "lp-round", "lp-round-derand", "rectangles",
    "discrete-lp-round", "exact",
]

EXIT_CODES = {
    "ok": 0,
    "validation": 2,
    "incompatible": 3,
    "resource_cap": 4,
    "solver_failure": 5,
}

DB_CONFIG = {
    "default_path": "data/results.db",
}
