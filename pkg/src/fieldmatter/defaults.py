"""Central table of run defaults (printed by ``--print-defaults``)."""

COMMON = {
    "tol": 1e-9,
    "out": "-",
    "workers": None,  # None: all available cores
}

#: default parameters per susceptibility model
MODEL = {
    "vacuum": {},
    "plasma": {"omega_p": 1.0},
    "lorentz": {"omega_p": 0.1, "omega_0": 1.0, "gamma_p": 0.1},
    "drude": {"omega_c": 0.1, "gamma_c": 0.1},
    "lorentz-drude": {"omega_p": 0.1, "omega_0": 1.0, "gamma_p": 0.1,
                      "omega_c": 0.1, "gamma_c": 0.1},
    "spatial": {"eps0": 1.0, "f": 0.1, "A": 1.0, "gamma_p": 0.1, "omega_0": 1.0},
}
DEFAULT_MODEL = "lorentz"

SUBCOMMANDS = {
    "modes": {"format": "csv", "k_min": 1e-3, "k_max": 1e3, "k_count": 61},
    "entropy-scan": {"format": "csv", "dim": 3, "cutoff_min": 1e2, "cutoff_max": 1e6,
                     "cutoff_count": 9, "k_floor": 1e-4, "panels_per_decade": 4},
    "variance": {"format": "csv", "dim": 1, "k_max": 1.0, "eps_min": 1e-7, "eps_max": 1e-3,
                 "eps_count": 5},
    "heff-kernel": {"format": "csv", "dim": 1, "beta": 1.0, "r_min": 1.0, "r_max": 50.0,
                    "r_count": 50, "k_cut": 1.0},
    "plates": {"format": "csv", "omega_0": 3.0, "omega_p": 0.1, "transverse_dim": 0,
               "L_min": 10, "L_max": 100, "L_count": 10, "k_perp_cutoff": 40.0},
    "oracle": {"format": "json", "sites": 64, "plate_sep": 8, "omega_0": 3.0, "omega_p": 0.2,
               "boundary": "open", "phi_mass": 0.0, "compare": False},
    "casimir-ee": {"format": "json", "omega_0": 3.0, "omega_p": 0.1, "plate_sep": 10,
                   "nodes": 64, "varsigma": 1e-6, "x_max": None, "decoupled": False},
    "williamson": {"format": "json", "input": None},
}

MODEL_SUBCOMMANDS = ("modes", "entropy-scan", "variance", "heff-kernel")

#: agreement threshold for ``oracle --compare``
ORACLE_AGREEMENT = 0.01


def table():
    return {"common": COMMON, "models": MODEL, "default_model": DEFAULT_MODEL,
            "subcommands": SUBCOMMANDS}
