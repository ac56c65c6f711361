"""Command-line front end.

Every subcommand resolves its configuration as built-in defaults, then the
``--config`` JSON object (snake_case keys), then explicit flags, validates the
result against ``schemas/config/<subcommand>.json`` and only then computes.

Exit codes: 0 success, 2 configuration or input error, 3 numerical failure
(or a failed ``oracle --compare``), 4 I/O error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from importlib import resources

import numpy as np

from . import defaults, io
from .errors import ConfigError, DomainError, InvalidStateError, NumericalError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4

MODEL_KEYS = ("omega_p", "omega_0", "gamma_p", "omega_c", "gamma_c", "A", "f", "eps0")

COLUMNS = {
    "modes": ("k", "g_k", "h_k", "mu_k", "u_k", "n_k", "T_k"),
    "entropy-scan": ("cutoff", "entropy_density", "err_bound"),
    "variance": ("eps_ir", "k_max", "variance", "err_bound"),
    "heff-kernel": ("r", "kernel"),
    "plates": ("L", "k_perp_dim", "S", "S_R", "lambda_plus", "lambda_minus", "err_bound"),
}


# ---------------------------------------------------------------- parser

def _add_common(p, formats):
    p.add_argument("--config", help="JSON file with snake_case keys mirroring the flags")
    p.add_argument("--out", help="output path ('-' for standard output)")
    p.add_argument("--format", choices=formats)
    p.add_argument("--workers", type=int, help="worker processes (default: all cores)")
    p.add_argument("--tol", type=float, help="relative quadrature tolerance")


def _add_model(p):
    p.add_argument("--model", choices=sorted(defaults.MODEL))
    for key in MODEL_KEYS:
        p.add_argument("--" + key.replace("_", "-"), dest=key, type=float)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fieldmatter", argument_default=argparse.SUPPRESS,
        description="Gaussian-state diagnostics of a scalar field in dispersive media.")
    parser.add_argument("--print-defaults", action="store_true",
                        help="print the defaults table as JSON and exit")
    sub = parser.add_subparsers(dest="command")

    def add(name, help_text, formats=("csv", "json")):
        p = sub.add_parser(name, help=help_text, argument_default=argparse.SUPPRESS)
        _add_common(p, formats)
        return p

    p = add("modes", "per-momentum correlators and mode diagnostics")
    _add_model(p)
    p.add_argument("--k-min", dest="k_min", type=float)
    p.add_argument("--k-max", dest="k_max", type=float)
    p.add_argument("--k-count", dest="k_count", type=int)

    p = add("entropy-scan", "entropy density against the momentum cutoff")
    _add_model(p)
    p.add_argument("--dim", type=int)
    p.add_argument("--cutoff-min", dest="cutoff_min", type=float)
    p.add_argument("--cutoff-max", dest="cutoff_max", type=float)
    p.add_argument("--cutoff-count", dest="cutoff_count", type=int)
    p.add_argument("--k-floor", dest="k_floor", type=float)
    p.add_argument("--panels-per-decade", dest="panels_per_decade", type=int)

    p = add("variance", "mode-number variance against the infrared cutoff")
    _add_model(p)
    p.add_argument("--dim", type=int)
    p.add_argument("--k-max", dest="k_max", type=float)
    p.add_argument("--eps-min", dest="eps_min", type=float)
    p.add_argument("--eps-max", dest="eps_max", type=float)
    p.add_argument("--eps-count", dest="eps_count", type=int)

    p = add("heff-kernel", "real-space kernel of the effective Hamiltonian")
    _add_model(p)
    p.add_argument("--dim", type=int)
    p.add_argument("--beta", type=float)
    p.add_argument("--r-min", dest="r_min", type=float)
    p.add_argument("--r-max", dest="r_max", type=float)
    p.add_argument("--r-count", dest="r_count", type=int)
    p.add_argument("--k-cut", dest="k_cut", type=float)

    p = add("plates", "two-plate entropy against separation")
    p.add_argument("--omega-0", dest="omega_0", type=float)
    p.add_argument("--omega-p", dest="omega_p", type=float)
    p.add_argument("--transverse-dim", dest="transverse_dim", type=int)
    p.add_argument("--L-min", dest="L_min", type=int)
    p.add_argument("--L-max", dest="L_max", type=int)
    p.add_argument("--L-count", dest="L_count", type=int)
    p.add_argument("--k-perp-cutoff", dest="k_perp_cutoff", type=float)

    p = add("oracle", "exact lattice ground state; optional plate-model comparison", ("json",))
    p.add_argument("--sites", type=int)
    p.add_argument("--plate-sep", dest="plate_sep", type=int)
    p.add_argument("--omega-0", dest="omega_0", type=float)
    p.add_argument("--omega-p", dest="omega_p", type=float)
    p.add_argument("--boundary", choices=("open", "periodic"))
    p.add_argument("--phi-mass", dest="phi_mass", type=float)
    p.add_argument("--compare", action="store_true")

    p = add("casimir-ee", "contour formula against the direct entropy difference", ("json",))
    p.add_argument("--omega-0", dest="omega_0", type=float)
    p.add_argument("--omega-p", dest="omega_p", type=float)
    p.add_argument("--plate-sep", dest="plate_sep", type=int)
    p.add_argument("--nodes", type=int)
    p.add_argument("--varsigma", type=float)
    p.add_argument("--x-max", dest="x_max", type=float)
    p.add_argument("--decoupled", action="store_true")

    p = add("williamson", "symplectic spectrum and Williamson form of a covariance file", ("json",))
    p.add_argument("--input", help="covariance JSON {n, ordering, data}")
    return parser


# ---------------------------------------------------------------- config

def load_schema(kind, name):
    text = resources.files("fieldmatter").joinpath("schemas", kind, f"{name}.json").read_text()
    return json.loads(text)


def _validate(config, command):
    import jsonschema

    try:
        jsonschema.validate(config, load_schema("config", command))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid configuration at {where}: {exc.message}") from None


def resolve_config(command, flags):
    """Merge defaults, the optional config file and explicit flags; validate."""
    flags = dict(flags)
    file_cfg = {}
    path = flags.pop("config", None)
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path!r}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path!r} is not valid JSON: {exc}") from None
        if not isinstance(file_cfg, dict):
            raise ConfigError("config file must hold a JSON object")
        file_cfg.pop("command", None)
    user = {**file_cfg, **flags}
    config = {**defaults.COMMON, **defaults.SUBCOMMANDS[command]}
    if command in defaults.MODEL_SUBCOMMANDS:
        name = user.get("model", defaults.DEFAULT_MODEL)
        if name not in defaults.MODEL:
            raise ConfigError(f"unknown model {name!r}; choose from {sorted(defaults.MODEL)}")
        config["model"] = name
        config.update(defaults.MODEL[name])
    config.update(user)
    _validate(config, command)
    if config.get("workers") is None:
        config["workers"] = os.cpu_count() or 1
    return config


def _model(config):
    from .dielectric import model_from_dict

    return model_from_dict({k: config[k] for k in ("model", *MODEL_KEYS) if k in config})


def _geom(lo, hi, count):
    if not 0 < lo <= hi or count < 1:
        raise ConfigError("grid bounds must satisfy 0 < min <= max and count >= 1")
    return [float(x) for x in np.geomspace(lo, hi, count)]


# ---------------------------------------------------------------- commands

def _run_modes(cfg):
    from .homogeneous import mode_scan

    model = _model(cfg)
    recs = mode_scan(model, _geom(cfg["k_min"], cfg["k_max"], cfg["k_count"]), cfg["tol"],
                     cfg["workers"])
    return recs, None, {"model": model.to_dict()}


def _run_entropy_scan(cfg):
    from .homogeneous import cutoff_scan

    model = _model(cfg)
    recs, fit = cutoff_scan(model, _geom(cfg["cutoff_min"], cfg["cutoff_max"],
                                         cfg["cutoff_count"]),
                            cfg["dim"], cfg["tol"], k_floor=cfg["k_floor"],
                            panels_per_decade=cfg["panels_per_decade"], workers=cfg["workers"])
    return recs, fit, {"model": model.to_dict()}


def _run_variance(cfg):
    from .homogeneous import variance_scan
    from .numerics import linear_fit

    model = _model(cfg)
    eps = _geom(cfg["eps_min"], cfg["eps_max"], cfg["eps_count"])[::-1]
    recs = variance_scan(model, cfg["k_max"], cfg["dim"], eps, cfg["tol"], cfg["workers"])
    extra = {"model": model.to_dict()}
    if len(recs) >= 3:
        slope, intercept, r2 = linear_fit([-math.log(r.eps_ir) for r in recs],
                                          [r.variance for r in recs])
        extra["log_fit"] = {"slope": slope, "intercept": intercept, "r_squared": r2}
    return recs, None, extra


def _run_heff(cfg):
    from .homogeneous import heff_kernel

    model = _model(cfg)
    rs = [float(r) for r in np.linspace(cfg["r_min"], cfg["r_max"], cfg["r_count"])]
    recs = heff_kernel(model, cfg["beta"], rs, cfg["dim"], cfg["tol"], k_cut=cfg["k_cut"],
                       workers=cfg["workers"])
    return recs, None, {"model": model.to_dict()}


def _run_plates(cfg):
    from .plates import PlateSystem, entropy_vs_L, entropy_vs_L_transverse

    if cfg["L_min"] > cfg["L_max"]:
        raise ConfigError("L_min must not exceed L_max")
    Ls = sorted({int(round(x)) for x in np.geomspace(cfg["L_min"], cfg["L_max"],
                                                     cfg["L_count"])})
    d = cfg["transverse_dim"]
    template = PlateSystem(Ls[0], cfg["omega_0"], cfg["omega_p"], d)
    if d == 0:
        recs, fit = entropy_vs_L(template, Ls, cfg["tol"], cfg["workers"])
    else:
        recs, fit = entropy_vs_L_transverse(template, Ls, d, cfg["tol"], cfg["k_perp_cutoff"],
                                            cfg["workers"])
    return recs, fit, {}


def _run_oracle(cfg):
    from .gaussian import symplectic_spectrum
    from .oracle import (CoupledLatticeModel, build_hamiltonian, centered_bodies,
                         compare_with_plates, ground_state_covariance, subsystem_entropies)

    N, L = cfg["sites"], cfg["plate_sep"]
    if L >= N:
        raise ConfigError("plate_sep must be smaller than sites")
    if cfg["compare"]:
        report = compare_with_plates(N, L, cfg["omega_0"], cfg["omega_p"], cfg["boundary"],
                                     cfg["phi_mass"])
        report["threshold"] = defaults.ORACLE_AGREEMENT
        report["passed"] = report["rel_diff"] < defaults.ORACLE_AGREEMENT
        return report, None, {}
    model = CoupledLatticeModel(N, centered_bodies(N, L), cfg["omega_0"], cfg["omega_p"],
                                cfg["boundary"], cfg["phi_mass"])
    gamma = ground_state_covariance(build_hamiltonian(model))
    s_phi, s_psi, _, _ = subsystem_entropies(model, gamma)
    purity = float(np.max(np.abs(symplectic_spectrum(gamma) - 1.0)))
    return {"S_phi": s_phi, "S_psi": s_psi, "purity_residual": purity, "N": N, "L": L,
            "omega_0": cfg["omega_0"], "omega_p": cfg["omega_p"],
            "body_sites": list(model.body_sites)}, None, {}


def _run_casimir(cfg):
    from .casimir import ContourSpec, casimir_report
    from .plates import PlateSystem

    spec = ContourSpec(0.5, cfg["x_max"], cfg["nodes"], cfg["varsigma"])
    sys_ = PlateSystem(cfg["plate_sep"], cfg["omega_0"], cfg["omega_p"])
    return casimir_report(sys_, spec, cfg["tol"], cfg["decoupled"]), None, {}


def _run_williamson(cfg):
    from .gaussian import GaussianState, williamson_decompose

    if cfg["input"] is None:
        raise ConfigError("williamson needs --input")
    try:
        with open(cfg["input"], encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise OSError(f"cannot read {cfg['input']!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidStateError(f"input is not valid JSON: {exc}") from None
    gamma = io.covariance_from_json(doc)
    W, D = williamson_decompose(gamma)
    state = GaussianState.from_spectrum(np.diag(D)[0::2])
    return {"spectrum": state.spectrum, "exponents": state.exponents,
            "occupations": state.occupations, "entropy": state.entropy,
            "W": io.covariance_to_json(W)["data"], "n": gamma.shape[0] // 2}, None, {}


RUNNERS = {
    "modes": _run_modes,
    "entropy-scan": _run_entropy_scan,
    "variance": _run_variance,
    "heff-kernel": _run_heff,
    "plates": _run_plates,
    "oracle": _run_oracle,
    "casimir-ee": _run_casimir,
    "williamson": _run_williamson,
}


def render(command, cfg, result, fit, extra):
    """Serialize a run result to the data-file text."""
    if command in COLUMNS:
        if cfg["format"] == "csv":
            return io.records_to_csv(result, COLUMNS[command])
        return io.dumps(io.records_document(result, fit, **extra))
    return io.dumps(result)


def run(command, cfg):
    """Execute a resolved configuration; returns ``(text, fit, extra, exit_code)``."""
    result, fit, extra = RUNNERS[command](cfg)
    code = EXIT_OK
    if command == "oracle" and cfg["compare"] and not result["passed"]:
        code = EXIT_NUMERICAL
    return render(command, cfg, result, fit, extra), fit, extra, code


def main(argv=None):
    parser = build_parser()
    try:
        args = vars(parser.parse_args(argv))
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.pop("print_defaults", False):
        sys.stdout.write(io.dumps(defaults.table()))
        return EXIT_OK
    command = args.pop("command", None)
    if command is None:
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    start = time.perf_counter()
    try:
        cfg = resolve_config(command, args)
        text, fit, extra, code = run(command, cfg)
        io.write_text(cfg["out"], text)
        if cfg["out"] not in (None, "-"):
            io.write_manifest(cfg["out"], {"command": command, **cfg},
                              time.perf_counter() - start, fit, extra or None)
        if code != EXIT_OK:
            print(f"fieldmatter {command}: check failed", file=sys.stderr)
        return code
    except (ConfigError, DomainError, InvalidStateError) as exc:
        print(f"fieldmatter {command}: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"fieldmatter {command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"fieldmatter {command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
