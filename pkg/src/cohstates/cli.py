"""Command-line entry point: ``cohstates {state,verify,landau,measure,model-card}``.

Options come from built-in defaults, then a JSON ``--config`` file, then
flags; flags win.  Reports are JSON files in the output directory
(``--output-dir``, else ``$COHSTATES_OUTPUT_DIR``, else ``./cohstates-out``).

Exit codes: 0 all checks pass, 1 numeric failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import platform
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__, kernels, landau, measures, models, states
from .errors import CohStatesError, ConfigError
from .spectrum import DegeneracySequence, EnergySpectrum, normalization

log = logging.getLogger("cohstates")

OUTPUT_ENV = "COHSTATES_OUTPUT_DIR"
FAMILIES = ("gk", "degenerate", "branch", "vcs1", "vcs2", "bcs")
SUITES = ("resolution", "temporal", "action", "moments", "idempotency")

_number = {"type": "number"}
_int = {"type": "integer", "minimum": 0}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "model": {"type": "string"},
        "model_params": {"type": "object"},
        "spectrum": {"enum": ["linear", "affine", "bounded", "explicit"]},
        "omega": {"type": "number", "exclusiveMinimum": 0},
        "slope": _number,
        "intercept": _number,
        "L": _number,
        "a": _number,
        "levels": {"type": "array", "items": _number, "minItems": 1},
        "degeneracy": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "family": {"enum": list(FAMILIES)},
        "J": {"type": "number", "minimum": 0},
        "gamma": _number,
        "theta": _number,
        "J2": {"type": "number", "minimum": 0},
        "gamma2": _number,
        "ell": _int,
        "n": _int,
        "branch": _int,
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "suite": {"type": "array", "items": {"enum": [*SUITES, "all"]}},
        "J_values": {"type": "array", "items": {"type": "number", "minimum": 0}},
        "times": {"type": "array", "items": _number},
        "n_max": _int,
        "nodes": {"type": "integer", "minimum": 2},
        "beta": {"type": "number", "exclusiveMinimum": 0},
        "K": {"type": "integer", "minimum": 2},
        "z": {"type": "array", "items": {"type": "string"}},
        "t": _number,
        "z_a": {"type": "string"},
        "z_b": {"type": "string"},
        "k_sweep": {"type": "array", "items": {"type": "integer", "minimum": 2}},
        "block": {"type": "integer", "minimum": 1},
        "R": {"type": "number", "exclusiveMinimum": 0},
        "grid_max": {"type": "number", "exclusiveMinimum": 0},
        "grid_points": {"type": "integer", "minimum": 2},
        "workers": {"type": "integer", "minimum": 1},
        "output_dir": {"type": "string"},
    },
}

DEFAULTS = {
    "omega": 1.0,
    "J": 1.0,
    "gamma": 0.0,
    "theta": 0.0,
    "J2": 1.0,
    "gamma2": 0.0,
    "ell": 0,
    "n": 0,
    "branch": 0,
    "tol": 1e-14,
    "suite": ["all"],
    "J_values": [0.5, 1.0, 2.0, 5.0],
    "times": [0.1, 1.0, 10.0],
    "n_max": 10,
    "beta": 1.0,
    "K": 30,
    "z": ["0", "0.5", "0.3+0.4j"],
    "t": 0.7,
    "z_a": "0.3",
    "z_b": "0.2j",
    "k_sweep": [10, 20, 30],
    "block": 6,
    "R": 6.0,
    "grid_max": 20.0,
    "grid_points": 201,
    "workers": 4,
}


def parse_complex(text: str) -> complex:
    """Accept ``0.3+0.2j`` and ``0.2i`` spellings."""
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ConfigError(f"not a complex number: {text!r}") from None


# ---------------------------------------------------------------- config


def load_config(path: str | None, overrides: dict) -> dict:
    cfg: dict = {}
    if path:
        try:
            cfg = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid config: {exc.message}") from None
    return {**DEFAULTS, **cfg}


def output_dir(cfg: dict) -> Path:
    out = Path(cfg.get("output_dir") or os.environ.get(OUTPUT_ENV) or "cohstates-out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def resolve_model(cfg: dict) -> models.ModelDescriptor | None:
    if "model" not in cfg:
        return None
    try:
        return models.build_model(cfg["model"], **cfg.get("model_params", {}))
    except (KeyError, TypeError) as exc:
        raise ConfigError(str(exc).strip("'\"")) from None


def resolve_spectrum(cfg: dict) -> tuple[EnergySpectrum, DegeneracySequence]:
    kind = cfg.get("spectrum", "linear")
    omega = cfg["omega"]
    try:
        if kind == "linear":
            spec = EnergySpectrum.linear(omega)
        elif kind == "affine":
            spec = EnergySpectrum.affine(cfg.get("slope", 1.0), cfg.get("intercept", 0.0), omega)
        elif kind == "bounded":
            spec = EnergySpectrum.bounded(cfg.get("L", 1.0), cfg.get("a", 0.0), omega)
        else:
            if "levels" not in cfg:
                raise ConfigError("explicit spectrum needs 'levels'")
            spec = EnergySpectrum.from_levels(cfg["levels"], omega)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    deg = DegeneracySequence.from_list(cfg["degeneracy"]) if "degeneracy" in cfg else DegeneracySequence.constant()
    return spec, deg


# ---------------------------------------------------------------- reports


def _provenance(**extra) -> dict:
    return {
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "seed": None,
        **extra,
    }


def write_json(path: Path, data: dict) -> None:
    path.write_text(json.dumps(data, indent=2, default=_json_default) + "\n")


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"not serializable: {type(obj).__name__}")


def _check(value: float, tol: float, **extra) -> dict:
    return {"residual": float(value), "tol": tol, "passed": bool(value <= tol), **extra}


# ---------------------------------------------------------------- state


def _build_ket(cfg: dict, model, spec, deg):
    family = cfg.get("family")
    tol = cfg["tol"]
    if model is not None and model.branches is not None:
        family = family or "branch"
        if family != "branch":
            raise ConfigError(f"model {model.tag} only supports the branch family")
        bundle = states.branch_vcs(model.branches, cfg["branch"], cfg["J"], cfg["gamma"], tol)
        return bundle.ket, model.branches
    if family is None:
        family = "gk" if deg.descriptor == "constant-1" else "degenerate"
    J, g, J2, g2 = cfg["J"], cfg["gamma"], cfg["J2"], cfg["gamma2"]
    if family == "gk":
        ket = states.gk_state(spec, J, g, tol)
    elif family == "degenerate":
        ket = states.degenerate_state(spec, deg, J, g, cfg["theta"], tol)
    elif family == "vcs1":
        ket = states.vcs1(spec, J, g, J2, g2, cfg["ell"], tol)
    elif family == "vcs2":
        ket = states.vcs2(spec, J, g, J2, g2, cfg["n"], tol)
    elif family == "bcs":
        ket = states.bcs(spec, J, g, J2, g2, tol)
    else:
        raise ConfigError(f"family {family!r} needs a branch model")
    return ket, spec


def cmd_state(cfg: dict, out: Path) -> tuple[dict, bool]:
    model = resolve_model(cfg)
    if model is not None and model.spectrum is not None:
        spec, deg = model.spectrum, model.degeneracy
    elif model is None:
        spec, deg = resolve_spectrum(cfg)
    else:
        spec, deg = None, model.degeneracy
    ket, target = _build_ket(cfg, model, spec, deg)
    energy = states.energy_expectation(ket, target)
    stem = f"state-{ket.family}"
    (out / f"{stem}.json").write_text(ket.to_json(indent=1) + "\n")
    (out / f"{stem}.csv").write_text(ket.to_csv())
    omega = target[0].omega if model is not None and model.branches is not None else target.omega
    results = {
        "family": ket.family,
        "norm2": {"value": ket.norm2(), "error_bound": ket.tail_bound + 4 * ket.coeffs.size * 2.2e-16},
        "energy": {"value": energy.value, "error_bound": energy.error_bound},
        "energy_over_omega": energy.value / omega,
        "truncation": ket.truncation,
        "tail_bound": ket.tail_bound,
        "files": [f"{stem}.json", f"{stem}.csv"],
    }
    return results, True


# ---------------------------------------------------------------- verify


def _suite_resolution(cfg, model, spec, deg) -> dict:
    if model is None or model.measure is None:
        raise ConfigError("the resolution suite needs --model")
    rep = kernels.resolution_check(model, cfg["n_max"], cfg.get("nodes"), tol=1e-8)
    d = rep.to_dict()
    d["passed"] = None if rep.status == "weak-sense-only" else rep.status == "pass"
    return d


def _family_states(model, spec, deg, J, g):
    """Fresh states for every applicable family of a model, as ``(name, ket, target, rebuild)``."""
    if model is not None and model.branches is not None:
        br = model.branches
        return [
            (f"branch-{j}", states.branch_vcs(br, j, J, g).ket, br, lambda g2, j=j: states.branch_vcs(br, j, J, g2).ket)
            for j in range(br.N)
        ]
    out = [("gk", states.gk_state(spec, J, g), spec, lambda g2: states.gk_state(spec, J, g2))]
    if deg.descriptor != "constant-1":
        out.append(
            ("degenerate", states.degenerate_state(spec, deg, J, g, 0.0), spec, lambda g2: states.degenerate_state(spec, deg, J, g2, 0.0))
        )
    out.append(("bcs", states.bcs(spec, J, g, 0.5 * J, g), spec, None))
    return out


def _suite_temporal(cfg, model, spec, deg) -> dict:
    rows = []
    g = cfg["gamma"]
    for J in cfg["J_values"]:
        for name, ket, target, rebuild in _family_states(model, spec, deg, J, g):
            omega = target[0].omega if name.startswith("branch") else target.omega
            for t in cfg["times"]:
                ev = states.evolve(ket, target, t)
                if rebuild is not None:
                    ref = rebuild(g + omega * t).coeffs
                    offset = target[int(ket.labels[0, 0])].offset if name.startswith("branch") else target.offset
                    ref = ref * np.exp(-1j * omega * t * offset)
                else:
                    p = ket.params
                    ref = states.bcs(target, p["J"], g + omega * t, p["J2"], g + omega * t).coeffs
                rows.append({"family": name, "J": J, "t": t, "residual": float(np.max(np.abs(ev.coeffs - ref)))})
    worst = max(r["residual"] for r in rows)
    return {"rows": rows, **_check(worst, 1e-14)}


def _suite_action(cfg, model, spec, deg) -> dict:
    rows = []
    ok = True
    for J in cfg["J_values"]:
        for name, ket, target, _ in _family_states(model, spec, deg, J, cfg["gamma"]):
            e = states.energy_expectation(ket, target)
            if name.startswith("branch"):
                b = target[int(ket.labels[0, 0])]
                expected = b.omega * (J + b.offset)
            elif name == "bcs":
                expected = target.omega * (J - ket.params["J2"])
            else:
                expected = target.omega * (J + target.offset)
            dev = abs(e.value - expected)
            ok &= dev <= e.error_bound
            rows.append({"family": name, "J": J, "value": e.value, "expected": expected, "deviation": dev, "error_bound": e.error_bound})
    return {"rows": rows, "passed": bool(ok)}


def _suite_moments(cfg, model, spec, deg) -> dict:
    if model is None or model.measure is None:
        raise ConfigError("the moments suite needs --model")
    specs = list(model.branches.branches) if model.branches is not None else [model.spectrum]
    weak = model.measure.weak_only
    reports = []
    for s in specs:
        rep = measures.verify_moments(model.measure, s, model.degeneracy, cfg["n_max"], cfg.get("nodes"), tol=math.inf if weak else 1e-8)
        reports.append({"moments": rep.moments, "targets": rep.targets, "rel_errors": rep.rel_errors, "nodes": rep.nodes})
    worst = max(float(np.max(r["rel_errors"])) for r in reports)
    if weak:
        return {"reports": reports, "max_rel_error": worst, "passed": None, "status": "weak-sense-only"}
    return {"reports": reports, **_check(worst, 1e-8)}


def _suite_idempotency(cfg, model, spec, deg) -> dict:
    if model is None or model.measure is None or model.spectrum is None or model.measure.weak_only:
        return {"passed": None, "status": "not applicable"}
    pts = [(J, 0.3 * i) for i, J in enumerate(cfg["J_values"])]
    rep = kernels.kernel_idempotency(model.spectrum, pts, model.measure, model.degeneracy)
    return {"max_residual": rep.max_residual, "passed": rep.passed}


_SUITES = {
    "resolution": _suite_resolution,
    "temporal": _suite_temporal,
    "action": _suite_action,
    "moments": _suite_moments,
    "idempotency": _suite_idempotency,
}


def cmd_verify(cfg: dict, out: Path) -> tuple[dict, bool]:
    model = resolve_model(cfg)
    if model is None:
        spec, deg = resolve_spectrum(cfg)
    else:
        spec, deg = model.spectrum, model.degeneracy
    names = list(SUITES) if "all" in cfg["suite"] else cfg["suite"]
    if model is None:
        names = [n for n in names if n in ("temporal", "action")] if "all" in cfg["suite"] else names
    results = {}
    for name in names:
        log.info("suite %s", name)
        results[name] = _SUITES[name](cfg, model, spec, deg)
    passed = all(r.get("passed") is not False for r in results.values())
    return results, passed


# ---------------------------------------------------------------- landau


def _kms_row(args):
    za, zb, beta, t, K, omega = args
    r = landau.kms_check(za, zb, beta, t, K, omega)
    return {"K": K, **r.to_dict()}


def cmd_landau(cfg: dict, out: Path) -> tuple[dict, bool]:
    beta, omega, K = cfg["beta"], cfg["omega"], cfg["K"]
    zs = [parse_complex(s) for s in cfg["z"]]
    th = landau.thermal_vector(beta, omega, K)
    mt = landau.modular_triple(beta, omega, K)
    ops = landau.build_operators(K, omega)
    n = np.arange(K + 1)

    # modular data
    H = np.real(np.diag(ops["H"].matrix)).reshape(K + 1, K + 1)
    delta_vs_h = float(np.max(np.abs(mt.delta - np.exp(-beta * H)) / mt.delta))
    basis = np.zeros((K + 1, K + 1), dtype=complex)
    basis[3, 1] = 1.0
    s31 = float(np.max(np.abs(mt.S(basis) - np.exp(-beta * omega) * np.eye(K + 1)[:, [1]] @ np.eye(K + 1)[[3], :])))
    rng = np.random.default_rng(0)
    sample = rng.normal(size=(K + 1, K + 1)) + 1j * rng.normal(size=(K + 1, K + 1))
    j2 = float(np.max(np.abs(mt.J(mt.J(sample)) - sample)))
    phi = th.coefficients()
    jphi = float(np.max(np.abs(mt.J(phi) - phi)))
    lam = th.weights
    expected = np.sqrt(lam[None, :] / lam[:, None])
    s_general = float(np.max(np.abs(mt.S(np.ones((K + 1, K + 1))) - expected) / expected))
    modular = {
        "delta_equals_exp_minus_beta_H": _check(delta_vs_h, 1e-12),
        "S_Psi31": _check(s31, 1e-12),
        "S_all_labels_relative": _check(s_general, 1e-12),
        "J_squared": _check(j2, 0.0),
        "J_Phi": _check(jphi, 0.0),
        "involution": _check(landau.modular_involution_check(beta, zs, K, omega), 1e-8),
        "involution_leakage": {str(z): landau.involution_leakage(beta, z, K, omega) for z in zs},
        "norm2_Phi": {"value": th.norm2(), "expected": -math.expm1(-(K + 1) * omega * beta)},
    }
    with (out / "landau-delta.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "l", "delta"])
        for i in n:
            for j in n:
                w.writerow([i, j, repr(float(mt.delta[i, j]))])

    # KMS sweep
    za, zb = parse_complex(cfg["z_a"]), parse_complex(cfg["z_b"])
    jobs = [(za, zb, beta, cfg["t"], k, omega) for k in cfg["k_sweep"]]
    with ThreadPoolExecutor(max_workers=cfg["workers"]) as pool:
        rows = list(pool.map(_kms_row, jobs))
    res = [r["residual"] for r in rows]
    monotone = all(b < a for a, b in zip(res, res[1:]))
    with (out / "landau-kms.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["K", "residual", "invariance", "leakage"])
        for r in rows:
            w.writerow([r["K"], repr(r["residual"]), repr(r["invariance"]), repr(r["leakage"])])
    at_k = landau.kms_check(za, zb, beta, cfg["t"], K, omega)
    kms = {
        "z_A": str(za),
        "z_B": str(zb),
        "sweep": rows,
        "monotone": monotone,
        "continuation": _check(at_k.residual, 1e-6),
        "invariance": _check(at_k.invariance, 1e-10),
    }

    # coherent states
    cs = []
    for z in zs:
        a = landau.kms_cs(z, beta, K, "displace", omega).coeffs
        b = landau.kms_cs(z, beta, K, "photon-added", omega).coeffs
        cs.append(
            {
                "z": str(z),
                "routes": _check(float(np.linalg.norm(a - b)), 1e-8),
                "norm2": float(np.vdot(a, a).real),
                "H1_mean": {"value": landau.kms_cs_energy(z, beta, K, omega), "error_bound": "diagnostic only"},
            }
        )
    block = landau.kms_cs_resolution(beta, cfg["block"], cfg["R"], omega)
    vcs1 = landau.vcs1_resolution(cfg["block"], cfg["R"])
    coherent = {
        "states": cs,
        "kms_block_resolution": _check(block.residual, 1e-4, law="identity (x) thermal weights"),
        "kms_block_vs_identity": {"residual": float(np.max(np.abs(block.matrix - np.eye(block.matrix.shape[0])))), "error_bound": "diagnostic only"},
        "vcs1_block_resolution": _check(vcs1.residual, 1e-4),
    }
    results = {"modular": modular, "kms": kms, "coherent_states": coherent, "files": ["landau-delta.csv", "landau-kms.csv"]}
    checks = [v for v in modular.values() if isinstance(v, dict) and "passed" in v]
    checks += [kms["continuation"], kms["invariance"], coherent["kms_block_resolution"], coherent["vcs1_block_resolution"]]
    checks += [c["routes"] for c in cs]
    passed = all(c["passed"] for c in checks) and monotone
    return results, passed


# ---------------------------------------------------------------- measure / model card


def cmd_measure(cfg: dict, out: Path) -> tuple[dict, bool]:
    model = resolve_model(cfg)
    if model is None or model.measure is None:
        raise ConfigError("measure needs --model")
    m = model.measure
    results = {"measure": m.to_dict(), "signed": m.nonpositive_somewhere, "weak_only": m.weak_only}
    suite = _suite_moments(cfg, model, model.spectrum, model.degeneracy)
    results["moments"] = suite
    grid = np.linspace(0.0, cfg["grid_max"], cfg["grid_points"])
    with (out / f"measure-{model.tag}.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["J", "density"])
        for x, d in zip(grid, m.density(grid)):
            w.writerow([repr(float(x)), repr(float(d))])
    results["files"] = [f"measure-{model.tag}.csv"]
    if m.series is not None:
        results["laguerre_coefficients"] = [str(c) for c in m.series.coefficients]
        results["orthonormality_residual"] = m.series.orthonormality_residual
    return results, suite.get("passed") is not False


def cmd_model_card(cfg: dict, out: Path) -> tuple[dict, bool]:
    model = resolve_model(cfg)
    if model is None:
        raise ConfigError("model-card needs --model")
    card = model.model_card()
    if model.spectrum is not None:
        card["normalization_at_J"] = normalization(model.spectrum, model.degeneracy, cfg["J"])._asdict()
    return card, True


COMMANDS = {
    "state": cmd_state,
    "verify": cmd_verify,
    "landau": cmd_landau,
    "measure": cmd_measure,
    "model-card": cmd_model_card,
}


# ---------------------------------------------------------------- argument parsing


def _list(kind):
    def parse(text: str):
        return [kind(v) for v in text.split(",") if v]

    return parse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its keys")
    common.add_argument("--output-dir", dest="output_dir", help=f"report directory (default ${OUTPUT_ENV} or ./cohstates-out)")
    common.add_argument("--model", help=f"one of {', '.join(sorted(models.MODEL_TAGS))}")
    common.add_argument("--model-params", dest="model_params", type=json.loads, help="JSON object of builder parameters")
    common.add_argument("--spectrum", choices=["linear", "affine", "bounded", "explicit"])
    common.add_argument("--levels", type=_list(float), help="comma-separated explicit levels")
    common.add_argument("--degeneracy", type=_list(int), help="comma-separated d(n) values")
    common.add_argument("--omega", type=float)
    common.add_argument("--tol", type=float)
    common.add_argument("--json", action="store_true", help="print the full report instead of a summary")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="cohstates", description="Coherent states for discrete spectra with degeneracies.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("state", parents=[common], help="build a state and write ket JSON/CSV")
    s.add_argument("--family", choices=FAMILIES)
    for name in ("J", "gamma", "theta", "J2", "gamma2"):
        s.add_argument(f"--{name}", type=float)
    for name in ("ell", "n", "branch"):
        s.add_argument(f"--{name}", type=int)

    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--suite", type=_list(str), help=f"comma-separated subset of {', '.join(SUITES)} or all")
    v.add_argument("--J-values", dest="J_values", type=_list(float))
    v.add_argument("--times", type=_list(float))
    v.add_argument("--gamma", type=float)
    v.add_argument("--n-max", dest="n_max", type=int)
    v.add_argument("--nodes", type=int)

    la = sub.add_parser("landau", parents=[common], help="modular, KMS and coherent-state checks on the double-Fock model")
    la.add_argument("--beta", type=float)
    la.add_argument("--K", type=int)
    la.add_argument("--z", type=_list(str), help="comma-separated complex samples, e.g. 0,0.5,0.3+0.4j")
    la.add_argument("--t", type=float)
    la.add_argument("--z-a", dest="z_a", help="first displacement of the KMS pair")
    la.add_argument("--z-b", dest="z_b", help="second displacement of the KMS pair")
    la.add_argument("--k-sweep", dest="k_sweep", type=_list(int))
    la.add_argument("--block", type=int)
    la.add_argument("--R", type=float)
    la.add_argument("--workers", type=int)

    m = sub.add_parser("measure", parents=[common], help="moments and density samples of a model measure")
    m.add_argument("--n-max", dest="n_max", type=int)
    m.add_argument("--nodes", type=int)
    m.add_argument("--grid-max", dest="grid_max", type=float)
    m.add_argument("--grid-points", dest="grid_points", type=int)

    c = sub.add_parser("model-card", parents=[common], help="JSON summary of a model")
    c.add_argument("--J", type=float)
    return p


_NOT_CONFIG = {"command", "config", "json", "verbose"}


def _summary(command: str, report: dict) -> str:
    status = {True: "PASS", False: "FAIL"}[report["passed"]]
    lines = [f"cohstates {command}: {status} ({report['timing']['seconds']:.3f} s)"]
    for key, val in report["results"].items():
        if isinstance(val, dict) and ("passed" in val or "status" in val):
            flag = val.get("passed")
            lines.append(f"  {key}: {val.get('status', 'diagnostic') if flag is None else ('pass' if flag else 'fail')}")
        elif isinstance(val, dict) and "value" in val:
            lines.append(f"  {key}: {val['value']!r} (bound {val.get('error_bound', 'n/a')})")
        elif isinstance(val, dict):
            for sub, v in val.items():
                if isinstance(v, dict) and "passed" in v:
                    lines.append(f"  {key}.{sub}: {'pass' if v['passed'] else 'fail'} ({v.get('residual', float('nan')):.2e})")
        elif not isinstance(val, list):
            lines.append(f"  {key}: {val}")
    lines.append(f"  report: {report['report_path']}")
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    overrides = {k: v for k, v in vars(args).items() if k not in _NOT_CONFIG}
    try:
        cfg = load_config(args.config, overrides)
        out = output_dir(cfg)
        start = time.perf_counter()
        results, passed = COMMANDS[args.command](cfg, out)
        elapsed = time.perf_counter() - start
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CohStatesError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    echo = {k: v for k, v in cfg.items() if k != "output_dir"}
    report = {
        "operation": args.command,
        "config": echo,
        "results": results,
        "passed": bool(passed),
        "provenance": _provenance(tol=cfg["tol"], nodes=cfg.get("nodes"), truncation=cfg.get("K")),
        "timing": {"seconds": elapsed},
    }
    path = out / f"report-{args.command}.json"
    report["report_path"] = str(path)
    write_json(path, report)
    if args.json:
        print(json.dumps(report, indent=2, default=_json_default))
    else:
        print(_summary(args.command, report))
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
