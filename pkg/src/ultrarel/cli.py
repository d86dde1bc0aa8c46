"""Command-line front end.

    ultrarel {riemann,glimm,curves,interactions} --config run.json --out DIR [--seed N]

Exit codes: 0 success, 2 configuration error, 3 monitor or verdict violation,
4 numerical failure.  Every float is written with 17 significant digits.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np
from jsonschema import Draft202012Validator

from . import eos as _eos
from . import glimm, interactions, riemann, wavecurves
from .eos import DomainError, EosParams, RangeError
from .states import PrimitiveState, char_speeds, invariants_from_primitive, to_invariants
from .wavecurves import Family, NumericalError

EXIT_OK, EXIT_CONFIG, EXIT_VIOLATION, EXIT_NUMERICAL = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


# --------------------------------------------------------------------------
# schema

_num = {"type": "number"}
_state = {"type": "object", "additionalProperties": False, "required": ["rho", "v", "S"],
          "properties": {"rho": _num, "v": _num, "S": _num}}
_pair = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}

_EOS = {"type": "object", "additionalProperties": False,
        "properties": {"gamma": _num,
                       "family": {"enum": ["polytropic", "radiation", "tabulated"]},
                       "R": _num, "a_R": _num,
                       "S": {"type": "array", "items": _num},
                       "A": {"type": "array", "items": _num}}}

_PROBLEM = {"type": "object", "required": ["type"], "oneOf": [
    {"additionalProperties": False, "required": ["left", "right"],
     "properties": {"type": {"const": "riemann"}, "left": _state, "right": _state, "x0": _num}},
    {"additionalProperties": False, "required": ["breakpoints", "states"],
     "properties": {"type": {"const": "piecewise"}, "breakpoints": {"type": "array", "items": _num},
                    "states": {"type": "array", "items": _state}}},
    {"additionalProperties": False, "required": ["name"],
     "properties": {"type": {"const": "smooth"}, "name": {"type": "string"},
                    "rho0": _num, "v0": _num, "S0": _num, "amplitude": _num,
                    "centre": _num, "width": _num}},
]}

_GRID = {"type": "object", "additionalProperties": False, "required": ["domain", "t_end"],
         "properties": {"domain": _pair, "t_end": _num,
                        "n_cells": {"type": "integer", "minimum": 1}, "dx": _num,
                        "cfl_ratio": _num}}

_SAMPLING = {"type": "object", "required": ["kind"], "oneOf": [
    {"additionalProperties": False,
     "properties": {"kind": {"const": "pseudorandom"}, "seed": {"type": "integer"}}},
    {"additionalProperties": False,
     "properties": {"kind": {"const": "van_der_corput"}, "base": {"type": "integer"},
                    "start": {"type": "integer"}}},
]}

_OUTPUT = {"type": "object", "additionalProperties": False,
           "properties": {"stride": {"type": "integer", "minimum": 1},
                          "per_sample_csv": {"type": "boolean"}}}

_CURVES = {"type": "object", "additionalProperties": False, "required": ["base"],
           "properties": {"base": _state, "sigma_max": _num,
                          "n": {"type": "integer", "minimum": 2}}}

_SWEEP = {"type": "object", "additionalProperties": False,
          "properties": {"box": {"type": "array", "items": _pair, "minItems": 2, "maxItems": 2},
                         "sigma_max": _num, "count": {"type": "integer", "minimum": 0},
                         "seed": {"type": "integer"}, "workers": {"type": "integer", "minimum": 1},
                         "suite": {"type": "boolean"}}}


def _schema(required, optional):
    props = {"eos": _EOS, "problem": _PROBLEM, "grid": _GRID, "sampling": _SAMPLING,
             "output": _OUTPUT, "curves": _CURVES, "sweep": _SWEEP}
    keys = list(required) + list(optional)
    return {"type": "object", "additionalProperties": False, "required": list(required),
            "properties": {k: props[k] for k in keys}}


SCHEMAS = {
    "riemann": _schema(["problem", "grid"], ["eos", "output"]),
    "glimm": _schema(["problem", "grid"], ["eos", "sampling", "output"]),
    "curves": _schema(["curves"], ["eos", "output"]),
    "interactions": _schema([], ["eos", "sweep", "output"]),
}


def load_config(path: Path, command: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    errors = sorted(Draft202012Validator(SCHEMAS[command]).iter_errors(cfg),
                    key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        where = ".".join(str(p) for p in e.absolute_path) or "<root>"
        detail = e.message
        if e.validator == "oneOf":
            detail = "does not match any allowed form (check 'type'/'kind' and key names)"
        raise ConfigError(f"{path}: key '{where}': {detail}")
    return cfg


# --------------------------------------------------------------------------
# building domain objects (config errors carry the key path)


def _guard(key, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (DomainError, RangeError, ValueError, TypeError) as exc:
        raise ConfigError(f"key '{key}': {exc}") from exc


def build_eos(block: dict | None) -> EosParams:
    block = dict(block or {})
    gamma = block.pop("gamma", 4.0 / 3.0)
    fam = block.pop("family", "polytropic")
    allowed = {"polytropic": {"R"}, "radiation": {"a_R"}, "tabulated": {"S", "A"}}[fam]
    extra = set(block) - allowed
    if extra:
        raise ConfigError(f"key 'eos.{sorted(extra)[0]}' is not valid for family '{fam}'")
    if fam == "polytropic":
        family = _guard("eos.R", _eos.Polytropic, block.get("R", 1.0))
    elif fam == "radiation":
        family = _guard("eos.a_R", _eos.Radiation, block.get("a_R", _eos.A_RAD_DEFAULT))
    else:
        if "S" not in block or "A" not in block:
            raise ConfigError("key 'eos': tabulated family needs both 'S' and 'A'")
        family = _guard("eos.S", _eos.CustomTabulated, tuple(block["S"]), tuple(block["A"]))
    return _guard("eos.gamma", EosParams, gamma, family)


def _state_of(key, d, params: EosParams) -> PrimitiveState:
    st = _guard(key, PrimitiveState, float(d["rho"]), float(d["v"]), float(d["S"]))
    _guard(key, to_invariants, st, params)
    return st


def build_profile(block: dict, params: EosParams):
    kind = block["type"]
    if kind == "riemann":
        return glimm.RiemannProfile(_state_of("problem.left", block["left"], params),
                                    _state_of("problem.right", block["right"], params),
                                    float(block.get("x0", 0.0)))
    if kind == "piecewise":
        states = tuple(_state_of(f"problem.states.{i}", s, params)
                       for i, s in enumerate(block["states"]))
        return _guard("problem", glimm.PiecewiseProfile, tuple(map(float, block["breakpoints"])), states)
    kw = {k: v for k, v in block.items() if k != "type"}
    prof = _guard("problem", glimm.SmoothProfile, **kw)
    _state_of("problem", {"rho": prof.rho0, "v": prof.v0, "S": prof.S0}, params)
    return prof


def build_grid(block: dict) -> glimm.GridConfig:
    dom = tuple(map(float, block["domain"]))
    t_end = float(block["t_end"])
    ratio = float(block.get("cfl_ratio", 1.05))
    if ("n_cells" in block) == ("dx" in block):
        raise ConfigError("key 'grid': give exactly one of 'n_cells' or 'dx'")
    if "dx" in block:
        n = (dom[1] - dom[0]) / (2.0 * float(block["dx"]))
        if not (n >= 1 and abs(n - round(n)) <= 1e-9 * n):
            raise ConfigError("key 'grid.dx': domain length must be a whole number of cells 2*dx wide")
        n_cells = int(round(n))
    else:
        n_cells = int(block["n_cells"])
    return _guard("grid", glimm.GridConfig.from_cells, dom, n_cells, t_end, ratio)


def build_sampling(block: dict | None, seed: int | None):
    block = block or {"kind": "van_der_corput"}
    if block["kind"] == "pseudorandom":
        return glimm.SeededPseudorandom(int(seed if seed is not None else block.get("seed", 0)))
    if seed is not None:
        raise ConfigError("--seed given but 'sampling.kind' is van_der_corput, which takes no seed")
    return _guard("sampling", glimm.VanDerCorput, int(block.get("base", 2)), int(block.get("start", 1)))


# --------------------------------------------------------------------------
# output


def fmt(x) -> str:
    """17 significant digits; integers verbatim."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x) + 0.0, ".17g")  # + 0.0 folds -0 into 0


def dumps17(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float at 17 significant digits; non-finite floats become null."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps17(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{dumps17(v, indent, _level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)) and not math.isfinite(obj):
        return "null"
    return fmt(obj)


def write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps17(obj) + "\n")


def write_csv(path: Path, header: str, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) if not isinstance(v, str) else v for v in row) + "\n")


def _state_dict(p: PrimitiveState) -> dict:
    return {"rho": p.rho, "v": p.v, "S": p.S}


def _profile_rows(x, r, s, Sig, params):
    from .states import primitive_from_invariants
    rho, v, S = primitive_from_invariants(r, s, Sig, params)
    S = np.broadcast_to(S, np.shape(x))
    return zip(x, rho, v, S, r, s, Sig)


PROFILE_HEADER = "x,rho,v,S,r,s,Sigma"
DIAG_HEADER = "level,t,F,L,var_rs,var_lnrho,var_rapidity,var_sigma"


# --------------------------------------------------------------------------
# commands


def _wave_dict(w):
    if isinstance(w, riemann.Shock):
        return {"type": "shock", "speed": w.speed}
    return {"type": "rarefaction", "head": w.head, "tail": w.tail}


def cmd_riemann(cfg: dict, out: Path, seed: int | None = None) -> int:
    params = build_eos(cfg.get("eos"))
    if cfg["problem"]["type"] != "riemann":
        raise ConfigError("key 'problem.type': the riemann command needs a riemann profile")
    prof = build_profile(cfg["problem"], params)
    grid = build_grid(cfg["grid"])
    fan = riemann.solve(prof.left, prof.right, params)
    st = riemann.wave_strengths(fan)
    summary = {
        "eos": {"gamma": params.gamma, "a": params.a},
        "left": _state_dict(fan.left), "right": _state_dict(fan.right),
        "mid_left": _state_dict(fan.mid_left), "mid_right": _state_dict(fan.mid_right),
        "region": riemann.classify_region(fan.left, fan.right, params),
        "eps": [fan.eps1, fan.eps2, fan.eps3],
        "strengths": st._asdict(),
        "shock_sigma": {"wave1": fan.sigma1, "wave3": fan.sigma3},
        "wave1": _wave_dict(fan.wave1), "contact_speed": fan.contact_speed,
        "wave3": _wave_dict(fan.wave3),
        "intersection_residual": riemann.intersection_residual(fan, params),
        "t": grid.t_end, "x0": prof.x0,
    }
    write_json(out / "fan.json", summary)
    x = grid.centres(0)
    t = grid.t_end
    if t > 0:
        iL, iR = fan.inv_left, fan.inv_right
        r, s, Sig = glimm.exact_profile(fan.raw, (iL.r, iL.s, iL.Sigma), (iR.r, iR.s, iR.Sigma),
                                        x, prof.x0, t, params)
    else:
        r, s, Sig = (np.asarray(q, dtype=float) for q in invariants_from_primitive(
            *prof.primitive(x), params))
    write_csv(out / "profile.csv", PROFILE_HEADER, _profile_rows(x, r, s, Sig, params))
    return EXIT_OK


def cmd_glimm(cfg: dict, out: Path, seed: int | None = None) -> int:
    params = build_eos(cfg.get("eos"))
    prof = build_profile(cfg["problem"], params)
    grid = build_grid(cfg["grid"])
    seq = build_sampling(cfg.get("sampling"), seed)
    stride = int(cfg.get("output", {}).get("stride", max(1, grid.n_steps)))
    status = EXIT_OK
    try:
        res = glimm.run(prof, grid, seq, params, store_stride=stride)
        diag, levels = res.diagnostics, res.levels
        failure = None
    except glimm.MonitorViolation as exc:
        diag, levels, failure = exc.diagnostics, [], exc.report
        status = EXIT_VIOLATION
    write_csv(out / "diagnostics.csv", DIAG_HEADER, diag.rows())
    for lev in levels:
        write_csv(out / f"profile_{lev.level:06d}.csv", PROFILE_HEADER,
                  _profile_rows(lev.x, lev.r, lev.s, lev.Sigma, params))
    c = diag.constants
    summary = {
        "status": "ok" if failure is None else "monitor_violation",
        "failure": failure,
        "grid": {"dx": grid.dx, "dt": grid.dt, "n_cells": grid.n_cells, "n_steps": grid.n_steps,
                 "domain": list(grid.domain), "t_end": grid.t_end},
        "constants": {"V": c.V, "V_full": c.V_full, "N": c.N, "ball_centre": list(c.centre),
                      "ball_radius": c.radius, "omega_bar": c.omega_bar, "C0": c.C0,
                      "C0_floor_binds": c.C0_floor_binds, "M_bar": c.M_bar, "M": c.M, "M0": c.M0},
        "bounds": diag.bounds(params),
        "boundary_clear": diag.boundary_clear,
        "L_display": list(diag.L_display),
        "census_final": asdict(diag.census[-1]) if diag.census else None,
    }
    write_json(out / "summary.json", summary)
    if failure is not None:
        write_json(out / "failure.json", failure)
        print(f"monitor violation: {failure}", file=sys.stderr)
    return status


def cmd_curves(cfg: dict, out: Path, seed: int | None = None) -> int:
    params = build_eos(cfg.get("eos"))
    block = cfg["curves"]
    base = _state_of("curves.base", block["base"], params)
    sig_max = float(block.get("sigma_max", 3.0))
    n = int(block.get("n", 61))
    if not sig_max > 0:
        raise ConfigError("key 'curves.sigma_max': must be positive")
    sigmas = np.linspace(0.0, sig_max, n)
    ib = to_invariants(base, params)
    k = params.a / (1.0 + params.a2)
    header = "sigma,r,s,Sigma,dr,ds,dSigma,speed"
    for fam in (Family.ONE, Family.THREE):
        rows = []
        for sg in sigmas:
            dr, ds, dS = wavecurves.shock_increments(sg, fam, params)
            sp = wavecurves.shock_speed(base, float(sg), fam, params)
            rows.append((sg, ib.r + dr, ib.s + ds, ib.Sigma + dS, dr, ds, dS, sp))
        write_csv(out / f"shock_{fam.value}.csv", header, rows)
        rows = []
        for sg in sigmas:
            eps = 2.0 * k * sg  # rarefaction of the same |d ln rho|
            st = wavecurves.rarefaction_curve(base, fam, float(eps), params)
            i = to_invariants(st, params)
            lam = char_speeds(st, params)[0 if fam is Family.ONE else 2]
            rows.append((sg, i.r, i.s, i.Sigma, i.r - ib.r, i.s - ib.s, i.Sigma - ib.Sigma, lam))
        write_csv(out / f"rarefaction_{fam.value}.csv", header, rows)
    d = wavecurves.sigma_jump(sigmas, params)
    dd = wavecurves.sigma_jump_deriv(sigmas, params)
    om = wavecurves.shock_strength(sigmas, params)
    write_csv(out / "delta.csv", "sigma,omega,delta,ddelta_dsigma", zip(sigmas, om, d, dd))
    return EXIT_OK


def cmd_interactions(cfg: dict, out: Path, seed: int | None = None) -> int:
    params = build_eos(cfg.get("eos"))
    block = cfg.get("sweep", {})
    box = block.get("box", [[-2.0, 2.0], [-2.0, 2.0]])
    if not all(b[1] > b[0] for b in box):
        raise ConfigError("key 'sweep.box': each range must be increasing")
    sig_max = float(block.get("sigma_max", 2.0))
    if not sig_max > 0:
        raise ConfigError("key 'sweep.sigma_max': must be positive")
    count = int(block.get("count", 10000))
    sd = int(seed if seed is not None else block.get("seed", 0))
    workers = int(block.get("workers", 1))
    per_sample = bool(cfg.get("output", {}).get("per_sample_csv", False))
    stats, samples = interactions.random_sweep(box, sig_max, count, sd, params, workers=workers,
                                               return_samples=True)
    result = {"seed": sd, "box": box, "sigma_max": sig_max, "gamma": params.gamma,
              "sweep": stats.as_dict()}
    bad = stats.violations_interaction + stats.violations_entropy
    if count and stats.max_net_residual > 1e-9:
        bad += 1
    if block.get("suite", True):
        labels, L, M, R = interactions.topology_suite(params)
        q = interactions.interact_arrays(L, M, R, params)
        c = interactions.omega_constants(float(q["max_strength"].max()), params)
        tol = interactions.TOL_REL * q["scale"]
        mi = interactions.interaction_margin(q["A"], q["B"], c.C0, tol)
        me = interactions.entropy_margin(q["A"], q["B"], q["E"], c.M, tol)
        n_bad = int(np.count_nonzero(mi < 0) + np.count_nonzero(me < 0))
        result["suite"] = {"cases": len(labels), "configurations": len(set(labels)),
                           "violations": n_bad,
                           "min_margin": {"interaction": float(mi.min()), "entropy": float(me.min())},
                           "max_net_entropy_residual": float(np.abs(q["net_residual"]).max()),
                           "constants": {"C0": c.C0, "M_bar": c.M_bar, "M": c.M,
                                         "omega_bar": c.omega_bar}}
        bad += n_bad
    write_json(out / "stats.json", result)
    if per_sample and count:
        hdr = ("i,topology,rL,sL,SigmaL,rM,sM,SigmaM,rR,sR,SigmaR,A,B,E,"
               "margin_interaction,margin_entropy")
        L, M, R = samples["L"], samples["M"], samples["R"]
        rows = ((i, samples["topology"][i], *(x[i] for x in (*L, *M, *R)), samples["A"][i],
                 samples["B"][i], samples["E"][i], samples["margin_interaction"][i],
                 samples["margin_entropy"][i]) for i in range(count))
        write_csv(out / "samples.csv", hdr, rows)
    if bad:
        print(f"interaction estimates violated in {bad} case(s)", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


COMMANDS = {"riemann": cmd_riemann, "glimm": cmd_glimm, "curves": cmd_curves,
            "interactions": cmd_interactions}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ultrarel", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, type=Path, help="JSON run configuration")
        sp.add_argument("--out", required=True, type=Path, help="output directory")
        sp.add_argument("--seed", type=int, default=None,
                        help="override the seed of pseudorandom sampling or of the sweep")
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config, args.command)
        return COMMANDS[args.command](cfg, args.out, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, ArithmeticError, DomainError, RangeError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
