"""Randomised and curated checks of the wave-interaction estimates.

Two adjacent Riemann problems <U_L, U_M> and <U_M, U_R> are compared with the
single problem <U_L, U_R>.  With primes on the outgoing strengths,

    A = alpha' - alpha_1 - alpha_2,    B = beta' - beta_1 - beta_2,

the reflected-wave estimate requires A, B <= 0, or one of them equal to
-xi <= 0 with the other in [0, C0 xi].  The entropy estimate requires

    E = |d'| - |d_1| - |d_2| + (d_a1 + d_a2 - d_a') + (d_b1 + d_b2 - d_b') <= -M (A + B)

where d_a, d_b are the Sigma jumps across the 1- and 3-shocks.  Everything is
computed on invariant arrays so a sweep is three batched solves.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .eos import EosParams
from .riemann import Strengths
from .states import PrimitiveState, invariants_from_primitive
from .wavecurves import (Family, delta_of_strength_deriv, shock_increments,
                         shock_slope, shock_strength)

#: verdict tolerance is this times (1 + total incoming strength)
TOL_REL = 1e-10


# --------------------------------------------------------------------------
# constants


@dataclass(frozen=True)
class OmegaConstants:
    omega_bar: float
    C0: float
    C0_floor_binds: bool
    M_bar: float
    M: float


def omega_constants(omega_bar: float, params: EosParams) -> OmegaConstants:
    """C0 = max(1/2, slope at omega_bar), M_bar = 2 d delta/d omega (omega_bar), M = M_bar / (1 - C0)."""
    if omega_bar > 0:
        slope = shock_slope(omega_bar, params)
        M_bar = 2.0 * delta_of_strength_deriv(omega_bar, params)
    else:
        slope, M_bar = 0.0, 0.0
    C0 = max(0.5, slope)
    return OmegaConstants(omega_bar, C0, slope <= 0.5, M_bar, M_bar / (1.0 - C0))


def box_omega_bar(box) -> float:
    """Largest 1- or 3-wave strength between two states of the (r, s) box."""
    (r0, r1), (s0, s1) = box
    return max(r1 - r0, s1 - s0)


# --------------------------------------------------------------------------
# core on arrays


def _fan_terms(raw):
    e1, e2, e3 = raw[4], raw[5], raw[6]
    return {"alpha": np.maximum(-e1, 0.0), "beta": np.maximum(-e3, 0.0),
            "mu": np.maximum(e1, 0.0), "eta": np.maximum(e3, 0.0), "delta": e2,
            "d_alpha": raw[9], "d_beta": raw[10]}


def interact_arrays(L, M, R, params: EosParams, use_numba=None) -> dict:
    """Interaction quantities for arrays of invariant triples ``L``, ``M``, ``R`` = (r, s, Sigma)."""
    a, g = params.a, params.gamma
    f1 = _fan_terms(kernels.solve_batch(*L, *M, a, g, use_numba))
    f2 = _fan_terms(kernels.solve_batch(*M, *R, a, g, use_numba))
    raw_p = kernels.solve_batch(*L, *R, a, g, use_numba)
    fp = _fan_terms(raw_p)
    A = fp["alpha"] - f1["alpha"] - f2["alpha"]
    B = fp["beta"] - f1["beta"] - f2["beta"]
    E = (np.abs(fp["delta"]) - np.abs(f1["delta"]) - np.abs(f2["delta"])
         + (f1["d_alpha"] + f2["d_alpha"] - fp["d_alpha"])
         + (f1["d_beta"] + f2["d_beta"] - fp["d_beta"]))
    net = lambda f: f["d_alpha"] + f["delta"] - f["d_beta"]  # noqa: E731
    net_res = net(fp) - net(f1) - net(f2)
    scale = 1.0 + sum(f[k] if k != "delta" else np.abs(f[k])
                      for f in (f1, f2) for k in ("alpha", "beta", "mu", "eta", "delta"))
    max_strength = np.max(np.abs(np.stack([f[k] for f in (f1, f2, fp)
                                           for k in ("alpha", "beta", "mu", "eta")])), axis=0)
    total = lambda f: f["alpha"] + f["beta"] + f["mu"] + f["eta"] + np.abs(f["delta"])  # noqa: E731
    nontrivial = (total(f1) > kernels.ZERO_STRENGTH) & (total(f2) > kernels.ZERO_STRENGTH)
    return {"fan1": f1, "fan2": f2, "out": fp, "A": A, "B": B, "E": E, "nontrivial": nontrivial,
            "net_residual": net_res, "scale": scale, "max_strength": max_strength,
            "mid_out": raw_p[:2]}


def interaction_margin(A, B, C0, tol):
    """Signed slack of the reflected-wave estimate (>= 0 means it holds)."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    both = np.minimum(tol - A, tol - B)
    alt_a = np.minimum(tol - A, C0 * np.maximum(-A, 0.0) + tol - B)
    alt_b = np.minimum(tol - B, C0 * np.maximum(-B, 0.0) + tol - A)
    return np.maximum(both, np.maximum(alt_a, alt_b))


def entropy_margin(A, B, E, M, tol):
    return -M * (np.asarray(A) + np.asarray(B)) + tol - np.asarray(E)


# --------------------------------------------------------------------------
# single reports


@dataclass(frozen=True)
class InteractionReport:
    states: tuple
    fan1: Strengths
    fan2: Strengths
    out: Strengths
    d_alpha: tuple[float, float, float]   # fan1, fan2, outgoing
    d_beta: tuple[float, float, float]
    A: float
    B: float
    E: float
    net_residual: float
    scale: float
    constants: OmegaConstants

    @property
    def tol(self) -> float:
        return TOL_REL * self.scale


def _strengths(f, i=0) -> Strengths:
    return Strengths(*(float(f[k][i]) for k in ("alpha", "beta", "mu", "eta", "delta")))


def interact(UL: PrimitiveState, UM: PrimitiveState, UR: PrimitiveState, params: EosParams,
             omega_bar: float | None = None) -> InteractionReport:
    """Solve the three Riemann problems and assemble the interaction report.

    Constants come from ``omega_bar``; by default the largest strength present
    in the three fans (the tightest set enclosing the configuration).
    """
    inv = [tuple(np.atleast_1d(np.asarray(q, dtype=float))
                 for q in invariants_from_primitive(U.rho, U.v, U.S, params)) for U in (UL, UM, UR)]
    q = interact_arrays(*inv, params)
    wbar = float(q["max_strength"][0]) if omega_bar is None else omega_bar
    return InteractionReport(
        (UL, UM, UR), _strengths(q["fan1"]), _strengths(q["fan2"]), _strengths(q["out"]),
        tuple(float(q[f]["d_alpha"][0]) for f in ("fan1", "fan2", "out")),
        tuple(float(q[f]["d_beta"][0]) for f in ("fan1", "fan2", "out")),
        float(q["A"][0]), float(q["B"][0]), float(q["E"][0]), float(q["net_residual"][0]),
        float(q["scale"][0]), omega_constants(wbar, params))


def check_interaction_estimate(report: InteractionReport, C0: float | None = None) -> bool:
    C0 = report.constants.C0 if C0 is None else C0
    return bool(interaction_margin(report.A, report.B, C0, report.tol) >= 0)


def check_entropy_estimate(report: InteractionReport, M: float | None = None) -> bool:
    M = report.constants.M if M is None else M
    return bool(entropy_margin(report.A, report.B, report.E, M, report.tol) >= 0)


# --------------------------------------------------------------------------
# topology


def _fan_code(f, i, zero=kernels.ZERO_STRENGTH) -> str:
    parts = []
    if f["alpha"][i] > zero:
        parts.append("1S")
    elif f["mu"][i] > zero:
        parts.append("1R")
    if abs(f["delta"][i]) > zero:
        parts.append("2C")
    if f["beta"][i] > zero:
        parts.append("3S")
    elif f["eta"][i] > zero:
        parts.append("3R")
    return "".join(parts) or "0"


def topology(q: dict, i: int) -> str:
    return f"{_fan_code(q['fan1'], i)}|{_fan_code(q['fan2'], i)}"


# --------------------------------------------------------------------------
# composing waves in invariant coordinates


def compose(base, family, kind: str, amount, params: EosParams):
    """Invariant state(s) on the right of ``base`` across one wave.

    ``kind`` is ``"S"`` (shock of amplitude ``amount``), ``"R"`` (rarefaction of
    strength ``amount``) or ``"C"`` (contact, Sigma jump ``amount``).
    """
    r, s, S = (np.asarray(x, dtype=float) for x in base)
    amount = np.asarray(amount, dtype=float)
    fam = family if isinstance(family, Family) else Family(int(family))
    if kind == "C":
        return r, s, S + amount
    if kind == "R":
        if fam is Family.ONE:
            return r + amount, s, S
        return r, s + amount, S
    if kind == "S":
        dr, ds, dS = shock_increments(amount, fam, params)
        return r + dr, s + ds, S + dS
    raise ValueError(f"unknown wave kind {kind!r}")


_PAIRS = [(Family.ONE, Family.ONE), (Family.ONE, Family.THREE),
          (Family.THREE, Family.ONE), (Family.THREE, Family.THREE)]


def topology_suite(params: EosParams, amplitudes=((0.3, 0.3), (1.0, 0.4), (0.4, 1.0), (1.5, 1.5))):
    """The 16 incoming configurations: one wave per fan, every family pair and S/R pattern.

    Returns ``(labels, L, M, R)`` with one row per (configuration, amplitude pair).
    """
    labels, L, M, R = [], [], [], []
    base = (np.array(0.1), np.array(-0.2), np.array(1.0))
    for (f1, f2), (k1, k2) in itertools.product(_PAIRS, itertools.product("SR", repeat=2)):
        for a1, a2 in amplitudes:
            m = compose(base, f1, k1, a1, params)
            r = compose(m, f2, k2, a2, params)
            labels.append(f"{f1.value}{k1}+{f2.value}{k2}")
            for lst, st in ((L, base), (M, m), (R, r)):
                lst.append([float(x) for x in st])
    arr = lambda x: tuple(np.array(x).T)  # noqa: E731
    return labels, arr(L), arr(M), arr(R)


# --------------------------------------------------------------------------
# random sweep


@dataclass(frozen=True)
class SweepStats:
    count: int
    violations_interaction: int
    violations_entropy: int
    min_margin_interaction: float
    min_margin_entropy: float
    min_margin_interaction_nontrivial: float
    min_margin_entropy_nontrivial: float
    n_nontrivial: int
    max_net_residual: float
    topologies: dict
    constants: OmegaConstants
    omega_bar_box: float
    omega_bar_extended: bool

    def as_dict(self) -> dict:
        c = self.constants
        return {"count": self.count,
                "violations": {"interaction": self.violations_interaction,
                               "entropy": self.violations_entropy},
                "min_margin": {"interaction": self.min_margin_interaction,
                               "entropy": self.min_margin_entropy},
                "min_margin_both_fans_nonzero": {
                    "count": self.n_nontrivial,
                    "interaction": self.min_margin_interaction_nontrivial,
                    "entropy": self.min_margin_entropy_nontrivial},
                "max_net_entropy_residual": self.max_net_residual,
                "constants": {"C0": c.C0, "C0_floor_binds": c.C0_floor_binds,
                              "M_bar": c.M_bar, "M": c.M, "omega_bar": c.omega_bar,
                              "omega_bar_box": self.omega_bar_box,
                              "omega_bar_extended": self.omega_bar_extended},
                "topologies": dict(sorted(self.topologies.items()))}


def _draw(box, sigma_max, count, seed, params: EosParams):
    """Sample triples: the first half uniform in the box, the rest by composing waves."""
    rng = np.random.default_rng(seed)
    (r0, r1), (s0, s1) = box
    n_u = count // 2
    n_c = count - n_u
    U = rng.uniform(size=(n_u, 9))
    u_r = lambda c: r0 + (r1 - r0) * U[:, c]  # noqa: E731
    u_s = lambda c: s0 + (s1 - s0) * U[:, c]  # noqa: E731
    uni = [(u_r(0), u_s(1), 1.0 + U[:, 2]), (u_r(3), u_s(4), 1.0 + U[:, 5]),
           (u_r(6), u_s(7), 1.0 + U[:, 8])]

    C = rng.uniform(size=(n_c, 15))
    w_max = shock_strength(sigma_max, params)
    base = (r0 + (r1 - r0) * C[:, 0], s0 + (s1 - s0) * C[:, 1], 1.0 + C[:, 2])

    def fan(state, cols):
        out = state
        for fam, ck, ca in ((Family.ONE, cols[0], cols[1]), (Family.THREE, cols[3], cols[4])):
            kind = C[:, ck]
            amt = C[:, ca]
            # a third of waves absent, a third shocks, a third rarefactions
            sh = compose(out, fam, "S", np.where(kind < 2 / 3, sigma_max * amt, 0.0), params)
            ra = compose(out, fam, "R", w_max * amt, params)
            out = tuple(np.where(kind < 1 / 3, o, np.where(kind < 2 / 3, x, y))
                        for o, x, y in zip(out, sh, ra))
            if fam is Family.ONE:
                out = compose(out, Family.CONTACT, "C", np.where(C[:, cols[2]] < 0.5, 0.0,
                                                                 C[:, cols[2]] - 0.5), params)
        return out

    mid = fan(base, (3, 4, 5, 6, 7))
    right = fan(mid, (8, 9, 10, 11, 12))
    cat = lambda a, b: tuple(np.concatenate([x, y]) for x, y in zip(a, b))  # noqa: E731
    return cat(uni[0], base), cat(uni[1], mid), cat(uni[2], right)


def _chunk(args):
    L, M, R, params = args
    q = interact_arrays(L, M, R, params)
    topo = [topology(q, i) for i in range(L[0].shape[0])]
    keep = {k: q[k] for k in ("A", "B", "E", "net_residual", "scale", "max_strength", "nontrivial")}
    return keep, topo


def random_sweep(omega_box, sigma_max: float, count: int, seed: int, params: EosParams,
                 workers: int = 1, return_samples: bool = False):
    """Certify both estimates on ``count`` random interactions.

    Samples are drawn up front from ``seed``, so results do not depend on
    ``workers``; all aggregates are order-independent (counts, minima, maxima).
    The constants use omega_bar = max(box strength bound, largest strength seen),
    so every wave in every fan lies in the set the constants describe.
    """
    box = tuple(tuple(map(float, b)) for b in omega_box)
    wbox = box_omega_bar(box)
    if count <= 0:
        c = omega_constants(wbox, params)
        inf = float("inf")
        stats = SweepStats(0, 0, 0, inf, inf, inf, inf, 0, 0.0, {}, c, wbox, False)
        return (stats, {}) if return_samples else stats

    L, M, R = _draw(box, sigma_max, count, seed, params)
    if workers > 1:
        bounds = np.linspace(0, count, workers + 1).astype(int)
        jobs = [(tuple(x[a:b] for x in L), tuple(x[a:b] for x in M), tuple(x[a:b] for x in R),
                 params) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_chunk, jobs))
        q = {k: np.concatenate([p[0][k] for p in parts]) for k in parts[0][0]}
        topo = [t for p in parts for t in p[1]]
    else:
        q, topo = _chunk((L, M, R, params))

    wmax = float(np.max(q["max_strength"]))
    c = omega_constants(max(wbox, wmax), params)
    tol = TOL_REL * q["scale"]
    mi = interaction_margin(q["A"], q["B"], c.C0, tol)
    me = entropy_margin(q["A"], q["B"], q["E"], c.M, tol)
    counts: dict[str, int] = {}
    for t in topo:
        counts[t] = counts.get(t, 0) + 1
    nt = q["nontrivial"]
    nt_min = lambda m: float(m[nt].min()) if nt.any() else float("inf")  # noqa: E731
    stats = SweepStats(count, int(np.count_nonzero(mi < 0)), int(np.count_nonzero(me < 0)),
                       float(mi.min()), float(me.min()), nt_min(mi), nt_min(me),
                       int(np.count_nonzero(nt)), float(np.abs(q["net_residual"]).max()),
                       counts, c, wbox, wmax > wbox)
    if not return_samples:
        return stats
    samples = {"L": L, "M": M, "R": R, "A": q["A"], "B": q["B"], "E": q["E"],
               "margin_interaction": mi, "margin_entropy": me, "topology": topo}
    return stats, samples
