"""Elementary waves: shocks, rarefactions and contacts.

Every curve is based at the *left* state of the wave and returns the state
connected on the right, so a wave fan is read left to right.  Shocks are
parameterised by the amplitude sigma = |ln(rho_R / rho_L)| >= 0:

* a 1-shock compresses (rho_R = rho_L e**sigma) and raises Sigma by delta(sigma);
* a 3-shock expands left to right (rho_R = rho_L e**-sigma) and lowers Sigma by delta(sigma).

In both families the rapidity drops by ``rapidity_jump(sigma)``.  The wave
strength omega (the drop of r across a 1-shock, of s across a 3-shock) is
``rapidity_jump(sigma) + k sigma``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import eos as _eos
from . import kernels
from .eos import DomainError, EosParams
from .states import (PrimitiveState, char_speeds, conserved_from_primitive, flux,
                     flux_from_primitive, from_invariants, InvariantState,
                     to_invariants)


class NumericalError(ArithmeticError):
    """A computation that should succeed for valid input did not meet its tolerance."""


class Family(enum.Enum):
    ONE = 1
    CONTACT = 2
    THREE = 3


def _family(f) -> Family:
    return f if isinstance(f, Family) else Family(int(f))


@dataclass(frozen=True)
class ShockPoint:
    family: Family
    sigma: float
    left: PrimitiveState
    right: PrimitiveState
    speed: float
    mass_flux: float
    sigma_jump: float

    @property
    def downstream(self) -> PrimitiveState:
        """The denser side of the front."""
        return self.right if self.family is Family.ONE else self.left

    @property
    def upstream(self) -> PrimitiveState:
        return self.left if self.family is Family.ONE else self.right


#: relative RH tolerance every emitted shock must meet
RH_TOL = 1e-9


@dataclass(frozen=True)
class LaxResult:
    admissible: bool
    degenerate: bool
    slack_behind: float   # speed - lambda_i(right)
    slack_ahead: float    # lambda_i(left) - speed


# --------------------------------------------------------------------------
# scalar laws


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def _scalar(sigma) -> float | None:
    """``sigma`` as a checked float when it is a plain number, else None."""
    if type(sigma) is float or type(sigma) is int:
        if not sigma >= 0:
            raise DomainError("shock amplitude sigma must be >= 0")
        return float(sigma)
    return None


def _k(params: EosParams) -> float:
    return params.a / (1.0 + params.a2)


def taub_n_ratio(rho_ratio, params: EosParams):
    """n / n_L across a shock with rho / rho_L = ``rho_ratio`` (Taub adiabat, p = a^2 rho)."""
    x = np.asarray(rho_ratio, dtype=float)
    if not np.all(x > 0):
        raise DomainError("density ratio must be positive")
    a2 = params.a2
    return _out(x * np.sqrt((1.0 + a2 / x) / (1.0 + a2 * x)))


def _check_sigma(sigma):
    sig = np.asarray(sigma, dtype=float)
    if not np.all(sig >= 0):
        raise DomainError("shock amplitude sigma must be >= 0")
    return sig


def sigma_jump(sigma, params: EosParams):
    """delta(sigma): rise of Sigma = ln A(S) across a shock of amplitude sigma."""
    if (s := _scalar(sigma)) is not None:
        return float(kernels.sigma_jump(s, params.gamma))
    sig = _check_sigma(sigma)
    out = kernels._sigma_jump_np(sig, params.gamma)
    return _out(out)


def sigma_jump_deriv(sigma, params: EosParams):
    sig = _check_sigma(sigma)
    g = params.gamma
    # (e^s - 1)^2 / ((1 + e^s (g-1)) (e^s + g - 1)), divided through by e^(2s)
    t = np.exp(-sig)
    omt = -np.expm1(-sig)
    out = omt * omt * (2.0 - g) * (g - 1.0) / (2.0 * (t + (g - 1.0)) * (1.0 + (g - 1.0) * t))
    return _out(out)


def sigma_jump_from_taub(sigma, params: EosParams, rho_left: float = 1.0, S_left: float = 1.0):
    """delta(sigma) computed from the Taub adiabat and rho / n**gamma = A(S)."""
    sig = float(_check_sigma(sigma))
    n_left = _eos.number_density(rho_left, S_left, params)
    rho = rho_left * math.exp(sig)
    n = n_left * taub_n_ratio(math.exp(sig), params)
    S = _eos.entropy_from_rho_n(rho, n, params)
    return float(_eos.sigma_of_S(S, params) - _eos.sigma_of_S(S_left, params))


def rapidity_jump(sigma, params: EosParams):
    if (s := _scalar(sigma)) is not None:
        return float(kernels.rapidity_jump(s, params.a, params.a2))
    sig = _check_sigma(sigma)
    out = kernels._rapidity_jump_np(sig, params.a, params.a2)
    return _out(out)


def relative_velocity(sigma, params: EosParams):
    """|v_L - v_R| / (1 - v_L v_R) across a shock of amplitude sigma."""
    return _out(np.tanh(rapidity_jump(sigma, params)))


def shock_strength(sigma, params: EosParams):
    """omega(sigma): drop of r (1-shock) or s (3-shock) across the shock."""
    if (s := _scalar(sigma)) is not None:
        return rapidity_jump(s, params) + _k(params) * s
    return _out(rapidity_jump(sigma, params) + _k(params) * np.asarray(sigma, dtype=float))


def shock_cross_drop(sigma, params: EosParams):
    """Drop of the *other* invariant: s across a 1-shock, r across a 3-shock."""
    if (s := _scalar(sigma)) is not None:
        return rapidity_jump(s, params) - _k(params) * s
    return _out(rapidity_jump(sigma, params) - _k(params) * np.asarray(sigma, dtype=float))


def sigma_from_strength(omega: float, params: EosParams) -> float:
    if omega < 0:
        raise DomainError("shock strength must be >= 0")
    if omega == 0:
        return 0.0
    k = _k(params)
    # omega' runs from 2k up to 1/2 + k
    lo, hi = omega / (0.5 + k), omega / (2.0 * k)
    f = lambda s: shock_strength(s, params) - omega  # noqa: E731
    # round-off can break the analytic bracket for tiny omega
    if f(lo) >= 0.0:
        return lo
    if f(hi) <= 0.0:
        return hi
    return brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps)


def delta_of_strength(omega: float, params: EosParams) -> float:
    """delta_omega: |Delta Sigma| across a shock of strength omega."""
    return sigma_jump(sigma_from_strength(omega, params), params)


def delta_of_strength_deriv(omega: float, params: EosParams) -> float:
    sig = sigma_from_strength(omega, params)
    dom = kernels._rapidity_jump_deriv_np(np.asarray(sig), params.a, params.a2) + _k(params)
    return float(sigma_jump_deriv(sig, params) / dom)


def shock_slope(omega: float, params: EosParams) -> float:
    """ds/dr along a 1-shock (= dr/ds along a 3-shock) at strength omega."""
    sig = sigma_from_strength(omega, params)
    k = _k(params)
    xp = float(kernels._rapidity_jump_deriv_np(np.asarray(sig), params.a, params.a2))
    return (xp - k) / (xp + k)


def shock_slope_bound(params: EosParams) -> float:
    """Supremum of the shock-curve slope, (1 - sqrt(2K)) / (1 + sqrt(2K)), K = 2a^2/(1+a^2)^2."""
    K = 2.0 * params.a2 / (1.0 + params.a2) ** 2
    q = math.sqrt(2.0 * K)
    return (1.0 - q) / (1.0 + q)


def shock_increments(sigma, family, params: EosParams):
    """(Delta r, Delta s, Delta Sigma) from left to right across a shock; base independent."""
    fam = _family(family)
    om = shock_strength(sigma, params)
    cr = shock_cross_drop(sigma, params)
    d = sigma_jump(sigma, params)
    if fam is Family.ONE:
        return -om, -cr, d
    if fam is Family.THREE:
        return -cr, -om, -d
    raise ValueError("shocks exist only in families ONE and THREE")


# --------------------------------------------------------------------------
# curves


def rh_residual(left: PrimitiveState, right: PrimitiveState, speed: float,
                params: EosParams) -> np.ndarray:
    """speed * [[U]] - [[F]], componentwise."""
    UL = np.array(conserved_from_primitive(left.rho, left.v, left.S, params), dtype=float)
    UR = np.array(conserved_from_primitive(right.rho, right.v, right.S, params), dtype=float)
    FL = np.array(flux_from_primitive(left.rho, left.v, left.S, params), dtype=float)
    FR = np.array(flux_from_primitive(right.rho, right.v, right.S, params), dtype=float)
    return speed * (UR - UL) - (FR - FL)


def mass_flux(state: PrimitiveState, speed: float, params: EosParams) -> float:
    """Number flux through the front, n W (v - speed); equal on both sides of a shock."""
    return state.n(params) * state.lorentz() * (state.v - speed)


def shock_speed(left: PrimitiveState, sigma: float, family, params: EosParams) -> float:
    fam = _family(family)
    if sigma == 0:
        lam = char_speeds(left, params)
        return lam[0] if fam is Family.ONE else lam[2]
    x = float(relative_velocity(sigma, params))
    s0 = kernels.shock_speed_rest(float(sigma), params.a2, x, fam is Family.ONE)
    return math.tanh(math.atanh(s0) + left.rapidity)


def shock_curve(left: PrimitiveState, family, sigma: float, params: EosParams) -> ShockPoint:
    """State joined on the right of ``left`` by an admissible shock of amplitude ``sigma``."""
    fam = _family(family)
    if fam is Family.CONTACT:
        raise ValueError("use contact() for the linearly degenerate field")
    sigma = float(_check_sigma(sigma))
    if sigma == 0:
        speed = shock_speed(left, 0.0, fam, params)
        return ShockPoint(fam, 0.0, left, left, speed, mass_flux(left, speed, params), 0.0)
    ratio = math.exp(sigma) if fam is Family.ONE else math.exp(-sigma)
    rho = left.rho * ratio
    v = math.tanh(left.rapidity - rapidity_jump(sigma, params))
    n_left = left.n(params)
    if fam is Family.ONE:
        n = n_left * taub_n_ratio(ratio, params)
    else:
        # Taub is symmetric in the two states; the dense side is on the left here
        n = n_left / taub_n_ratio(1.0 / ratio, params)
    S = float(_eos.entropy_from_rho_n(rho, n, params))
    right = PrimitiveState(rho, v, S)
    speed = shock_speed(left, sigma, fam, params)
    res = rh_residual(left, right, speed, params)
    scale = np.abs(np.concatenate([flux(left, params), flux(right, params)])).max()
    if not np.all(np.abs(res) <= RH_TOL * scale):
        raise NumericalError(f"RH residual {np.abs(res).max():.3e} exceeds {RH_TOL} x {scale:.3e} "
                             f"(family {fam.name}, sigma {sigma!r}, left {left})")
    return ShockPoint(fam, sigma, left, right, speed, mass_flux(left, speed, params),
                      sigma_jump(sigma, params))


def rarefaction_curve(left: PrimitiveState, family, strength: float,
                      params: EosParams) -> PrimitiveState:
    """Follow the integral curve: r rises by ``strength`` (family ONE) or s does (THREE)."""
    fam = _family(family)
    if strength < 0:
        raise DomainError("rarefaction strength must be >= 0")
    inv = to_invariants(left, params)
    if strength == 0:
        return left
    if fam is Family.ONE:
        return from_invariants(InvariantState(inv.r + strength, inv.s, inv.Sigma), params)
    if fam is Family.THREE:
        return from_invariants(InvariantState(inv.r, inv.s + strength, inv.Sigma), params)
    raise ValueError("rarefactions exist only in families ONE and THREE")


def contact(left: PrimitiveState, delta: float, params: EosParams) -> PrimitiveState:
    """Entropy wave: rho and v unchanged, Sigma shifted by ``delta``."""
    if delta == 0:
        return left
    Sig = _eos.sigma_of_S(left.S, params) + delta
    return PrimitiveState(left.rho, left.v, float(_eos.S_of_sigma(Sig, params)))


def lax_check(left: PrimitiveState, right: PrimitiveState, speed: float, family,
              params: EosParams) -> LaxResult:
    """lambda_i(right) < speed < lambda_i(left), with both margins reported."""
    fam = _family(family)
    idx = 0 if fam is Family.ONE else 2
    lam_l = char_speeds(left, params)[idx]
    lam_r = char_speeds(right, params)[idx]
    behind = speed - lam_r
    ahead = lam_l - speed
    degenerate = behind == 0 and ahead == 0
    return LaxResult(behind > 0 and ahead > 0, degenerate, behind, ahead)
