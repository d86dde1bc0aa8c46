"""Exact Riemann solver and self-similar sampling.

The middle state is found in the (r, s) plane by a safeguarded Newton
iteration on ln(rho_M) (see :mod:`ultrarel.kernels`); the entropy states
follow from the Sigma-jump law across whichever waves are shocks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Union

import numpy as np

from . import kernels
from .eos import EosParams
from .states import (InvariantState, PrimitiveState, from_invariants,
                     to_invariants)
from .wavecurves import (NumericalError, shock_cross_drop, sigma_from_strength)


@dataclass(frozen=True)
class Shock:
    speed: float


@dataclass(frozen=True)
class Fan:
    """Centred rarefaction; ``head`` and ``tail`` are its left and right edge speeds."""

    head: float
    tail: float


Wave = Union[Shock, Fan]


class Strengths(NamedTuple):
    alpha: float
    beta: float
    mu: float
    eta: float
    delta: float


@dataclass(frozen=True)
class WaveFan:
    left: PrimitiveState
    right: PrimitiveState
    mid_left: PrimitiveState
    mid_right: PrimitiveState
    eps1: float
    eps2: float
    eps3: float
    wave1: Wave
    wave3: Wave
    contact_speed: float
    sigma1: float          # shock amplitude of the 1-wave, 0 for a fan
    sigma3: float
    delta1: float          # Sigma rise across the 1-shock
    delta3: float          # Sigma rise across the 3-shock (right to left)
    raw: np.ndarray = field(repr=False, compare=False)
    inv_left: InvariantState = field(repr=False, compare=False)
    inv_right: InvariantState = field(repr=False, compare=False)

    @property
    def inv_mid(self) -> tuple[float, float]:
        return float(self.raw[0]), float(self.raw[1])

    def speeds(self) -> tuple[float, float, float, float, float]:
        """(1-wave left edge, 1-wave right edge, contact, 3-wave left edge, 3-wave right edge)."""
        r = self.raw
        return float(r[11]), float(r[12]), float(r[13]), float(r[14]), float(r[15])


def _fan_from_raw(left, right, iL, iR, raw, params) -> WaveFan:
    rM, sM, SigM, SigMp, e1, e2, e3, sig1, sig3, d1, d3, w1a, w1b, vM, w3a, w3b = map(float, raw)
    mid_left = from_invariants(InvariantState(rM, sM, SigM), params)
    mid_right = from_invariants(InvariantState(rM, sM, SigMp), params)
    wave1 = Shock(w1a) if sig1 > 0 else Fan(w1a, w1b)
    wave3 = Shock(w3a) if sig3 > 0 else Fan(w3a, w3b)
    return WaveFan(left, right, mid_left, mid_right, e1, e2, e3, wave1, wave3, vM,
                   sig1, sig3, d1, d3, raw, iL, iR)


def solve(left: PrimitiveState, right: PrimitiveState, params: EosParams) -> WaveFan:
    iL = to_invariants(left, params)
    iR = to_invariants(right, params)
    raw = kernels.solve_batch([iL.r], [iL.s], [iL.Sigma], [iR.r], [iR.s], [iR.Sigma],
                              params.a, params.gamma)[:, 0].copy()
    if not np.all(np.isfinite(raw)):
        raise NumericalError(f"Riemann solve produced non-finite output for data in region "
                             f"{classify_region(left, right, params)}: {left} | {right}")
    return _fan_from_raw(left, right, iL, iR, raw, params)


def sample(fan: WaveFan, xi: float, params: EosParams) -> PrimitiveState:
    """Solution at x/t = ``xi``; right-continuous at every front."""
    iL, iR = fan.inv_left, fan.inv_right
    out = kernels.sample_batch([iL.r], [iL.s], [iL.Sigma], [iR.r], [iR.s], [iR.Sigma],
                               fan.raw[:, None], [xi], params.a)
    r, s, Sig = out[:, 0]
    if r == iL.r and s == iL.s and Sig == iL.Sigma:
        return fan.left
    if r == iR.r and s == iR.s and Sig == iR.Sigma:
        return fan.right
    return from_invariants(InvariantState(float(r), float(s), float(Sig)), params)


def wave_strengths(fan: WaveFan) -> Strengths:
    return Strengths(max(-fan.eps1, 0.0), max(-fan.eps3, 0.0),
                     max(fan.eps1, 0.0), max(fan.eps3, 0.0), fan.eps2)


# --------------------------------------------------------------------------
# geometry of the wave curves in the (r, s) plane


def t1_s_of_r(base: InvariantState, r: float, params: EosParams) -> float:
    """The 1-wave curve from ``base`` written as a graph s(r)."""
    if r >= base.r:
        return base.s
    return base.s - shock_cross_drop(sigma_from_strength(base.r - r, params), params)


def t3_r_of_s(base: InvariantState, s: float, params: EosParams) -> float:
    """The 3-wave curve from ``base`` written as a graph r(s)."""
    if s >= base.s:
        return base.r
    return base.r - shock_cross_drop(sigma_from_strength(base.s - s, params), params)


def classify_region(left: PrimitiveState, right: PrimitiveState, params: EosParams) -> str:
    """Which of the four sections cut out by the 1- and 3-curves of ``left`` holds ``right``.

    Labels follow wave content: I = 1-shock + 3-rarefaction, II = two rarefactions,
    III = two shocks, IV = 1-rarefaction + 3-shock.
    """
    iL = to_invariants(left, params)
    iR = to_invariants(right, params)
    above = iR.s >= t1_s_of_r(iL, iR.r, params)
    right_of = iR.r >= t3_r_of_s(iL, iR.s, params)
    if above:
        return "II" if right_of else "I"
    return "IV" if right_of else "III"


def intersection_residual(fan: WaveFan, params: EosParams) -> float:
    """Max distance in (r, s) between the solved states and the wave curves through them.

    The curves are rebuilt from the signed strengths via the strength-to-amplitude
    inverse, so this does not reuse the solver's own parametrisation.
    """
    iL, iR = fan.inv_left, fan.inv_right
    rM, sM = fan.inv_mid
    if fan.eps1 >= 0:
        p1 = (iL.r + fan.eps1, iL.s)
    else:
        p1 = (iL.r + fan.eps1, iL.s - shock_cross_drop(sigma_from_strength(-fan.eps1, params), params))
    if fan.eps3 >= 0:
        p3 = (rM, sM + fan.eps3)
    else:
        p3 = (rM - shock_cross_drop(sigma_from_strength(-fan.eps3, params), params), sM + fan.eps3)
    return max(abs(p1[0] - rM), abs(p1[1] - sM), abs(p3[0] - iR.r), abs(p3[1] - iR.s))


def solve_invariants(rL, sL, SigL, rR, sR, SigR, params: EosParams, use_numba=None) -> np.ndarray:
    """Vectorised solve on invariant arrays; rows as in :data:`ultrarel.kernels.FIELDS`."""
    return kernels.solve_batch(rL, sL, SigL, rR, sR, SigR, params.a, params.gamma, use_numba)
