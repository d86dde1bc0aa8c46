"""Primitive, conserved and Riemann-invariant states and the eigen-structure.

The array helpers at the top work elementwise on numpy arrays and are what the
solvers use; the dataclasses wrap single states for the public API.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import eos as _eos
from .eos import DomainError, EosParams


class DecodeError(ValueError):
    """Conserved variables that no physical state maps to."""


def _k(params: EosParams) -> float:
    return params.a / (1.0 + params.a2)


# --------------------------------------------------------------------------
# array helpers


def invariants_from_primitive(rho, v, S, params: EosParams):
    """(rho, v, S) -> (r, s, Sigma), elementwise."""
    k = _k(params)
    phi = np.arctanh(v)
    lr = np.log(rho)
    return phi - k * lr, phi + k * lr, _eos.sigma_of_S(S, params)


def primitive_from_invariants(r, s, Sigma, params: EosParams):
    """(r, s, Sigma) -> (rho, v, S), elementwise."""
    k = _k(params)
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    rho = np.exp((s - r) / (2.0 * k))
    v = np.tanh(0.5 * (r + s))
    return rho, v, _eos.S_of_sigma(Sigma, params)


def conserved_from_primitive(rho, v, S, params: EosParams):
    a2 = params.a2
    n = _eos.number_density(rho, S, params)
    W = 1.0 / ((1.0 - v) * (1.0 + v))
    U1 = n * np.sqrt(W)
    U2 = (1.0 + a2) * rho * W * v
    U3 = (1.0 + a2) * rho * W * v * v + rho
    return U1, U2, U3


def flux_from_primitive(rho, v, S, params: EosParams):
    a2 = params.a2
    n = _eos.number_density(rho, S, params)
    W = 1.0 / ((1.0 - v) * (1.0 + v))
    F1 = n * v * np.sqrt(W)
    F2 = (1.0 + a2) * rho * W * v * v + a2 * rho
    F3 = (1.0 + a2) * rho * W * v
    return F1, F2, F3


# --------------------------------------------------------------------------
# state types


@dataclass(frozen=True)
class PrimitiveState:
    rho: float
    v: float
    S: float

    def __post_init__(self):
        if not self.rho > 0:
            raise DomainError(f"rho must be positive, got {self.rho}")
        if not -1.0 < self.v < 1.0:
            raise DomainError(f"|v| must be < 1, got {self.v}")
        if not self.S > 0:
            raise DomainError(f"S must be positive, got {self.S}")

    @property
    def rapidity(self) -> float:
        return math.atanh(self.v)

    def n(self, params: EosParams) -> float:
        return _eos.number_density(self.rho, self.S, params)

    def lorentz(self) -> float:
        return 1.0 / math.sqrt((1.0 - self.v) * (1.0 + self.v))


@dataclass(frozen=True)
class ConservedState:
    U1: float
    U2: float
    U3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.U1, self.U2, self.U3])


@dataclass(frozen=True)
class InvariantState:
    r: float
    s: float
    Sigma: float

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.s, self.Sigma])


class CharField(NamedTuple):
    speed: float
    right: np.ndarray          # eigenvector in (rho, v, S)
    grad_speed: np.ndarray     # gradient of the speed in (rho, v, S)
    nonlinearity: float        # right . grad_speed


# --------------------------------------------------------------------------
# conversions


def to_conserved(p: PrimitiveState, params: EosParams) -> ConservedState:
    return ConservedState(*map(float, conserved_from_primitive(p.rho, p.v, p.S, params)))


def flux(p: PrimitiveState, params: EosParams) -> np.ndarray:
    return np.array([float(x) for x in flux_from_primitive(p.rho, p.v, p.S, params)])


def to_primitive(c: ConservedState, params: EosParams) -> PrimitiveState:
    """Invert the conserved map through the closed-form velocity root.

    With q = U2/U3 the velocity solves a^2 q v^2 - (1+a^2) v + q = 0; the
    physical root is written in rationalised form to avoid cancellation.
    """
    U1, U2, U3 = c.U1, c.U2, c.U3
    if not (U1 > 0 and U3 > 0):
        raise DecodeError(f"U1 and U3 must be positive, got {U1}, {U3}")
    q = U2 / U3
    if not abs(q) < 1.0:
        raise DecodeError(f"|U2/U3| must be < 1 for |v| < 1, got {q}")
    a2 = params.a2
    if abs(q) < 1e-14:
        v = 0.0
    else:
        v = 2.0 * q / ((1.0 + a2) + math.sqrt((1.0 + a2) ** 2 - 4.0 * a2 * q * q))
    W = 1.0 / ((1.0 - v) * (1.0 + v))
    rho = U3 / ((1.0 + a2) * W * v * v + 1.0)
    n = U1 / math.sqrt(W)
    try:
        S = _eos.entropy_from_rho_n(rho, n, params)
    except (DomainError, _eos.RangeError) as exc:
        raise DecodeError(str(exc)) from exc
    return PrimitiveState(rho, v, float(S))


def to_invariants(p: PrimitiveState, params: EosParams) -> InvariantState:
    r, s, Sig = invariants_from_primitive(p.rho, p.v, p.S, params)
    return InvariantState(float(r), float(s), float(Sig))


def from_invariants(i: InvariantState, params: EosParams) -> PrimitiveState:
    rho, v, S = primitive_from_invariants(i.r, i.s, i.Sigma, params)
    return PrimitiveState(float(rho), float(v), float(S))


# --------------------------------------------------------------------------
# eigen-structure


def char_speeds(p: PrimitiveState, params: EosParams) -> tuple[float, float, float]:
    a = params.a
    v = p.v
    return (v - a) / (1.0 - v * a), v, (v + a) / (1.0 + v * a)


def char_fields(p: PrimitiveState, params: EosParams) -> list[CharField]:
    a, a2 = params.a, params.a2
    rho, v = p.rho, p.v
    lam1, lam2, lam3 = char_speeds(p, params)
    c = (a2 + 1.0) * rho / (a * (1.0 - v * v))
    R1 = np.array([-c, 1.0, 0.0])
    R2 = np.array([0.0, 0.0, 1.0])
    R3 = np.array([c, 1.0, 0.0])
    g1 = np.array([0.0, (1.0 - a2) / (1.0 - a * v) ** 2, 0.0])
    g2 = np.array([0.0, 1.0, 0.0])
    g3 = np.array([0.0, (1.0 - a2) / (1.0 + a * v) ** 2, 0.0])
    return [CharField(lam1, R1, g1, float(R1 @ g1)),
            CharField(lam2, R2, g2, float(R2 @ g2)),
            CharField(lam3, R3, g3, float(R3 @ g3))]


def jacobian_det(p: PrimitiveState, params: EosParams) -> float:
    """|det d(U1, U2, U3) / d(rho, v, S)| = n^2 T (1 - a^2 v^2) / (1 - v^2)**(5/2).

    The Lorentz factor carried by U1 = n W contributes the extra half power.
    """
    n = p.n(params)
    T = _eos.temperature(n, p.S, params)
    v = p.v
    return float(n * n * T * (1.0 - params.a2 * v * v) / (1.0 - v * v) ** 2.5)
