"""Equation-of-state family eps(n, S) = A(S) n**(gamma - 1) in the ultra-relativistic closure.

With rho = n * eps the pressure reduces to p = (gamma - 1) rho = a**2 rho, so the
sound speed a = sqrt(gamma - 1) is constant.  The entropy enters the dynamics
only through the coordinate Sigma = ln A(S).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

#: Stefan-Boltzmann constant used as the default radiation constant (dimensionless here).
A_RAD_DEFAULT = 7.56e-15


class DomainError(ValueError):
    """An argument lies outside the physical domain (rho > 0, S > 0, |v| < 1)."""


class RangeError(ValueError):
    """An inverse was requested for a value outside the range of the forward map."""


@dataclass(frozen=True)
class Polytropic:
    R: float = 1.0

    def __post_init__(self):
        if not self.R > 0:
            raise DomainError(f"gas constant must be positive, got {self.R}")


@dataclass(frozen=True)
class Radiation:
    a_R: float = A_RAD_DEFAULT

    def __post_init__(self):
        if not self.a_R > 0:
            raise DomainError(f"radiation constant must be positive, got {self.a_R}")


@dataclass(frozen=True)
class CustomTabulated:
    """A(S) given by a strictly increasing table, interpolated with monotone cubics."""

    S: tuple
    A: tuple
    _interp: PchipInterpolator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        S = np.asarray(self.S, dtype=float)
        A = np.asarray(self.A, dtype=float)
        if S.ndim != 1 or S.shape != A.shape or S.size < 2:
            raise DomainError("tabulated A(S) needs two equal-length 1-D columns with >= 2 rows")
        if np.any(S <= 0) or np.any(A <= 0):
            raise DomainError("tabulated S and A values must be positive")
        if np.any(np.diff(S) <= 0) or np.any(np.diff(A) <= 0):
            raise DomainError("tabulated S and A must be strictly increasing")
        object.__setattr__(self, "S", tuple(S.tolist()))
        object.__setattr__(self, "A", tuple(A.tolist()))
        object.__setattr__(self, "_interp", PchipInterpolator(S, A, extrapolate=False))


Family = Union[Polytropic, Radiation, CustomTabulated]


@dataclass(frozen=True)
class EosParams:
    gamma: float = 4.0 / 3.0
    family: Family = field(default_factory=Polytropic)

    def __post_init__(self):
        if not (1.0 < self.gamma < 2.0):
            raise DomainError(f"gamma must satisfy 1 < gamma < 2, got {self.gamma}")

    @property
    def a(self) -> float:
        return math.sqrt(self.gamma - 1.0)

    @property
    def a2(self) -> float:
        return self.gamma - 1.0


def _check_positive(x, name):
    if type(x) is float:  # scalar fast path; numpy dominates the cost of scalar calls
        if not x > 0:
            raise DomainError(f"{name} must be positive")
        return x
    arr = np.asarray(x, dtype=float)
    if not np.all(arr > 0):
        raise DomainError(f"{name} must be positive")
    return arr


def _out(arr):
    if type(arr) is float:
        return arr
    return float(arr) if np.ndim(arr) == 0 else arr


def sound_speed(params: EosParams) -> float:
    return math.sqrt(params.gamma - 1.0)


def pressure(rho, params: EosParams):
    rho = _check_positive(rho, "rho")
    return _out((params.gamma - 1.0) * rho)


def A_of_S(S, params: EosParams):
    S = _check_positive(S, "S")
    fam = params.family
    if isinstance(fam, Polytropic):
        return _out(np.exp((params.gamma - 1.0) / fam.R * S))
    if isinstance(fam, Radiation):
        return _out(fam.a_R * (S / (params.gamma * fam.a_R)) ** params.gamma)
    A = fam._interp(S)
    if np.any(np.isnan(A)):
        raise RangeError("S outside the tabulated range")
    return _out(A)


def dA_dS(S, params: EosParams):
    S = _check_positive(S, "S")
    fam = params.family
    if isinstance(fam, Polytropic):
        c = (params.gamma - 1.0) / fam.R
        return _out(c * np.exp(c * S))
    if isinstance(fam, Radiation):
        return _out(params.gamma * fam.a_R * (S / (params.gamma * fam.a_R)) ** params.gamma / S)
    dA = fam._interp.derivative()(S)
    if np.any(np.isnan(dA)):
        raise RangeError("S outside the tabulated range")
    return _out(dA)


def sigma_of_S(S, params: EosParams):
    """Sigma = ln A(S)."""
    S = _check_positive(S, "S")
    fam = params.family
    g = params.gamma
    if isinstance(fam, Polytropic):
        return _out((g - 1.0) / fam.R * S)
    if isinstance(fam, Radiation):
        return _out(g * np.log(S / (g * fam.a_R ** ((g - 1.0) / g))))
    return _out(np.log(A_of_S(S, params)))


def sigma_range(params: EosParams) -> tuple[float, float]:
    """Open interval of attainable Sigma values (S > 0)."""
    fam = params.family
    if isinstance(fam, Polytropic):
        return 0.0, math.inf
    if isinstance(fam, Radiation):
        return -math.inf, math.inf
    return math.log(fam.A[0]), math.log(fam.A[-1])


def S_of_sigma(sigma, params: EosParams):
    sig = np.asarray(sigma, dtype=float)
    fam = params.family
    g = params.gamma
    lo, hi = sigma_range(params)
    if isinstance(fam, CustomTabulated):
        # table endpoints are attainable
        if np.any(sig < lo) or np.any(sig > hi):
            raise RangeError(f"Sigma outside the tabulated range [{lo}, {hi}]")
    elif np.any(sig <= lo) or np.any(sig >= hi):
        raise RangeError(f"Sigma must lie in ({lo}, {hi}) for S > 0")
    if isinstance(fam, Polytropic):
        return _out(fam.R / (g - 1.0) * sig)
    if isinstance(fam, Radiation):
        return _out(g * fam.a_R ** ((g - 1.0) / g) * np.exp(sig / g))

    S_tab = fam.S

    def invert(target):
        if target == lo:
            return S_tab[0]
        if target == hi:
            return S_tab[-1]
        return brentq(lambda s: math.log(float(fam._interp(s))) - target,
                      S_tab[0], S_tab[-1], xtol=1e-15, rtol=4 * np.finfo(float).eps)

    if sig.ndim == 0:
        return invert(float(sig))
    return np.vectorize(invert, otypes=[float])(sig)


def number_density(rho, S, params: EosParams):
    """n = (rho / A(S))**(1/gamma)."""
    rho = _check_positive(rho, "rho")
    return _out((rho / A_of_S(S, params)) ** (1.0 / params.gamma))


def internal_energy(n, S, params: EosParams):
    n = _check_positive(n, "n")
    return _out(A_of_S(S, params) * n ** (params.gamma - 1.0))


def entropy_from_rho_n(rho, n, params: EosParams):
    """Solve rho / n**gamma = A(S) for S."""
    rho = _check_positive(rho, "rho")
    n = _check_positive(n, "n")
    return S_of_sigma(np.log(rho) - params.gamma * np.log(n), params)


def temperature(n, S, params: EosParams):
    """T = d eps / dS = A'(S) n**(gamma - 1)."""
    n = _check_positive(n, "n")
    return _out(dA_dS(S, params) * n ** (params.gamma - 1.0))
