"""Hot kernels: batched exact Riemann solves and fan sampling in (r, s, Sigma).

States are carried as Riemann-invariant triples.  With k = a / (1 + a**2),

    rapidity phi = (r + s) / 2,      ln rho = (s - r) / (2 k).

Wave curves are translation invariant in these coordinates, so every kernel
only needs the shock amplitude sigma = |Delta ln rho| and two scalar laws:

* ``rapidity_jump(sigma)``: the drop in rapidity across a shock,
* ``sigma_jump(sigma)``: the rise of Sigma from the thin to the dense side.

Two implementations are provided and selected by :mod:`ultrarel._accel`:
scalar loops compiled with numba, and a vectorised numpy fallback.  Both must
agree to round-off; the test-suite runs them against each other.
"""
import math

import numpy as np

from ._accel import USE_NUMBA, njit

ZERO_STRENGTH = 1e-13
_MAX_ITER = 100

# below this amplitude the closed-form Sigma jump cancels to O(sigma**3) and is
# replaced by Gauss-Legendre quadrature of its (stable) derivative
_SIGMA_QUAD = 1.0
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


# --------------------------------------------------------------------------
# scalar laws (numba-compiled when available; also valid on numpy arrays when not)


@njit
def rapidity_jump(sig, a, a2):
    t = math.exp(-sig)
    omt = -math.expm1(-sig)
    du = math.sqrt((a2 + t) * (1.0 + a2 * t))
    x = a * omt / du
    if x < 0.5:
        return math.atanh(x)
    # atanh loses digits as x -> 1; this form is exact for all sig >= 0
    return 0.5 * sig + math.log((du + a * omt) / (1.0 + a2))


@njit
def rapidity_jump_deriv(sig, a, a2):
    t = math.exp(-sig)
    du = math.sqrt((a2 + t) * (1.0 + a2 * t))
    num = a * t - t * (1.0 + 2.0 * a2 * t + a2 * a2) / (2.0 * du)
    return 0.5 + num / (du - a * math.expm1(-sig))


@njit
def _sigma_jump_quad(sig, gamma):
    a2 = gamma - 1.0
    h = 0.5 * sig
    acc = 0.0
    for i in range(_GL_X.size):
        u = h * (_GL_X[i] + 1.0)
        t = math.exp(-u)
        omt = -math.expm1(-u)
        acc += _GL_W[i] * omt * omt / ((t + a2) * (1.0 + a2 * t))
    return 0.5 * (2.0 - gamma) * a2 * h * acc


@njit
def sigma_jump(sig, gamma):
    if sig < _SIGMA_QUAD:
        return _sigma_jump_quad(sig, gamma)
    a2 = gamma - 1.0
    t = math.exp(-sig)
    if sig < 30.0:
        lg = math.log1p(a2 / t) - math.log1p(a2 * t)
    else:
        lg = sig + math.log(a2 + t) - math.log1p(a2 * t)
    return (1.0 - gamma) * sig + 0.5 * gamma * lg


@njit
def shock_speed_rest(sig, a2, x, family_one):
    """Shock speed in the frame where the left state is at rest.

    ``x`` is the velocity of the right state in that frame, taken positive.
    """
    g2 = 1.0 / ((1.0 - x) * (1.0 + x))
    em = math.expm1(sig)
    if family_one:
        u = math.exp(sig)
        return -(1.0 + a2) * u * g2 * x / ((1.0 + a2) * u * g2 * x * x + em)
    return -(1.0 + a2) * g2 * x / ((1.0 + a2) * g2 * x * x - em)


# --------------------------------------------------------------------------
# numba path


@njit
def _phi_diff(ell, phiL, ellL, sL, phiR, ellR, rR, a, a2, k):
    """f(ell) = phi reached from the left minus phi reached from the right, and f'."""
    if ell <= ellL:
        p1 = sL - k * ell
        d1 = -k
    else:
        p1 = phiL - rapidity_jump(ell - ellL, a, a2)
        d1 = -rapidity_jump_deriv(ell - ellL, a, a2)
    if ell <= ellR:
        p3 = rR + k * ell
        d3 = k
    else:
        p3 = phiR + rapidity_jump(ell - ellR, a, a2)
        d3 = rapidity_jump_deriv(ell - ellR, a, a2)
    return p1 - p3, d1 - d3, p1


@njit
def _solve_one(rL, sL, SL, rR, sR, SR, a, a2, k, gamma, out):
    phiL = 0.5 * (rL + sL)
    phiR = 0.5 * (rR + sR)
    ellL = (sL - rL) / (2.0 * k)
    ellR = (sR - rR) / (2.0 * k)

    if rL == rR and sL == sR:
        ell = ellL
        phiM = phiL
    else:
        # two-rarefaction guess, then bracket from slope bounds -1 <= f' <= -2k
        ell0 = (sL - rR) / (2.0 * k)
        f0, _, _ = _phi_diff(ell0, phiL, ellL, sL, phiR, ellR, rR, a, a2, k)
        if f0 >= 0.0:
            lo = ell0 + f0
            hi = ell0 + f0 / (2.0 * k)
        else:
            lo = ell0 + f0 / (2.0 * k)
            hi = ell0 + f0
        ell = ell0 if f0 == 0.0 else 0.5 * (lo + hi)
        phiM = 0.0
        for _ in range(_MAX_ITER):
            f, df, p1 = _phi_diff(ell, phiL, ellL, sL, phiR, ellR, rR, a, a2, k)
            phiM = p1
            if f == 0.0:
                break
            if f > 0.0:
                lo = ell
            else:
                hi = ell
            step = -f / df
            new = ell + step
            if not (lo < new < hi):
                new = 0.5 * (lo + hi)
            if abs(new - ell) <= 4.5e-16 * (1.0 + abs(ell)) or hi - lo <= 4.5e-16 * (1.0 + abs(ell)):
                ell = new
                f, df, phiM = _phi_diff(ell, phiL, ellL, sL, phiR, ellR, rR, a, a2, k)
                break
            ell = new

    rM = phiM - k * ell
    sM = phiM + k * ell
    eps1 = rM - rL
    eps3 = sR - sM
    sig1 = ell - ellL
    sig3 = ell - ellR
    if abs(eps1) < ZERO_STRENGTH:
        eps1 = 0.0
    if abs(eps3) < ZERO_STRENGTH:
        eps3 = 0.0
    if eps1 >= 0.0:
        sig1 = 0.0
    if eps3 >= 0.0:
        sig3 = 0.0
    d1 = sigma_jump(sig1, gamma) if sig1 > 0.0 else 0.0
    d3 = sigma_jump(sig3, gamma) if sig3 > 0.0 else 0.0
    SM = SL + d1
    SMp = SR + d3
    eps2 = SMp - SM
    if abs(eps2) < ZERO_STRENGTH:
        eps2 = 0.0

    phia = math.atanh(a)
    vM = math.tanh(phiM)
    if sig1 > 0.0:
        x = math.tanh(rapidity_jump(sig1, a, a2))
        s0 = shock_speed_rest(sig1, a2, x, True)
        w1a = math.tanh(math.atanh(s0) + phiL)
        w1b = w1a
    else:
        w1a = math.tanh(phiL - phia)
        w1b = math.tanh(phiM - phia)
    if sig3 > 0.0:
        x = math.tanh(rapidity_jump(sig3, a, a2))
        s0 = shock_speed_rest(sig3, a2, x, False)
        w3a = math.tanh(math.atanh(s0) + phiM)
        w3b = w3a
    else:
        w3a = math.tanh(phiM + phia)
        w3b = math.tanh(phiR + phia)

    out[0] = rM
    out[1] = sM
    out[2] = SM
    out[3] = SMp
    out[4] = eps1
    out[5] = eps2
    out[6] = eps3
    out[7] = sig1
    out[8] = sig3
    out[9] = d1
    out[10] = d3
    out[11] = w1a
    out[12] = w1b
    out[13] = vM
    out[14] = w3a
    out[15] = w3b


NFIELDS = 16
FIELDS = ("rM", "sM", "SigM", "SigMp", "eps1", "eps2", "eps3", "sig1", "sig3",
          "d1", "d3", "w1a", "w1b", "vM", "w3a", "w3b")


@njit
def _solve_batch_nb(rL, sL, SL, rR, sR, SR, a, a2, k, gamma):
    m = rL.shape[0]
    out = np.empty((NFIELDS, m))
    buf = np.empty(NFIELDS)
    for i in range(m):
        _solve_one(rL[i], sL[i], SL[i], rR[i], sR[i], SR[i], a, a2, k, gamma, buf)
        for j in range(NFIELDS):
            out[j, i] = buf[j]
    return out


@njit
def _sample_batch_nb(rL, sL, SL, rR, sR, SR, sol, xi, a):
    m = rL.shape[0]
    res = np.empty((3, m))
    phia = math.atanh(a)
    for i in range(m):
        x = xi[i]
        w1a = sol[11, i]
        w1b = sol[12, i]
        vM = sol[13, i]
        w3a = sol[14, i]
        w3b = sol[15, i]
        if x < w1a:
            r, s, S = rL[i], sL[i], SL[i]
        elif x < w1b:
            phi = math.atanh(x) + phia
            r, s, S = 2.0 * phi - sL[i], sL[i], SL[i]
        elif x < vM:
            r, s, S = sol[0, i], sol[1, i], sol[2, i]
        elif x < w3a:
            r, s, S = sol[0, i], sol[1, i], sol[3, i]
        elif x < w3b:
            phi = math.atanh(x) - phia
            r, s, S = sol[0, i], 2.0 * phi - sol[0, i], sol[3, i]
        else:
            r, s, S = rR[i], sR[i], SR[i]
        res[0, i] = r
        res[1, i] = s
        res[2, i] = S
    return res


# --------------------------------------------------------------------------
# numpy path


def _rapidity_jump_np(sig, a, a2):
    t = np.exp(-sig)
    omt = -np.expm1(-sig)
    du = np.sqrt((a2 + t) * (1.0 + a2 * t))
    x = a * omt / du
    with np.errstate(divide="ignore", invalid="ignore"):
        small = np.arctanh(np.minimum(x, 0.5))
        large = 0.5 * sig + np.log((du + a * omt) / (1.0 + a2))
    return np.where(x < 0.5, small, large)


def _rapidity_jump_deriv_np(sig, a, a2):
    t = np.exp(-sig)
    du = np.sqrt((a2 + t) * (1.0 + a2 * t))
    num = a * t - t * (1.0 + 2.0 * a2 * t + a2 * a2) / (2.0 * du)
    return 0.5 + num / (du - a * np.expm1(-sig))


def _sigma_jump_np(sig, gamma):
    a2 = gamma - 1.0
    sig = np.asarray(sig, dtype=float)
    t = np.exp(-sig)
    with np.errstate(over="ignore", divide="ignore"):
        near = np.log1p(a2 / t) - np.log1p(a2 * t)
    far = sig + np.log(a2 + t) - np.log1p(a2 * t)
    lg = np.where(sig < 30.0, near, far)
    closed = (1.0 - gamma) * sig + 0.5 * gamma * lg
    h = 0.5 * np.minimum(sig, _SIGMA_QUAD)[..., None]
    u = h * (_GL_X + 1.0)
    tu = np.exp(-u)
    omt = -np.expm1(-u)
    acc = (_GL_W * omt * omt / ((tu + a2) * (1.0 + a2 * tu))).sum(axis=-1)
    quad = 0.5 * (2.0 - gamma) * a2 * h[..., 0] * acc
    return np.where(sig < _SIGMA_QUAD, quad, closed)


def _phi_diff_np(ell, phiL, ellL, sL, phiR, ellR, rR, a, a2, k):
    raref1 = ell <= ellL
    g1 = np.where(raref1, 0.0, ell - ellL)
    p1 = np.where(raref1, sL - k * ell, phiL - _rapidity_jump_np(g1, a, a2))
    d1 = np.where(raref1, -k, -_rapidity_jump_deriv_np(g1, a, a2))
    raref3 = ell <= ellR
    g3 = np.where(raref3, 0.0, ell - ellR)
    p3 = np.where(raref3, rR + k * ell, phiR + _rapidity_jump_np(g3, a, a2))
    d3 = np.where(raref3, k, _rapidity_jump_deriv_np(g3, a, a2))
    return p1 - p3, d1 - d3, p1


def _solve_batch_np(rL, sL, SL, rR, sR, SR, a, a2, k, gamma):
    phiL = 0.5 * (rL + sL)
    phiR = 0.5 * (rR + sR)
    ellL = (sL - rL) / (2.0 * k)
    ellR = (sR - rR) / (2.0 * k)
    same = (rL == rR) & (sL == sR)

    ell0 = (sL - rR) / (2.0 * k)
    f0, _, _ = _phi_diff_np(ell0, phiL, ellL, sL, phiR, ellR, rR, a, a2, k)
    lo = np.where(f0 >= 0.0, ell0 + f0, ell0 + f0 / (2.0 * k))
    hi = np.where(f0 >= 0.0, ell0 + f0 / (2.0 * k), ell0 + f0)
    ell = np.where(f0 == 0.0, ell0, 0.5 * (lo + hi))
    ell = np.where(same, ellL, ell)
    active = ~same & (f0 != 0.0)
    for _ in range(_MAX_ITER):
        if not active.any():
            break
        f, df, _ = _phi_diff_np(ell, phiL, ellL, sL, phiR, ellR, rR, a, a2, k)
        done = f == 0.0
        lo = np.where(active & (f > 0.0), ell, lo)
        hi = np.where(active & (f < 0.0), ell, hi)
        new = ell - f / df
        new = np.where((lo < new) & (new < hi), new, 0.5 * (lo + hi))
        tol = 4.5e-16 * (1.0 + np.abs(ell))
        conv = (np.abs(new - ell) <= tol) | (hi - lo <= tol)
        ell = np.where(active & ~done, new, ell)
        active = active & ~done & ~conv
    _, _, phiM = _phi_diff_np(ell, phiL, ellL, sL, phiR, ellR, rR, a, a2, k)
    phiM = np.where(same, phiL, phiM)

    rM = phiM - k * ell
    sM = phiM + k * ell
    eps1 = rM - rL
    eps3 = sR - sM
    eps1 = np.where(np.abs(eps1) < ZERO_STRENGTH, 0.0, eps1)
    eps3 = np.where(np.abs(eps3) < ZERO_STRENGTH, 0.0, eps3)
    sig1 = np.where(eps1 >= 0.0, 0.0, ell - ellL)
    sig3 = np.where(eps3 >= 0.0, 0.0, ell - ellR)
    d1 = np.where(sig1 > 0.0, _sigma_jump_np(sig1, gamma), 0.0)
    d3 = np.where(sig3 > 0.0, _sigma_jump_np(sig3, gamma), 0.0)
    SM = SL + d1
    SMp = SR + d3
    eps2 = SMp - SM
    eps2 = np.where(np.abs(eps2) < ZERO_STRENGTH, 0.0, eps2)

    phia = math.atanh(a)
    vM = np.tanh(phiM)

    def shock_speed(sig, base_phi, family_one):
        x = np.tanh(_rapidity_jump_np(sig, a, a2))
        g2 = 1.0 / ((1.0 - x) * (1.0 + x))
        em = np.expm1(sig)
        if family_one:
            u = np.exp(sig)
            s0 = -(1.0 + a2) * u * g2 * x / ((1.0 + a2) * u * g2 * x * x + em)
        else:
            s0 = -(1.0 + a2) * g2 * x / ((1.0 + a2) * g2 * x * x - em)
        return np.tanh(np.arctanh(s0) + base_phi)

    with np.errstate(invalid="ignore", divide="ignore"):
        s1 = shock_speed(sig1, phiL, True)
        s3 = shock_speed(sig3, phiM, False)
    shock1 = sig1 > 0.0
    shock3 = sig3 > 0.0
    w1a = np.where(shock1, s1, np.tanh(phiL - phia))
    w1b = np.where(shock1, s1, np.tanh(phiM - phia))
    w3a = np.where(shock3, s3, np.tanh(phiM + phia))
    w3b = np.where(shock3, s3, np.tanh(phiR + phia))
    return np.stack([rM, sM, SM, SMp, eps1, eps2, eps3, sig1, sig3, d1, d3,
                     w1a, w1b, vM, w3a, w3b])


def _sample_batch_np(rL, sL, SL, rR, sR, SR, sol, xi, a):
    phia = math.atanh(a)
    w1a, w1b, vM, w3a, w3b = sol[11], sol[12], sol[13], sol[14], sol[15]
    rM, sM, SM, SMp = sol[0], sol[1], sol[2], sol[3]
    with np.errstate(invalid="ignore", divide="ignore"):
        phi = np.arctanh(np.clip(xi, -1.0, 1.0))
    conds = [xi < w1a, xi < w1b, xi < vM, xi < w3a, xi < w3b]
    r = np.select(conds, [rL, 2.0 * (phi + phia) - sL, rM, rM, rM], rR)
    s = np.select(conds, [sL, sL, sM, sM, 2.0 * (phi - phia) - rM], sR)
    S = np.select(conds, [SL, SL, SM, SMp, SMp], SR)
    return np.stack([r, s, S])


# --------------------------------------------------------------------------
# dispatch


def solve_batch(rL, sL, SL, rR, sR, SR, a, gamma, use_numba=None):
    """Solve Riemann problems for arrays of left/right invariant states.

    Returns an array of shape (16, m); row names are listed in ``FIELDS``.
    """
    args = [np.ascontiguousarray(x, dtype=np.float64) for x in (rL, sL, SL, rR, sR, SR)]
    a = float(a)
    a2 = a * a
    k = a / (1.0 + a2)
    if USE_NUMBA if use_numba is None else use_numba:
        return _solve_batch_nb(*args, a, a2, k, float(gamma))
    return _solve_batch_np(*args, a, a2, k, float(gamma))


def sample_batch(rL, sL, SL, rR, sR, SR, sol, xi, a, use_numba=None):
    """Sample solved fans at similarity coordinates ``xi``; returns (3, m) of (r, s, Sigma)."""
    args = [np.ascontiguousarray(x, dtype=np.float64) for x in (rL, sL, SL, rR, sR, SR)]
    xi = np.broadcast_to(np.asarray(xi, dtype=np.float64), args[0].shape)
    xi = np.ascontiguousarray(xi)
    if USE_NUMBA if use_numba is None else use_numba:
        return _sample_batch_nb(*args, np.ascontiguousarray(sol), xi, float(a))
    return _sample_batch_np(*args, sol, xi, float(a))
