import json
import os
import subprocess
import sys

import numpy as np
import pytest

from ultrarel import kernels
from ultrarel._accel import HAVE_NUMBA


def random_invariants(m, params, seed=0):
    rng = np.random.default_rng(seed)
    k = params.a / (1 + params.a2)
    out = []
    for _ in range(2):
        lnrho = rng.uniform(np.log(0.1), np.log(10.0), m)
        phi = np.arctanh(rng.uniform(-0.95, 0.95, m))
        out += [phi - k * lnrho, phi + k * lnrho, rng.uniform(0.5, 3.0, m)]
    return out


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")
def test_numba_and_numpy_agree(params):
    data = random_invariants(5000, params)
    # include identical pairs and pure contacts
    for i in range(3):
        data[i + 3][:50] = data[i][:50]
    data[3][50:100], data[4][50:100] = data[0][50:100], data[1][50:100]
    a, g = params.a, params.gamma
    s_nb = kernels.solve_batch(*data, a, g, use_numba=True)
    s_np = kernels.solve_batch(*data, a, g, use_numba=False)
    assert np.all(np.isfinite(s_nb))
    assert np.max(np.abs(s_nb - s_np)) < 1e-12
    xi = np.linspace(-0.999, 0.999, 5000)
    out_nb = kernels.sample_batch(*data, s_nb, xi, a, use_numba=True)
    out_np = kernels.sample_batch(*data, s_nb, xi, a, use_numba=False)
    assert np.max(np.abs(out_nb - out_np)) < 1e-12


def test_scalar_laws_vectorised(params):
    sig = np.concatenate([[0.0], np.geomspace(1e-8, 700, 300)])
    a, a2, g = params.a, params.a2, params.gamma
    scalar = np.array([[kernels.rapidity_jump(s, a, a2), kernels.rapidity_jump_deriv(s, a, a2),
                        kernels.sigma_jump(s, g)] for s in sig])
    vector = np.stack([kernels._rapidity_jump_np(sig, a, a2),
                       kernels._rapidity_jump_deriv_np(sig, a, a2),
                       kernels._sigma_jump_np(sig, g)], axis=1)
    assert np.all(np.isfinite(vector))
    assert np.allclose(scalar, vector, rtol=1e-14, atol=0)


def test_rapidity_jump_derivative(params):
    h = 1e-6
    for s in (0.01, 0.5, 3.0, 20.0):
        fd = (kernels.rapidity_jump(s + h, params.a, params.a2)
              - kernels.rapidity_jump(s - h, params.a, params.a2)) / (2 * h)
        assert kernels.rapidity_jump_deriv(s, params.a, params.a2) == pytest.approx(fd, rel=1e-7)


def test_fields_layout():
    assert len(kernels.FIELDS) == kernels.NFIELDS == 16


def test_env_flag_selects_numpy_path():
    code = ("import json, ultrarel._accel as A, ultrarel.kernels as K; "
            "print(json.dumps([A.USE_NUMBA, K.sigma_jump(1.0, 4/3)]))")
    env = dict(os.environ, ULTRAREL_NO_NUMBA="1")
    res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True)
    use, val = json.loads(res.stdout)
    assert use is False
    assert val == pytest.approx(kernels.sigma_jump(1.0, 4 / 3), rel=1e-15)
