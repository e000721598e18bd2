import os
import subprocess
import sys

import numpy as np
import pytest

from hyperell import kernels
from hyperell._accel import HAVE_NUMBA
from hyperell.field import extension, gf_q

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba disabled or missing")


def _naive_eval(F, row, x):
    acc = 0
    for c in reversed(row):
        acc = F.add(F.mul(acc, int(x)), int(c))
    return acc


@pytest.mark.parametrize("q", [2, 3, 4, 9])
def test_numpy_horner_matches_scalar_arithmetic(q):
    F = gf_q(q)
    rng = np.random.default_rng(q)
    coeffs = rng.integers(0, q, size=(30, 5))
    out = kernels.horner(coeffs, np.arange(q), F.tables(), backend="numpy")
    for i, row in enumerate(coeffs):
        assert [int(v) for v in out[i]] == [_naive_eval(F, row, x) for x in range(q)]


@needs_numba
@pytest.mark.parametrize("q", [2, 3, 4, 5, 8, 9, 16, 25])
def test_backends_agree(q):
    F = gf_q(q)
    tab = F.tables()
    rng = np.random.default_rng(7 * q)
    a = rng.integers(0, q, size=(200, 6))
    b = rng.integers(0, q, size=(200, 3))
    pts = np.arange(q)
    assert np.array_equal(kernels.horner(a, pts, tab, backend="numba"), kernels.horner(a, pts, tab, backend="numpy"))
    assert np.array_equal(kernels.poly_mul_rows(a, b, tab, backend="numba"),
                          kernels.poly_mul_rows(a, b, tab, backend="numpy"))


@needs_numba
@pytest.mark.parametrize("q", [2, 4, 8])
def test_tau_backends_agree(q):
    big, _ = extension(gf_q(q), 1)
    rng = np.random.default_rng(q)
    hrow = rng.integers(0, q, size=q).astype(np.int32)
    fv = rng.integers(0, q, size=(100, q)).astype(np.int32)
    args = (hrow, fv, big.log, big.exp, big.trace, big.qm1)
    nb = kernels.tau_stats(*args, backend="numba")
    npy = kernels.tau_stats(*args, backend="numpy")
    for x, y in zip(nb, npy):
        assert np.array_equal(x, y)


def test_env_flag_forces_numpy():
    env = dict(os.environ, HYPERELL_DISABLE_NUMBA="1")
    code = "from hyperell._accel import backend; print(backend())"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_numba_request_fails_when_disabled():
    env = dict(os.environ, HYPERELL_DISABLE_NUMBA="1")
    code = ("import numpy as np\nfrom hyperell import kernels\nfrom hyperell.field import gf_q\n"
            "try:\n    kernels.horner(np.zeros((1, 2)), np.arange(3), gf_q(3).tables(), backend='numba')\n"
            "except RuntimeError:\n    print('refused')\n")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "refused"
