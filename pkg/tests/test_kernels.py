"""Parity between the compiled kernel backend and the numpy fallback.

Both backends must implement identical update semantics; the compiled
path is an optimization, never a behavioral fork.
"""

import os
import subprocess
import sys

import numpy as np
import pytest
from numpy.testing import assert_allclose

from sofim import _kernels
from sofim._kernels import _numpy as numpy_kernels

fused = pytest.importorskip(
    "sofim._kernels._fused", reason="compiled extension not built"
)


def random_buffers(rng, d):
    return rng.standard_normal(d), rng.standard_normal(d), rng.standard_normal(d)


class TestBackendParity:
    @pytest.mark.parametrize("d", [1, 2, 17, 1024])
    def test_sofim_update(self, d):
        """Both backends produce the same w, m and squared norm."""
        rng = np.random.default_rng(42)
        for step in range(1, 6):
            w, m, g = random_buffers(rng, d)
            beta, eta, rho = 0.9, 0.1, 0.5
            bias_denom = 1.0 - beta**step
            w_c, m_c = w.copy(), m.copy()
            w_n, m_n = w.copy(), m.copy()
            sq_c = fused.sofim_update(w_c, m_c, g, beta, bias_denom, eta, rho)
            sq_n = numpy_kernels.sofim_update(w_n, m_n, g, beta, bias_denom, eta, rho)
            assert_allclose(w_c, w_n, rtol=1e-13, atol=1e-15)
            assert_allclose(m_c, m_n, rtol=1e-13, atol=1e-15)
            assert sq_c == pytest.approx(sq_n, rel=1e-13)

    @pytest.mark.parametrize("weight_decay", [0.0, 1e-6, 0.1])
    def test_sgd_momentum_update(self, weight_decay):
        """SGD kernels agree for all weight-decay settings."""
        rng = np.random.default_rng(7)
        w, v, g = random_buffers(rng, 33)
        w_c, v_c = w.copy(), v.copy()
        w_n, v_n = w.copy(), v.copy()
        fused.sgd_momentum_update(w_c, v_c, g, 0.05, 0.9, weight_decay)
        numpy_kernels.sgd_momentum_update(w_n, v_n, g, 0.05, 0.9, weight_decay)
        assert_allclose(w_c, w_n, rtol=1e-14, atol=1e-16)
        assert_allclose(v_c, v_n, rtol=1e-14, atol=1e-16)

    def test_adam_update(self):
        """Adam kernels agree over several steps."""
        rng = np.random.default_rng(3)
        d = 64
        w_c = rng.standard_normal(d)
        w_n = w_c.copy()
        m_c = np.zeros(d)
        v_c = np.zeros(d)
        m_n = np.zeros(d)
        v_n = np.zeros(d)
        for t in range(1, 10):
            g = rng.standard_normal(d)
            bc1 = 1.0 - 0.9**t
            bc2 = 1.0 - 0.999**t
            fused.adam_update(w_c, m_c, v_c, g, 0.01, 0.9, 0.999, bc1, bc2, 1e-8)
            numpy_kernels.adam_update(w_n, m_n, v_n, g, 0.01, 0.9, 0.999, bc1, bc2, 1e-8)
        assert_allclose(w_c, w_n, rtol=1e-13, atol=1e-15)
        assert_allclose(m_c, m_n, rtol=1e-13, atol=1e-15)
        assert_allclose(v_c, v_n, rtol=1e-13, atol=1e-15)

    def test_sofim_update_returns_squared_norm(self):
        """The scalar returned by sofim_update is ||m_hat||^2."""
        rng = np.random.default_rng(11)
        w, m, g = random_buffers(rng, 50)
        beta, bias_denom = 0.9, 0.1
        m_after = beta * m + (1 - beta) * g
        expected = float(np.dot(m_after / bias_denom, m_after / bias_denom))
        sq = fused.sofim_update(w.copy(), m.copy(), g, beta, bias_denom, 0.1, 0.5)
        assert sq == pytest.approx(expected, rel=1e-12)


class TestBackendSelection:
    def test_backend_constant(self):
        """The active backend is reported as cython or numpy."""
        assert _kernels.BACKEND in ("cython", "numpy")

    def _import_backend(self, value):
        env = dict(os.environ, SOFIM_BACKEND=value)
        return subprocess.run(
            [sys.executable, "-c", "import sofim; print(sofim.KERNEL_BACKEND)"],
            env=env, capture_output=True, text=True, timeout=120,
        )

    def test_env_var_forces_numpy(self):
        """SOFIM_BACKEND=numpy selects the fallback in a fresh interpreter."""
        proc = self._import_backend("numpy")
        assert proc.returncode == 0, proc.stderr
        assert proc.stdout.strip() == "numpy"

    def test_env_var_requests_cython(self):
        """SOFIM_BACKEND=cython selects the extension (built in this env)."""
        proc = self._import_backend("cython")
        assert proc.returncode == 0, proc.stderr
        assert proc.stdout.strip() == "cython"

    def test_unknown_backend_rejected(self):
        """An unrecognized SOFIM_BACKEND value fails the import loudly."""
        proc = self._import_backend("fortran")
        assert proc.returncode != 0
        assert "SOFIM_BACKEND" in proc.stderr
