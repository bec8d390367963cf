"""Pure-numpy update kernels (fallback backend).

Mirror of the compiled kernels in ``_fused.pyx``.  Results may differ from
the compiled backend in the last few ulps (different summation order), but
each backend is deterministic on its own.
"""

import numpy as np


def sofim_update(w, m, g, beta, bias_denom, eta, rho):
    """Fused moment update, bias correction, preconditioned step.

    Mutates ``m`` and ``w`` in place; returns the squared norm of the
    bias-corrected moment.
    """
    m *= beta
    m += (1.0 - beta) * g
    m_hat = m / bias_denom
    sq = float(np.dot(m_hat, m_hat))
    w -= (eta / (rho + sq)) * m_hat
    return sq


def sgd_momentum_update(w, v, g, lr, momentum, weight_decay):
    """One momentum-SGD step with coupled weight decay, in place."""
    v *= momentum
    v += g
    if weight_decay != 0.0:
        v += weight_decay * w
    w -= lr * v


def adam_update(w, m, v, g, lr, beta1, beta2, bc1, bc2, eps):
    """One Adam step, in place.  ``bc1``/``bc2`` are 1 - beta**t factors."""
    m *= beta1
    m += (1.0 - beta1) * g
    v *= beta2
    v += (1.0 - beta2) * np.square(g)
    w -= lr * (m / bc1) / (np.sqrt(v / bc2) + eps)
