# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Fused update kernels (compiled backend).

Each kernel performs one optimizer update in-place on contiguous float64
vectors, touching every array once or twice instead of materializing the
intermediate vectors a pure-numpy formulation needs.  Semantics must stay
interchangeable with ``sofim._kernels._numpy``; the two backends are only
allowed to differ by floating-point summation order.
"""

from libc.math cimport sqrt


def sofim_update(double[::1] w, double[::1] m, const double[::1] g,
                 double beta, double bias_denom, double eta, double rho):
    """Fused moment update, bias correction, preconditioned step.

    Updates ``m`` to the new first moment and ``w`` to the new parameters.
    ``bias_denom`` is 1 - beta**t for the step being taken.  Returns the
    squared norm of the bias-corrected moment so the caller can detect
    overflow without an extra pass.
    """
    cdef Py_ssize_t i, n = w.shape[0]
    cdef double one_minus_beta = 1.0 - beta
    cdef double sq = 0.0
    cdef double mi, coef
    for i in range(n):
        mi = beta * m[i] + one_minus_beta * g[i]
        m[i] = mi
        mi /= bias_denom
        sq += mi * mi
    coef = eta / (bias_denom * (rho + sq))
    for i in range(n):
        w[i] -= coef * m[i]
    return sq


def sgd_momentum_update(double[::1] w, double[::1] v, const double[::1] g,
                        double lr, double momentum, double weight_decay):
    """One momentum-SGD step in a single pass: coupled weight decay,
    velocity accumulation, parameter update."""
    cdef Py_ssize_t i, n = w.shape[0]
    cdef double gi
    for i in range(n):
        gi = g[i] + weight_decay * w[i]
        v[i] = momentum * v[i] + gi
        w[i] -= lr * v[i]


def adam_update(double[::1] w, double[::1] m, double[::1] v, const double[::1] g,
                double lr, double beta1, double beta2,
                double bc1, double bc2, double eps):
    """One Adam step in a single pass.

    ``bc1`` and ``bc2`` are the bias-correction denominators 1 - beta1**t
    and 1 - beta2**t, precomputed by the caller.
    """
    cdef Py_ssize_t i, n = w.shape[0]
    cdef double mi, vi
    for i in range(n):
        mi = beta1 * m[i] + (1.0 - beta1) * g[i]
        vi = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i]
        m[i] = mi
        v[i] = vi
        w[i] -= lr * (mi / bc1) / (sqrt(vi / bc2) + eps)
