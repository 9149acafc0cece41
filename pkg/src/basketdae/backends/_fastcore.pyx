# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the hot numeric paths.

Semantics mirror ``basketdae.backends.pure``; at the small layer sizes this
package targets, plain C loops beat the per-call overhead of BLAS dispatch.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log, log1p, pow, sqrt, tanh

cnp.import_array()

NAME = "compiled"

cdef double Y_FLOOR = 1e-300
cdef double Y_CEIL = 0.9999999999999999  # largest double below 1.0


cdef inline double _sigmoid(double z) noexcept nogil:
    cdef double e
    if z >= 0.0:
        e = exp(-z)
        return 1.0 / (1.0 + e)
    e = exp(z)
    return e / (1.0 + e)


def forward_batch(double[:, ::1] w_in, double[::1] b_in,
                  double[:, ::1] w_out, double[::1] b_out,
                  double[:, ::1] xt):
    """Encode/decode a batch; see the pure backend for the contract."""
    cdef Py_ssize_t B = xt.shape[0]
    cdef Py_ssize_t p = xt.shape[1]
    cdef Py_ssize_t N = w_in.shape[0]
    h_arr = np.empty((B, N), dtype=np.float64)
    y_arr = np.empty((B, p), dtype=np.float64)
    cdef double[:, ::1] h = h_arr
    cdef double[:, ::1] y = y_arr
    cdef Py_ssize_t b, i, j
    cdef double acc, val
    with nogil:
        for b in range(B):
            for j in range(N):
                acc = b_in[j]
                for i in range(p):
                    acc += w_in[j, i] * xt[b, i]
                h[b, j] = tanh(acc)
            for i in range(p):
                acc = b_out[i]
                for j in range(N):
                    acc += w_out[i, j] * h[b, j]
                val = _sigmoid(acc)
                if val < Y_FLOOR:
                    val = Y_FLOOR
                elif val > Y_CEIL:
                    val = Y_CEIL
                y[b, i] = val
    return h_arr, y_arr


def backward_batch(double[:, ::1] w_out, double[:, ::1] xt,
                   double[:, ::1] h, double[:, ::1] y, double[:, ::1] x):
    """Batch-summed loss gradients; see the pure backend for the contract."""
    cdef Py_ssize_t B = xt.shape[0]
    cdef Py_ssize_t p = xt.shape[1]
    cdef Py_ssize_t N = h.shape[1]
    gw_in_arr = np.zeros((N, p), dtype=np.float64)
    gb_in_arr = np.zeros(N, dtype=np.float64)
    gw_out_arr = np.zeros((p, N), dtype=np.float64)
    gb_out_arr = np.zeros(p, dtype=np.float64)
    dzo_arr = np.empty(p, dtype=np.float64)
    cdef double[:, ::1] gw_in = gw_in_arr
    cdef double[::1] gb_in = gb_in_arr
    cdef double[:, ::1] gw_out = gw_out_arr
    cdef double[::1] gb_out = gb_out_arr
    cdef double[::1] dzo = dzo_arr
    cdef Py_ssize_t b, i, j
    cdef double d, acc
    with nogil:
        for b in range(B):
            for i in range(p):
                d = y[b, i] - x[b, i]
                dzo[i] = d
                gb_out[i] += d
                for j in range(N):
                    gw_out[i, j] += d * h[b, j]
            for j in range(N):
                acc = 0.0
                for i in range(p):
                    acc += w_out[i, j] * dzo[i]
                d = acc * (1.0 - h[b, j] * h[b, j])
                gb_in[j] += d
                for i in range(p):
                    gw_in[j, i] += d * xt[b, i]
    return gw_in_arr, gb_in_arr, gw_out_arr, gb_out_arr


def cross_entropy_sum(double[:, ::1] x, double[:, ::1] y, double lo, double hi):
    """Summed binary cross-entropy with outputs clamped to [lo, hi]."""
    cdef Py_ssize_t B = x.shape[0]
    cdef Py_ssize_t p = x.shape[1]
    cdef Py_ssize_t b, i
    cdef double total = 0.0
    cdef double v
    with nogil:
        for b in range(B):
            for i in range(p):
                v = y[b, i]
                if v < lo:
                    v = lo
                elif v > hi:
                    v = hi
                total += -(x[b, i] * log(v) + (1.0 - x[b, i]) * log1p(-v))
    return total


def adam_update(double[::1] param, double[::1] grad,
                double[::1] m, double[::1] v,
                long t, double lr, double beta1, double beta2, double eps):
    """One Adam update in place; ``t`` is the 1-based step counter."""
    cdef Py_ssize_t n = param.shape[0]
    cdef double bc1 = 1.0 - pow(beta1, <double> t)
    cdef double bc2 = 1.0 - pow(beta2, <double> t)
    cdef Py_ssize_t k
    cdef double g, m_hat, v_hat
    with nogil:
        for k in range(n):
            g = grad[k]
            m[k] = beta1 * m[k] + (1.0 - beta1) * g
            v[k] = beta2 * v[k] + (1.0 - beta2) * g * g
            m_hat = m[k] / bc1
            v_hat = v[k] / bc2
            param[k] -= lr * m_hat / (sqrt(v_hat) + eps)
