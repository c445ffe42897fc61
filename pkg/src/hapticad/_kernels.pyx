# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: actuator evaluation and the inverse-network training pass.

Same signatures and semantics as ``_kernels_py``; reductions run
sequentially over samples, so results match the numpy path to rounding.
"""

import numpy as np

from libc.math cimport exp


cdef inline double _clip01(double v) nogil:
    if v < 0.0:
        return 0.0
    if v > 1.0:
        return 1.0
    return v


def actuator_force(const double[::1] stiffness, const double[::1] offset,
                   const double[::1] position, double f_max, double beta,
                   double s_max=5.0):
    cdef Py_ssize_t i, n = position.shape[0]
    out = np.empty(n)
    cdef double[::1] o = out
    cdef double e
    with nogil:
        for i in range(n):
            e = position[i] - offset[i]
            if e > 0.0:
                o[i] = f_max * (stiffness[i] / s_max) * (1.0 - exp(-beta * e))
            else:
                o[i] = 0.0
    return out


def mlp_forward(const double[:, ::1] X, const double[:, ::1] W1, const double[::1] b1,
                const double[:, ::1] W2, const double[::1] b2):
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1], H = W1.shape[1], K = W2.shape[1]
    cdef Py_ssize_t i, j, k, a
    out = np.empty((n, K))
    cdef double[:, ::1] Y = out
    cdef double z, acc
    cdef double[::1] h = np.empty(H)
    with nogil:
        for i in range(n):
            for j in range(H):
                z = b1[j]
                for a in range(d):
                    z = z + X[i, a] * W1[a, j]
                h[j] = 1.0 / (1.0 + exp(-z))
            for k in range(K):
                acc = b2[k]
                for j in range(H):
                    acc = acc + h[j] * W2[j, k]
                Y[i, k] = acc
    return out


def loss_and_grads(const double[:, ::1] X, const double[:, ::1] T,
                   const double[::1] P, const double[::1] F,
                   const double[:, ::1] W1, const double[::1] b1,
                   const double[:, ::1] W2, const double[::1] b2,
                   double f_max, double beta, double w_param, double w_force):
    """Objective and gradients for one full-batch pass.

    objective = w_param * mean((y - T)^2) + w_force * mean(((F_hat - F) / f_max)^2)
    where ``y`` are the normalized outputs (stiffness / s_max, offset) and
    ``F_hat`` is the actuator force for the clamped outputs at position ``P``.
    """
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1], H = W1.shape[1]
    cdef Py_ssize_t i, j, a
    gW1_arr = np.zeros((d, H))
    gb1_arr = np.zeros(H)
    gW2_arr = np.zeros((H, 2))
    gb2_arr = np.zeros(2)
    cdef double[:, ::1] gW1 = gW1_arr
    cdef double[::1] gb1 = gb1_arr
    cdef double[:, ::1] gW2 = gW2_arr
    cdef double[::1] gb2 = gb2_arr
    cdef double[::1] h = np.empty(H)
    cdef double z, y0, y1, d0, d1, yc0, yc1, e, ex, fh, r, g, dz
    cdef double loss_p = 0.0, loss_f = 0.0
    cdef double cp = 2.0 * w_param / (2.0 * n)
    cdef double cf = 2.0 * w_force / n
    with nogil:
        for i in range(n):
            for j in range(H):
                z = b1[j]
                for a in range(d):
                    z = z + X[i, a] * W1[a, j]
                h[j] = 1.0 / (1.0 + exp(-z))
            y0 = b2[0]
            y1 = b2[1]
            for j in range(H):
                y0 = y0 + h[j] * W2[j, 0]
                y1 = y1 + h[j] * W2[j, 1]

            d0 = y0 - T[i, 0]
            d1 = y1 - T[i, 1]
            loss_p = loss_p + d0 * d0 + d1 * d1
            d0 = cp * d0
            d1 = cp * d1

            if w_force != 0.0:
                yc0 = _clip01(y0)
                yc1 = _clip01(y1)
                e = P[i] - yc1
                if e > 0.0:
                    ex = exp(-beta * e)
                    fh = f_max * yc0 * (1.0 - ex)
                else:
                    ex = 1.0
                    fh = 0.0
                r = (fh - F[i]) / f_max
                loss_f = loss_f + r * r
                g = cf * r
                if 0.0 <= y0 <= 1.0:
                    d0 = d0 + g * (1.0 - ex)
                if e > 0.0 and 0.0 <= y1 <= 1.0:
                    d1 = d1 - g * yc0 * beta * ex

            gb2[0] = gb2[0] + d0
            gb2[1] = gb2[1] + d1
            for j in range(H):
                gW2[j, 0] = gW2[j, 0] + h[j] * d0
                gW2[j, 1] = gW2[j, 1] + h[j] * d1
                dz = (W2[j, 0] * d0 + W2[j, 1] * d1) * h[j] * (1.0 - h[j])
                gb1[j] = gb1[j] + dz
                for a in range(d):
                    gW1[a, j] = gW1[a, j] + X[i, a] * dz
    loss = w_param * loss_p / (2.0 * n) + w_force * loss_f / n
    return loss, gW1_arr, gb1_arr, gW2_arr, gb2_arr
