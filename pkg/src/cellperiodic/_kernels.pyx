# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. Signatures and results match ``_fallback``."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def periodic_sweep(const double[::1] b, double w0, double w1, double w2,
                   double w3, double decay):
    """I[k+1] = decay * I[k] + w0 b[k-1] + w1 b[k] + w2 b[k+1] + w3 b[k+2].

    ``b`` holds the N distinct samples of a periodic function; stencil indices
    wrap modulo N. Returns the N + 1 values I[0] = 0, ..., I[N].
    """
    cdef Py_ssize_t n = b.shape[0]
    cdef Py_ssize_t k
    cdef double acc = 0.0
    out = np.empty(n + 1, dtype=np.float64)
    cdef double[::1] res = out
    if n < 4:
        raise ValueError("need at least 4 samples")
    with nogil:
        res[0] = 0.0
        acc = decay * acc + w0 * b[n - 1] + w1 * b[0] + w2 * b[1] + w3 * b[2]
        res[1] = acc
        for k in range(1, n - 2):
            acc = decay * acc + w0 * b[k - 1] + w1 * b[k] + w2 * b[k + 1] + w3 * b[k + 2]
            res[k + 1] = acc
        acc = decay * acc + w0 * b[n - 3] + w1 * b[n - 2] + w2 * b[n - 1] + w3 * b[0]
        res[n - 1] = acc
        acc = decay * acc + w0 * b[n - 2] + w1 * b[n - 1] + w2 * b[0] + w3 * b[1]
        res[n] = acc
    return out


cdef inline void _cell_rhs(double a, double g, double beta, double sigma,
                           double eps, double x, double y,
                           double* fx, double* fy) noexcept nogil:
    cdef double r = x / y
    fx[0] = a - beta * r
    fy[0] = -g + sigma * r + eps / y


def rk4_cell(const double[::1] alpha_half, const double[::1] gamma_half,
             double beta, double sigma, double eps, double x0, double y0,
             double h, Py_ssize_t nsteps, double y_floor):
    """Classical RK4 for the cell-volume system on a uniform step.

    ``alpha_half``/``gamma_half`` sample one period at spacing h/2 (length 2m,
    m steps per period). Returns (x, y, done) where ``done`` is the number of
    completed steps; done < nsteps means y dropped to ``y_floor``.
    """
    cdef Py_ssize_t m2 = alpha_half.shape[0]
    cdef Py_ssize_t k, i0, i1, i2
    cdef double x = x0, y = y0
    cdef double k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y, ys
    cdef Py_ssize_t done = nsteps
    xs_arr = np.empty(nsteps + 1, dtype=np.float64)
    ys_arr = np.empty(nsteps + 1, dtype=np.float64)
    cdef double[::1] xs = xs_arr
    cdef double[::1] yv = ys_arr
    if gamma_half.shape[0] != m2 or m2 < 2:
        raise ValueError("forcing tables must share an even length >= 2")
    with nogil:
        xs[0] = x
        yv[0] = y
        for k in range(nsteps):
            i0 = (2 * k) % m2
            i1 = (2 * k + 1) % m2
            i2 = (2 * k + 2) % m2
            _cell_rhs(alpha_half[i0], gamma_half[i0], beta, sigma, eps, x, y, &k1x, &k1y)
            ys = y + 0.5 * h * k1y
            if ys <= y_floor:
                done = k
                break
            _cell_rhs(alpha_half[i1], gamma_half[i1], beta, sigma, eps,
                      x + 0.5 * h * k1x, ys, &k2x, &k2y)
            ys = y + 0.5 * h * k2y
            if ys <= y_floor:
                done = k
                break
            _cell_rhs(alpha_half[i1], gamma_half[i1], beta, sigma, eps,
                      x + 0.5 * h * k2x, ys, &k3x, &k3y)
            ys = y + h * k3y
            if ys <= y_floor:
                done = k
                break
            _cell_rhs(alpha_half[i2], gamma_half[i2], beta, sigma, eps,
                      x + h * k3x, ys, &k4x, &k4y)
            ys = y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
            if ys <= y_floor:
                done = k
                break
            x = x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
            y = ys
            xs[k + 1] = x
            yv[k + 1] = y
    return xs_arr[:done + 1], ys_arr[:done + 1], done
