"""Pure-Python versions of the compiled kernels in ``_kernels.pyx``."""

import numpy as np
from scipy.signal import lfilter


def periodic_sweep(b, w0, w1, w2, w3, decay):
    b = np.ascontiguousarray(b, dtype=np.float64)
    if b.shape[0] < 4:
        raise ValueError("need at least 4 samples")
    c = (w0 * np.roll(b, 1) + w1 * b + w2 * np.roll(b, -1)
         + w3 * np.roll(b, -2))
    out = np.empty(b.shape[0] + 1)
    out[0] = 0.0
    out[1:] = lfilter([1.0], [1.0, -decay], c)
    return out


def rk4_cell(alpha_half, gamma_half, beta, sigma, eps, x0, y0, h, nsteps,
             y_floor):
    m2 = len(alpha_half)
    if len(gamma_half) != m2 or m2 < 2:
        raise ValueError("forcing tables must share an even length >= 2")
    al = [float(v) for v in alpha_half]
    ga = [float(v) for v in gamma_half]
    xs = [float(x0)]
    ys = [float(y0)]
    x, y = float(x0), float(y0)
    half = 0.5 * h
    sixth = h / 6.0
    done = nsteps
    for k in range(nsteps):
        i0 = (2 * k) % m2
        i1 = (2 * k + 1) % m2
        i2 = (2 * k + 2) % m2
        r = x / y
        k1x = al[i0] - beta * r
        k1y = -ga[i0] + sigma * r + eps / y
        yy = y + half * k1y
        if yy <= y_floor:
            done = k
            break
        xx = x + half * k1x
        r = xx / yy
        k2x = al[i1] - beta * r
        k2y = -ga[i1] + sigma * r + eps / yy
        yy = y + half * k2y
        if yy <= y_floor:
            done = k
            break
        xx = x + half * k2x
        r = xx / yy
        k3x = al[i1] - beta * r
        k3y = -ga[i1] + sigma * r + eps / yy
        yy = y + h * k3y
        if yy <= y_floor:
            done = k
            break
        xx = x + h * k3x
        r = xx / yy
        k4x = al[i2] - beta * r
        k4y = -ga[i2] + sigma * r + eps / yy
        yy = y + sixth * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        if yy <= y_floor:
            done = k
            break
        x = x + sixth * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        y = yy
        xs.append(x)
        ys.append(y)
    return np.array(xs), np.array(ys), done
