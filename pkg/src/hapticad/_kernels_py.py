"""numpy implementations of the numeric kernels (fallback when ``_kernels`` is not built)."""

import numpy as np


def actuator_force(stiffness, offset, position, f_max, beta, s_max=5.0):
    e = np.maximum(0.0, np.asarray(position) - np.asarray(offset))
    return f_max * (np.asarray(stiffness) / s_max) * (1.0 - np.exp(-beta * e))


def _hidden(X, W1, b1):
    return 1.0 / (1.0 + np.exp(-(X @ W1 + b1)))


def mlp_forward(X, W1, b1, W2, b2):
    return _hidden(X, W1, b1) @ W2 + b2


def loss_and_grads(X, T, P, F, W1, b1, W2, b2, f_max, beta, w_param, w_force):
    n = X.shape[0]
    h = _hidden(X, W1, b1)
    y = h @ W2 + b2

    diff = y - T
    loss = w_param * float(np.sum(diff * diff)) / (2.0 * n)
    dy = (2.0 * w_param / (2.0 * n)) * diff

    if w_force != 0.0:
        yc = np.clip(y, 0.0, 1.0)
        e = P - yc[:, 1]
        engaged = e > 0.0
        ex = np.where(engaged, np.exp(-beta * np.where(engaged, e, 0.0)), 1.0)
        fh = np.where(engaged, f_max * yc[:, 0] * (1.0 - ex), 0.0)
        r = (fh - F) / f_max
        loss += w_force * float(r @ r) / n
        g = (2.0 * w_force / n) * r
        in0 = (y[:, 0] >= 0.0) & (y[:, 0] <= 1.0)
        in1 = (y[:, 1] >= 0.0) & (y[:, 1] <= 1.0) & engaged
        dy[:, 0] += np.where(in0, g * (1.0 - ex), 0.0)
        dy[:, 1] -= np.where(in1, g * yc[:, 0] * beta * ex, 0.0)

    gW2 = h.T @ dy
    gb2 = dy.sum(axis=0)
    dz = (dy @ W2.T) * h * (1.0 - h)
    gW1 = X.T @ dz
    gb1 = dz.sum(axis=0)
    return loss, gW1, gb1, gW2, gb2
