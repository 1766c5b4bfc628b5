"""Pure-numpy kernels: ARMA residual recursion and GRU forward/backward.

These are the reference implementations; `prevcast._kernels` swaps in the
compiled twins from `_ckernels` when the extension built. Both sides must
implement identical math (the test suite cross-checks them).
"""

from __future__ import annotations

import numpy as np


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-x))


def arma_css_residuals(w, phi, theta, c: float) -> np.ndarray:
    """Conditional-sum-of-squares residuals of an ARMA(p, q) model.

    e[t] = w[t] - c - sum_i phi[i]*w[t-1-i] - sum_j theta[j]*e[t-1-j]
    for t >= p, with e[t] = 0 for t < p (presample shocks conditioned to
    zero). Returns the full-length residual array.
    """
    w = np.ascontiguousarray(w, dtype=np.float64)
    phi = np.ascontiguousarray(phi, dtype=np.float64)
    theta = np.ascontiguousarray(theta, dtype=np.float64)
    n, p, q = w.size, phi.size, theta.size
    e = np.zeros(n, dtype=np.float64)
    if n <= p:
        return e
    ar = w[p:] - c
    for i in range(1, p + 1):
        ar -= phi[i - 1] * w[p - i : n - i]
    if q == 0:
        e[p:] = ar
        return e
    for t in range(p, n):
        acc = ar[t - p]
        for j in range(1, min(q, t) + 1):
            acc -= theta[j - 1] * e[t - j]
        e[t] = acc
    return e


def gru_forward(X, Wz, Wr, Wh, Uz, Ur, Uh, bz, br, bh):
    """Run a GRU over a batch of sequences.

    X has shape (B, T, k); weights follow the (hidden, input) layout.
    Returns (H, Z, R, Hb): hidden states H with shape (B, T+1, h), where
    H[:, 0] is the zero initial state, plus the gate activations needed
    by the backward pass.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    B, T, _ = X.shape
    h = bz.size
    H = np.zeros((B, T + 1, h), dtype=np.float64)
    Z = np.empty((B, T, h), dtype=np.float64)
    R = np.empty((B, T, h), dtype=np.float64)
    Hb = np.empty((B, T, h), dtype=np.float64)
    for t in range(T):
        x = X[:, t]
        hp = H[:, t]
        z = _sigmoid(x @ Wz.T + hp @ Uz.T + bz)
        r = _sigmoid(x @ Wr.T + hp @ Ur.T + br)
        hb = np.tanh(x @ Wh.T + (r * hp) @ Uh.T + bh)
        Z[:, t] = z
        R[:, t] = r
        Hb[:, t] = hb
        H[:, t + 1] = (1.0 - z) * hp + z * hb
    return H, Z, R, Hb


def gru_backward(X, H, Z, R, Hb, dH, Wz, Wr, Wh, Uz, Ur, Uh):
    """Backpropagation through time for `gru_forward`.

    dH has shape (B, T, h) and holds the loss gradient w.r.t. each
    post-update hidden state H[:, t+1]. Returns gradients for the nine
    recurrent parameters in the order (Wz, Wr, Wh, Uz, Ur, Uh, bz, br, bh).
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    B, T, _ = X.shape
    dWz, dWr, dWh = np.zeros_like(Wz), np.zeros_like(Wr), np.zeros_like(Wh)
    dUz, dUr, dUh = np.zeros_like(Uz), np.zeros_like(Ur), np.zeros_like(Uh)
    h = Uz.shape[0]
    dbz = np.zeros(h)
    dbr = np.zeros(h)
    dbh = np.zeros(h)
    dh_next = np.zeros((B, h), dtype=np.float64)
    for t in range(T - 1, -1, -1):
        x = X[:, t]
        hp = H[:, t]
        z, r, hb = Z[:, t], R[:, t], Hb[:, t]
        dh = dH[:, t] + dh_next
        dz = dh * (hb - hp)
        dah = (dh * z) * (1.0 - hb * hb)
        drh = dah @ Uh  # gradient w.r.t. the gated state r*hp
        dar = (drh * hp) * r * (1.0 - r)
        daz = dz * z * (1.0 - z)
        dWh += dah.T @ x
        dUh += dah.T @ (r * hp)
        dbh += dah.sum(axis=0)
        dWr += dar.T @ x
        dUr += dar.T @ hp
        dbr += dar.sum(axis=0)
        dWz += daz.T @ x
        dUz += daz.T @ hp
        dbz += daz.sum(axis=0)
        dh_next = dh * (1.0 - z) + drh * r + dar @ Ur + daz @ Uz
    return dWz, dWr, dWh, dUz, dUr, dUh, dbz, dbr, dbh
