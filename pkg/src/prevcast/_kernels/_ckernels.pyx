# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twins of the numpy kernels in `_pykernels`.

Plain C loops; the matrices involved are small (hidden size ~32), so the
win over numpy comes from removing per-timestep dispatch overhead in the
sequential recursions.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, tanh

cnp.import_array()


cdef inline double _sigmoid(double x) nogil:
    return 1.0 / (1.0 + exp(-x))


def arma_css_residuals(w, phi, theta, double c):
    """See `_pykernels.arma_css_residuals`."""
    cdef const double[::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef const double[::1] phiv = np.ascontiguousarray(phi, dtype=np.float64)
    cdef const double[::1] thetav = np.ascontiguousarray(theta, dtype=np.float64)
    cdef Py_ssize_t n = wv.shape[0], p = phiv.shape[0], q = thetav.shape[0]
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] e = out
    cdef Py_ssize_t t, i, j, jmax
    cdef double acc
    with nogil:
        for t in range(p, n):
            acc = wv[t] - c
            for i in range(1, p + 1):
                acc -= phiv[i - 1] * wv[t - i]
            jmax = q if q < t else t
            for j in range(1, jmax + 1):
                acc -= thetav[j - 1] * e[t - j]
            e[t] = acc
    return out


def gru_forward(X, Wz, Wr, Wh, Uz, Ur, Uh, bz, br, bh):
    """See `_pykernels.gru_forward`."""
    cdef const double[:, :, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef const double[:, ::1] Wzv = np.ascontiguousarray(Wz, dtype=np.float64)
    cdef const double[:, ::1] Wrv = np.ascontiguousarray(Wr, dtype=np.float64)
    cdef const double[:, ::1] Whv = np.ascontiguousarray(Wh, dtype=np.float64)
    cdef const double[:, ::1] Uzv = np.ascontiguousarray(Uz, dtype=np.float64)
    cdef const double[:, ::1] Urv = np.ascontiguousarray(Ur, dtype=np.float64)
    cdef const double[:, ::1] Uhv = np.ascontiguousarray(Uh, dtype=np.float64)
    cdef const double[::1] bzv = np.ascontiguousarray(bz, dtype=np.float64)
    cdef const double[::1] brv = np.ascontiguousarray(br, dtype=np.float64)
    cdef const double[::1] bhv = np.ascontiguousarray(bh, dtype=np.float64)
    cdef Py_ssize_t B = Xv.shape[0], T = Xv.shape[1], k = Xv.shape[2]
    cdef Py_ssize_t h = bzv.shape[0]

    H_arr = np.zeros((B, T + 1, h), dtype=np.float64)
    Z_arr = np.empty((B, T, h), dtype=np.float64)
    R_arr = np.empty((B, T, h), dtype=np.float64)
    Hb_arr = np.empty((B, T, h), dtype=np.float64)
    cdef double[:, :, ::1] H = H_arr
    cdef double[:, :, ::1] Z = Z_arr
    cdef double[:, :, ::1] R = R_arr
    cdef double[:, :, ::1] Hb = Hb_arr

    cdef Py_ssize_t b, t, i, j
    cdef double az, ar, ah, zv, rv, hbv
    with nogil:
        for b in range(B):
            for t in range(T):
                for i in range(h):
                    az = bzv[i]
                    ar = brv[i]
                    for j in range(k):
                        az += Wzv[i, j] * Xv[b, t, j]
                        ar += Wrv[i, j] * Xv[b, t, j]
                    for j in range(h):
                        az += Uzv[i, j] * H[b, t, j]
                        ar += Urv[i, j] * H[b, t, j]
                    Z[b, t, i] = _sigmoid(az)
                    R[b, t, i] = _sigmoid(ar)
                for i in range(h):
                    ah = bhv[i]
                    for j in range(k):
                        ah += Whv[i, j] * Xv[b, t, j]
                    for j in range(h):
                        ah += Uhv[i, j] * (R[b, t, j] * H[b, t, j])
                    hbv = tanh(ah)
                    Hb[b, t, i] = hbv
                    zv = Z[b, t, i]
                    H[b, t + 1, i] = (1.0 - zv) * H[b, t, i] + zv * hbv
    return H_arr, Z_arr, R_arr, Hb_arr


def gru_backward(X, H, Z, R, Hb, dH, Wz, Wr, Wh, Uz, Ur, Uh):
    """See `_pykernels.gru_backward`."""
    cdef const double[:, :, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef const double[:, :, ::1] Hv = np.ascontiguousarray(H, dtype=np.float64)
    cdef const double[:, :, ::1] Zv = np.ascontiguousarray(Z, dtype=np.float64)
    cdef const double[:, :, ::1] Rv = np.ascontiguousarray(R, dtype=np.float64)
    cdef const double[:, :, ::1] Hbv = np.ascontiguousarray(Hb, dtype=np.float64)
    cdef const double[:, :, ::1] dHv = np.ascontiguousarray(dH, dtype=np.float64)
    cdef const double[:, ::1] Uzv = np.ascontiguousarray(Uz, dtype=np.float64)
    cdef const double[:, ::1] Urv = np.ascontiguousarray(Ur, dtype=np.float64)
    cdef const double[:, ::1] Uhv = np.ascontiguousarray(Uh, dtype=np.float64)
    cdef Py_ssize_t B = Xv.shape[0], T = Xv.shape[1], k = Xv.shape[2]
    cdef Py_ssize_t h = Uzv.shape[0]

    dWz_arr = np.zeros((h, k)); dWr_arr = np.zeros((h, k)); dWh_arr = np.zeros((h, k))
    dUz_arr = np.zeros((h, h)); dUr_arr = np.zeros((h, h)); dUh_arr = np.zeros((h, h))
    dbz_arr = np.zeros(h); dbr_arr = np.zeros(h); dbh_arr = np.zeros(h)
    cdef double[:, ::1] dWz = dWz_arr, dWr = dWr_arr, dWh = dWh_arr
    cdef double[:, ::1] dUz = dUz_arr, dUr = dUr_arr, dUh = dUh_arr
    cdef double[::1] dbz = dbz_arr, dbr = dbr_arr, dbh = dbh_arr

    buf = np.zeros((6, B, h), dtype=np.float64)
    cdef double[:, :, ::1] bufv = buf
    cdef double[:, ::1] dh_next = bufv[0]
    cdef double[:, ::1] dh = bufv[1]
    cdef double[:, ::1] dah = bufv[2]
    cdef double[:, ::1] dar = bufv[3]
    cdef double[:, ::1] daz = bufv[4]
    cdef double[:, ::1] drh = bufv[5]

    cdef Py_ssize_t b, t, i, j
    cdef double hb_i, z_i, r_i, hp_i, dz_i, acc
    with nogil:
        for t in range(T - 1, -1, -1):
            for b in range(B):
                for i in range(h):
                    dh[b, i] = dHv[b, t, i] + dh_next[b, i]
                # Gradients into the pre-activations.
                for i in range(h):
                    hb_i = Hbv[b, t, i]
                    z_i = Zv[b, t, i]
                    hp_i = Hv[b, t, i]
                    dz_i = dh[b, i] * (hb_i - hp_i)
                    dah[b, i] = (dh[b, i] * z_i) * (1.0 - hb_i * hb_i)
                    daz[b, i] = dz_i * z_i * (1.0 - z_i)
                for j in range(h):
                    acc = 0.0
                    for i in range(h):
                        acc += dah[b, i] * Uhv[i, j]
                    drh[b, j] = acc
                for i in range(h):
                    r_i = Rv[b, t, i]
                    dar[b, i] = (drh[b, i] * Hv[b, t, i]) * r_i * (1.0 - r_i)
                # Parameter gradient accumulation.
                for i in range(h):
                    for j in range(k):
                        dWh[i, j] += dah[b, i] * Xv[b, t, j]
                        dWr[i, j] += dar[b, i] * Xv[b, t, j]
                        dWz[i, j] += daz[b, i] * Xv[b, t, j]
                    for j in range(h):
                        dUh[i, j] += dah[b, i] * (Rv[b, t, j] * Hv[b, t, j])
                        dUr[i, j] += dar[b, i] * Hv[b, t, j]
                        dUz[i, j] += daz[b, i] * Hv[b, t, j]
                    dbh[i] += dah[b, i]
                    dbr[i] += dar[b, i]
                    dbz[i] += daz[b, i]
                # Carry into the previous timestep.
                for j in range(h):
                    acc = dh[b, j] * (1.0 - Zv[b, t, j]) + drh[b, j] * Rv[b, t, j]
                    for i in range(h):
                        acc += dar[b, i] * Urv[i, j] + daz[b, i] * Uzv[i, j]
                    dh_next[b, j] = acc
    return dWz_arr, dWr_arr, dWh_arr, dUz_arr, dUr_arr, dUh_arr, dbz_arr, dbr_arr, dbh_arr
