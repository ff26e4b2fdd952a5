# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: the Bellman backup and the path simulator.

Mirrors ``_kernels_py`` operation for operation; see that module for the
argument conventions.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()

cdef double INVPHI = (sqrt(5.0) - 1.0) / 2.0


cdef inline double _interp(const double[::1] v, Py_ssize_t n, double r_min,
                           double r_max, double h, double x) nogil:
    cdef double u, w
    cdef Py_ssize_t i
    if x <= r_min:
        return v[0]
    if x >= r_max:
        return v[n - 1]
    u = (x - r_min) / h
    i = <Py_ssize_t>u
    if i > n - 2:
        i = n - 2
    w = u - i
    return v[i] + w * (v[i + 1] - v[i])


cdef inline double _contract_value(const double[::1] v, Py_ssize_t n, double r_min,
                                   double r_max, double h, double r, double s,
                                   double c, double gamma, double beta, double delta,
                                   double sigma, const double[::1] qx,
                                   const double[::1] qw, Py_ssize_t nq) nogil:
    cdef double flow, cont, drift, step
    cdef Py_ssize_t j
    flow = s / c - s * s * (1.0 / (2.0 * c) + gamma * (sigma * sigma) / 2.0) - r
    drift = gamma * s * s * (sigma * sigma) / 2.0
    cont = 0.0
    for j in range(nq):
        step = (1.0 - beta) * (s * (sigma * qx[j]) + drift)
        cont = cont + qw[j] * _interp(v, n, r_min, r_max, h, r + step)
    return (1.0 - delta) * flow + delta * cont


def bellman_backup(const double[::1] values, double r_min, double r_max,
                   double c, double gamma, double beta, double delta, double sigma,
                   const double[::1] qx, const double[::1] qw,
                   double s_lo=0.0, double s_hi=2.0, Py_ssize_t n_coarse=65,
                   double s_tol=1e-8):
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t nq = qx.shape[0]
    cdef double h = (r_max - r_min) / (n - 1)
    cdef double hs = (s_hi - s_lo) / (n_coarse - 1)
    out_new = np.empty(n, dtype=np.float64)
    out_chi = np.empty(n, dtype=np.uint8)
    out_s = np.empty(n, dtype=np.float64)
    out_vc = np.empty(n, dtype=np.float64)
    out_vn = np.empty(n, dtype=np.float64)
    cdef double[::1] new = out_new
    cdef cnp.uint8_t[::1] chi = out_chi
    cdef double[::1] share = out_s
    cdef double[::1] vc = out_vc
    cdef double[::1] vn = out_vn
    cdef Py_ssize_t i, k, jbest
    cdef double r, s, g, gbest, sbest, a, b, x1, x2, f1, f2, mid, gmid

    with nogil:
        for i in range(n):
            r = r_min + i * h
            vn[i] = delta * _interp(values, n, r_min, r_max, h, beta * r)

            jbest = 0
            gbest = _contract_value(values, n, r_min, r_max, h, r, s_lo, c, gamma,
                                    beta, delta, sigma, qx, qw, nq)
            for k in range(1, n_coarse):
                s = s_lo + k * hs
                g = _contract_value(values, n, r_min, r_max, h, r, s, c, gamma,
                                    beta, delta, sigma, qx, qw, nq)
                if g > gbest:
                    gbest = g
                    jbest = k
            sbest = s_lo + jbest * hs

            a = s_lo + (jbest - 1) * hs if jbest > 0 else s_lo
            b = s_lo + (jbest + 1) * hs if jbest < n_coarse - 1 else s_hi
            x1 = b - INVPHI * (b - a)
            x2 = a + INVPHI * (b - a)
            f1 = _contract_value(values, n, r_min, r_max, h, r, x1, c, gamma,
                                 beta, delta, sigma, qx, qw, nq)
            f2 = _contract_value(values, n, r_min, r_max, h, r, x2, c, gamma,
                                 beta, delta, sigma, qx, qw, nq)
            while b - a > s_tol:
                if f1 >= f2:
                    b = x2
                    x2 = x1
                    f2 = f1
                    x1 = b - INVPHI * (b - a)
                    f1 = _contract_value(values, n, r_min, r_max, h, r, x1, c,
                                         gamma, beta, delta, sigma, qx, qw, nq)
                else:
                    a = x1
                    x1 = x2
                    f1 = f2
                    x2 = a + INVPHI * (b - a)
                    f2 = _contract_value(values, n, r_min, r_max, h, r, x2, c,
                                         gamma, beta, delta, sigma, qx, qw, nq)
            mid = 0.5 * (a + b)
            gmid = _contract_value(values, n, r_min, r_max, h, r, mid, c, gamma,
                                   beta, delta, sigma, qx, qw, nq)
            if gmid >= gbest:
                gbest = gmid
                sbest = mid
            vc[i] = gbest

            if gbest >= vn[i]:
                chi[i] = 1
                share[i] = sbest
                new[i] = gbest
            else:
                chi[i] = 0
                share[i] = 0.0
                new[i] = vn[i]

    return out_new, out_chi, out_s, out_vc, out_vn


def simulate_paths(double r0, const double[:, ::1] eps, double c, double gamma,
                   double beta, double delta, double sigma, int mode,
                   double r_bar, double s_const,
                   const cnp.uint8_t[::1] grid_chi, const double[::1] grid_s,
                   double r_min, double r_max, bint pin, Py_ssize_t burn_in,
                   bint record):
    cdef Py_ssize_t paths = eps.shape[0]
    cdef Py_ssize_t rounds = eps.shape[1]
    cdef Py_ssize_t ng = grid_s.shape[0]
    cdef double h = (r_max - r_min) / (ng - 1) if ng > 1 else 1.0

    agg = np.zeros((paths, 6), dtype=np.float64)
    cdef double[:, ::1] A = agg
    cdef Py_ssize_t rec_p = paths if record else 0
    cdef Py_ssize_t rec_t = rounds if record else 0
    rec = np.zeros((7, rec_p, rec_t), dtype=np.float64)
    cdef double[:, :, ::1] Rc = rec
    cdef Py_ssize_t out_of_range = 0

    cdef Py_ssize_t p, t, i
    cdef double r, s, f, z, x, w, v, pi, r_next, u, wt, dfac
    cdef double sum_pi, sum_v, n_con, sum_vc, disc
    cdef bint chi, c0, c1

    with nogil:
        for p in range(paths):
            r = r0
            sum_pi = 0.0
            sum_v = 0.0
            n_con = 0.0
            sum_vc = 0.0
            disc = 0.0
            dfac = 1.0
            for t in range(rounds):
                if mode == 0:
                    chi = r <= r_bar
                    s = s_const
                else:
                    if r < r_min or r > r_max:
                        out_of_range += 1
                    if r <= r_min:
                        chi = grid_chi[0] != 0
                        s = grid_s[0]
                    elif r >= r_max:
                        chi = grid_chi[ng - 1] != 0
                        s = grid_s[ng - 1]
                    else:
                        u = (r - r_min) / h
                        i = <Py_ssize_t>u
                        if i > ng - 2:
                            i = ng - 2
                        wt = u - i
                        c0 = grid_chi[i] != 0
                        c1 = grid_chi[i + 1] != 0
                        chi = c0 if wt <= 0.5 else c1
                        if c0 and c1:
                            s = grid_s[i] + wt * (grid_s[i + 1] - grid_s[i])
                        elif c0:
                            s = grid_s[i]
                        else:
                            s = grid_s[i + 1]

                if chi:
                    f = r - s * s / (2.0 * c) + gamma * s * s * (sigma * sigma) / 2.0
                    z = s / c
                    x = z + eps[p, t]
                    w = s * x + f
                    v = w - c * z * z / 2.0
                    pi = (1.0 - s) * x - f
                    r_next = beta * r + (1.0 - beta) * v
                else:
                    s = 0.0
                    f = 0.0
                    z = 0.0
                    v = 0.0
                    pi = 0.0
                    r_next = beta * r

                if record:
                    Rc[0, p, t] = r
                    Rc[1, p, t] = 1.0 if chi else 0.0
                    Rc[2, p, t] = s
                    Rc[3, p, t] = f
                    Rc[4, p, t] = z
                    Rc[5, p, t] = v
                    Rc[6, p, t] = pi

                if t >= burn_in:
                    sum_pi = sum_pi + pi
                    sum_v = sum_v + v
                    if chi:
                        n_con = n_con + 1.0
                        sum_vc = sum_vc + v
                disc = disc + dfac * pi
                dfac = dfac * delta
                if not pin:
                    r = r_next

            A[p, 0] = sum_pi
            A[p, 1] = sum_v
            A[p, 2] = n_con
            A[p, 3] = sum_vc
            A[p, 4] = (1.0 - delta) * disc
            A[p, 5] = r

    return agg, rec, out_of_range
