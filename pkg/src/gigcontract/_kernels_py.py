"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``.

Used when the extension is not built. The arithmetic follows the compiled
code expression by expression so both backends agree to rounding.

Conventions shared by both backends:

* the value table lives on the uniform grid ``r_min + i*h``; off-grid
  lookups interpolate linearly and clamp to the end values outside the grid;
* ``qx``/``qw`` are standard normal quadrature nodes and weights
  (weights sum to one), the noise is ``sigma * qx``;
* ``eps`` handed to the simulator is already scaled by ``sigma``.
"""

import numpy as np

INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def _interp(v, r_min, r_max, h, x):
    n = v.shape[0]
    u = (x - r_min) / h
    i = np.clip(np.where(np.isfinite(u), u, 0.0).astype(np.intp), 0, n - 2)
    w = u - i
    out = v[i] + w * (v[i + 1] - v[i])
    out = np.where(x <= r_min, v[0], out)
    return np.where(x >= r_max, v[n - 1], out)


def _contract_value(v, r_min, r_max, h, r, s, c, gamma, beta, delta, sigma, qx, qw):
    # r and s broadcast against each other; quadrature runs on a trailing axis
    flow = s / c - s * s * (1.0 / (2.0 * c) + gamma * (sigma * sigma) / 2.0) - r
    drift = gamma * s * s * (sigma * sigma) / 2.0
    cont = np.zeros(np.broadcast(r, s).shape)
    for j in range(qx.shape[0]):
        step = (1.0 - beta) * (s * (sigma * qx[j]) + drift)
        cont = cont + qw[j] * _interp(v, r_min, r_max, h, r + step)
    return (1.0 - delta) * flow + delta * cont


def bellman_backup(values, r_min, r_max, c, gamma, beta, delta, sigma, qx, qw,
                   s_lo=0.0, s_hi=2.0, n_coarse=65, s_tol=1e-8):
    values = np.ascontiguousarray(values, dtype=np.float64)
    qx = np.asarray(qx, dtype=np.float64)
    qw = np.asarray(qw, dtype=np.float64)
    n = values.shape[0]
    h = (r_max - r_min) / (n - 1)
    hs = (s_hi - s_lo) / (n_coarse - 1)
    r = r_min + np.arange(n) * h
    args = (c, gamma, beta, delta, sigma, qx, qw)

    def g(s):
        return _contract_value(values, r_min, r_max, h, r, s, *args)

    vn = delta * _interp(values, r_min, r_max, h, beta * r)

    coarse = s_lo + np.arange(n_coarse) * hs
    table = _contract_value(values, r_min, r_max, h, r[:, None], coarse[None, :], *args)
    jbest = np.argmax(table, axis=1)  # first maximum, like the strict '>' scan
    gbest = table[np.arange(n), jbest]
    sbest = s_lo + jbest * hs

    a = np.where(jbest > 0, s_lo + (jbest - 1) * hs, s_lo)
    b = np.where(jbest < n_coarse - 1, s_lo + (jbest + 1) * hs, s_hi)
    x1 = b - INVPHI * (b - a)
    x2 = a + INVPHI * (b - a)
    f1 = g(x1)
    f2 = g(x2)
    active = b - a > s_tol
    while active.any():
        left = active & (f1 >= f2)
        right = active & ~(f1 >= f2)
        b_new = np.where(left, x2, b)
        a_new = np.where(right, x1, a)
        x1_new = np.where(left, b_new - INVPHI * (b_new - a_new), np.where(right, x2, x1))
        x2_new = np.where(right, a_new + INVPHI * (b_new - a_new), np.where(left, x1, x2))
        ev = g(np.where(left, x1_new, x2_new))
        f1, f2 = (np.where(left, ev, np.where(right, f2, f1)),
                  np.where(right, ev, np.where(left, f1, f2)))
        a, b, x1, x2 = a_new, b_new, x1_new, x2_new
        active = b - a > s_tol
    mid = 0.5 * (a + b)
    gmid = g(mid)
    better = gmid >= gbest
    gbest = np.where(better, gmid, gbest)
    sbest = np.where(better, mid, sbest)

    chi = gbest >= vn
    new = np.where(chi, gbest, vn)
    share = np.where(chi, sbest, 0.0)
    return new, chi.astype(np.uint8), share, gbest, vn


def simulate_paths(r0, eps, c, gamma, beta, delta, sigma, mode, r_bar, s_const,
                   grid_chi, grid_s, r_min, r_max, pin, burn_in, record):
    eps = np.asarray(eps, dtype=np.float64)
    paths, rounds = eps.shape
    grid_chi = np.asarray(grid_chi).astype(bool)
    grid_s = np.asarray(grid_s, dtype=np.float64)
    ng = grid_s.shape[0]
    h = (r_max - r_min) / (ng - 1) if ng > 1 else 1.0

    r = np.full(paths, float(r0))
    sum_pi = np.zeros(paths)
    sum_v = np.zeros(paths)
    n_con = np.zeros(paths)
    sum_vc = np.zeros(paths)
    disc = np.zeros(paths)
    dfac = 1.0
    rec = np.zeros((7, paths if record else 0, rounds if record else 0))
    out_of_range = 0

    for t in range(rounds):
        if mode == 0:
            chi = r <= r_bar
            s = np.full(paths, float(s_const))
        else:
            out_of_range += int(np.count_nonzero((r < r_min) | (r > r_max)))
            u = (r - r_min) / h
            i = np.clip(u.astype(np.intp), 0, ng - 2)
            wt = u - i
            c0 = grid_chi[i]
            c1 = grid_chi[i + 1]
            chi = np.where(wt <= 0.5, c0, c1)
            s = np.where(c0 & c1, grid_s[i] + wt * (grid_s[i + 1] - grid_s[i]),
                         np.where(c0, grid_s[i], grid_s[i + 1]))
            lo = r <= r_min
            hi = r >= r_max
            chi = np.where(lo, grid_chi[0], np.where(hi, grid_chi[ng - 1], chi))
            s = np.where(lo, grid_s[0], np.where(hi, grid_s[ng - 1], s))

        f = r - s * s / (2.0 * c) + gamma * s * s * (sigma * sigma) / 2.0
        z = s / c
        x = z + eps[:, t]
        w = s * x + f
        v = w - c * z * z / 2.0
        pi = (1.0 - s) * x - f
        r_next = beta * r + (1.0 - beta) * v

        s = np.where(chi, s, 0.0)
        f = np.where(chi, f, 0.0)
        z = np.where(chi, z, 0.0)
        v = np.where(chi, v, 0.0)
        pi = np.where(chi, pi, 0.0)
        r_next = np.where(chi, r_next, beta * r)

        if record:
            rec[0, :, t] = r
            rec[1, :, t] = chi
            rec[2, :, t] = s
            rec[3, :, t] = f
            rec[4, :, t] = z
            rec[5, :, t] = v
            rec[6, :, t] = pi

        if t >= burn_in:
            sum_pi = sum_pi + pi
            sum_v = sum_v + v
            n_con = n_con + np.where(chi, 1.0, 0.0)
            sum_vc = np.where(chi, sum_vc + v, sum_vc)
        disc = disc + dfac * pi
        dfac = dfac * delta
        if not pin:
            r = r_next

    agg = np.column_stack([sum_pi, sum_v, n_con, sum_vc, (1.0 - delta) * disc, r])
    return np.ascontiguousarray(agg), rec, out_of_range
