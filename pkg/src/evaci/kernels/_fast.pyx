# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled closed-loop kernels; semantics mirror kernels.pure line by line."""

from libc.math cimport fabs, sqrt, tanh, sin, acos, cos, M_PI

import numpy as np

PLANT_EV = 0
PLANT_LQR = 1
PLANT_NLTEST = 2

cdef double DIVLIM = 1e9


cdef struct GP:
    double q1
    double q2
    double beta
    int rectify
    double k_a1
    double k_a2
    double k_c1
    double k_c2
    double kappa
    double P0
    double P1
    double p1
    double p2
    double alpha
    double gamma
    double sgn_eps
    double dt
    double w_bar_a
    double w_bar_c
    double w_bar_g
    double v_bar_g
    # EV plant
    double mass
    double r_w
    double gear
    double cda
    double rho
    double crr
    double eta_d
    double eta_r
    double t_max
    double tau
    double pscale
    double uscale


cdef GP _gp_from(gains, double q1, double q2, double beta, int rectify,
                 double[::1] plant_par, int plant_kind):
    cdef GP g
    g.q1 = q1
    g.q2 = q2
    g.beta = beta
    g.rectify = rectify
    g.pscale = 1.0
    g.uscale = 1.0
    g.k_a1 = gains.k_a1
    g.k_a2 = gains.k_a2
    g.k_c1 = gains.k_c1
    g.k_c2 = gains.k_c2
    g.kappa = gains.kappa
    g.P0 = gains.P0
    g.P1 = gains.P1
    g.p1 = gains.p1
    g.p2 = gains.p2
    g.alpha = gains.alpha
    g.gamma = gains.gamma
    g.sgn_eps = gains.sgn_boundary_layer
    g.dt = gains.dt
    g.w_bar_a = gains.w_bar_a
    g.w_bar_c = gains.w_bar_c
    g.w_bar_g = gains.w_bar_g
    g.v_bar_g = gains.v_bar_g
    if plant_kind == 0:
        g.mass = plant_par[0]
        g.r_w = plant_par[1]
        g.gear = plant_par[2]
        g.cda = plant_par[3]
        g.rho = plant_par[4]
        g.crr = plant_par[5]
        g.eta_d = plant_par[6]
        g.eta_r = plant_par[7]
        g.t_max = plant_par[8]
        g.tau = plant_par[9]
    return g


cdef inline int _bad(double v) nogil:
    return not (fabs(v) <= DIVLIM)


cdef inline double _ev_accel(double v, double torque, GP* g) nogil:
    cdef double f_trac = torque * g.gear / g.r_w
    cdef double f_drag = 0.5 * g.rho * g.cda * v * v
    cdef double f_roll = g.mass * 9.81 * g.crr
    cdef double gate = 1.0 if v > 0.0 else 0.0
    return (f_trac - gate * (f_drag + f_roll)) / g.mass


cdef inline double _ev_power(double v, double torque, GP* g) nogil:
    cdef double p_wheel = torque * g.gear / g.r_w * v
    return p_wheel / g.eta_d if p_wheel > 0.0 else p_wheel * g.eta_r


cdef inline void _ev_advance(double* v_io, double* t_io, double t_cmd,
                             double dt, GP* g) nogil:
    cdef double v = v_io[0]
    cdef double t_act = t_io[0]
    cdef double k1, k2, k3, k4, out
    cdef double k1v, k1t, k2v, k2t, k3v, k3t, k4v, k4t
    if g.tau == 0.0:
        k1 = _ev_accel(v, t_cmd, g)
        k2 = _ev_accel(v + 0.5 * dt * k1, t_cmd, g)
        k3 = _ev_accel(v + 0.5 * dt * k2, t_cmd, g)
        k4 = _ev_accel(v + dt * k3, t_cmd, g)
        out = v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        v_io[0] = out if out > 0.0 else 0.0
        t_io[0] = t_cmd
        return
    k1v = _ev_accel(v, t_act, g)
    k1t = (t_cmd - t_act) / g.tau
    k2v = _ev_accel(v + 0.5 * dt * k1v, t_act + 0.5 * dt * k1t, g)
    k2t = (t_cmd - (t_act + 0.5 * dt * k1t)) / g.tau
    k3v = _ev_accel(v + 0.5 * dt * k2v, t_act + 0.5 * dt * k2t, g)
    k3t = (t_cmd - (t_act + 0.5 * dt * k2t)) / g.tau
    k4v = _ev_accel(v + dt * k3v, t_act + dt * k3t, g)
    k4t = (t_cmd - (t_act + dt * k3t)) / g.tau
    out = v + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    v_io[0] = out if out > 0.0 else 0.0
    t_io[0] = t_act + (dt / 6.0) * (k1t + 2.0 * k2t + 2.0 * k3t + k4t)


cdef inline void _lqr_rhs(double* s, double u, double* par, double* out) nogil:
    out[0] = par[0] * s[0] + par[1] * s[1] + par[4] * u
    out[1] = par[2] * s[0] + par[3] * s[1] + par[5] * u


cdef inline void _nltest_rhs(double* s, double u, double* out) nogil:
    out[0] = -s[0] + s[1]
    out[1] = -s[0] * s[1] - s[1] + sin(s[0]) + u


cdef inline void _rk4_2(int kind, double* s, double u, double dt, double* par) nogil:
    cdef double k1[2]
    cdef double k2[2]
    cdef double k3[2]
    cdef double k4[2]
    cdef double tmp[2]
    if kind == 1:
        _lqr_rhs(s, u, par, k1)
    else:
        _nltest_rhs(s, u, k1)
    tmp[0] = s[0] + 0.5 * dt * k1[0]
    tmp[1] = s[1] + 0.5 * dt * k1[1]
    if kind == 1:
        _lqr_rhs(tmp, u, par, k2)
    else:
        _nltest_rhs(tmp, u, k2)
    tmp[0] = s[0] + 0.5 * dt * k2[0]
    tmp[1] = s[1] + 0.5 * dt * k2[1]
    if kind == 1:
        _lqr_rhs(tmp, u, par, k3)
    else:
        _nltest_rhs(tmp, u, k3)
    tmp[0] = s[0] + dt * k3[0]
    tmp[1] = s[1] + dt * k3[1]
    if kind == 1:
        _lqr_rhs(tmp, u, par, k4)
    else:
        _nltest_rhs(tmp, u, k4)
    s[0] = s[0] + (dt / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
    s[1] = s[1] + (dt / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])


cdef void _eig3(double[:, ::1] m, double* lam_min, double* lam_max) nogil:
    """Trigonometric eigenvalue bounds; same arithmetic as critic.eig_bounds_sym3."""
    cdef double a00 = m[0, 0], a01 = m[0, 1], a02 = m[0, 2]
    cdef double a11 = m[1, 1], a12 = m[1, 2], a22 = m[2, 2]
    cdef double off = a01 * a01 + a02 * a02 + a12 * a12
    cdef double q, p2, p, b00, b11, b22, b01, b02, b12, detb, r, phi
    cdef double lo, hi
    if off == 0.0:
        lo = a00
        if a11 < lo:
            lo = a11
        if a22 < lo:
            lo = a22
        hi = a00
        if a11 > hi:
            hi = a11
        if a22 > hi:
            hi = a22
        lam_min[0] = lo
        lam_max[0] = hi
        return
    q = (a00 + a11 + a22) / 3.0
    p2 = (a00 - q) ** 2 + (a11 - q) ** 2 + (a22 - q) ** 2 + 2.0 * off
    p = sqrt(p2 / 6.0)
    b00 = (a00 - q) / p
    b11 = (a11 - q) / p
    b22 = (a22 - q) / p
    b01 = a01 / p
    b02 = a02 / p
    b12 = a12 / p
    detb = (b00 * (b11 * b22 - b12 * b12)
            - b01 * (b01 * b22 - b12 * b02)
            + b02 * (b01 * b12 - b11 * b02))
    r = detb / 2.0
    if r > 1.0:
        r = 1.0
    if r < -1.0:
        r = -1.0
    phi = acos(r) / 3.0
    lam_max[0] = q + 2.0 * p * cos(phi)
    lam_min[0] = q + 2.0 * p * cos(phi + 2.0 * M_PI / 3.0)


cdef int _critic_update(double* w_c, double[:, ::1] P, double* w_a,
                        double* phi, double delta, GP* g) nogil:
    """In-place critic step; returns 1 if the covariance was reset."""
    cdef double p_phi[3]
    cdef double denom, coeff, norm, lo, hi
    cdef int i, j
    for i in range(3):
        p_phi[i] = P[i, 0] * phi[0] + P[i, 1] * phi[1] + P[i, 2] * phi[2]
    denom = 1.0 + g.kappa * (phi[0] * p_phi[0] + phi[1] * p_phi[1] + phi[2] * p_phi[2])
    for i in range(3):
        w_c[i] = w_c[i] + g.dt * (-g.k_c1 * p_phi[i] / denom * delta
                                  + g.k_c2 * (w_a[i] - w_c[i]))
    # cost-to-go non-negativity: pure-axis coefficients stay >= 0
    if w_c[0] < 0.0:
        w_c[0] = 0.0
    if w_c[2] < 0.0:
        w_c[2] = 0.0
    norm = sqrt(w_c[0] * w_c[0] + w_c[1] * w_c[1] + w_c[2] * w_c[2])
    if norm > g.w_bar_c:
        for i in range(3):
            w_c[i] = w_c[i] * (g.w_bar_c / norm)
    coeff = g.dt * g.k_c1 / denom
    for i in range(3):
        for j in range(3):
            P[i, j] = P[i, j] - coeff * p_phi[i] * p_phi[j]
    cdef double sym
    for i in range(3):
        for j in range(i + 1, 3):
            sym = 0.5 * (P[i, j] + P[j, i])
            P[i, j] = sym
            P[j, i] = sym
    _eig3(P, &lo, &hi)
    if lo < g.P0:
        for i in range(3):
            for j in range(3):
                P[i, j] = g.P1 if i == j else 0.0
        return 1
    return 0


cdef void _actor_update(double* w_a, double* w_c, double* phi, double x1,
                        double x2, double delta, double u_hat, GP* g) nogil:
    cdef double jcol[3]
    cdef double grad[3]
    cdef double s, scale, norm
    cdef int i
    jcol[0] = 0.0
    jcol[1] = x1
    jcol[2] = 2.0 * x2
    for i in range(3):
        grad[i] = -0.5 / g.beta * jcol[i]
    s = w_c[0] * jcol[0] + w_c[1] * jcol[1] + w_c[2] * jcol[2]
    scale = 2.0 * g.k_a1 / sqrt(1.0 + phi[0] * phi[0] + phi[1] * phi[1] + phi[2] * phi[2])
    for i in range(3):
        w_a[i] = w_a[i] + g.dt * (-scale * (s + g.beta * u_hat) * grad[i] * delta
                                  - g.k_a2 * (w_a[i] - w_c[i]))
    # cost-to-go non-negativity: pure-axis coefficients stay >= 0
    if w_a[0] < 0.0:
        w_a[0] = 0.0
    if w_a[2] < 0.0:
        w_a[2] = 0.0
    norm = sqrt(w_a[0] * w_a[0] + w_a[1] * w_a[1] + w_a[2] * w_a[2])
    if norm > g.w_bar_a:
        for i in range(3):
            w_a[i] = w_a[i] * (g.w_bar_a / norm)


cdef void _identifier_update(double[:, ::1] w_g, double[:, ::1] v_g,
                             double[:, ::1] ups_w, double[:, ::1] ups_v,
                             double* x_hat, double* x_tilde, double* xdot,
                             double[::1] scr_d, double[::1] scr_sp,
                             double[::1] scr_usp, double[::1] scr_m,
                             double[::1] scr_ms, GP* g) nogil:
    """In-place Euler step of both projected weight laws (pre-step weights)."""
    cdef int L = v_g.shape[1]
    cdef int i, j, l
    cdef double z, s, vtxd, norm, uxd0, uxd1
    # hidden-layer derivative d and sigma'(v^T xdot) folded together:
    # sp[i] = d[i-1] * (v_g^T xdot)[i-1] for i >= 1, sp[0] = 0 (bias row)
    scr_sp[0] = 0.0
    for l in range(L):
        z = v_g[0, l] * x_hat[0] + v_g[1, l] * x_hat[1]
        s = tanh(0.5 * z)
        scr_d[l] = 0.5 * (1.0 - s * s)
        vtxd = v_g[0, l] * xdot[0] + v_g[1, l] * xdot[1]
        scr_sp[l + 1] = scr_d[l] * vtxd
    for i in range(L + 1):
        norm = 0.0
        for j in range(L + 1):
            norm += ups_w[i, j] * scr_sp[j]
        scr_usp[i] = norm
    # m = x_tilde^T w_g^T, ms = m sigma'
    for i in range(L + 1):
        scr_m[i] = x_tilde[0] * w_g[i, 0] + x_tilde[1] * w_g[i, 1]
    for l in range(L):
        scr_ms[l] = scr_m[l + 1] * scr_d[l]
    uxd0 = ups_v[0, 0] * xdot[0] + ups_v[0, 1] * xdot[1]
    uxd1 = ups_v[1, 0] * xdot[0] + ups_v[1, 1] * xdot[1]

    for i in range(L + 1):
        w_g[i, 0] = w_g[i, 0] + g.dt * scr_usp[i] * x_tilde[0]
        w_g[i, 1] = w_g[i, 1] + g.dt * scr_usp[i] * x_tilde[1]
    norm = 0.0
    for i in range(L + 1):
        norm += w_g[i, 0] * w_g[i, 0] + w_g[i, 1] * w_g[i, 1]
    norm = sqrt(norm)
    if norm > g.w_bar_g:
        for i in range(L + 1):
            w_g[i, 0] = w_g[i, 0] * (g.w_bar_g / norm)
            w_g[i, 1] = w_g[i, 1] * (g.w_bar_g / norm)

    for l in range(L):
        v_g[0, l] = v_g[0, l] + g.dt * uxd0 * scr_ms[l]
        v_g[1, l] = v_g[1, l] + g.dt * uxd1 * scr_ms[l]
    norm = 0.0
    for l in range(L):
        norm += v_g[0, l] * v_g[0, l] + v_g[1, l] * v_g[1, l]
    norm = sqrt(norm)
    if norm > g.v_bar_g:
        for l in range(L):
            v_g[0, l] = v_g[0, l] * (g.v_bar_g / norm)
            v_g[1, l] = v_g[1, l] * (g.v_bar_g / norm)


def run_aci_loop(int plant_kind, plant_par_in, vd_in, noise_in, adapt_in, gains,
                 double q1, double q2, double beta, rectify, double pscale,
                 double uscale,
                 w_c_in, w_a_in, P_in, w_g_in, v_g_in, x_hat_in, nu_in,
                 x_tilde0_in, plant_state_in, out_in):
    cdef double[::1] plant_par = np.ascontiguousarray(plant_par_in, dtype=np.float64)
    cdef double[::1] vd = vd_in
    cdef double[::1] noise = noise_in
    cdef double[::1] adapt = adapt_in
    cdef double[::1] w_c = w_c_in
    cdef double[::1] w_a = w_a_in
    cdef double[:, ::1] P = P_in
    cdef double[:, ::1] w_g = w_g_in
    cdef double[:, ::1] v_g = v_g_in
    cdef double[::1] x_hat = x_hat_in
    cdef double[::1] nu = nu_in
    cdef double[::1] x_tilde0 = x_tilde0_in
    cdef double[::1] ps = plant_state_in
    cdef double[:, ::1] out = out_in
    cdef GP g = _gp_from(gains, q1, q2, beta, 1 if rectify else 0,
                         plant_par, plant_kind)
    g.pscale = pscale
    g.uscale = uscale
    cdef double[:, ::1] ups_w = np.array(gains.upsilon_w, dtype=np.float64)
    cdef double[:, ::1] ups_v = np.array(gains.upsilon_v, dtype=np.float64)

    cdef int L = v_g.shape[1]
    scr = np.zeros(5 * (L + 1), dtype=np.float64)
    cdef double[::1] scr_d = scr[0:L + 1]
    cdef double[::1] scr_sp = scr[L + 1:2 * (L + 1)]
    cdef double[::1] scr_usp = scr[2 * (L + 1):3 * (L + 1)]
    cdef double[::1] scr_m = scr[3 * (L + 1):4 * (L + 1)]
    cdef double[::1] scr_ms = scr[4 * (L + 1):5 * (L + 1)]

    cdef int n = vd.shape[0]
    cdef double dt = g.dt
    cdef int k, i, l, code, reset
    cdef int resets = 0
    cdef double t, v_v, vd_log, x1, x2, u_pol, u_lrn, u_cmd, p_batt, lim
    cdef double xt0, xt1, r0, r1, z, sgn0, sgn1
    cdef double fh0, fh1, fh1p, phi0, phi1, phi2, cx, pacc, delta
    cdef double wcs[3]
    cdef double was[3]
    cdef double phi_arr[3]
    cdef double xts[2]
    cdef double fhs[2]
    cdef double xhs[2]
    cdef double st[2]
    cdef double par6[6]
    cdef double lo, hi, wc_n, wa_n, xt_n, norm, sig

    if plant_kind == PLANT_LQR:
        for i in range(6):
            par6[i] = plant_par[i]

    for k in range(n):
        t = k * dt
        if plant_kind == PLANT_EV:
            v_v = ps[0]
            x1 = v_v - vd[k]
            p_batt = _ev_power(v_v, ps[1], &g)
            x2 = p_batt * g.pscale
            vd_log = vd[k]
        else:
            x1 = ps[0]
            x2 = ps[1]
            v_v = x1
            p_batt = x2
            vd_log = 0.0

        xt0 = x1 - x_hat[0]
        xt1 = x2 - x_hat[1]
        r0 = g.p1 * (xt0 - x_tilde0[0]) + nu[0]
        r1 = g.p1 * (xt1 - x_tilde0[1]) + nu[1]

        u_pol = -0.5 / g.beta * (x1 * w_a[1] + 2.0 * x2 * w_a[2])
        if plant_kind == PLANT_EV:
            lim = g.t_max / g.uscale
            u_lrn = u_pol
            if u_lrn > lim:
                u_lrn = lim
            if u_lrn < -lim:
                u_lrn = -lim
            u_cmd = u_pol + noise[k]
            if u_cmd > lim:
                u_cmd = lim
            if u_cmd < -lim:
                u_cmd = -lim
        else:
            u_lrn = u_pol
            u_cmd = u_pol + noise[k]

        # f_hat = w_g^T sigma + h*u + r
        fh0 = 0.0
        fh1 = 0.0
        for i in range(L + 1):
            if i == 0:
                sig = 1.0
            else:
                z = v_g[0, i - 1] * x_hat[0] + v_g[1, i - 1] * x_hat[1]
                sig = tanh(0.5 * z)
            fh0 += w_g[i, 0] * sig
            fh1 += w_g[i, 1] * sig
        fh0 += r0
        fh1 += u_cmd + r1

        # regressor and residual on the policy flow (dither-free)
        fh1p = fh1 + (u_lrn - u_cmd)
        phi0 = 2.0 * x1 * fh0
        phi1 = x2 * fh0 + x1 * fh1p
        phi2 = 2.0 * x2 * fh1p
        pacc = x2 if (x2 > 0.0 or not g.rectify) else 0.0
        cx = g.q1 * x1 * x1 + g.q2 * pacc * pacc
        delta = w_c[0] * phi0 + w_c[1] * phi1 + w_c[2] * phi2 \
            + cx + g.beta * u_lrn * u_lrn

        # snapshot semantics: stash pre-update values
        for i in range(3):
            wcs[i] = w_c[i]
            was[i] = w_a[i]
        phi_arr[0] = phi0
        phi_arr[1] = phi1
        phi_arr[2] = phi2
        xts[0] = xt0
        xts[1] = xt1
        fhs[0] = fh0
        fhs[1] = fh1
        xhs[0] = x_hat[0]
        xhs[1] = x_hat[1]

        if adapt[k] != 0.0:
            reset = _critic_update(&w_c[0], P, was, phi_arr, delta, &g)
            resets += reset
            _actor_update(&w_a[0], wcs, phi_arr, x1, x2, delta, u_lrn, &g)
        _identifier_update(w_g, v_g, ups_w, ups_v, xhs, xts, fhs,
                           scr_d, scr_sp, scr_usp, scr_m, scr_ms, &g)

        x_hat[0] = x_hat[0] + dt * fh0
        x_hat[1] = x_hat[1] + dt * fh1
        if g.sgn_eps > 0.0:
            sgn0 = tanh(xt0 / g.sgn_eps)
            sgn1 = tanh(xt1 / g.sgn_eps)
        else:
            sgn0 = 0.0 if xt0 == 0.0 else (1.0 if xt0 > 0.0 else -1.0)
            sgn1 = 0.0 if xt1 == 0.0 else (1.0 if xt1 > 0.0 else -1.0)
        nu[0] = nu[0] + dt * ((g.p1 * g.alpha + g.gamma) * xt0 + g.p2 * sgn0)
        nu[1] = nu[1] + dt * ((g.p1 * g.alpha + g.gamma) * xt1 + g.p2 * sgn1)

        if plant_kind == PLANT_EV:
            _ev_advance(&ps[0], &ps[1], u_cmd * g.uscale, dt, &g)
        else:
            st[0] = ps[0]
            st[1] = ps[1]
            _rk4_2(plant_kind, st, u_cmd, dt, par6)
            ps[0] = st[0]
            ps[1] = st[1]

        wc_n = sqrt(w_c[0] * w_c[0] + w_c[1] * w_c[1] + w_c[2] * w_c[2])
        wa_n = sqrt(w_a[0] * w_a[0] + w_a[1] * w_a[1] + w_a[2] * w_a[2])
        xt_n = sqrt(xt0 * xt0 + xt1 * xt1)
        _eig3(P, &lo, &hi)

        out[k, 0] = t
        out[k, 1] = vd_log
        out[k, 2] = v_v
        out[k, 3] = x1
        out[k, 4] = x2
        out[k, 5] = u_cmd * g.uscale
        out[k, 6] = delta
        out[k, 7] = p_batt
        out[k, 8] = wc_n
        out[k, 9] = wa_n
        out[k, 10] = xt_n
        out[k, 11] = lo
        out[k, 12] = resets

        code = 0
        if _bad(x1) or _bad(x2):
            code = 1
        elif _bad(wc_n):
            code = 2
        elif _bad(wa_n):
            code = 3
        else:
            norm = 0.0
            for i in range(L + 1):
                norm += w_g[i, 0] * w_g[i, 0] + w_g[i, 1] * w_g[i, 1]
            if _bad(sqrt(norm)):
                code = 4
            else:
                norm = 0.0
                for l in range(L):
                    norm += v_g[0, l] * v_g[0, l] + v_g[1, l] * v_g[1, l]
                if _bad(sqrt(norm)):
                    code = 5
                elif _bad(x_hat[0]) or _bad(x_hat[1]):
                    code = 6
        if code:
            return code, k

    return 0, -1


def run_pid_loop(int plant_kind, plant_par_in, vd_in, double kp, double ki,
                 double kd, double integral_clamp, double dt,
                 plant_state_in, out_in):
    cdef double[::1] plant_par = np.ascontiguousarray(plant_par_in, dtype=np.float64)
    cdef double[::1] vd = vd_in
    cdef double[::1] ps = plant_state_in
    cdef double[:, ::1] out = out_in
    cdef GP g
    cdef double par6[6]
    cdef double st[2]
    cdef int n = vd.shape[0]
    cdef int k, i
    cdef double t, v_v, x1, x2, vd_log, e, deriv, u, p_batt, lim
    cdef double integ = 0.0
    cdef double e_prev = 0.0

    if plant_kind == PLANT_EV:
        g.mass = plant_par[0]
        g.r_w = plant_par[1]
        g.gear = plant_par[2]
        g.cda = plant_par[3]
        g.rho = plant_par[4]
        g.crr = plant_par[5]
        g.eta_d = plant_par[6]
        g.eta_r = plant_par[7]
        g.t_max = plant_par[8]
        g.tau = plant_par[9]
    elif plant_kind == PLANT_LQR:
        for i in range(6):
            par6[i] = plant_par[i]

    for k in range(n):
        t = k * dt
        if plant_kind == PLANT_EV:
            v_v = ps[0]
            x1 = v_v - vd[k]
            x2 = _ev_power(v_v, ps[1], &g)
            vd_log = vd[k]
        else:
            v_v = ps[0]
            x2 = ps[1]
            x1 = v_v
            vd_log = 0.0
        p_batt = x2
        e = vd_log - v_v

        integ += e * dt
        if ki > 0:
            lim = integral_clamp / ki
            if integ > lim:
                integ = lim
            if integ < -lim:
                integ = -lim
        deriv = (e - e_prev) / dt if k > 0 else 0.0
        u = kp * e + ki * integ + kd * deriv
        e_prev = e
        if plant_kind == PLANT_EV:
            if u > g.t_max:
                u = g.t_max
            if u < -g.t_max:
                u = -g.t_max

        if plant_kind == PLANT_EV:
            _ev_advance(&ps[0], &ps[1], u, dt, &g)
        else:
            st[0] = ps[0]
            st[1] = ps[1]
            _rk4_2(plant_kind, st, u, dt, par6)
            ps[0] = st[0]
            ps[1] = st[1]

        out[k, 0] = t
        out[k, 1] = vd_log
        out[k, 2] = v_v
        out[k, 3] = x1
        out[k, 4] = x2
        out[k, 5] = u
        out[k, 6] = 0.0
        out[k, 7] = p_batt
        out[k, 8] = 0.0
        out[k, 9] = 0.0
        out[k, 10] = 0.0
        out[k, 11] = 0.0
        out[k, 12] = 0.0

        if _bad(x1) or _bad(x2):
            return 1, k
    return 0, -1


def critic_stream(w_c_in, P_in, w_as_in, phis_in, deltas_in, gains, double dt,
                  lam_min_in, lam_max_in, reset_in):
    cdef double[::1] w_c = w_c_in
    cdef double[:, ::1] P = P_in
    cdef double[:, ::1] w_as = w_as_in
    cdef double[:, ::1] phis = phis_in
    cdef double[::1] deltas = deltas_in
    cdef double[::1] lam_min = lam_min_in
    cdef double[::1] lam_max = lam_max_in
    cdef double[::1] resets = reset_in
    cdef double dummy[1]
    cdef GP g = _gp_from(gains, gains.q1, gains.q2, gains.beta, 1, None, -1)
    g.dt = dt
    cdef int k
    cdef int total = 0
    cdef double wa[3]
    cdef double ph[3]
    cdef double lo, hi
    cdef int i, reset
    for k in range(deltas.shape[0]):
        for i in range(3):
            wa[i] = w_as[k, i]
            ph[i] = phis[k, i]
        reset = _critic_update(&w_c[0], P, wa, ph, deltas[k], &g)
        total += reset
        _eig3(P, &lo, &hi)
        lam_min[k] = lo
        lam_max[k] = hi
        resets[k] = 1.0 if reset else 0.0
    return total


def actor_stream(w_a_in, c_ws_in, phis_in, xs_in, deltas_in, gains, double dt,
                 norm_in):
    cdef double[::1] w_a = w_a_in
    cdef double[:, ::1] c_ws = c_ws_in
    cdef double[:, ::1] phis = phis_in
    cdef double[:, ::1] xs = xs_in
    cdef double[::1] deltas = deltas_in
    cdef double[::1] norms = norm_in
    cdef GP g = _gp_from(gains, gains.q1, gains.q2, gains.beta, 1, None, -1)
    g.dt = dt
    cdef int k, i
    cdef double wc[3]
    cdef double ph[3]
    cdef double u_hat
    for k in range(deltas.shape[0]):
        for i in range(3):
            wc[i] = c_ws[k, i]
            ph[i] = phis[k, i]
        u_hat = -0.5 / g.beta * (xs[k, 0] * w_a[1] + 2.0 * xs[k, 1] * w_a[2])
        _actor_update(&w_a[0], wc, ph, xs[k, 0], xs[k, 1], deltas[k], u_hat, &g)
        norms[k] = sqrt(w_a[0] * w_a[0] + w_a[1] * w_a[1] + w_a[2] * w_a[2])


def identifier_stream(w_g_in, v_g_in, x_hats_in, x_tildes_in, xdots_in, gains,
                      double dt, wnorm_in, vnorm_in):
    cdef double[:, ::1] w_g = w_g_in
    cdef double[:, ::1] v_g = v_g_in
    cdef double[:, ::1] x_hats = x_hats_in
    cdef double[:, ::1] x_tildes = x_tildes_in
    cdef double[:, ::1] xdots = xdots_in
    cdef double[::1] wnorms = wnorm_in
    cdef double[::1] vnorms = vnorm_in
    cdef GP g = _gp_from(gains, gains.q1, gains.q2, gains.beta, 1, None, -1)
    g.dt = dt
    cdef double[:, ::1] ups_w = np.array(gains.upsilon_w, dtype=np.float64)
    cdef double[:, ::1] ups_v = np.array(gains.upsilon_v, dtype=np.float64)
    cdef int L = v_g.shape[1]
    scr = np.zeros(5 * (L + 1), dtype=np.float64)
    cdef double[::1] scr_d = scr[0:L + 1]
    cdef double[::1] scr_sp = scr[L + 1:2 * (L + 1)]
    cdef double[::1] scr_usp = scr[2 * (L + 1):3 * (L + 1)]
    cdef double[::1] scr_m = scr[3 * (L + 1):4 * (L + 1)]
    cdef double[::1] scr_ms = scr[4 * (L + 1):5 * (L + 1)]
    cdef int k, i, l
    cdef double xh[2]
    cdef double xt[2]
    cdef double xd[2]
    cdef double norm
    for k in range(x_tildes.shape[0]):
        xh[0] = x_hats[k, 0]
        xh[1] = x_hats[k, 1]
        xt[0] = x_tildes[k, 0]
        xt[1] = x_tildes[k, 1]
        xd[0] = xdots[k, 0]
        xd[1] = xdots[k, 1]
        _identifier_update(w_g, v_g, ups_w, ups_v, xh, xt, xd,
                           scr_d, scr_sp, scr_usp, scr_m, scr_ms, &g)
        norm = 0.0
        for i in range(L + 1):
            norm += w_g[i, 0] * w_g[i, 0] + w_g[i, 1] * w_g[i, 1]
        wnorms[k] = sqrt(norm)
        norm = 0.0
        for l in range(L):
            norm += v_g[0, l] * v_g[0, l] + v_g[1, l] * v_g[1, l]
        vnorms[k] = sqrt(norm)
