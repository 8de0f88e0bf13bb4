"""Hot numeric kernels.

Every function here is written in the subset of Python/NumPy that numba's
nopython mode accepts, and is wrapped by :func:`radial_plap._jit.kernel`.
With ``RADIAL_PLAP_DISABLE_JIT=1`` the very same source runs interpreted.

Integrands and right-hand sides are passed as first-class functions together
with a flat ``float64`` parameter vector, so one adaptive driver (and one
Runge-Kutta driver) serves every symbolic integrand the package builds.
"""

import math

import numpy as np

from ._jit import kernel

# ---------------------------------------------------------------------------
# Gauss-Kronrod 10/21 rule (QUADPACK qk21 constants)
# ---------------------------------------------------------------------------

XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
])
WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208005099868,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
# Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], ..., XGK[9]
WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

EPMACH = 2.220446049250313e-16
UFLOW = 2.2250738585072014e-308

# substitution modes understood by the quadrature drivers
PLAIN = 0
LEFT_POWER = 1    # t = a + sigma**beta
RIGHT_POWER = 2   # t = b - sigma**beta
TAIL = 3          # t = a / sigma**beta, integral over (a, inf)


@kernel
def _transform(sigma, a, b, mode, beta):
    if mode == PLAIN:
        return sigma, 1.0
    if mode == LEFT_POWER:
        return a + sigma ** beta, beta * sigma ** (beta - 1.0)
    if mode == RIGHT_POWER:
        return b - sigma ** beta, beta * sigma ** (beta - 1.0)
    return a / sigma ** beta, a * beta * sigma ** (-beta - 1.0)


@kernel
def sigma_range(a, b, mode, beta):
    """Integration range of the substituted variable."""
    if mode == PLAIN:
        return a, b
    if mode == LEFT_POWER or mode == RIGHT_POWER:
        return 0.0, (b - a) ** (1.0 / beta)
    return 0.0, 1.0


@kernel
def gk21(fn, params, a, b, mode, beta, lo, hi):
    """One Gauss-Kronrod 21-point panel on ``[lo, hi]`` of the substituted variable.

    Returns ``(kronrod_value, error_estimate, abs_value)``.
    """
    centr = 0.5 * (lo + hi)
    hlgth = 0.5 * (hi - lo)
    fv1 = np.empty(10)
    fv2 = np.empty(10)
    t, jac = _transform(centr, a, b, mode, beta)
    fc = fn(t, params) * jac
    resg = 0.0
    resk = WGK[10] * fc
    resabs = abs(resk)
    for j in range(10):
        absc = hlgth * XGK[j]
        t1, j1 = _transform(centr - absc, a, b, mode, beta)
        t2, j2 = _transform(centr + absc, a, b, mode, beta)
        f1 = fn(t1, params) * j1
        f2 = fn(t2, params) * j2
        fv1[j] = f1
        fv2[j] = f2
        resk += WGK[j] * (f1 + f2)
        resabs += WGK[j] * (abs(f1) + abs(f2))
        if j % 2 == 1:
            resg += WG[j // 2] * (f1 + f2)
    reskh = 0.5 * resk
    resasc = WGK[10] * abs(fc - reskh)
    for j in range(10):
        resasc += WGK[j] * (abs(fv1[j] - reskh) + abs(fv2[j] - reskh))
    result = resk * hlgth
    resabs *= abs(hlgth)
    resasc *= abs(hlgth)
    err = abs((resk - resg) * hlgth)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > UFLOW / (50.0 * EPMACH):
        err = max(EPMACH * 50.0 * resabs, err)
    return result, err, resabs


@kernel
def gk_adaptive(fn, params, a, b, mode, beta, abs_tol, rel_tol, max_depth, limit):
    """Globally adaptive bisection driven by the largest panel error.

    Returns ``(value, abs_error, converged, n_panels)``. A panel that has been
    bisected ``max_depth`` times is frozen; if only frozen panels remain above
    tolerance the result is returned unconverged with the best estimate.
    """
    lo0, hi0 = sigma_range(a, b, mode, beta)
    los = np.empty(limit)
    his = np.empty(limit)
    vals = np.empty(limit)
    errs = np.empty(limit)
    depth = np.zeros(limit, dtype=np.int64)
    v, e, _ = gk21(fn, params, a, b, mode, beta, lo0, hi0)
    los[0] = lo0
    his[0] = hi0
    vals[0] = v
    errs[0] = e
    count = 1
    while True:
        total = 0.0
        total_err = 0.0
        for i in range(count):
            total += vals[i]
            total_err += errs[i]
        if not (math.isfinite(total) and math.isfinite(total_err)):
            return total, total_err, False, count
        if total_err <= max(abs_tol, rel_tol * abs(total)):
            return total, total_err, True, count
        if count >= limit:
            return total, total_err, False, count
        worst = -1
        worst_err = -1.0
        for i in range(count):
            if depth[i] < max_depth and errs[i] > worst_err:
                worst_err = errs[i]
                worst = i
        if worst < 0:
            return total, total_err, False, count
        lo = los[worst]
        hi = his[worst]
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            depth[worst] = max_depth
            continue
        v1, e1, _ = gk21(fn, params, a, b, mode, beta, lo, mid)
        v2, e2, _ = gk21(fn, params, a, b, mode, beta, mid, hi)
        d = depth[worst] + 1
        his[worst] = mid
        vals[worst] = v1
        errs[worst] = e1
        depth[worst] = d
        los[count] = mid
        his[count] = hi
        vals[count] = v2
        errs[count] = e2
        depth[count] = d
        count += 1


# ---------------------------------------------------------------------------
# integrands: fn(t, params) -> float
# ---------------------------------------------------------------------------

@kernel
def f_powersum(t, params):
    """``sum_i c_i t**e_i`` for ``t > 0``; params ``[n, c_1..c_n, e_1..e_n]``."""
    n = int(params[0])
    s = 0.0
    for i in range(n):
        c = params[1 + i]
        if c != 0.0:
            s += c * t ** params[1 + n + i]
    return s


@kernel
def f_powersum_pow(t, params):
    """``(sum_i c_i t**e_i) ** k``; params ``[k, n, c_1..c_n, e_1..e_n]``."""
    k = params[0]
    n = int(params[1])
    s = 0.0
    for i in range(n):
        c = params[2 + i]
        if c != 0.0:
            s += c * t ** params[2 + n + i]
    if s <= 0.0:
        return math.inf if k < 0.0 else 0.0
    return s ** k


@kernel
def power_primitive(c, e, lo, hi):
    """Closed form of ``int_lo^hi c t**e dt`` (``lo >= 0``), inf when divergent."""
    if c == 0.0 or hi == lo:
        return 0.0
    if e == -1.0:
        if lo <= 0.0:
            return math.inf
        return c * math.log(hi / lo)
    k = e + 1.0
    if k < 0.0 and lo <= 0.0:
        return math.inf
    if lo <= 0.0:
        return c * hi ** k / k
    return c * (hi ** k - lo ** k) / k


@kernel
def f_opial_outer(t, params):
    """Outer integrand of the Beesack-Das constant for power-law weights.

    params ``[cq, eq, cp, ep, l, m, s, y, right_pinned]``; the inner primitive
    of ``pweight**(-1/(l+m-1))`` is taken in closed form, from ``s`` to ``t``
    (left pin) or from ``t`` to ``y`` (right pin).
    """
    cq = params[0]
    eq = params[1]
    cp = params[2]
    ep = params[3]
    l = params[4]
    m = params[5]
    s = params[6]
    y = params[7]
    right = params[8] != 0.0
    sig = 1.0 / (l + m - 1.0)
    ci = cp ** (-sig)
    ei = -ep * sig
    if right:
        inner = power_primitive(ci, ei, t, y)
    else:
        inner = power_primitive(ci, ei, s, t)
    if inner <= 0.0:
        return 0.0
    a = (l + m) / l
    return (cq ** a * t ** (eq * a) * cp ** (-m / l) * t ** (-ep * m / l)
            * inner ** (l + m - 1.0))


@kernel
def f_pwl_lhs(t, params):
    """``cq t**eq |uref + k (t - tref)|**l``; params ``[cq, eq, uref, tref, k, l]``."""
    u = params[2] + params[4] * (t - params[3])
    au = abs(u)
    if au == 0.0:
        return 0.0
    return params[0] * t ** params[1] * au ** params[5]


@kernel
def _needs_substitution(e):
    return e > -1.0 and not (e >= 0.0 and e == math.floor(e))


@kernel
def _piece(params, alpha, beta_, e_left, e_right, abs_tol, rel_tol):
    sl = _needs_substitution(e_left)
    sr = _needs_substitution(e_right)
    if e_left <= -1.0 or e_right <= -1.0:
        return math.inf, math.inf, False
    if sl and sr:
        mid = 0.5 * (alpha + beta_)
        v1, e1, c1, _ = gk_adaptive(f_pwl_lhs, params, alpha, mid, LEFT_POWER,
                                    1.0 / (1.0 + e_left), abs_tol, rel_tol, 60, 400)
        v2, e2, c2, _ = gk_adaptive(f_pwl_lhs, params, mid, beta_, RIGHT_POWER,
                                    1.0 / (1.0 + e_right), abs_tol, rel_tol, 60, 400)
        return v1 + v2, e1 + e2, c1 and c2
    if sl:
        v, e, c, _ = gk_adaptive(f_pwl_lhs, params, alpha, beta_, LEFT_POWER,
                                 1.0 / (1.0 + e_left), abs_tol, rel_tol, 60, 400)
        return v, e, c
    if sr:
        v, e, c, _ = gk_adaptive(f_pwl_lhs, params, alpha, beta_, RIGHT_POWER,
                                 1.0 / (1.0 + e_right), abs_tol, rel_tol, 60, 400)
        return v, e, c
    v, e, c, _ = gk_adaptive(f_pwl_lhs, params, alpha, beta_, PLAIN, 1.0,
                             abs_tol, rel_tol, 60, 400)
    return v, e, c


@kernel
def pwl_opial_integrals(ts, us, cq, eq, cp, ep, l, m, abs_tol, rel_tol):
    """Both sides of the Opial inequality for a piecewise-linear ``u``.

    Returns ``(int q|u|^l|u'|^m, int p|u'|^(l+m), abs_error, converged)`` with
    ``q = cq t**eq`` and ``p = cp t**ep``. Segments are split at sign changes
    of ``u``; endpoint power behaviour (zeros of ``u``, the weight at ``t=0``)
    is regularised by substitution.
    """
    lhs = 0.0
    rhs = 0.0
    err = 0.0
    ok = True
    params = np.empty(6)
    params[0] = cq
    params[1] = eq
    params[5] = l
    for i in range(ts.shape[0] - 1):
        t0 = ts[i]
        t1 = ts[i + 1]
        u0 = us[i]
        u1 = us[i + 1]
        if t1 <= t0:
            continue
        k = (u1 - u0) / (t1 - t0)
        if k == 0.0:
            continue
        ak = abs(k)
        rhs += ak ** (l + m) * power_primitive(cp, ep, t0, t1)
        params[4] = k
        if cq == 0.0:
            continue
        scale = ak ** m
        if u0 * u1 < 0.0:
            tr = t0 - u0 / k
            if not (t0 < tr < t1):
                tr = 0.5 * (t0 + t1)
            # left piece [t0, tr], zero at right end
            params[2] = 0.0
            params[3] = tr
            el = eq if t0 == 0.0 else 0.0
            v, e, c = _piece(params, t0, tr, el, l, abs_tol, rel_tol)
            lhs += v * scale
            err += e * scale
            ok = ok and c
            # right piece [tr, t1], zero at left end
            v, e, c = _piece(params, tr, t1, l, 0.0, abs_tol, rel_tol)
            lhs += v * scale
            err += e * scale
            ok = ok and c
        else:
            zl = u0 == 0.0
            zr = u1 == 0.0
            if zl:
                params[2] = 0.0
                params[3] = t0
            elif zr:
                params[2] = 0.0
                params[3] = t1
            else:
                params[2] = u0
                params[3] = t0
            el = (eq if t0 == 0.0 else 0.0) + (l if zl else 0.0)
            er = l if zr else 0.0
            v, e, c = _piece(params, t0, t1, el, er, abs_tol, rel_tol)
            lhs += v * scale
            err += e * scale
            ok = ok and c
    return lhs, rhs, err, ok


# ---------------------------------------------------------------------------
# radial ODE in the variables (u, z = Phi_p(u'))
# ---------------------------------------------------------------------------

# header layout of the rhs parameter vector
P_P, P_N, P_DIV, P_NA, P_IA, P_NPHI, P_IPHI, P_IH = 0, 1, 2, 3, 4, 5, 6, 7


@kernel
def rhs_power(t, u, z, params):
    """Right-hand side for symbolic data (power-sum ``a``, odd-power ``phi``).

    ``phi`` term kinds: 0 ``c |u|^(d-1) u``, 1 ``c u**d`` (integral d),
    2 ``c |u|**d``. ``h`` kinds: 0 zero, 1 ``D s^l t^gamma |u|^l |u'|^(p-l-1)``.
    """
    p = params[P_P]
    n = params[P_N]
    div = params[P_DIV] != 0.0
    na = int(params[P_NA])
    ia = int(params[P_IA])
    nphi = int(params[P_NPHI])
    iphi = int(params[P_IPHI])
    ih = int(params[P_IH])

    if z == 0.0:
        du = 0.0
    elif z > 0.0:
        du = z ** (1.0 / (p - 1.0))
    else:
        du = -((-z) ** (1.0 / (p - 1.0)))

    a = 0.0
    ap = 0.0
    for i in range(na):
        c = params[ia + i]
        e = params[ia + na + i]
        a += c * t ** e
        if div and e != 0.0:
            ap += c * e * t ** (e - 1.0)
    if a == 0.0:
        return du, math.nan

    ph = 0.0
    for i in range(nphi):
        c = params[iphi + i]
        d = params[iphi + nphi + i]
        kind = params[iphi + 2 * nphi + i]
        if kind == 0.0:
            if u > 0.0:
                ph += c * u ** d
            elif u < 0.0:
                ph -= c * (-u) ** d
        elif kind == 1.0:
            ph += c * u ** d
        else:
            ph += c * abs(u) ** d

    h = 0.0
    if params[ih] == 1.0:
        D = params[ih + 1]
        s = params[ih + 2]
        gam = params[ih + 3]
        lh = params[ih + 4]
        au = abs(u)
        if au != 0.0 and D != 0.0:
            h = D * s ** lh * t ** gam * au ** lh * abs(du) ** (p - lh - 1.0)

    coef = (n - 1.0) / t
    if div:
        coef += ap / a
    return du, (h - ph) / a - coef * z


# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                                49.0 / 176.0, -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                                -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

REACHED = 0
BLOW_UP = 1
UNDERFLOW = 2
MAX_STEPS = 3


@kernel
def dopri5(rhs, params, t0, u0, z0, t_end, rtol, atol, h_min, h_max, blowup, max_steps):
    """Adaptive Dormand-Prince integration of ``(u, z)`` from ``t0`` to ``t_end``.

    Either direction is allowed. Returns ``(t, u, z, status)`` where the
    arrays hold every accepted step, including the start point.
    """
    direction = 1.0 if t_end >= t0 else -1.0
    span = abs(t_end - t0)
    cap = 1024
    ts = np.empty(cap)
    us = np.empty(cap)
    zs = np.empty(cap)
    ts[0] = t0
    us[0] = u0
    zs[0] = z0
    count = 1
    status = REACHED
    if span == 0.0:
        return ts[:1].copy(), us[:1].copy(), zs[:1].copy(), status

    h = 0.01 * span
    if t0 != 0.0:
        h = min(h, 0.1 * abs(t0))
    h = min(h, h_max)
    t = t0
    u = u0
    z = z0
    k1u, k1z = rhs(t, u, z, params)
    steps = 0
    while True:
        if abs(u) + abs(z) > blowup:
            status = BLOW_UP
            break
        remaining = abs(t_end - t)
        if remaining <= 1e-15 * max(1.0, abs(t_end)):
            break
        if steps >= max_steps:
            status = MAX_STEPS
            break
        if h < h_min and h < remaining:
            status = UNDERFLOW
            break
        last = h >= remaining
        if last:
            h = remaining
        dt = direction * h

        k2u, k2z = rhs(t + _C2 * dt, u + dt * _A21 * k1u, z + dt * _A21 * k1z, params)
        k3u, k3z = rhs(t + _C3 * dt,
                       u + dt * (_A31 * k1u + _A32 * k2u),
                       z + dt * (_A31 * k1z + _A32 * k2z), params)
        k4u, k4z = rhs(t + _C4 * dt,
                       u + dt * (_A41 * k1u + _A42 * k2u + _A43 * k3u),
                       z + dt * (_A41 * k1z + _A42 * k2z + _A43 * k3z), params)
        k5u, k5z = rhs(t + _C5 * dt,
                       u + dt * (_A51 * k1u + _A52 * k2u + _A53 * k3u + _A54 * k4u),
                       z + dt * (_A51 * k1z + _A52 * k2z + _A53 * k3z + _A54 * k4z), params)
        k6u, k6z = rhs(t + dt,
                       u + dt * (_A61 * k1u + _A62 * k2u + _A63 * k3u + _A64 * k4u + _A65 * k5u),
                       z + dt * (_A61 * k1z + _A62 * k2z + _A63 * k3z + _A64 * k4z + _A65 * k5z),
                       params)
        un = u + dt * (_B1 * k1u + _B3 * k3u + _B4 * k4u + _B5 * k5u + _B6 * k6u)
        zn = z + dt * (_B1 * k1z + _B3 * k3z + _B4 * k4z + _B5 * k5z + _B6 * k6z)
        tn = t_end if last else t + dt
        k7u, k7z = rhs(tn, un, zn, params)

        eu = dt * (_E1 * k1u + _E3 * k3u + _E4 * k4u + _E5 * k5u + _E6 * k6u + _E7 * k7u)
        ez = dt * (_E1 * k1z + _E3 * k3z + _E4 * k4z + _E5 * k5z + _E6 * k6z + _E7 * k7z)
        su = atol + rtol * max(abs(u), abs(un))
        sz = atol + rtol * max(abs(z), abs(zn))
        err = math.sqrt(0.5 * ((eu / su) ** 2 + (ez / sz) ** 2))
        steps += 1

        if not math.isfinite(err):
            h *= 0.25
            continue
        if err <= 1.0:
            t = tn
            u = un
            z = zn
            k1u = k7u
            k1z = k7z
            if count == cap:
                cap *= 2
                nts = np.empty(cap)
                nus = np.empty(cap)
                nzs = np.empty(cap)
                nts[:count] = ts[:count]
                nus[:count] = us[:count]
                nzs[:count] = zs[:count]
                ts = nts
                us = nus
                zs = nzs
            ts[count] = t
            us[count] = u
            zs[count] = z
            count += 1
            if last:
                break
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            fac = max(0.2, 0.9 * err ** -0.2)
        h = min(h * fac, h_max)
    return ts[:count].copy(), us[:count].copy(), zs[:count].copy(), status
