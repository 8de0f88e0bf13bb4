"""Quadrature on subintervals of (0, R) with endpoint singularities.

Power-sum integrands go through the compiled Gauss-Kronrod kernel, with an
algebraic substitution that removes a known ``t**e`` endpoint singularity.
Opaque integrands use a vectorised NumPy driver with the same panel rule and
error estimate.
"""

from __future__ import annotations

import enum
import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .core import ScalarFn, finiteness_known, merge_terms
from .errors import NonIntegrable, WeightInadmissible

ABS_TOL = 1e-12
REL_TOL = 1e-9
MAX_DEPTH = 60
MAX_PANELS = 2000
NEAR_ORIGIN = 1e-4


class Finiteness(str, enum.Enum):
    FINITE = "Finite"
    INFINITE = "Infinite"
    UNDECIDABLE = "Undecidable"


@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_error_estimate: float
    converged: bool
    singular_endpoints_handled: list = field(default_factory=list)


def _nonzero_terms(f: ScalarFn):
    terms = f.power_terms()
    if terms is None:
        return None
    return [(c, e) for c, e in merge_terms(terms) if c != 0.0]


def finiteness(f: ScalarFn, interval) -> Finiteness:
    """Decide whether ``int_s^r |f|`` is finite, term by term for power sums."""
    s, r = float(interval[0]), float(interval[1])
    if s >= r:
        return Finiteness.FINITE
    terms = _nonzero_terms(f)
    if terms is not None:
        exps = [e for _, e in terms]
    elif finiteness_known(f):
        e0, ei = f.leading_exponent("zero"), f.leading_exponent("inf")
        exps = None
    else:
        return Finiteness.UNDECIDABLE
    if s < 0:
        return Finiteness.UNDECIDABLE
    if s == 0:
        if exps is not None:
            if any(e <= -1 for e in exps):
                return Finiteness.INFINITE
        elif e0 is None:
            return Finiteness.UNDECIDABLE
        elif e0 <= -1:
            return Finiteness.INFINITE
    if math.isinf(r):
        if exps is not None:
            if any(e >= -1 for e in exps):
                return Finiteness.INFINITE
        elif ei is None:
            return Finiteness.UNDECIDABLE
        elif ei >= -1:
            return Finiteness.INFINITE
    return Finiteness.FINITE


def power_integral(c: float, e: float, s: float, r: float) -> float:
    """Closed form of ``int_s^r c t**e``."""
    if math.isinf(r):
        if e >= -1:
            return math.inf if c > 0 else -math.inf
        return -c * s ** (e + 1) / (e + 1)
    return K.power_primitive(c, e, s, r)


def _substitution_beta(e):
    """Exponent of the substitution regularising ``t**e`` at an endpoint."""
    if e is None or e <= -1 or (e >= 0 and float(e).is_integer()):
        return None
    return 1.0 / (1.0 + e)


def integrate(f: ScalarFn, s: float, r: float, abs_tol: float = ABS_TOL,
              rel_tol: float = REL_TOL) -> QuadResult:
    """Adaptive quadrature of ``f`` over ``(s, r)``; ``r`` may be ``inf``."""
    s = float(s)
    r = float(r)
    if s == r:
        return QuadResult(0.0, 0.0, True, [])
    if s > r:
        res = integrate(f, r, s, abs_tol, rel_tol)
        return QuadResult(-res.value, res.abs_error_estimate, res.converged,
                          res.singular_endpoints_handled)
    if finiteness(f, (s, r)) is Finiteness.INFINITE:
        raise NonIntegrable("divergent integral")
    if math.isinf(r):
        split = max(1.0, 2.0 * s) if s == 0 else s
        head = integrate(f, s, split, abs_tol, rel_tol) if s < split else QuadResult(0.0, 0.0, True, [])
        tail = _integrate_tail(f, split, abs_tol, rel_tol)
        return QuadResult(head.value + tail.value,
                          head.abs_error_estimate + tail.abs_error_estimate,
                          head.converged and tail.converged,
                          head.singular_endpoints_handled + tail.singular_endpoints_handled)

    # a left end hugging a singular origin: integrate from 0 and subtract
    if 0.0 < s <= NEAR_ORIGIN * (r - s) and _substitution_beta(f.leading_exponent("zero")) is not None:
        full = integrate(f, 0.0, r, abs_tol, rel_tol)
        terms = _nonzero_terms(f)
        if terms is not None:
            # closed form: the substituted range (0, s**(1/beta)) can underflow
            near = QuadResult(sum(power_integral(c, e, 0.0, s) for c, e in terms), 0.0, True)
        else:
            near = integrate(f, 0.0, s, abs_tol, rel_tol)
        return QuadResult(full.value - near.value,
                          full.abs_error_estimate + near.abs_error_estimate,
                          full.converged and near.converged,
                          full.singular_endpoints_handled)

    handled = []
    beta = None
    if s == 0.0:
        beta = _substitution_beta(f.leading_exponent("zero"))
        if beta is None and 0.0 in tuple(f.singular_points) and not finiteness_known(f):
            beta = 2.0
        if beta is not None:
            handled.append(("left", 1.0 / beta - 1.0))
    terms = _nonzero_terms(f)
    if terms is not None:
        params = _powersum_params(terms)
        mode = K.LEFT_POWER if beta is not None else K.PLAIN
        v, e, ok, _ = K.gk_adaptive(K.f_powersum, params, s, r, mode, beta or 1.0,
                                    abs_tol, rel_tol, MAX_DEPTH, MAX_PANELS)
        return QuadResult(float(v), float(e), bool(ok), handled)
    if beta is not None:
        g = _left_substituted(f, s, beta)
        lo, hi = 0.0, (r - s) ** (1.0 / beta)
    else:
        g, lo, hi = f, s, r
    v, e, ok = adaptive_gk_vec(g, lo, hi, abs_tol, rel_tol)
    return QuadResult(v, e, ok, handled)


def _integrate_tail(f, a, abs_tol, rel_tol):
    ei = f.leading_exponent("inf")
    beta = 1.0 if ei is None or ei >= -1 else 1.0 / (-ei - 1.0)
    terms = _nonzero_terms(f)
    if terms is not None:
        v, e, ok, _ = K.gk_adaptive(K.f_powersum, _powersum_params(terms), a, math.inf,
                                    K.TAIL, beta, abs_tol, rel_tol, MAX_DEPTH, MAX_PANELS)
        return QuadResult(float(v), float(e), bool(ok), [("inf", ei)])

    def g(sig):
        sig = np.asarray(sig, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = f(a / sig ** beta) * a * beta * sig ** (-beta - 1.0)
        return np.where(sig > 0, out, 0.0)

    v, e, ok = adaptive_gk_vec(g, 0.0, 1.0, abs_tol, rel_tol)
    return QuadResult(v, e, ok, [("inf", ei)])


def _left_substituted(f, s, beta):
    def g(sig):
        sig = np.asarray(sig, dtype=float)
        return f(s + sig ** beta) * beta * sig ** (beta - 1.0)
    return g


def _powersum_params(terms):
    n = len(terms)
    out = np.empty(1 + 2 * n)
    out[0] = n
    for i, (c, e) in enumerate(terms):
        out[1 + i] = c
        out[1 + n + i] = e
    return out


def _panel(g, lo, hi):
    centr = 0.5 * (lo + hi)
    hl = 0.5 * (hi - lo)
    x = K.XGK[:10]
    nodes = np.concatenate([centr - hl * x, [centr], centr + hl * x])
    fv = np.asarray(g(nodes), dtype=float)
    f1, fc, f2 = fv[:10], fv[10], fv[11:]
    resk = K.WGK[10] * fc + np.dot(K.WGK[:10], f1 + f2)
    resg = np.dot(K.WG, (f1 + f2)[1::2])
    resabs = abs(K.WGK[10] * fc) + np.dot(K.WGK[:10], np.abs(f1) + np.abs(f2))
    reskh = 0.5 * resk
    resasc = K.WGK[10] * abs(fc - reskh) + np.dot(K.WGK[:10], np.abs(f1 - reskh) + np.abs(f2 - reskh))
    result = resk * hl
    resabs *= abs(hl)
    resasc *= abs(hl)
    err = abs((resk - resg) * hl)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > K.UFLOW / (50.0 * K.EPMACH):
        err = max(K.EPMACH * 50.0 * resabs, err)
    return float(result), float(err)


def adaptive_gk_vec(g, lo, hi, abs_tol=ABS_TOL, rel_tol=REL_TOL, max_depth=MAX_DEPTH,
                    limit=MAX_PANELS):
    """Global adaptive G10K21 for a vectorised integrand ``g``.

    Returns ``(value, abs_error, converged)``.
    """
    v, e = _panel(g, lo, hi)
    heap = [(-e, lo, hi, v, e, 0)]
    total, total_err = v, e
    count = 1
    while True:
        if not (math.isfinite(total) and math.isfinite(total_err)):
            return total, total_err, False
        if total_err <= max(abs_tol, rel_tol * abs(total)):
            return total, total_err, True
        if not heap or count >= limit:
            return total, total_err, False
        _, a, b, v, e, d = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        if d >= max_depth or not (a < mid < b):
            continue
        v1, e1 = _panel(g, a, mid)
        v2, e2 = _panel(g, mid, b)
        heapq.heappush(heap, (-e1, a, mid, v1, e1, d + 1))
        heapq.heappush(heap, (-e2, mid, b, v2, e2, d + 1))
        count += 1
        total += v1 + v2 - v
        total_err += e1 + e2 - e


# ---------------------------------------------------------------------------
# inner primitive of v^(-1/(p-1))
# ---------------------------------------------------------------------------


def inner_integrand(v: ScalarFn, p: float) -> ScalarFn:
    return v.power(-1.0 / (p - 1.0))


def inner_primitive(v: ScalarFn, p: float, s: float, t):
    """``int_s^t v^(-1/(p-1))``, closed form for a single power term."""
    terms = _nonzero_terms(v)
    k = -1.0 / (p - 1.0)
    t_arr = np.asarray(t, dtype=float)
    if terms is not None and len(terms) == 1:
        c, e = terms[0]
        if c <= 0:
            raise WeightInadmissible("weight not admissible: not positive")
        ci, ei = c ** k, e * k
        if s == 0 and ei <= -1:
            raise WeightInadmissible("weight not admissible: v^(-1/(p-1)) not integrable at 0")
        out = np.vectorize(lambda x: power_integral(ci, ei, s, x) if x > s else 0.0,
                           otypes=[float])(t_arr)
    else:
        g = inner_integrand(v, p)
        hi = float(np.max(t_arr)) if t_arr.size else s
        if finiteness(g, (s, hi)) is Finiteness.INFINITE:
            raise WeightInadmissible("weight not admissible: v^(-1/(p-1)) not integrable")
        table = PrimitiveTable(g, s)
        out = np.vectorize(table, otypes=[float])(t_arr)
    if np.ndim(t) == 0:
        return float(out)
    return out


class PrimitiveTable:
    """Cached cumulative integral ``t -> int_s^t f``.

    Evaluations at increasing ``t`` reuse the last tabulated node, so
    tabulating on the nodes of an outer quadrature costs one panel sweep.
    """

    def __init__(self, f: ScalarFn, s: float, abs_tol=ABS_TOL, rel_tol=REL_TOL):
        self.f = f
        self.s = float(s)
        self.abs_tol = abs_tol
        self.rel_tol = rel_tol
        self._nodes = [self.s]
        self._values = [0.0]
        self.converged = True

    def __call__(self, t: float) -> float:
        t = float(t)
        if t <= self.s:
            return 0.0
        i = int(np.searchsorted(self._nodes, t))
        if i < len(self._nodes) and self._nodes[i] == t:
            return self._values[i]
        base_t, base_v = self._nodes[i - 1], self._values[i - 1]
        res = integrate(self.f, base_t, t, self.abs_tol, self.rel_tol)
        self.converged = self.converged and res.converged
        val = base_v + res.value
        self._nodes.insert(i, t)
        self._values.insert(i, val)
        return val
