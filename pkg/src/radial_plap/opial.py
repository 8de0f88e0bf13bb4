"""Beesack-Das constants and weighted Opial inequalities.

For exponents ``l, m > 0`` with ``l + m > 1``, weights ``q, P >= 0`` and a
function ``u`` vanishing at one end of ``[a, y]``::

    int_a^y q |u|^l |u'|^m  <=  K(y) int_a^y P |u'|^(l+m)

with the explicit nested-integral constant computed here. When ``u`` is
pinned at the right end the inner primitive of ``P^(-1/(l+m-1))`` runs from
``t`` to ``y`` instead of from ``a`` to ``t``.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import _kernels as K
from .core import Opaque, PowerLaw, ScalarFn, Sum, Constant, merge_terms, finiteness_known
from .errors import InvalidParameter, PreconditionError, WeightInadmissible, WitnessUnavailable
from .singquad import (
    Finiteness,
    PrimitiveTable,
    adaptive_gk_vec,
    finiteness,
    integrate,
)


class Pin(str, enum.Enum):
    LEFT_ZERO = "LeftZero"
    RIGHT_ZERO = "RightZero"


def _single_term(f: ScalarFn):
    terms = f.power_terms()
    if terms is None:
        return None
    merged = merge_terms(terms)
    nz = [(c, e) for c, e in merged if c != 0.0]
    if len(nz) == 0:
        return (0.0, 0.0)
    if len(nz) == 1:
        return nz[0]
    return None


@dataclass(frozen=True)
class OpialSetup:
    l: float
    m: float
    q: ScalarFn
    pweight: ScalarFn
    interval: tuple = (0.0, 1.0)
    pinned: Pin = Pin.LEFT_ZERO

    def __post_init__(self):
        object.__setattr__(self, "pinned", Pin(self.pinned))
        object.__setattr__(self, "interval", (float(self.interval[0]), float(self.interval[1])))
        if not (self.l > 0 and self.m > 0 and self.l + self.m > 1):
            raise InvalidParameter("need l, m > 0 and l + m > 1")
        a, b = self.interval
        if not (a < b) or math.isinf(a):
            raise InvalidParameter("interval must satisfy -inf < a < b")
        g = self.pweight.power(-self.sigma)
        if finiteness(g, (max(a, 0.0), b) if a >= 0 else (a, b)) is Finiteness.INFINITE:
            raise WeightInadmissible("weight not admissible: P^(-1/(l+m-1)) not integrable")

    @property
    def sigma(self) -> float:
        return 1.0 / (self.l + self.m - 1.0)


@dataclass(frozen=True)
class PiecewiseLinearFn:
    """Continuous piecewise-linear function through sorted ``(t, value)`` nodes."""

    ts: np.ndarray
    us: np.ndarray

    def __init__(self, nodes=None, ts=None, us=None):
        if nodes is not None:
            arr = np.asarray(nodes, dtype=float)
            ts, us = arr[:, 0], arr[:, 1]
        ts = np.asarray(ts, dtype=float).copy()
        us = np.asarray(us, dtype=float).copy()
        if ts.ndim != 1 or ts.shape != us.shape or ts.size < 2:
            raise InvalidParameter("need at least two nodes")
        if np.any(np.diff(ts) <= 0):
            raise InvalidParameter("nodes must be strictly increasing")
        ts.flags.writeable = False
        us.flags.writeable = False
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "us", us)

    def __call__(self, t):
        return np.interp(t, self.ts, self.us)

    def slopes(self):
        return np.diff(self.us) / np.diff(self.ts)

    def restrict(self, lo: float, hi: float) -> "PiecewiseLinearFn":
        inner = (self.ts > lo) & (self.ts < hi)
        ts = np.concatenate([[lo], self.ts[inner], [hi]])
        return PiecewiseLinearFn(ts=ts, us=self(ts))


@dataclass(frozen=True)
class OpialConstant:
    value: float
    finite: bool
    converged: bool
    abs_error: float
    truncated: bool
    method: str


def _constant_prefactor(l, m):
    return (m / (l + m)) ** (m / (l + m))


def opial_constant(setup: OpialSetup, s: float, y: float, truncation: float = 1e3,
                   full_output: bool = False):
    """Beesack-Das constant on ``[s, y]``; ``inf`` when the defining integral diverges."""
    a, b = setup.interval
    if s > y:
        raise PreconditionError("need s <= y")
    if s < a or y > b:
        raise PreconditionError("[s, y] must lie inside the setup interval")
    truncated = False
    if math.isinf(y):
        y = float(truncation)
        truncated = True
    if s == y:
        res = OpialConstant(0.0, True, True, 0.0, truncated, "empty")
        return res if full_output else res.value
    tq = _single_term(setup.q)
    tp = _single_term(setup.pweight)
    if tq is not None and tp is not None and s >= 0 and (tp[0] > 0 or tp == (0.0, 0.0)):
        res = _power_constant(setup, tq, tp, s, y, truncated)
    else:
        res = _general_constant(setup, s, y, truncated)
    return res if full_output else res.value


def _power_constant(setup, tq, tp, s, y, truncated):
    l, m = setup.l, setup.m
    cq, eq = tq
    cp, ep = tp
    if cp <= 0:
        raise WeightInadmissible("weight not admissible: P must be positive")
    if cq == 0.0:
        return OpialConstant(0.0, True, True, 0.0, truncated, "power")
    sig = setup.sigma
    kappa = 1.0 - ep * sig  # inner primitive behaves like t**kappa at 0
    right = setup.pinned is Pin.RIGHT_ZERO
    beta = 1.0
    mode = K.PLAIN
    if s == 0.0:
        if kappa <= 0:
            return OpialConstant(math.inf, False, True, 0.0, truncated, "power")
        e_q = eq * (l + m) / l - ep * m / l
        e_out = e_q if right else e_q + kappa * (l + m - 1.0)
        if e_out <= -1:
            return OpialConstant(math.inf, False, True, 0.0, truncated, "power")
        if not (e_out >= 0 and float(e_out).is_integer()):
            mode, beta = K.LEFT_POWER, 1.0 / (1.0 + e_out)
    params = np.array([cq, eq, cp, ep, l, m, s, y, 1.0 if right else 0.0])
    val, err, ok, _ = K.gk_adaptive(K.f_opial_outer, params, s, y, mode, beta,
                                    1e-300, 1e-13, 60, 2000)
    val = float(val)
    if not math.isfinite(val):
        return OpialConstant(math.inf, False, bool(ok), float(err), truncated, "power")
    pre = _constant_prefactor(l, m)
    value = pre * max(val, 0.0) ** (l / (l + m))
    rel = float(err) / val if val > 0 else 0.0
    return OpialConstant(value, True, bool(ok), value * rel * l / (l + m), truncated, "power")


def _general_constant(setup, s, y, truncated):
    l, m = setup.l, setup.m
    sig = setup.sigma
    g = setup.pweight.power(-sig)
    if finiteness(g, (s, y)) is Finiteness.INFINITE:
        return OpialConstant(math.inf, False, True, 0.0, truncated, "quadrature")
    right = setup.pinned is Pin.RIGHT_ZERO
    table = PrimitiveTable(g, s)
    total = table(y) if right else None
    q, P = setup.q, setup.pweight

    def outer(t):
        t = np.asarray(t, dtype=float)
        prim = np.array([table(x) for x in t])
        inner = (total - prim) if right else prim
        inner = np.maximum(inner, 0.0)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = (np.abs(q(t)) ** ((l + m) / l) * P(t) ** (-m / l)
                   * inner ** (l + m - 1.0))
        return np.where(inner > 0, out, 0.0)

    lo, hi, fn = s, y, outer
    if s == 0.0 and finiteness_known(q) and finiteness_known(P):
        eq0, ep0 = q.leading_exponent("zero") or 0.0, P.leading_exponent("zero") or 0.0
        kappa = 1.0 - ep0 * sig
        e_out = eq0 * (l + m) / l - ep0 * m / l + (0.0 if right else kappa * (l + m - 1.0))
        if e_out <= -1 or kappa <= 0:
            return OpialConstant(math.inf, False, True, 0.0, truncated, "quadrature")
        if not (e_out >= 0 and float(e_out).is_integer()):
            beta = 1.0 / (1.0 + e_out)
            lo, hi = 0.0, y ** (1.0 / beta)

            def substituted(sg, beta=beta):
                sg = np.asarray(sg, dtype=float)
                return outer(sg ** beta) * beta * sg ** (beta - 1.0)

            fn = substituted

    val, err, ok = adaptive_gk_vec(fn, lo, hi, 1e-300, 1e-11)
    ok = ok and table.converged
    if not math.isfinite(val):
        return OpialConstant(math.inf, False, ok, err, truncated, "quadrature")
    pre = _constant_prefactor(l, m)
    value = pre * max(val, 0.0) ** (l / (l + m))
    rel = err / val if val > 0 else 0.0
    return OpialConstant(value, True, ok, value * rel * l / (l + m), truncated, "quadrature")


@dataclass(frozen=True)
class ClosedFormK:
    value: float
    finite: bool
    finite_iff: str
    margin: float


def weight_coefficient(p: float, n: float, alpha: float, v: str = "delta") -> float:
    """Coefficient ``c`` in ``v(t) = c t^(alpha-1)`` for ``a(t) = t^alpha``."""
    if v == "delta":
        return (n - 1.0) - alpha * (1.0 - 1.0 / p)
    return (n - 1.0) + alpha / p


def opial_constant_power_closed_form(p: float, l: float, n: float, alpha: float, gamma: float,
                                     C: float, r: float = 1.0, v: str = "delta") -> ClosedFormK:
    """``K(0, r, C t^gamma, c t^(alpha-1))`` with ``m = p - l`` in closed form."""
    if not p > 1:
        raise InvalidParameter("p must exceed 1")
    if not 0 < l < p:
        raise InvalidParameter("need 0 < l < p")
    cv = weight_coefficient(p, n, alpha, v)
    if alpha >= p:
        raise WeightInadmissible("weight not admissible: alpha >= p")
    if cv <= 0:
        raise WeightInadmissible("weight not admissible: nonpositive weight coefficient")
    margin = gamma - (alpha - 1.0 - l)
    cond = "gamma > alpha - 1 - l"
    if margin <= 0:
        return ClosedFormK(math.inf, False, cond, margin)
    e1 = (p / l) * margin  # exponent + 1 of the outer power integral
    kappa = (p - alpha) / (p - 1.0)
    value = (((p - l) / p) ** ((p - l) / p) * (C / cv) * kappa ** (-(p - 1.0) * l / p)
             * (r ** e1 / e1) ** (l / p))
    return ClosedFormK(value, True, cond, margin)


# ---------------------------------------------------------------------------
# verifying the inequality
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OpialCheck:
    lhs: float
    K: float
    rhs: float
    holds: bool
    converged: bool


def _holds(lhs, k, rhs):
    return bool(lhs <= k * rhs * (1.0 + 1e-7) + 1e-12)


def opial_sides(setup: OpialSetup, u, y: float):
    """``(int q|u|^l|u'|^m, int P|u'|^(l+m), converged)`` over ``[a, y]``."""
    a = setup.interval[0]
    if isinstance(u, PiecewiseLinearFn):
        return _pwl_sides(setup, u.restrict(a, y))
    return _fn_sides(setup, u, a, y)


def _pwl_sides(setup, u):
    l, m = setup.l, setup.m
    tq = _single_term(setup.q)
    tp = _single_term(setup.pweight)
    if tq is not None and tp is not None and u.ts[0] >= 0:
        lhs, rhs, _, ok = K.pwl_opial_integrals(u.ts, u.us, tq[0], tq[1], tp[0], tp[1],
                                                l, m, 1e-300, 1e-10)
        return float(lhs), float(rhs), bool(ok)
    lhs = rhs = 0.0
    ok = True
    q, P = setup.q, setup.pweight
    for t0, t1, u0, u1 in zip(u.ts[:-1], u.ts[1:], u.us[:-1], u.us[1:]):
        k = (u1 - u0) / (t1 - t0)
        if k == 0.0:
            continue
        cuts = [t0, t1]
        if u0 * u1 < 0:
            cuts = [t0, t0 - u0 / k, t1]
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            def f_l(t, lo=lo):
                t = np.asarray(t, dtype=float)
                uu = np.abs(u0 + k * (t - t0))
                return q(t) * uu ** l * abs(k) ** m

            def f_r(t):
                return P(np.asarray(t, dtype=float)) * abs(k) ** (l + m)

            v1, _, o1 = adaptive_gk_vec(f_l, lo, hi, 1e-300, 1e-11)
            v2, _, o2 = adaptive_gk_vec(f_r, lo, hi, 1e-300, 1e-11)
            lhs += v1
            rhs += v2
            ok = ok and o1 and o2
    return lhs, rhs, ok


def _fn_sides(setup, u: ScalarFn, a, y):
    l, m = setup.l, setup.m
    du = u.derivative()
    parts = [_single_term(f) for f in (setup.q, u, du, setup.pweight)]
    if all(pt is not None for pt in parts):
        (cq, eq), (cu, eu), (cd, ed), (cp, ep) = parts
        f_lhs = PowerLaw(cq * abs(cu) ** l * abs(cd) ** m, eq + eu * l + ed * m)
        f_rhs = PowerLaw(cp * abs(cd) ** (l + m), ep + ed * (l + m))
    else:
        q, P = setup.q, setup.pweight
        f_lhs = Opaque(lambda t: q(t) * np.abs(u(t)) ** l * np.abs(du(t)) ** m,
                       singular_points=(0.0,))
        f_rhs = Opaque(lambda t: P(t) * np.abs(du(t)) ** (l + m), singular_points=(0.0,))
    r1 = integrate(f_lhs, a, y)
    r2 = integrate(f_rhs, a, y)
    return r1.value, r2.value, r1.converged and r2.converged


def verify_opial(setup: OpialSetup, u: Union[PiecewiseLinearFn, ScalarFn], y: float) -> OpialCheck:
    """Evaluate both sides and the constant; ``holds`` uses a 1e-7 relative slack."""
    a = setup.interval[0]
    if not a < y <= setup.interval[1]:
        raise PreconditionError("y must lie in (a, b]")
    end = a if setup.pinned is Pin.LEFT_ZERO else y
    scale = 1.0
    if isinstance(u, PiecewiseLinearFn):
        scale = max(1.0, float(np.max(np.abs(u.us))))
    if abs(float(u(end))) > 1e-14 * scale:
        raise PreconditionError(f"pin condition violated: u({end}) != 0")
    lhs, rhs, ok = opial_sides(setup, u, y)
    res = opial_constant(setup, a, y, full_output=True)
    return OpialCheck(lhs, res.value, rhs, _holds(lhs, res.value, rhs), ok and res.converged)


@dataclass(frozen=True)
class EqualityWitness:
    u: ScalarFn
    q_required: ScalarFn


def equality_witness(setup: OpialSetup, k1: float = 1.0, k2: float = 1.0) -> EqualityWitness:
    """The extremal pair ``u = k2 v`` and ``q = k1 P^((m-1)/(l+m-1)) v^(l(1-m)/m)``."""
    tp = _single_term(setup.pweight)
    if tp is None or setup.pweight.power_terms() is None:
        raise WitnessUnavailable("witness unavailable for opaque weight")
    l, m = setup.l, setup.m
    sig = setup.sigma
    a = setup.interval[0]
    cp, ep = tp
    if cp <= 0:
        raise WeightInadmissible("weight not admissible: P must be positive")
    kappa = 1.0 - ep * sig
    c = cp ** (-sig) / kappa
    ev = l * (1.0 - m) / m
    if a == 0.0:
        u = PowerLaw(k2 * c, kappa)
        q_req = PowerLaw(k1 * cp ** ((m - 1.0) * sig) * c ** ev,
                         ep * (m - 1.0) * sig + kappa * ev)
        return EqualityWitness(u, q_req)
    off = c * a ** kappa
    u = Sum([PowerLaw(k2 * c, kappa), Constant(-k2 * off)])
    P = setup.pweight
    q_req = Opaque(lambda t: k1 * P(t) ** ((m - 1.0) * sig)
                   * np.maximum(c * np.asarray(t, dtype=float) ** kappa - off, 0.0) ** ev)
    return EqualityWitness(u, q_req)


# ---------------------------------------------------------------------------
# randomised suite and the classical two-sided inequality
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RandomCase:
    index: int
    setup: OpialSetup
    u: PiecewiseLinearFn
    y: float


def random_case(index: int, seed_seq: np.random.SeedSequence) -> RandomCase:
    """A random power-weight setup and a pinned piecewise-linear test function."""
    rng = np.random.default_rng(seed_seq)
    while True:
        l, m = rng.uniform(0.2, 3.0, size=2)
        if l + m > 1.1:
            break
    right = rng.random() < 0.5
    a = 0.0 if rng.random() < 0.7 else rng.uniform(0.1, 1.0)
    b = a + rng.uniform(0.5, 3.0)
    ep = rng.uniform(-0.9, min(2.0, l + m - 1.0) - 0.05)
    kappa = 1.0 - ep / (l + m - 1.0)
    lb = -0.9
    if a == 0.0:
        if right:
            lb = max(lb, l * (-1.0 + ep * m / l) / (l + m))
        else:
            lb = max(lb, -l - 0.9, l * (-1.0 + ep * m / l - kappa * (l + m - 1.0)) / (l + m))
    lb += 0.05
    eq = rng.uniform(lb, max(2.0, lb + 1.0))
    cq, cp = rng.uniform(0.1, 3.0, size=2)
    setup = OpialSetup(l, m, PowerLaw(cq, eq), PowerLaw(cp, ep), (a, b),
                       Pin.RIGHT_ZERO if right else Pin.LEFT_ZERO)
    k = int(rng.integers(3, 31))
    ts = np.sort(np.concatenate([[a, b], rng.uniform(a, b, size=k - 2)]))
    ts = np.unique(ts)
    us = rng.uniform(-2.0, 2.0, size=ts.size)
    us[-1 if right else 0] = 0.0
    return RandomCase(index, setup, PiecewiseLinearFn(ts=ts, us=us), b)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("RADIAL_PLAP_THREADS", "1")))
    except ValueError:
        return 1


def run_random_suite(n_cases: int = 1000, seed: int = 20240613,
                     workers: Optional[int] = None):
    """Check the inequality on ``n_cases`` random cases; results in case order."""
    children = np.random.SeedSequence(seed).spawn(n_cases)

    def one(i):
        case = random_case(i, children[i])
        return case, verify_opial(case.setup, case.u, case.y)

    workers = workers or _workers()
    if workers == 1:
        return [one(i) for i in range(n_cases)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, range(n_cases)))


@dataclass(frozen=True)
class ClassicalCheck:
    lhs: float
    rhs: float
    bound: float
    holds: bool


def classical_opial_check(u: PiecewiseLinearFn) -> ClassicalCheck:
    """``int_0^b |u u'| <= (b/4) int_0^b |u'|^2`` for ``u(0) = u(b) = 0``.

    Each half of ``[0, b]`` is treated as a one-sided problem pinned at its
    outer end, whose constant is ``b/4``.
    """
    t0, b = float(u.ts[0]), float(u.ts[-1])
    if t0 != 0.0:
        raise PreconditionError("u must start at 0")
    scale = max(1.0, float(np.max(np.abs(u.us))))
    if abs(u.us[0]) > 1e-14 * scale or abs(u.us[-1]) > 1e-14 * scale:
        raise PreconditionError("u must vanish at both ends")
    c = 0.5 * b
    one = Constant(1.0)
    left = OpialSetup(1.0, 1.0, one, one, (0.0, c), Pin.LEFT_ZERO)
    right = OpialSetup(1.0, 1.0, one, one, (0.0, b - c), Pin.RIGHT_ZERO)
    ul = u.restrict(0.0, c)
    ur = u.restrict(c, b)
    ur = PiecewiseLinearFn(ts=ur.ts - c, us=ur.us)
    l1, r1, _ = opial_sides(left, ul, c)
    l2, r2, _ = opial_sides(right, ur, b - c)
    lhs, rhs = l1 + l2, r1 + r2
    bound = b / 4.0 * rhs
    return ClassicalCheck(lhs, rhs, bound, bool(lhs <= bound * (1.0 + 1e-7) + 1e-15))
