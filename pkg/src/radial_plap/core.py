"""Domain types and elementary operations.

Scalar functions are a closed family of descriptors. The symbolic members
(power laws, constants, odd powers and their sums) can be differentiated
exactly and expose their power-law structure, which is what makes finiteness
of endpoint-singular integrals decidable. Anything else is wrapped in
:class:`Opaque` and handled numerically.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import (
    DerivativeUnavailable,
    InvalidParameter,
    InverseUndefined,
    NonIntegrable,
)

# ---------------------------------------------------------------------------
# scalar functions
# ---------------------------------------------------------------------------


def _is_int(x: float) -> bool:
    return float(x).is_integer()


def _as_array(t):
    return np.asarray(t, dtype=float)


def _finish(arr_in, out):
    if np.ndim(arr_in) == 0:
        return float(out)
    return out


class ScalarFn:
    """Common interface of the scalar-function descriptors.

    Calling an instance evaluates it (scalars in, scalar out; arrays in,
    arrays out). ``derivative`` is valid on ``t > 0``.
    """

    symbolic = True
    singular_points: tuple = ()

    def __call__(self, t):
        arr = _as_array(t)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = self._eval(arr)
        return _finish(t, out)

    def _eval(self, t):  # pragma: no cover - abstract
        raise NotImplementedError

    def derivative(self) -> "ScalarFn":  # pragma: no cover - abstract
        raise NotImplementedError

    def power_terms(self) -> Optional[list]:
        """``[(c, e), ...]`` with ``f(t) = sum c t**e`` on ``t > 0``, or None."""
        return None

    def leading_exponent(self, at: str = "zero") -> Optional[float]:
        """Dominant exponent as ``t -> 0`` (``at="zero"``) or ``t -> inf``."""
        terms = self.power_terms()
        if terms is None:
            return None
        terms = [(c, e) for c, e in merge_terms(terms) if c != 0.0]
        if not terms:
            return None
        exps = [e for _, e in terms]
        return min(exps) if at == "zero" else max(exps)

    def leading_coefficient(self, at: str = "zero") -> Optional[float]:
        terms = self.power_terms()
        if terms is None:
            return None
        terms = [(c, e) for c, e in merge_terms(terms) if c != 0.0]
        if not terms:
            return 0.0
        e0 = self.leading_exponent(at)
        return sum(c for c, e in terms if e == e0)

    def power(self, k: float) -> "ScalarFn":
        """``t -> f(t)**k`` (intended for positive ``f``)."""
        terms = self.power_terms()
        if terms is not None:
            terms = [(c, e) for c, e in merge_terms(terms) if c != 0.0]
            if len(terms) == 1:
                c, e = terms[0]
                if c < 0 and not _is_int(k):
                    raise InvalidParameter("fractional power of a negative power law")
                return PowerLaw(c ** k, e * k)
            if len(terms) == 0:
                return PowerLaw(0.0, 0.0)
            lead0 = self.leading_exponent("zero")
            leadi = self.leading_exponent("inf")
            base = self
            return Opaque(
                lambda t: _safe_pow(base(t), k),
                singular_points=self.singular_points,
                origin="symbolic-power",
                asymptotic_exponents=(lead0 * k, leadi * k),
                positive_leading=(self.leading_coefficient("zero") > 0,
                                  self.leading_coefficient("inf") > 0),
            )
        base = self
        a0, ai = getattr(self, "asymptotic_exponents", (None, None))
        return Opaque(
            lambda t: _safe_pow(base(t), k),
            singular_points=self.singular_points,
            origin=getattr(self, "origin", "user"),
            asymptotic_exponents=(None if a0 is None else a0 * k,
                                  None if ai is None else ai * k),
        )

    def times_power(self, c: float, e: float) -> "ScalarFn":
        """``t -> c t**e f(t)`` on ``t > 0``."""
        terms = self.power_terms()
        if terms is not None:
            return from_terms([(c * ci, ei + e) for ci, ei in terms])
        base = self
        a0, ai = getattr(self, "asymptotic_exponents", (None, None))
        return Opaque(
            lambda t: c * _as_array(t) ** e * base(t),
            singular_points=tuple(self.singular_points) + ((0.0,) if e < 0 else ()),
            origin=getattr(self, "origin", "user"),
            asymptotic_exponents=(None if a0 is None else a0 + e,
                                  None if ai is None else ai + e),
        )


def _safe_pow(x, k):
    x = _as_array(x)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return np.where(x > 0, np.abs(x) ** k, np.where(x == 0, 0.0 if k > 0 else np.inf, np.nan))


@dataclass(frozen=True)
class PowerLaw(ScalarFn):
    """``coeff * t**exponent``; for ``t < 0`` a non-integral exponent acts on ``|t|``."""

    coeff: float
    exponent: float

    @property
    def singular_points(self):
        return (0.0,) if self.exponent < 0 and self.coeff != 0 else ()

    def _eval(self, t):
        if self.coeff == 0.0:
            return np.zeros_like(t)
        if self.exponent == 0.0:
            return np.full_like(t, self.coeff)
        if _is_int(self.exponent):
            return self.coeff * t ** self.exponent
        return self.coeff * np.abs(t) ** self.exponent

    def derivative(self):
        if self.exponent == 0.0 or self.coeff == 0.0:
            return Constant(0.0)
        return PowerLaw(self.coeff * self.exponent, self.exponent - 1.0)

    def power_terms(self):
        return [(float(self.coeff), float(self.exponent))]


@dataclass(frozen=True)
class Constant(ScalarFn):
    value: float

    def _eval(self, t):
        return np.full_like(t, self.value)

    def derivative(self):
        return Constant(0.0)

    def power_terms(self):
        return [(float(self.value), 0.0)]


@dataclass(frozen=True)
class OddPower(ScalarFn):
    """``coeff * |t|**(degree-1) * t``."""

    coeff: float
    degree: float

    def __post_init__(self):
        if not self.degree > 0:
            raise InvalidParameter("odd power degree must be positive")

    def _eval(self, t):
        return self.coeff * np.sign(t) * np.abs(t) ** self.degree

    def derivative(self):
        # valid for t > 0
        if self.degree == 1.0:
            return Constant(self.coeff)
        return PowerLaw(self.coeff * self.degree, self.degree - 1.0)

    def power_terms(self):
        return [(float(self.coeff), float(self.degree))]


@dataclass(frozen=True)
class Sum(ScalarFn):
    terms: tuple

    def __init__(self, terms: Sequence[ScalarFn]):
        object.__setattr__(self, "terms", tuple(terms))

    @property
    def symbolic(self):
        return all(t.symbolic for t in self.terms)

    @property
    def singular_points(self):
        pts = []
        for t in self.terms:
            pts.extend(t.singular_points)
        return tuple(sorted(set(pts)))

    def _eval(self, t):
        out = np.zeros_like(t)
        for term in self.terms:
            out = out + term._eval(t)
        return out

    def derivative(self):
        return Sum([t.derivative() for t in self.terms])

    def power_terms(self):
        out = []
        for t in self.terms:
            pt = t.power_terms()
            if pt is None:
                return None
            out.extend(pt)
        return out


@dataclass(frozen=True, eq=False)
class Opaque(ScalarFn):
    """Numerically evaluated function.

    ``origin="symbolic-power"`` marks functions derived from symbolic data
    whose behaviour at ``0`` and ``inf`` is still known through
    ``asymptotic_exponents``; for those, finiteness remains decidable.
    """

    evaluator: Callable
    singular_points: tuple = ()
    derivative_fn: Optional[Callable] = None
    differentiable: bool = False
    origin: str = "user"
    asymptotic_exponents: tuple = (None, None)
    positive_leading: tuple = (True, True)

    symbolic = False

    def _eval(self, t):
        try:
            out = np.asarray(self.evaluator(t), dtype=float)
            if out.shape == t.shape:
                return out
        except Exception:
            pass
        return np.vectorize(lambda x: float(self.evaluator(float(x))), otypes=[float])(t)

    def derivative(self):
        if self.derivative_fn is not None:
            return Opaque(self.derivative_fn, singular_points=self.singular_points)
        if self.differentiable:
            f = self

            def fd(t):
                t = _as_array(t)
                h = np.maximum(1e-6, 1e-6 * np.abs(t))
                return (f(t + h) - f(t - h)) / (2.0 * h)

            return Opaque(fd, singular_points=self.singular_points)
        raise DerivativeUnavailable("derivative unavailable for opaque function")

    def leading_exponent(self, at="zero"):
        return self.asymptotic_exponents[0 if at == "zero" else 1]

    def leading_coefficient(self, at="zero"):
        return None


def merge_terms(terms):
    """Combine power terms sharing an exponent, preserving first-seen order."""
    acc: dict = {}
    for c, e in terms:
        acc[e] = acc.get(e, 0.0) + c
    return [(c, e) for e, c in acc.items()]


def from_terms(terms) -> ScalarFn:
    merged = [(c, e) for c, e in merge_terms(terms) if c != 0.0]
    if not merged:
        return Constant(0.0)
    fns = [Constant(c) if e == 0.0 else PowerLaw(c, e) for c, e in merged]
    return fns[0] if len(fns) == 1 else Sum(fns)


def is_symbolic(f: ScalarFn) -> bool:
    return f.power_terms() is not None


def finiteness_known(f: ScalarFn) -> bool:
    """True when the endpoint behaviour of ``f`` is known exactly."""
    return is_symbolic(f) or getattr(f, "origin", "user") == "symbolic-power"


def is_odd(f: ScalarFn) -> bool:
    """Symbolic oddness, or a 101-point symmetric sample (51 radii, both signs) for opaque input.

    Points where ``f`` is undefined on both sides (outside its domain) are skipped.
    """
    if isinstance(f, OddPower):
        return True
    if isinstance(f, Constant):
        return f.value == 0.0
    if isinstance(f, PowerLaw):
        return f.coeff == 0.0 or (_is_int(f.exponent) and int(f.exponent) % 2 == 1)
    if isinstance(f, Sum):
        return all(is_odd(t) for t in f.terms)
    grid = np.linspace(0.0, 10.0, 51)
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        pos = np.asarray(f(grid), dtype=float)
        neg = np.asarray(f(-grid), dtype=float)
    both = np.isfinite(pos) & np.isfinite(neg)
    if np.any(np.isfinite(pos) != np.isfinite(neg)) or not np.any(both):
        return False
    pos, neg = pos[both], neg[both]
    scale = np.maximum(1.0, np.abs(pos))
    return bool(np.all(np.abs(pos + neg) <= 1e-12 * scale))


# ---------------------------------------------------------------------------
# problem description
# ---------------------------------------------------------------------------


class Form(str, enum.Enum):
    NONDIVERGENT = "nondivergent"
    DIVERGENT = "divergent"


class VChoice(str, enum.Enum):
    DELTA = "delta"
    D = "d"


@dataclass(frozen=True)
class WeightSpec:
    a: ScalarFn
    n: float
    p: float

    def __post_init__(self):
        if not self.p > 1:
            raise InvalidParameter(f"p must exceed 1, got {self.p}")
        if not self.n >= 1:
            raise InvalidParameter(f"n must be at least 1, got {self.n}")


@dataclass(frozen=True)
class GrowthEnvelope:
    theta: float
    l: float
    q: ScalarFn
    v_choice: VChoice = VChoice.DELTA

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise InvalidParameter("theta must lie in [0, 1]")
        if not self.l > 0:
            raise InvalidParameter("l must be positive")
        object.__setattr__(self, "v_choice", VChoice(self.v_choice))
        terms = self.q.power_terms()
        if terms is not None and len(merge_terms(terms)) == 1:
            if merge_terms(terms)[0][0] < 0:
                raise InvalidParameter("q must be nonnegative")
        else:
            sample = self.q(np.geomspace(1e-6, 1e3, 200))
            if np.any(sample < 0):
                raise InvalidParameter("q must be nonnegative")


class HSpec:
    """Lower-order term ``h(tau, lambda0, lambda1)``."""

    def evaluate(self, tau, lam0, lam1, p: float):  # pragma: no cover - abstract
        raise NotImplementedError

    def at_zero(self, tau, p: float):
        """``h(tau, 0, 0)``."""
        tau = _as_array(tau)
        return self.evaluate(tau, np.zeros_like(tau), np.zeros_like(tau), p)


@dataclass(frozen=True)
class HZero(HSpec):
    def evaluate(self, tau, lam0, lam1, p):
        out = np.zeros(np.broadcast(_as_array(tau), _as_array(lam0), _as_array(lam1)).shape)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SharpnessProduct(HSpec):
    """``D s^l tau^gamma |lambda0|^l |lambda1|^(p-l-1)``; zero wherever ``lambda0 = 0``."""

    D: float
    s: float
    gamma: float
    l: float

    def evaluate(self, tau, lam0, lam1, p):
        tau, lam0, lam1 = np.broadcast_arrays(_as_array(tau), _as_array(lam0), _as_array(lam1))
        e1 = p - self.l - 1.0
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            base = self.D * self.s ** self.l * tau ** self.gamma * np.abs(lam0) ** self.l
            f1 = np.abs(lam1) ** e1 if e1 != 0.0 else np.ones_like(lam1)
            out = np.where(lam0 == 0.0, 0.0, base * f1)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class OpaqueH(HSpec):
    evaluator: Callable

    def evaluate(self, tau, lam0, lam1, p):
        tau, lam0, lam1 = np.broadcast_arrays(_as_array(tau), _as_array(lam0), _as_array(lam1))
        try:
            out = np.asarray(self.evaluator(tau, lam0, lam1), dtype=float)
            if out.shape != tau.shape:
                raise ValueError
        except Exception:
            out = np.vectorize(lambda a, b, c: float(self.evaluator(a, b, c)),
                               otypes=[float])(tau, lam0, lam1)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ProblemSpec:
    weight: WeightSpec
    R: float
    phi: ScalarFn
    h: HSpec = field(default_factory=HZero)
    form: Form = Form.NONDIVERGENT
    envelope: Optional[GrowthEnvelope] = None

    def __post_init__(self):
        object.__setattr__(self, "form", Form(self.form))
        if not self.R > 0:
            raise InvalidParameter("R must be positive")
        if not is_odd(self.phi):
            raise InvalidParameter("phi must be odd")
        p = self.weight.p
        if isinstance(self.h, SharpnessProduct) and not 0 < self.h.l < p:
            raise InvalidParameter("sharpness product needs 0 < l < p")
        if self.envelope is not None and not self.envelope.l < p:
            raise InvalidParameter("envelope l must be below p")

    @property
    def p(self):
        return self.weight.p

    @property
    def n(self):
        return self.weight.n

    @property
    def a(self):
        return self.weight.a


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def _check_p(p):
    if not p > 1:
        raise InvalidParameter(f"p must exceed 1, got {p}")


def phi_p(p: float, lam):
    """``|lam|^(p-2) lam``, exactly 0 at 0."""
    _check_p(p)
    x = _as_array(lam)
    out = np.sign(x) * np.abs(x) ** (p - 1.0)
    return _finish(lam, out)


def phi_p_inverse(p: float, z):
    """``sgn(z) |z|^(1/(p-1))``."""
    _check_p(p)
    x = _as_array(z)
    out = np.sign(x) * np.abs(x) ** (1.0 / (p - 1.0))
    return _finish(z, out)


def delta_a_fn(w: WeightSpec) -> ScalarFn:
    """``(n-1) a/tau - (1-1/p) a'`` as a function of tau."""
    return _combine(w, -(1.0 - 1.0 / w.p))


def d_a_fn(w: WeightSpec) -> ScalarFn:
    """``(n-1) a/tau + a'/p`` as a function of tau."""
    return _combine(w, 1.0 / w.p)


def _combine(w: WeightSpec, k: float) -> ScalarFn:
    a = w.a
    da = a.derivative()
    terms = a.power_terms()
    dterms = da.power_terms()
    if terms is not None and dterms is not None:
        return from_terms([((w.n - 1.0) * c, e - 1.0) for c, e in terms]
                          + [(k * c, e) for c, e in dterms])
    n = w.n
    return Opaque(lambda t: (n - 1.0) * a(t) / _as_array(t) + k * da(t),
                  singular_points=(0.0,) + tuple(a.singular_points))


def _check_tau(tau):
    if np.any(_as_array(tau) <= 0):
        raise InvalidParameter("tau must be positive")


def delta_a(w: WeightSpec, tau):
    _check_tau(tau)
    return delta_a_fn(w)(tau)


def d_a(w: WeightSpec, tau):
    _check_tau(tau)
    return d_a_fn(w)(tau)


def v_fn(w: WeightSpec, choice) -> ScalarFn:
    return delta_a_fn(w) if VChoice(choice) is VChoice.DELTA else d_a_fn(w)


def _odd_primitive_terms(phi: ScalarFn):
    """``[(c, e)]`` with ``Phi(t) = sum c |t|^e``, or None if not closed form."""
    if isinstance(phi, OddPower):
        return [(phi.coeff / (phi.degree + 1.0), phi.degree + 1.0)]
    if isinstance(phi, PowerLaw):
        if phi.coeff == 0.0:
            return []
        e = phi.exponent
        if e <= -1.0:
            raise NonIntegrable("non-integrable source")
        return [(phi.coeff / (e + 1.0), e + 1.0)]
    if isinstance(phi, Constant):
        return []
    if isinstance(phi, Sum):
        out = []
        for t in phi.terms:
            sub = _odd_primitive_terms(t)
            if sub is None:
                return None
            out.extend(sub)
        return out
    return None


def big_phi(phi: ScalarFn, t):
    """``int_0^t phi``; even in ``t``."""
    terms = _odd_primitive_terms(phi)
    x = _as_array(t)
    if terms is not None:
        ax = np.abs(x)
        out = np.zeros_like(ax)
        for c, e in terms:
            out = out + c * ax ** e
        return _finish(t, out)
    from .singquad import integrate

    def one(v):
        v = abs(float(v))
        if v == 0.0:
            return 0.0
        res = integrate(phi, 0.0, v)
        if not math.isfinite(res.value):
            raise NonIntegrable("non-integrable source")
        return res.value

    out = np.vectorize(one, otypes=[float])(x)
    return _finish(t, out)


def big_phi_inverse(phi: ScalarFn, y: float) -> float:
    """The ``t >= 0`` with ``big_phi(phi, t) = y``; ``inf`` above the supremum."""
    if y < 0:
        raise InvalidParameter("y must be nonnegative")
    if y == 0:
        return 0.0
    terms = _odd_primitive_terms(phi)
    if terms is not None:
        merged = [(c, e) for c, e in merge_terms(terms) if c != 0.0]
        if len(merged) == 1 and merged[0][0] > 0:
            c, e = merged[0]
            return (y / c) ** (1.0 / e)
    # bracket by doubling, checking monotonicity along the way
    lo, hi = 0.0, 1.0
    prev = 0.0
    stagnant = 0
    while True:
        val = float(big_phi(phi, hi))
        probe = phi(np.linspace(lo, hi, 65)[1:])
        if np.any(probe <= 0):
            raise InverseUndefined("big_phi is not strictly increasing")
        if val >= y:
            break
        stagnant = stagnant + 1 if val - prev <= 1e-12 * val else 0
        if stagnant >= 10 or hi > 1e150:
            return math.inf
        prev = val
        lo, hi = hi, 2.0 * hi
    return brentq(lambda t: float(big_phi(phi, t)) - y, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                  maxiter=500)
