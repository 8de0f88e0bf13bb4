"""Radial ODEs in the variables ``(u, z = Phi_p(u'))``.

Nondivergent form::

    a (Phi_p(u'))' + (n-1) a/tau Phi_p(u') - h(tau, u, u') + phi(u) = 0

Divergent form::

    (a Phi_p(u'))' + (n-1) a/tau Phi_p(u') - h(tau, u, u') + phi(u) = 0

Symbolic problems are integrated by the compiled Dormand-Prince kernel;
anything involving opaque data runs the same kernel interpreted, with a
Python right-hand side.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Union

import numpy as np
from scipy.interpolate import make_interp_spline
from scipy.optimize import brentq

from . import _kernels as K
from ._jit import interpreted
from .core import (
    Constant,
    Form,
    HZero,
    OddPower,
    PowerLaw,
    ProblemSpec,
    ScalarFn,
    SharpnessProduct,
    Sum,
    merge_terms,
    phi_p,
    phi_p_inverse,
)
from .errors import DegenerateCoefficient, InvalidParameter, PreconditionError


class Direction(str, enum.Enum):
    FORWARD = "ForwardFromZero"
    BACKWARD = "BackwardFromR"


class Termination(str, enum.Enum):
    REACHED = "reached endpoint"
    BLOW_UP = "blow-up detected"
    UNDERFLOW = "step underflow"
    MAX_STEPS = "maximum steps exceeded"
    SYNTHETIC = "synthetic"

    @property
    def ok(self) -> bool:
        return self in (Termination.REACHED, Termination.SYNTHETIC)


_STATUS = {K.REACHED: Termination.REACHED, K.BLOW_UP: Termination.BLOW_UP,
           K.UNDERFLOW: Termination.UNDERFLOW, K.MAX_STEPS: Termination.MAX_STEPS}

BLOWUP = 1e12
MAX_STEPS = 2_000_000


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Numerical solution on a strictly increasing grid of radii."""

    tau: np.ndarray
    u: np.ndarray
    z: np.ndarray
    p: float
    direction: Direction = Direction.FORWARD
    epsilon: float = 0.0
    rtol: float = float("nan")
    atol: float = float("nan")
    termination: Termination = Termination.REACHED

    def __post_init__(self):
        for name in ("tau", "u", "z"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if not (self.tau.shape == self.u.shape == self.z.shape):
            raise InvalidParameter("tau, u, z must have equal length")
        if self.tau.size > 1 and np.any(np.diff(self.tau) <= 0):
            raise InvalidParameter("tau must be strictly increasing")

    @property
    def du(self) -> np.ndarray:
        return phi_p_inverse(self.p, self.z)

    @property
    def scale(self) -> float:
        return max(1.0, float(np.max(np.abs(self.u)))) if self.u.size else 1.0

    def __len__(self):
        return self.tau.size

    # spline reconstruction --------------------------------------------------

    def _spline(self, values):
        k = min(5, self.tau.size - 1)
        if k % 2 == 0:
            k -= 1
        return make_interp_spline(self.tau, values, k=max(k, 1))

    @property
    def u_spline(self):
        return self._spline(self.u)

    @property
    def z_spline(self):
        return self._spline(self.z)

    def max_abs_u(self) -> float:
        """Sup of ``|u|``, refined between nodes where ``u'`` changes sign."""
        best = float(np.max(np.abs(self.u)))
        if self.tau.size < 4:
            return best
        us, zs = self.u_spline, self.z_spline
        for i in np.nonzero(np.sign(self.z[:-1]) * np.sign(self.z[1:]) < 0)[0]:
            a, b = self.tau[i], self.tau[i + 1]
            try:
                t = brentq(lambda x: float(zs(x)), a, b, xtol=1e-15)
            except ValueError:
                continue
            best = max(best, abs(float(us(t))))
        return best

    # construction helpers --------------------------------------------------

    @classmethod
    def from_function(cls, tau, u_fn: Callable, du_fn: Callable, p: float,
                      direction: Direction = Direction.FORWARD) -> "Trajectory":
        tau = np.asarray(tau, dtype=float)
        return cls(tau, np.asarray(u_fn(tau), dtype=float), phi_p(p, np.asarray(du_fn(tau), dtype=float)),
                   p, Direction(direction), float(tau[0]), termination=Termination.SYNTHETIC)

    def scaled(self, factor: float) -> "Trajectory":
        return replace(self, u=self.u * factor, z=phi_p(self.p, self.du * factor))

    # CSV ---------------------------------------------------------------------

    def to_csv(self, target=None) -> str:
        buf = io.StringIO()
        data = np.column_stack([self.tau, self.u, self.du, self.z])
        np.savetxt(buf, data, delimiter=",", header="tau,u,du,z", comments="", fmt="%.17g")
        text = buf.getvalue()
        if target is not None:
            if hasattr(target, "write"):
                target.write(text)
            else:
                with open(target, "w", encoding="utf-8") as fh:
                    fh.write(text)
        return text

    @classmethod
    def from_csv(cls, source, p: Optional[float] = None, **meta) -> "Trajectory":
        if hasattr(source, "read"):
            text = source.read()
        else:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        lines = text.strip().splitlines()
        if not lines or lines[0].strip() != "tau,u,du,z":
            raise InvalidParameter("trajectory CSV must start with header tau,u,du,z")
        data = np.loadtxt(io.StringIO("\n".join(lines[1:])), delimiter=",", ndmin=2)
        if data.size == 0:
            data = np.empty((0, 4))
        tau, u, du, z = data.T
        if p is None:
            p = infer_p(du, z)
        meta.setdefault("termination", Termination.SYNTHETIC)
        return cls(tau, u, z, p, **meta)


def infer_p(du, z) -> float:
    """Recover ``p`` from ``z = |du|^(p-2) du`` at a node with ``|du|`` away from 0 and 1."""
    du, z = np.abs(np.asarray(du)), np.abs(np.asarray(z))
    good = (du > 0) & (z > 0) & (np.abs(np.log(du)) > 1e-3)
    if not np.any(good):
        return 2.0
    i = int(np.argmax(np.abs(np.log(du)) * good))
    return float(1.0 + np.log(z[i]) / np.log(du[i]))


@dataclass(frozen=True)
class ShootSpec:
    direction: Direction = Direction.FORWARD
    epsilon: Optional[float] = None
    u0: float = 0.0
    du0: float = 0.0
    rtol: float = 1e-9
    atol: float = 1e-12
    t_end: Optional[float] = None
    max_step: float = math.inf
    t_start: Optional[float] = None  # interior restart point; default is the endpoint offset

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction(self.direction))
        if self.epsilon is not None and not self.epsilon > 0:
            raise InvalidParameter("epsilon must be positive")
        if not (math.isfinite(self.u0) and math.isfinite(self.du0)):
            raise InvalidParameter("initial data must be finite")

    def resolved_epsilon(self, R: float) -> float:
        if self.epsilon is not None:
            eps = float(self.epsilon)
        elif math.isfinite(R):
            eps = 1e-6 * R
        else:
            eps = 1e-6
        if math.isfinite(R) and not eps < R / 10:
            raise InvalidParameter("epsilon must be below R/10")
        return eps


# ---------------------------------------------------------------------------
# right-hand sides
# ---------------------------------------------------------------------------


def _h_value(spec: ProblemSpec, tau, u, du):
    return float(spec.h.evaluate(tau, u, du, spec.p))


def rhs_nondivergent(spec: ProblemSpec, tau: float, u: float, z: float):
    """``(u', z')`` of the nondivergent equation."""
    if not tau > 0:
        raise InvalidParameter("tau must be positive")
    a = float(spec.a(tau))
    if a == 0:
        raise DegenerateCoefficient(f"degenerate interior coefficient: a({tau}) = 0")
    du = float(phi_p_inverse(spec.p, z))
    dz = (_h_value(spec, tau, u, du) - float(spec.phi(u))) / a - (spec.n - 1.0) * z / tau
    return du, dz


def rhs_divergent(spec: ProblemSpec, tau: float, u: float, z: float):
    """``(u', z')`` of the divergent equation, expanded by the product rule."""
    if not tau > 0:
        raise InvalidParameter("tau must be positive")
    a = float(spec.a(tau))
    if a == 0:
        raise DegenerateCoefficient(f"degenerate interior coefficient: a({tau}) = 0")
    da = float(spec.a.derivative()(tau))
    du = float(phi_p_inverse(spec.p, z))
    dz = (_h_value(spec, tau, u, du) - float(spec.phi(u))) / a - ((spec.n - 1.0) / tau + da / a) * z
    return du, dz


def rhs(spec: ProblemSpec, tau, u, z):
    if spec.form is Form.DIVERGENT:
        return rhs_divergent(spec, tau, u, z)
    return rhs_nondivergent(spec, tau, u, z)


def _phi_terms(phi: ScalarFn):
    if isinstance(phi, OddPower):
        return [(phi.coeff, phi.degree, 0.0)]
    if isinstance(phi, PowerLaw):
        if phi.coeff == 0:
            return []
        if float(phi.exponent).is_integer():
            return [(phi.coeff, phi.exponent, 1.0)]
        return [(phi.coeff, phi.exponent, 2.0)]
    if isinstance(phi, Constant):
        return [] if phi.value == 0 else None
    if isinstance(phi, Sum):
        out = []
        for t in phi.terms:
            sub = _phi_terms(t)
            if sub is None:
                return None
            out.extend(sub)
        return out
    return None


def kernel_params(spec: ProblemSpec) -> Optional[np.ndarray]:
    """Flat parameter vector for the compiled right-hand side, or None."""
    a_terms = spec.a.power_terms()
    phi_terms = _phi_terms(spec.phi)
    if a_terms is None or phi_terms is None:
        return None
    if isinstance(spec.h, HZero):
        hpart = [0.0, 0.0, 0.0, 0.0, 0.0]
    elif isinstance(spec.h, SharpnessProduct):
        h = spec.h
        hpart = [1.0, h.D, h.s, h.gamma, h.l]
    else:
        return None
    a_terms = [(c, e) for c, e in merge_terms(a_terms) if c != 0.0]
    na, nphi = len(a_terms), len(phi_terms)
    ia = 8
    iphi = ia + 2 * na
    ih = iphi + 3 * nphi
    head = [spec.p, spec.n, 1.0 if spec.form is Form.DIVERGENT else 0.0,
            na, ia, nphi, iphi, ih]
    body = ([c for c, _ in a_terms] + [e for _, e in a_terms]
            + [c for c, _, _ in phi_terms] + [d for _, d, _ in phi_terms]
            + [k for _, _, k in phi_terms] + hpart)
    return np.array(head + body, dtype=float)


def _python_rhs(spec):
    a = spec.a
    da = a.derivative() if spec.form is Form.DIVERGENT else None
    p, n = spec.p, spec.n
    phi, h = spec.phi, spec.h

    def f(t, u, z, params):
        av = float(a(t))
        if av == 0.0:
            return 0.0, math.nan
        du = math.copysign(abs(z) ** (1.0 / (p - 1.0)), z) if z != 0 else 0.0
        coef = (n - 1.0) / t
        if da is not None:
            coef += float(da(t)) / av
        return du, (float(h.evaluate(t, u, du, p)) - float(phi(u))) / av - coef * z

    return f


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------


def solve(spec: ProblemSpec, shoot: ShootSpec) -> Trajectory:
    """Shoot from one end toward the other; truncation is reported, not raised."""
    R = spec.R
    eps = shoot.resolved_epsilon(R)
    if shoot.direction is Direction.FORWARD:
        t0 = eps if shoot.t_start is None else float(shoot.t_start)
        t_end = shoot.t_end if shoot.t_end is not None else R
    else:
        t0 = R if shoot.t_start is None else float(shoot.t_start)
        t_end = eps if shoot.t_end is None else shoot.t_end
    if not (math.isfinite(t0) and math.isfinite(t_end)):
        raise PreconditionError("an infinite R needs an explicit t_end")
    if not (0 < t0 and (t0 <= R)) or t0 == t_end:
        raise PreconditionError("start point must lie inside (0, R)")
    lo, hi = min(t0, t_end), max(t0, t_end)
    grid = np.linspace(lo, hi, 1001)[1:-1]
    avals = spec.a(grid)
    # an exact zero on the grid, or a sign change between neighbours
    bad = (avals == 0) | np.concatenate([np.sign(avals[:-1]) * np.sign(avals[1:]) < 0, [False]])
    if np.any(bad):
        i = int(np.argmax(bad))
        raise DegenerateCoefficient(f"degenerate interior coefficient: a vanishes near {grid[i]}")
    z0 = float(phi_p(spec.p, shoot.du0))
    span = abs(t_end - t0)
    h_min = 1e-14 * (R if math.isfinite(R) else span)
    h_max = float(shoot.max_step) if math.isfinite(shoot.max_step) else span
    params = kernel_params(spec)
    if params is not None:
        ts, us, zs, status = K.dopri5(K.rhs_power, params, float(t0), float(shoot.u0), z0,
                                      float(t_end), shoot.rtol, shoot.atol, h_min, h_max,
                                      BLOWUP, MAX_STEPS)
    else:
        ts, us, zs, status = interpreted(K.dopri5)(
            _python_rhs(spec), np.zeros(1), float(t0), float(shoot.u0), z0, float(t_end),
            shoot.rtol, shoot.atol, h_min, h_max, BLOWUP, MAX_STEPS)
    ts, us, zs = np.asarray(ts), np.asarray(us), np.asarray(zs)
    good = np.isfinite(us) & np.isfinite(zs)
    ts, us, zs = ts[good], us[good], zs[good]
    if shoot.direction is Direction.BACKWARD:
        ts, us, zs = ts[::-1], us[::-1], zs[::-1]
    return Trajectory(ts, us, zs, spec.p, shoot.direction, eps, shoot.rtol, shoot.atol,
                      _STATUS[int(status)])


# ---------------------------------------------------------------------------
# residuals
# ---------------------------------------------------------------------------


def _flux_derivative_symbolic(p, du, d2u):
    """``(Phi_p(u'))' = (p-1)|u'|^(p-2) u''``."""
    if p == 2.0:
        return d2u
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (p - 1.0) * np.abs(du) ** (p - 2.0) * d2u
    return np.where(d2u == 0, 0.0, out)


def residual(spec: ProblemSpec, u: Union[ScalarFn, Trajectory], tau, form: Optional[Form] = None):
    """Left-hand side of the selected equation at ``tau``."""
    form = Form(form) if form is not None else spec.form
    tau_arr = np.asarray(tau, dtype=float)
    p, n = spec.p, spec.n
    a = spec.a(tau_arr)
    if isinstance(u, Trajectory):
        uv = u.u_spline(tau_arr)
        zv = u.z_spline(tau_arr)
        dz = u.z_spline.derivative()(tau_arr)
        duv = phi_p_inverse(p, zv)
        if form is Form.DIVERGENT:
            flux = make_interp_spline(u.tau, spec.a(u.tau) * u.z,
                                      k=min(5, u.tau.size - 1)).derivative()(tau_arr)
        else:
            flux = a * dz
    else:
        d1 = u.derivative()
        uv = u(tau_arr)
        duv = d1(tau_arr)
        d2 = d1.derivative()(tau_arr)
        zv = phi_p(p, duv)
        dz = _flux_derivative_symbolic(p, duv, d2)
        flux = a * dz
        if form is Form.DIVERGENT:
            flux = flux + spec.a.derivative()(tau_arr) * zv
    out = (flux + (n - 1.0) * a / tau_arr * zv
           - np.asarray(spec.h.evaluate(tau_arr, uv, duv, p)) + spec.phi(uv))
    return float(out) if np.ndim(tau) == 0 else out


@dataclass(frozen=True)
class EquivalenceReport:
    max_deviation: float
    scale: float
    relative: float


def _interior(traj: Trajectory, trim_fraction: float):
    lo, hi = traj.tau[0], traj.tau[-1]
    pad = trim_fraction * (hi - lo)
    return np.nonzero((traj.tau > lo + pad) & (traj.tau < hi - pad))[0]


def divergence_equivalence_check(spec: ProblemSpec, traj: Trajectory,
                                 trim_fraction: float = 0.01) -> EquivalenceReport:
    """Compare the divergent residual with its expanded nondivergent twin.

    The divergent flux ``(a z)'`` is differentiated from its own spline; the
    expanded form uses ``a z' + a' z``. Both are evaluated at interior nodes.
    The trimmed ends hold the start-up layer left by zeroth-order placement,
    where spline derivatives are not trustworthy.
    """
    t = traj.tau[_interior(traj, trim_fraction)]
    p, n = spec.p, spec.n
    a = spec.a(t)
    da = spec.a.derivative()(t)
    zv = traj.z_spline(t)
    dz = traj.z_spline.derivative()(t)
    uv = traj.u_spline(t)
    duv = phi_p_inverse(p, zv)
    k = min(5, traj.tau.size - 1)
    flux = make_interp_spline(traj.tau, spec.a(traj.tau) * traj.z, k=k).derivative()(t)
    lower = (n - 1.0) * a / t * zv - np.asarray(spec.h.evaluate(t, uv, duv, p)) + spec.phi(uv)
    r_div = flux + lower
    r_nd = a * dz + da * zv + lower
    dev = float(np.max(np.abs(r_div - r_nd))) if t.size else 0.0
    scale = float(np.max(np.abs(np.concatenate([a * dz, da * zv, spec.phi(uv), [1e-300]]))))
    return EquivalenceReport(dev, scale, dev / scale)


@dataclass(frozen=True)
class IdentityReport:
    max_relative_error: float
    nodes: np.ndarray
    finite_difference: np.ndarray
    product_form: np.ndarray


def flux_identity_check(traj: Trajectory, n_nodes: int = 100, trim_fraction: float = 0.05) -> IdentityReport:
    """``d/dtau |u'|^p`` by central differences against ``p/(p-1) u' (Phi_p(u'))'``."""
    p = traj.p
    lo, hi = traj.tau[0], traj.tau[-1]
    idx = _interior(traj, trim_fraction)
    if idx.size > n_nodes:
        idx = idx[np.linspace(0, idx.size - 1, n_nodes).round().astype(int)]
    t = traj.tau[idx]
    zs = traj.z_spline
    h = 1e-4 * (hi - lo)

    def g(x):
        return np.abs(zs(x)) ** (p / (p - 1.0))  # |u'|^p

    fd = (g(t + h) - g(t - h)) / (2.0 * h)
    prod = p / (p - 1.0) * phi_p_inverse(p, zs(t)) * zs.derivative()(t)
    denom = np.maximum(np.abs(prod), 1e-6 * np.max(np.abs(prod)) + 1e-300)
    rel = np.abs(fd - prod) / denom
    return IdentityReport(float(np.max(rel)) if rel.size else 0.0, t, fd, prod)


# ---------------------------------------------------------------------------
# radial reduction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RadialProfile:
    """``w(x) = u(|x|)`` together with its gradient and p-Laplacian."""

    u: ScalarFn
    n: int
    p: float = 2.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise InvalidParameter("n must be an integer >= 2")

    @property
    def du(self) -> ScalarFn:
        return self.u.derivative()

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.u(np.linalg.norm(x, axis=-1))

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x, axis=-1)
        return (self.du(r) / r)[..., None] * x

    def flux(self, tau):
        return phi_p(self.p, self.du(tau))

    def p_laplacian_radial(self, tau):
        """``(Phi_p(u'))' + (n-1) Phi_p(u')/tau``."""
        tau = np.asarray(tau, dtype=float)
        d1 = self.du(tau)
        d2 = self.du.derivative()(tau)
        out = _flux_derivative_symbolic(self.p, d1, d2) + (self.n - 1.0) * phi_p(self.p, d1) / tau
        return float(out) if out.ndim == 0 else out

    def p_laplacian(self, x):
        return self.p_laplacian_radial(np.linalg.norm(np.asarray(x, dtype=float), axis=-1))


def radial_reduce(w_profile: ScalarFn, n: int, p: float = 2.0) -> RadialProfile:
    return RadialProfile(w_profile, int(n), p)
