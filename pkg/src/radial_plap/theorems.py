"""Verdict harnesses for the radial theorems and the power-law examples.

A verdict never proves anything; it reports whether concrete numerical data
are consistent with a theorem whose hypotheses were checked first. A failed
hypothesis bundle yields ``HypothesesFail``, never ``Violated``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .conditions import (
    ConditionReport,
    ConditionSetId,
    ConditionVerdict,
    Status,
    _jsonable,
    a5_constant,
    check_A1,
    check_A2,
    check_set,
    default_envelope,
)
from .core import (
    Constant,
    Form,
    HZero,
    OddPower,
    Opaque,
    PowerLaw,
    ProblemSpec,
    ScalarFn,
    SharpnessProduct,
    Sum,
    VChoice,
    WeightSpec,
    big_phi_inverse,
    merge_terms,
    v_fn,
)
from .errors import ConstructionRejected, InvalidParameter, PreconditionError, RadialPlapError
from .opial import opial_constant_power_closed_form
from .radial_ode import RadialProfile, Trajectory, residual

NONTRIVIAL = 1e-6


class VerdictStatus(str, enum.Enum):
    CONSISTENT = "Consistent"
    VIOLATED = "Violated"
    HYPOTHESES_FAIL = "HypothesesFail"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class Verdict:
    theorem: str
    status: VerdictStatus
    hypotheses: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)
    numbers: dict = field(default_factory=dict)

    def __post_init__(self):
        self.status = VerdictStatus(self.status)
        if self.status is VerdictStatus.VIOLATED and not self.witnesses:
            raise InvalidParameter("a Violated verdict needs a witness")

    def to_dict(self):
        return {"theorem": self.theorem, "status": self.status.value,
                "hypotheses": _jsonable(self.hypotheses), "witnesses": _jsonable(self.witnesses),
                "numbers": _jsonable(self.numbers)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


# ---------------------------------------------------------------------------
# hypotheses
# ---------------------------------------------------------------------------


def _set_for(spec: ProblemSpec, family: str) -> ConditionSetId:
    suffix = "d" if spec.form is Form.DIVERGENT else "nd"
    return ConditionSetId(f"{family}_{suffix}")


def _h_vanishes(spec: ProblemSpec) -> bool:
    return isinstance(spec.h, HZero)


def _v_nonnegative(spec: ProblemSpec, set_id: ConditionSetId) -> ConditionVerdict:
    choice = VChoice.D if set_id.value.endswith("_d") else VChoice.DELTA
    v = v_fn(spec.weight, choice)
    name = f"v>=0({choice.value})"
    terms = v.power_terms()
    if terms is not None:
        nz = [(c, e) for c, e in merge_terms(terms) if c != 0.0]
        if all(c > 0 for c, _ in nz):
            return ConditionVerdict(name, Status.PASS)
    hi = 1e3 if math.isinf(spec.R) else spec.R
    grid = np.geomspace(hi * 1e-9, hi, 20001)
    vals = v(grid)
    bad = np.nonzero(~(vals >= 0))[0]
    if bad.size:
        return ConditionVerdict(name, Status.FAIL, [{"reason": "v < 0", "tau": grid[bad[0]],
                                                     "v": vals[bad[0]]}])
    return ConditionVerdict(name, Status.PASS_SAMPLED)


def hypothesis_report(spec: ProblemSpec, family: str) -> ConditionReport:
    """Condition bundle for ``family`` in {N, S, M}, matched to the spec's form.

    With ``h = 0`` and no envelope the Opial term drops out (theta = 1, q = 0)
    and the energy argument only uses ``v >= 0``; the bundle is reduced to
    A1, A2 and that sign condition.
    """
    set_id = _set_for(spec, family)
    if _h_vanishes(spec) and spec.envelope is None:
        variant = "b" if family == "M" else "a"
        members = [check_A1(spec.p, spec.p / 2.0, spec.n, spec.R),
                   check_A2(spec.phi, variant),
                   _v_nonnegative(spec, set_id)]
        members[0].notes.append("h = 0: reduced bundle (theta = 1, q = 0)")
        return ConditionReport(set_id.value, members)
    return check_set(set_id, spec)


def _hyp_list(report: ConditionReport):
    return [{"set": report.set_id, "condition": m.condition, "status": m.status.value,
             "witness": m.witness, "notes": m.notes} for m in report.members]


def a_at_zero(a: ScalarFn) -> float:
    terms = a.power_terms()
    if terms is not None:
        nz = [(c, e) for c, e in merge_terms(terms) if c != 0.0]
        if any(e < 0 for _, e in nz):
            return math.inf
        return float(sum(c for c, e in nz if e == 0))
    val = float(a(0.0))
    if not math.isfinite(val):
        raise PreconditionError("a(0) is not available for an opaque weight")
    return val


# ---------------------------------------------------------------------------
# a priori bound and triviality
# ---------------------------------------------------------------------------


def apriori_bound(spec: ProblemSpec, du0: float) -> float:
    """``big_phi_inverse(phi, (1 - 1/p) a(0) |du0|^p)``."""
    p = spec.p
    a0 = a_at_zero(spec.a)
    if a0 == 0 or du0 == 0:
        return 0.0
    y = (1.0 - 1.0 / p) * a0 * abs(du0) ** p
    if math.isinf(y):
        return math.inf
    return float(big_phi_inverse(spec.phi, y))


def _k_le_one(spec: ProblemSpec, report: ConditionReport):
    """Extra hypothesis K(0, R) <= 1 for the full bundle."""
    if _h_vanishes(spec) and spec.envelope is None:
        return None
    env = spec.envelope or default_envelope(spec)
    choice = VChoice.D if spec.form is Form.DIVERGENT else VChoice.DELTA
    try:
        k = a5_constant(env, spec.weight, 0.0, spec.R, choice, full_output=True)
        ok = k.finite and k.value <= 1.0 + 1e-9
        return ConditionVerdict("K(0,R)<=1", Status.PASS if ok else Status.FAIL,
                                [] if ok else [{"K": k.value}], [f"K(0,R) = {k.value:.12g}"])
    except RadialPlapError as exc:
        return ConditionVerdict("K(0,R)<=1", Status.FAIL, [{"reason": str(exc)}])


def verify_apriori(spec: ProblemSpec, traj: Trajectory, du0: float,
                   check_hypotheses: bool = True) -> Verdict:
    """Compare ``max |u|`` on a trajectory started at ``u(eps) = 0`` with the bound."""
    name = "prawa(i)"
    hyps = []
    if check_hypotheses:
        rep = hypothesis_report(spec, "N")
        extra = _k_le_one(spec, rep)
        if extra is not None:
            rep.members.append(extra)
        hyps = _hyp_list(rep)
        if not rep.passed:
            return Verdict(name, VerdictStatus.HYPOTHESES_FAIL, hyps)
    scale = max(1.0, float(np.max(np.abs(traj.u)))) if len(traj) else 1.0
    if len(traj) and abs(traj.u[0]) > NONTRIVIAL * scale:
        hyps.append({"condition": "u(eps) = 0", "status": "Fail", "u(eps)": traj.u[0]})
        return Verdict(name, VerdictStatus.HYPOTHESES_FAIL, hyps)
    bound = apriori_bound(spec, du0)
    m = traj.max_abs_u() if len(traj) else 0.0
    numbers = {"bound": bound, "max_abs_u": m, "du0": du0,
               "termination": traj.termination.value}
    if m > bound * (1.0 + 1e-6) + 1e-9:
        i = int(np.argmax(np.abs(traj.u)))
        return Verdict(name, VerdictStatus.VIOLATED, hyps,
                       [{"tau": traj.tau[i], "u": traj.u[i], "bound": bound}], numbers)
    if not traj.termination.ok:
        return Verdict(name, VerdictStatus.INCONCLUSIVE, hyps, [], numbers)
    return Verdict(name, VerdictStatus.CONSISTENT, hyps, [], numbers)


def _radii(R, count=1000):
    hi = 1e3 if math.isinf(R) else float(R)
    return np.geomspace(hi * 1e-6, hi * (1.0 - 1e-9), count)


def triviality_verdict(spec: ProblemSpec, du0: Optional[float] = None,
                       enforce_hypotheses: bool = True) -> Verdict:
    """Trivial solution or nonexistence when ``a(0) = 0`` or ``u'(0) = 0``."""
    name = "prawa(ii)"
    a0 = a_at_zero(spec.a)
    applicable = a0 == 0 or (du0 is not None and du0 == 0)
    hyps = [{"condition": "a(0) = 0 or u'(0) = 0", "status": "Pass" if applicable else "Fail",
             "a(0)": a0, "du0": du0}]
    if not applicable:
        return Verdict(name, VerdictStatus.HYPOTHESES_FAIL, hyps,
                       numbers={"note": "part ii not applicable"})
    if enforce_hypotheses:
        rep = hypothesis_report(spec, "N")
        hyps += _hyp_list(rep)
        if not rep.passed:
            return Verdict(name, VerdictStatus.HYPOTHESES_FAIL, hyps)
    tau = _radii(spec.R)
    h0 = np.asarray(spec.h.at_zero(tau, spec.p), dtype=float)
    phi0 = float(spec.phi(0.0))
    res = residual(spec, Constant(0.0), tau)
    mismatch = float(np.max(np.abs(res - (-h0 + phi0))))
    numbers = {"phi(0)": phi0, "zero_residual_mismatch": mismatch}
    if mismatch != 0.0:
        return Verdict(name, VerdictStatus.INCONCLUSIVE, hyps, [], numbers)
    nz = np.nonzero(h0 != 0.0)[0]
    if nz.size == 0:
        numbers["outcome"] = "u = 0 admissible"
        return Verdict(name, VerdictStatus.CONSISTENT, hyps, [], numbers)
    i = int(nz[0])
    numbers["outcome"] = "no solution exists"
    return Verdict(name, VerdictStatus.CONSISTENT, hyps,
                   [{"tau": tau[i], "h(tau,0,0)": h0[i]}], numbers)


# ---------------------------------------------------------------------------
# support, monotonicity, vanishing flux
# ---------------------------------------------------------------------------


def support_propagation(spec: ProblemSpec, traj: Trajectory, s: float, tol: float = 1e-8,
                        check_hypotheses: bool = True) -> Verdict:
    """``u`` vanishing with its derivative at ``s`` must stay zero beyond ``s``."""
    name = "support"
    hyps = []
    if check_hypotheses:
        rep = hypothesis_report(spec, "S")
        hyps = _hyp_list(rep)
        if not rep.passed:
            return Verdict(name, VerdictStatus.HYPOTHESES_FAIL, hyps)
    i = int(np.argmin(np.abs(traj.tau - s)))
    du = traj.du
    us, dus = float(traj.u[i]), float(du[i])
    critical = abs(us) <= tol and abs(dus) <= tol
    hyps.append({"condition": "u(s) = u'(s) = 0", "status": "Pass" if critical else "Fail",
                 "s": traj.tau[i], "u(s)": us, "du(s)": dus})
    if not critical:
        return Verdict(name, VerdictStatus.HYPOTHESES_FAIL, hyps,
                       numbers={"note": "s is not a critical zero"})
    tail = np.abs(traj.u[i:])
    j = int(np.argmax(tail))
    numbers = {"s": traj.tau[i], "max_abs_u_beyond_s": tail[j], "tol": tol}
    if tail[j] > 10.0 * tol:
        return Verdict(name, VerdictStatus.VIOLATED, hyps,
                       [{"tau": traj.tau[i + j], "u": traj.u[i + j]}], numbers)
    return Verdict(name, VerdictStatus.CONSISTENT, hyps, [], numbers)


def _extremum_location(traj: Trajectory, j: int) -> float:
    """Refine a node-level extremum by the sign change of ``z`` nearby."""
    lo, hi = max(j - 1, 0), min(j + 1, len(traj) - 1)
    z = traj.z
    if len(traj) >= 4 and z[lo] * z[hi] < 0:
        from scipy.optimize import brentq
        try:
            return float(brentq(lambda x: float(traj.z_spline(x)), traj.tau[lo], traj.tau[hi]))
        except ValueError:
            pass
    return float(traj.tau[j])


def monotonicity_verdict(traj: Trajectory, spec: Optional[ProblemSpec] = None,
                         tol: float = 1e-9) -> Verdict:
    """Constant sign, monotonicity and 'critical points are zeros' on the grid."""
    name = "lewa"
    hyps = []
    if spec is not None:
        rep = hypothesis_report(spec, "M")
        hyps = _hyp_list(rep)
        if not rep.passed:
            return Verdict(name, VerdictStatus.HYPOTHESES_FAIL, hyps)
    u = traj.u
    uR = float(u[-1]) if len(traj) else 0.0
    pinned = abs(uR) <= 1e-9
    hyps.append({"condition": "u(R) = 0", "status": "Pass" if pinned else "Fail", "u(R)": uR})
    if not pinned:
        return Verdict(name, VerdictStatus.HYPOTHESES_FAIL, hyps)
    scale = max(1.0, float(np.max(np.abs(u))))
    witnesses = []

    big = np.nonzero(np.abs(u) > tol * scale)[0]
    if big.size:
        signs = np.sign(u[big])
        flip = np.nonzero(signs != signs[0])[0]
        if flip.size:
            k = big[flip[0]]
            witnesses.append({"property": "constant sign", "tau": traj.tau[k], "u": u[k]})

    d = np.diff(u)
    up = d > tol * scale
    down = d < -tol * scale
    if np.any(up) and np.any(down):
        steps = np.nonzero(up | down)[0]
        dirs = up[steps]
        k = int(np.nonzero(dirs != dirs[0])[0][0])
        j = int(steps[k])  # node where the direction turns
        t = _extremum_location(traj, j)
        witnesses.append({"property": "monotone", "tau": t,
                          "u": float(traj.u_spline(t)) if len(traj) >= 4 else u[j]})

    du = traj.du
    crit = np.nonzero(np.abs(du[1:-1]) <= 1e-7 * scale)[0] + 1
    bad = crit[np.abs(u[crit]) > 1e-6 * scale]
    if bad.size:
        k = int(bad[0])
        witnesses.append({"property": "critical points are zeros", "tau": traj.tau[k],
                          "u": u[k], "du": du[k]})

    numbers = {"sup_abs_u": float(np.max(np.abs(u))), "abs_u_first": abs(float(u[0])),
               "termination": traj.termination.value, "tau_first": traj.tau[0]}
    if witnesses:
        return Verdict(name, VerdictStatus.VIOLATED, hyps, witnesses, numbers)
    return Verdict(name, VerdictStatus.CONSISTENT, hyps, [], numbers)


def vanishing_flux_verdict(spec: ProblemSpec, traj: Trajectory,
                           check_hypotheses: bool = True) -> Verdict:
    """A nontrivial solution with ``a |u'|^p -> 0`` at the origin is forbidden."""
    name = "lewa(flux)"
    hyps = []
    if check_hypotheses:
        rep = hypothesis_report(spec, "M")
        hyps = _hyp_list(rep)
        if not rep.passed:
            return Verdict(name, VerdictStatus.HYPOTHESES_FAIL, hyps)
    flux = spec.a(traj.tau) * np.abs(traj.du) ** spec.p
    scale = max(1.0, float(np.max(flux)))
    max_u = float(np.max(np.abs(traj.u)))
    numbers = {"flux_at_first_node": flux[0], "tau_first": traj.tau[0], "flux_scale": scale,
               "max_abs_u": max_u}
    if flux[0] < 1e-8 * scale and max_u > NONTRIVIAL:
        return Verdict(name, VerdictStatus.VIOLATED, hyps,
                       [{"tau": traj.tau[0], "flux": flux[0], "max_abs_u": max_u}], numbers)
    return Verdict(name, VerdictStatus.CONSISTENT, hyps, [], numbers)


# ---------------------------------------------------------------------------
# power-law classification and constructions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerParams:
    p: float
    l: float
    alpha: float
    gamma: float
    n: float
    C: float = 1.0
    D: Optional[float] = None
    s: Optional[float] = None

    def __post_init__(self):
        if not self.p > 1:
            raise InvalidParameter("p must exceed 1")
        if not 0 < self.l < self.p:
            raise InvalidParameter("l must lie in (0, p)")


class Region(str, enum.Enum):
    NONEXISTENCE = "NonexistenceApplies"
    COUNTEREXAMPLE = "CounterexampleExists"
    OUTSIDE = "OutsideTheory"


@dataclass(frozen=True)
class RegionResult:
    region: Region
    reason: str = ""


def power_region_classify(pp: PowerParams) -> RegionResult:
    p, l, alpha, gamma, n = pp.p, pp.l, pp.alpha, pp.gamma, pp.n
    if not 0 < alpha < p:
        return RegionResult(Region.OUTSIDE, "alpha not in (0, p)")
    if not n > alpha * (1.0 - 1.0 / p) + 1.0:
        return RegionResult(Region.OUTSIDE, "n <= alpha(1-1/p)+1")
    if not n >= 2:
        return RegionResult(Region.OUTSIDE, "n < 2")
    edge = alpha - 1.0 - l
    if gamma > edge and gamma > -1.0:
        return RegionResult(Region.NONEXISTENCE)
    if gamma <= edge:
        return RegionResult(Region.COUNTEREXAMPLE, "gamma <= alpha-l-1")
    return RegionResult(Region.OUTSIDE, "gamma <= -1")


def power_params_from_spec(spec: ProblemSpec) -> PowerParams:
    """Read ``alpha`` from ``a = c tau^alpha`` and ``gamma, l, C`` from the envelope or ``h``."""
    terms = spec.a.power_terms()
    nz = [(c, e) for c, e in merge_terms(terms or []) if c != 0.0]
    if len(nz) != 1:
        raise PreconditionError("power classification needs a single-term weight")
    alpha = nz[0][1]
    C, gamma, l, D, s = 1.0, None, None, None, None
    if spec.envelope is not None:
        qt = [(c, e) for c, e in merge_terms(spec.envelope.q.power_terms() or []) if c != 0.0]
        if len(qt) == 1:
            C, gamma = qt[0]
        l = spec.envelope.l
    if isinstance(spec.h, SharpnessProduct):
        D, s = spec.h.D, spec.h.s
        gamma = spec.h.gamma if gamma is None else gamma
        l = spec.h.l if l is None else l
    if gamma is None or l is None:
        raise PreconditionError("power classification needs gamma and l from h or the envelope")
    return PowerParams(spec.p, l, alpha, gamma, spec.n, C, D, s)


@dataclass
class SharpnessConstruction:
    w: Optional[RadialProfile]
    u: ScalarFn
    h: SharpnessProduct
    phi: ScalarFn
    A: float
    spec: ProblemSpec
    radii: np.ndarray
    residual_max: float
    positive: bool


def _odd_power_sum(terms) -> ScalarFn:
    merged = {}
    for c, d in terms:
        merged[d] = merged.get(d, 0.0) + c
    parts = [OddPower(c, d) for d, c in sorted(merged.items()) if c != 0.0]
    if not parts:
        return Constant(0.0)
    return parts[0] if len(parts) == 1 else Sum(parts)


def sharpness_counterexample(s: float, p: float, n: float, alpha: float, l: float,
                             gamma: float, D: float) -> SharpnessConstruction:
    """``w = |x|^s`` with ``h = D s^l tau^gamma |l0|^l |l1|^(p-l-1)`` and the induced ``phi``.

    ``phi`` is obtained by direct substitution; on ``w = tau^s``::

        phi(w) = D s^(p-1) w^((kappa+gamma+l)/s) - A w^((kappa+alpha-1)/s)
    """
    if not s > 1:
        raise PreconditionError("s must exceed 1")
    if not 0 < l < p:
        raise PreconditionError("l must lie in (0, p)")
    edge = alpha - l - 1.0
    if gamma > edge:
        raise PreconditionError("gamma > alpha-l-1: the construction needs gamma <= alpha-l-1")
    kappa = (s - 1.0) * (p - 1.0)
    A = s ** (p - 1.0) * (kappa - 1.0 + n)
    if gamma < edge and not D >= A:
        raise ConstructionRejected(f"needs D >= A = {A:.12g} when gamma < alpha-l-1")
    if gamma == edge and not D > A:
        raise ConstructionRejected(f"needs D > A = {A:.12g} when gamma = alpha-l-1")
    d1 = (kappa + gamma + l) / s
    d2 = (kappa + alpha - 1.0) / s
    if not (d1 > 0 and d2 > 0):
        raise ConstructionRejected("phi is not continuous at 0 (nonpositive exponent)")
    phi = _odd_power_sum([(D * s ** (p - 1.0), d1), (-A, d2)])
    wgrid = np.linspace(1e-3, 1.0, 1000)
    vals = wgrid * phi(wgrid)
    positive = bool(np.all(vals > 0))
    if not positive:
        k = int(np.argmax(~(vals > 0)))
        raise ConstructionRejected(f"tau phi(tau) > 0 fails at tau = {wgrid[k]:.12g}")
    h = SharpnessProduct(D, s, gamma, l)
    spec = ProblemSpec(WeightSpec(PowerLaw(1.0, alpha), n, p), 1.0, phi, h)
    u = PowerLaw(1.0, s)
    radii = np.linspace(0.01, 0.99, 100)
    res = residual(spec, u, radii)
    w = RadialProfile(u, int(n), p) if float(n).is_integer() and n >= 2 else None
    return SharpnessConstruction(w, u, h, phi, A, spec, radii, float(np.max(np.abs(res))),
                                 positive)


def monohomo_admissible_C(p: float, l: float, alpha: float, n: float) -> float:
    """``X / Y`` bounding the envelope coefficient in the monotonicity theorem."""
    if not alpha < p:
        raise PreconditionError("needs alpha < p")
    if not n > (1.0 - 1.0 / p) * alpha + 1.0:
        raise PreconditionError("needs n > (1-1/p) alpha + 1")
    X = p ** (1.0 + (l - 1.0) / p) * (p - alpha) ** ((p - 1.0) * l / p) \
        * (n - 1.0 - alpha * (1.0 - 1.0 / p))
    Y = (p - 1.0) ** ((1.0 - 1.0 / p) * (l + 1.0))
    return X / Y


def monohomo_threshold_C(p: float, l: float, alpha: float, n: float, r: float = 1.0) -> float:
    """The ``C`` at which the closed-form ``K(0, r)`` with ``gamma = alpha - 1`` equals 1.

    Coincides with :func:`monohomo_admissible_C` when ``l = 1``.
    """
    k1 = opial_constant_power_closed_form(p, l, n, alpha, alpha - 1.0, 1.0, r, "delta")
    if not k1.finite:
        raise PreconditionError("K is infinite for these parameters")
    return 1.0 / k1.value


@dataclass
class RestrictedClassResult:
    phi: ScalarFn
    conditions: dict
    G: float
    phi_negative: bool
    residual_max: float
    admissible: bool
    flux_condition_holds: bool
    notes: list


def restricted_class_phi(s, p, alpha, l, D):
    kappa = (s - 1.0) * (p - 1.0)
    e_out = (kappa + alpha - 1.0 - l * (s - 1.0)) / s
    e_in = l * (s - 1.0) / s
    pref = s ** (p - 1.0)

    def f(w):
        w = np.asarray(w, dtype=float)
        aw = np.abs(w)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            val = pref * (1.0 - aw) ** e_out * ((kappa + 1.0) * (1.0 - aw) ** e_in + D * aw ** l)
        return np.sign(w) * val

    return Opaque(f, origin="restricted-class phi (odd extension)")


def restricted_class_example(s: float, p: float, alpha: float, l: float, D: float,
                             n: int = 2) -> RestrictedClassResult:
    """``w = 1 - |x|^s`` with ``h`` of sharpness type at ``gamma = alpha - 1``."""
    if not s > 0:
        raise PreconditionError("s must be positive")
    kappa = (s - 1.0) * (p - 1.0)
    conditions = {
        "z1": bool(kappa <= -1.0 and D < 0),
        "z2": bool(s >= 1.0 - alpha),
        "z3": bool(p > alpha >= 1.0 / (p - 1.0)),
        "z4": bool(alpha < p / (p - 1.0)),
    }
    G = alpha + p * (s - 1.0)
    phi = restricted_class_phi(s, p, alpha, l, D)
    wgrid = np.linspace(1e-3, 1.0 - 1e-3, 999)
    phi_negative = bool(np.all(phi(wgrid) < 0))
    notes = [f"vanishing-flux condition needs G > 0; here G = {G:.12g}"]
    resmax = math.nan
    try:
        spec = ProblemSpec(WeightSpec(PowerLaw(1.0, alpha), n, p), 1.0, phi,
                           SharpnessProduct(D, s, alpha - 1.0, l))
        u = Sum([Constant(1.0), PowerLaw(-1.0, s)])
        radii = np.linspace(0.01, 0.99, 100)
        resmax = float(np.max(np.abs(residual(spec, u, radii))))
    except RadialPlapError as exc:
        notes.append(f"residual not evaluated: {exc}")
    admissible = all(conditions.values()) and phi_negative
    if admissible and G < 0:
        notes.append("admissible parameters give G < 0: the vanishing-flux condition fails")
    return RestrictedClassResult(phi, conditions, G, phi_negative, resmax, admissible,
                                 G > 0, notes)


# ---------------------------------------------------------------------------
# power-law theorem harnesses
# ---------------------------------------------------------------------------


def twprzy_verdict(spec: ProblemSpec, traj: Trajectory) -> Verdict:
    """No nontrivial C^1 radial solution with ``w(0) = 0`` in the nonexistence region.

    A C^1 radial profile has ``u'(0) = 0``, so the trajectory must start from
    ``(eps, 0, 0)``; it is then required to stay trivial.
    """
    name = "twprzy"
    pp = power_params_from_spec(spec)
    cls = power_region_classify(pp)
    hyps = [{"condition": "power region", "status": "Pass" if cls.region is Region.NONEXISTENCE
             else "Fail", "region": cls.region.value, "reason": cls.reason}]
    if cls.region is not Region.NONEXISTENCE:
        return Verdict(name, VerdictStatus.HYPOTHESES_FAIL, hyps)
    rep = check_set(_set_for(spec, "N"), spec)
    hyps += _hyp_list(rep)
    if not rep.passed:
        return Verdict(name, VerdictStatus.HYPOTHESES_FAIL, hyps)
    start_ok = abs(traj.u[0]) <= 1e-12 and abs(traj.du[0]) <= 1e-12
    hyps.append({"condition": "u(eps) = u'(eps) = 0", "status": "Pass" if start_ok else "Fail",
                 "u(eps)": traj.u[0], "du(eps)": traj.du[0]})
    if not start_ok:
        return Verdict(name, VerdictStatus.HYPOTHESES_FAIL, hyps)
    j = int(np.argmax(np.abs(traj.u)))
    numbers = {"max_abs_u": abs(traj.u[j]), "termination": traj.termination.value}
    if abs(traj.u[j]) > NONTRIVIAL:
        return Verdict(name, VerdictStatus.VIOLATED, hyps,
                       [{"tau": traj.tau[j], "u": traj.u[j]}], numbers)
    return Verdict(name, VerdictStatus.CONSISTENT, hyps, [], numbers)


def monohomo_verdict(spec: ProblemSpec, traj: Trajectory) -> Verdict:
    """Explicit power-law hypotheses, then the monotonicity and flux checks."""
    name = "monohomo"
    pp = power_params_from_spec(spec)
    p, l, alpha, n = pp.p, pp.l, pp.alpha, pp.n
    checks = [
        ("alpha < p", alpha < p),
        ("n >= 2", n >= 2),
        ("n > (1-1/p) alpha + 1", n > (1.0 - 1.0 / p) * alpha + 1.0),
        ("gamma = alpha - 1", abs(pp.gamma - (alpha - 1.0)) <= 1e-12),
    ]
    hyps = [{"condition": c, "status": "Pass" if ok else "Fail"} for c, ok in checks]
    a2 = check_A2(spec.phi, "b")
    hyps.append({"condition": a2.condition, "status": a2.status.value, "witness": a2.witness})
    if all(ok for _, ok in checks):
        cmax = monohomo_admissible_C(p, l, alpha, n)
        ok = pp.C <= cmax * (1.0 + 1e-12)
        hyps.append({"condition": "C <= X/Y", "status": "Pass" if ok else "Fail",
                     "C": pp.C, "X/Y": cmax})
    if not all(h["status"] in ("Pass", "PassSampled") for h in hyps):
        return Verdict(name, VerdictStatus.HYPOTHESES_FAIL, hyps)
    mono = monotonicity_verdict(traj)
    mono.hypotheses = hyps + mono.hypotheses
    mono.theorem = name
    if mono.status is not VerdictStatus.CONSISTENT:
        return mono
    flux = vanishing_flux_verdict(spec, traj, check_hypotheses=False)
    mono.numbers.update(flux.numbers)
    if flux.status is VerdictStatus.VIOLATED:
        return Verdict(name, VerdictStatus.VIOLATED, mono.hypotheses, flux.witnesses, mono.numbers)
    return mono
