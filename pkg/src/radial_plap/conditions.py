"""Deciders for the standing assumptions A1-A5 and their bundles.

Symbolic (power-sum) inputs are decided exactly. Opaque inputs are sampled
densely and reported as ``PassSampled`` rather than ``Pass``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (
    Constant,
    GrowthEnvelope,
    HSpec,
    HZero,
    OddPower,
    PowerLaw,
    ProblemSpec,
    ScalarFn,
    SharpnessProduct,
    Sum,
    VChoice,
    WeightSpec,
    is_odd,
    is_symbolic,
    merge_terms,
    v_fn,
)
from .errors import RadialPlapError
from .opial import OpialSetup, Pin, opial_constant
from .singquad import Finiteness, finiteness

K_TOL = 1e-9
SAMPLE_SEED = 12345


class Status(str, enum.Enum):
    PASS = "Pass"
    PASS_SAMPLED = "PassSampled"
    FAIL = "Fail"
    UNDECIDABLE = "Undecidable"

    @property
    def passing(self) -> bool:
        return self in (Status.PASS, Status.PASS_SAMPLED)


class VariantId(str, enum.Enum):
    a_l = "a_l"
    a_r = "a_r"
    a = "a"
    b_l = "b_l"
    b_r = "b_r"
    b = "b"

    @property
    def closed_left(self) -> bool:
        return self.value.endswith("_l")

    @property
    def closed_right(self) -> bool:
        return self.value.endswith("_r")

    @property
    def v(self) -> VChoice:
        return VChoice.DELTA if self.value.startswith("a") else VChoice.D

    def interval_label(self) -> str:
        if self.closed_left:
            return "[0,R)"
        if self.closed_right:
            return "(0,R]"
        return "(0,R)"


class ConditionSetId(str, enum.Enum):
    N_nd = "N_nd"
    N_d = "N_d"
    S_nd = "S_nd"
    S_d = "S_d"
    M_nd = "M_nd"
    M_d = "M_d"


V = VariantId
BUNDLES = {
    ConditionSetId.N_nd: (("A1", None), ("A2", "a"), ("A3", V.a_l), ("A4", V.a_l), ("A5", V.a_l)),
    ConditionSetId.N_d: (("A1", None), ("A2", "a"), ("A3", V.b_l), ("A4", V.b_l), ("A5", V.b_l)),
    ConditionSetId.S_nd: (("A1", None), ("A2", "a"), ("A3", V.a), ("A4", V.a), ("A5", V.a)),
    ConditionSetId.S_d: (("A1", None), ("A2", "a"), ("A3", V.b), ("A4", V.b), ("A5", V.b)),
    ConditionSetId.M_nd: (("A1", None), ("A2", "b"), ("A3", V.a_r), ("A4", V.a_r), ("A5", V.a_r)),
    ConditionSetId.M_d: (("A1", None), ("A2", "b"), ("A3", V.b_r), ("A4", V.b_r), ("A5", V.b_r)),
}


@dataclass
class ConditionVerdict:
    condition: str
    status: Status
    witness: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passing(self) -> bool:
        return self.status.passing

    def to_dict(self):
        return {"condition": self.condition, "status": self.status.value,
                "witness": _jsonable(self.witness), "notes": list(self.notes)}


@dataclass
class ConditionReport:
    set_id: str
    members: list

    @property
    def passed(self) -> bool:
        return all(m.passing for m in self.members)

    @property
    def status(self) -> Status:
        if self.passed:
            if all(m.status is Status.PASS for m in self.members):
                return Status.PASS
            return Status.PASS_SAMPLED
        if any(m.status is Status.FAIL for m in self.members):
            return Status.FAIL
        return Status.UNDECIDABLE

    def failing(self):
        return [m for m in self.members if not m.passing]

    def to_dict(self):
        return {"set": self.set_id, "status": self.status.value, "passed": self.passed,
                "members": [m.to_dict() for m in self.members]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, enum.Enum):
        return x.value
    return x


def _merge(statuses):
    """Combine sub-results: any Fail wins, then Undecidable, then sampled."""
    if Status.FAIL in statuses:
        return Status.FAIL
    if Status.UNDECIDABLE in statuses:
        return Status.UNDECIDABLE
    if Status.PASS_SAMPLED in statuses:
        return Status.PASS_SAMPLED
    return Status.PASS


def _upper(R):
    return 1e3 if math.isinf(R) else float(R)


# ---------------------------------------------------------------------------
# A1
# ---------------------------------------------------------------------------


def check_A1(p, l, n, R) -> ConditionVerdict:
    bad = []
    if not (p > 1 and math.isfinite(p)):
        bad.append({"parameter": "p", "value": p, "required": "p in (1, inf)"})
    if not (0 < l < p):
        bad.append({"parameter": "l", "value": l, "required": "l in (0, p)"})
    if not (n >= 1 and math.isfinite(n)):
        bad.append({"parameter": "n", "value": n, "required": "n in [1, inf)"})
    if not R > 0:
        bad.append({"parameter": "R", "value": R, "required": "R in (0, inf]"})
    return ConditionVerdict("A1", Status.FAIL if bad else Status.PASS, bad)


# ---------------------------------------------------------------------------
# A2
# ---------------------------------------------------------------------------


def _odd_sign(f: ScalarFn) -> Optional[int]:
    """+1 / -1 when ``t f(t)`` has that sign for all ``t != 0``; None if unknown."""
    if isinstance(f, OddPower):
        return int(np.sign(f.coeff))
    if isinstance(f, PowerLaw):
        if f.coeff == 0:
            return 0
        return int(np.sign(f.coeff))
    if isinstance(f, Constant):
        return 0
    if isinstance(f, Sum):
        signs = {_odd_sign(t) for t in f.terms} - {0}
        if None in signs:
            return None
        if len(signs) == 1:
            return signs.pop()
        if not signs:
            return 0
        return None
    return None


def check_A2(phi: ScalarFn, variant: str = "a", sampled: bool = False) -> ConditionVerdict:
    """``t phi(t) > 0`` a.e. (variant a) or ``< 0`` (variant b)."""
    name = f"A2({variant})"
    want = 1 if variant == "a" else -1
    if not is_odd(phi):
        pts = np.linspace(0.1, 10.0, 100)
        bad = pts[np.abs(phi(pts) + phi(-pts)) > 1e-12 * np.maximum(1.0, np.abs(phi(pts)))]
        w = [{"reason": "oddness", "t": float(bad[0]) if bad.size else None}]
        return ConditionVerdict(name, Status.FAIL, w, ["phi is not odd"])
    sign = None if sampled else _odd_sign(phi)
    if sign is not None:
        if sign == want:
            return ConditionVerdict(name, Status.PASS)
        return ConditionVerdict(name, Status.FAIL, [{"reason": "sign", "t": 1.0,
                                                     "t_phi": float(phi(1.0))}])
    grid = np.linspace(-10.0, 10.0, 1001)
    grid = grid[grid != 0.0]
    prod = grid * phi(grid) * want
    bad = np.nonzero(~(prod > 0))[0]
    if bad.size:
        t = float(grid[bad[0]])
        return ConditionVerdict(name, Status.FAIL, [{"reason": "sign", "t": t,
                                                     "t_phi": float(t * phi(t))}])
    return ConditionVerdict(name, Status.PASS_SAMPLED, [], ["sign sampled on 1000 points"])


# ---------------------------------------------------------------------------
# A3
# ---------------------------------------------------------------------------


def _positivity(v: ScalarFn, R, sampled=False):
    """Status and witness for ``v > 0`` a.e. on ``(0, R)``."""
    terms = v.power_terms()
    if terms is not None and not sampled:
        nz = [(c, e) for c, e in merge_terms(terms) if c != 0.0]
        if not nz:
            return Status.FAIL, {"reason": "positivity", "detail": "v vanishes identically"}
        if all(c > 0 for c, _ in nz):
            return Status.PASS, None
        if all(c < 0 for c, _ in nz):
            return Status.FAIL, {"reason": "positivity", "tau": _upper(R) / 2,
                                 "v": float(v(_upper(R) / 2))}
    hi = _upper(R)
    grid = np.geomspace(hi * 1e-9, hi * (1 - 1e-12), 20001)
    vals = v(grid)
    bad = np.nonzero(~(vals > 0))[0]
    if bad.size:
        return Status.FAIL, {"reason": "positivity", "tau": float(grid[bad[0]]),
                             "v": float(vals[bad[0]])}
    return Status.PASS_SAMPLED, None


def _band_integrable_at_zero(f: ScalarFn, r: float) -> bool:
    """Integrability proxy at 0: dyadic band integrals must shrink geometrically."""
    x, w = np.polynomial.legendre.leggauss(20)
    bands = []
    for k in range(60):
        hi = r * 2.0 ** (-k)
        lo = hi / 2.0
        t = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        bands.append(0.5 * (hi - lo) * np.dot(w, np.abs(f(t))))
    bands = np.array(bands[-20:])
    if not np.all(np.isfinite(bands)):
        return False
    if np.all(bands == 0):
        return True
    ratios = bands[1:] / bands[:-1]
    return bool(np.all(ratios < 1.0 - 1e-6))


def _integrable_at_zero(f: ScalarFn, R, sampled=False):
    hi = min(1.0, _upper(R) / 2)
    if not sampled:
        fin = finiteness(f, (0.0, hi))
        if fin is not Finiteness.UNDECIDABLE:
            return Status.PASS if fin is Finiteness.FINITE else Status.FAIL
    return Status.PASS_SAMPLED if _band_integrable_at_zero(f, hi) else Status.FAIL


def check_A3(w: WeightSpec, R, variant: VariantId, sampled: bool = False) -> ConditionVerdict:
    """Regularity of ``a`` and local integrability of ``v`` and ``v^(-1/(p-1))``."""
    variant = VariantId(variant)
    name = f"A3({variant.value})"
    notes = [f"X = {variant.interval_label()}, v = {variant.v.value}"]
    if not is_symbolic(w.a):
        return ConditionVerdict(name, Status.UNDECIDABLE, [],
                                notes + ["a is opaque; integrability cannot be decided exactly"])
    if variant.closed_right and math.isinf(R):
        notes.append("R is infinite; the closed right end is treated as open")
    a = w.a
    da = a.derivative()
    v = v_fn(w, variant.v)
    statuses = []
    witness = []

    st, wit = _positivity(v, R, sampled)
    statuses.append(st)
    if wit:
        witness.append(wit)

    checks = []
    if variant.closed_left:
        checks += [("a", a), ("a'", da), ("v", v)]
    if st is not Status.FAIL:
        g = v.power(-1.0 / (w.p - 1.0))
        if variant.closed_left:
            checks.append(("v^(-1/(p-1))", g))
    for label, f in checks:
        s = _integrable_at_zero(f, R, sampled)
        statuses.append(s)
        if s is Status.FAIL:
            witness.append({"reason": "not integrable", "function": label, "endpoint": 0.0})
    if st is Status.FAIL and variant.closed_left:
        # the inverse power of a nonpositive weight is not integrable either
        witness.append({"reason": "not integrable", "function": "v^(-1/(p-1))", "endpoint": 0.0})
    return ConditionVerdict(name, _merge(statuses), witness, notes)


# ---------------------------------------------------------------------------
# A4
# ---------------------------------------------------------------------------


def _a4_margin(h: HSpec, env: GrowthEnvelope, v: ScalarFn, p, tau, lam0, lam1):
    lhs = np.asarray(h.evaluate(tau, lam0, lam1, p), dtype=float) * lam1
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        rhs = env.theta * env.q(tau) * np.abs(lam0) ** env.l * np.abs(lam1) ** (p - env.l)
        if env.theta < 1:
            rhs = rhs + (1 - env.theta) * v(tau) * np.abs(lam1) ** p
    return lhs, rhs


def check_A4(h: HSpec, env: GrowthEnvelope, w: WeightSpec, R,
             variant: Optional[VariantId] = None, sampled: bool = False) -> ConditionVerdict:
    """Growth estimate ``h l1 <= theta q |l0|^l |l1|^(p-l) + (1-theta) v |l1|^p``."""
    vchoice = VariantId(variant).v if variant is not None else env.v_choice
    name = f"A4({VariantId(variant).value})" if variant is not None else "A4"
    p = w.p
    notes = []
    statuses = []
    witness = []
    # q must be locally integrable up to a closed left end
    if variant is not None and VariantId(variant).closed_left:
        s = _integrable_at_zero(env.q, R, sampled)
        statuses.append(s)
        if s is Status.FAIL:
            witness.append({"reason": "not integrable", "function": "q", "endpoint": 0.0})
    if isinstance(h, HZero):
        statuses.append(Status.PASS)
        return ConditionVerdict(name, _merge(statuses), witness, notes)
    if isinstance(h, SharpnessProduct) and not sampled and env.theta > 0:
        qt = env.q.power_terms()
        if qt is not None:
            nz = [(c, e) for c, e in merge_terms(qt) if c != 0.0]
            if (len(nz) == 1 and nz[0][1] == h.gamma and env.l == h.l
                    and env.theta * nz[0][0] >= abs(h.D) * h.s ** h.l):
                statuses.append(Status.PASS)
                notes.append("|h l1| <= |D| s^l tau^gamma |l0|^l |l1|^(p-l) <= theta q |l0|^l |l1|^(p-l)")
                return ConditionVerdict(name, _merge(statuses), witness, notes)
    try:
        v = v_fn(w, vchoice)
    except RadialPlapError:
        v = Constant(0.0)
        if env.theta < 1:
            return ConditionVerdict(name, Status.UNDECIDABLE, witness,
                                    ["v is unavailable for opaque a"])
    hi = _upper(R)
    taus = np.geomspace(hi * 1e-6, hi * (1 - 1e-9), 25)
    lam = np.geomspace(1e-3, 10.0, 10)
    lam = np.concatenate([-lam[::-1], lam])
    T, L0, L1 = np.meshgrid(taus, lam, lam, indexing="ij")
    rng = np.random.default_rng(SAMPLE_SEED)
    rt = np.exp(rng.uniform(np.log(hi * 1e-6), np.log(hi * (1 - 1e-9)), 10_000))
    r0 = rng.uniform(-10, 10, 10_000)
    r1 = rng.uniform(-10, 10, 10_000)
    tau = np.concatenate([T.ravel(), rt])
    l0 = np.concatenate([L0.ravel(), r0])
    l1 = np.concatenate([L1.ravel(), r1])
    # include the axes, where the envelope is weakest
    tau = np.concatenate([tau, taus, taus])
    l0 = np.concatenate([l0, np.zeros(25), np.ones(25)])
    l1 = np.concatenate([l1, np.ones(25), np.zeros(25)])
    lhs, rhs = _a4_margin(h, env, v, p, tau, l0, l1)
    bad = ~(lhs <= rhs + 1e-12 * (1.0 + np.abs(rhs)))
    if np.any(bad):
        i = int(np.argmax(np.where(bad, lhs - rhs, -np.inf)))
        witness.append({"reason": "growth estimate", "tau": tau[i], "lambda0": l0[i],
                        "lambda1": l1[i], "h_lambda1": lhs[i], "bound": rhs[i]})
        statuses.append(Status.FAIL)
    else:
        statuses.append(Status.PASS_SAMPLED)
        notes.append(f"sampled at {tau.size} points")
    return ConditionVerdict(name, _merge(statuses), witness, notes)


# ---------------------------------------------------------------------------
# A5
# ---------------------------------------------------------------------------


def a5_constant(env: GrowthEnvelope, w: WeightSpec, s: float, r: float, vchoice,
                full_output: bool = False):
    """``K(s, r, q, v)`` with ``m = p - l``."""
    p = w.p
    v = v_fn(w, vchoice)
    hi = r if math.isfinite(r) else 1e3
    setup = OpialSetup(env.l, p - env.l, env.q, v, (0.0, hi), Pin.LEFT_ZERO)
    return opial_constant(setup, s, hi, full_output=full_output)


def check_A5(env: GrowthEnvelope, w: WeightSpec, R, variant: VariantId) -> ConditionVerdict:
    """Finiteness of K on the variant's subintervals, or ``K(0, R) <= 1``."""
    variant = VariantId(variant)
    name = f"A5({variant.value})"
    notes = []
    if math.isinf(R):
        notes.append("R is infinite; integrals truncated at 1e3")
    hi = _upper(R)
    try:
        if variant.closed_right:
            res = a5_constant(env, w, 0.0, hi, variant.v, full_output=True)
            ok = res.value <= 1.0 + K_TOL
            wit = [] if ok else [{"reason": "K(0,R) > 1" if res.finite else "K infinite",
                                  "K": res.value}]
            notes.append(f"K(0,R) = {res.value:.12g}")
            return ConditionVerdict(name, Status.PASS if ok else Status.FAIL, wit, notes)
        lo = 0.0 if variant.closed_left else hi / 4
        r = hi / 2
        res = a5_constant(env, w, lo, r, variant.v, full_output=True)
    except RadialPlapError as exc:
        return ConditionVerdict(name, Status.FAIL, [{"reason": "K infinite", "detail": str(exc)}],
                                notes)
    exact = is_symbolic(env.q) and is_symbolic(w.a)
    if not res.finite:
        return ConditionVerdict(name, Status.FAIL, [{"reason": "K infinite", "s": lo, "r": r}], notes)
    notes.append(f"K({lo:g},{r:g}) = {res.value:.12g}")
    if exact:
        notes.append("power sums: finiteness is decided at tau = 0 alone")
        return ConditionVerdict(name, Status.PASS, [], notes)
    return ConditionVerdict(name, Status.PASS_SAMPLED, [], notes)


# ---------------------------------------------------------------------------
# bundles
# ---------------------------------------------------------------------------


def default_envelope(spec: ProblemSpec) -> GrowthEnvelope:
    """Envelope used when a spec carries none (meaningful for ``h = 0`` only)."""
    return GrowthEnvelope(1.0, spec.p / 2.0, Constant(0.0))


def check_set(set_id: ConditionSetId, spec: ProblemSpec) -> ConditionReport:
    set_id = ConditionSetId(set_id)
    env = spec.envelope or default_envelope(spec)
    w, R = spec.weight, spec.R
    members = []
    for cond, arg in BUNDLES[set_id]:
        if cond == "A1":
            members.append(check_A1(spec.p, env.l, spec.n, R))
        elif cond == "A2":
            members.append(check_A2(spec.phi, arg))
        elif cond == "A3":
            members.append(check_A3(w, R, arg))
        elif cond == "A4":
            members.append(check_A4(spec.h, env, w, R, arg))
        else:
            members.append(check_A5(env, w, R, arg))
    if spec.envelope is None:
        members[0].notes.append("no envelope given; used theta = 1, q = 0, l = p/2")
    return ConditionReport(set_id.value, members)


# ---------------------------------------------------------------------------
# Gronwall-type envelopes
# ---------------------------------------------------------------------------


def gronwall_envelope_check(w: WeightSpec, interval, which: str = "delta") -> ConditionVerdict:
    """Strict decrease of ``a/t^((n-1)/(1-1/p))`` (delta) or ``a t^((n-1)p)`` (d)."""
    lo, hi = float(interval[0]), float(interval[1])
    hi = _upper(hi)
    name = f"gronwall({which})"
    grid = np.linspace(lo, hi, 1001) if lo > 0 else np.geomspace(hi * 1e-3, hi, 1001)
    v = v_fn(w, VChoice.DELTA if which == "delta" else VChoice.D)
    vals = v(grid)
    if not np.all(vals > 0):
        i = int(np.argmax(~(vals > 0)))
        return ConditionVerdict(name, Status.FAIL,
                                [{"reason": "hypothesis v > 0 fails", "tau": grid[i], "v": vals[i]}],
                                ["the remark assumes v > 0 a.e."])
    n, p = w.n, w.p
    if which == "delta":
        g = w.a(grid) / grid ** ((n - 1.0) / (1.0 - 1.0 / p))
    else:
        g = w.a(grid) * grid ** ((n - 1.0) * p)
    d = np.diff(g)
    bad = ~(d < -1e-12 * np.abs(g[:-1]))
    if np.any(bad):
        i = int(np.argmax(bad))
        notes = []
        if which == "d":
            notes.append("hypothesis d_a > 0 holds but envelope is for the stated direction")
        return ConditionVerdict(name, Status.FAIL,
                                [{"reason": "not strictly decreasing", "tau": grid[i],
                                  "g": g[i], "g_next": g[i + 1]}], notes)
    return ConditionVerdict(name, Status.PASS, [], ["checked on a 1001-point grid"])
