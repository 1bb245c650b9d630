"""Exact system reliability, MTTF and w.l.p. distribution functions.

A system is either a ``SystemStructure`` (one structure function for all t)
or a ``WeightedLatticePolynomial`` (the family v_t(A) = Ind(w(A) > t)).
Every route below evaluates R_S(t) = E[phi_{v_t}(X(t))] through a different
expansion of phi_{v_t}; they agree up to rounding.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from .errors import DimensionMismatch, DomainError, ModelMismatch
from .latpoly import SymmetricProfile, WeightedLatticePolynomial, make_symmetric
from .lifetimes import Independent, JointLifetimeModel, state_vector_dist
from .quadrature import integrate, integrate_tail
from .setfun import cardinalities, mobius_array, submasks
from .structure import FormTag, SystemStructure

System = Union[SystemStructure, WeightedLatticePolynomial]


class Formula(enum.Enum):
    AUTO = "auto"
    STATE_VECTOR = "statevec"
    STATE_VECTOR_DUAL = "statevec-dual"
    MOBIUS_SURVIVAL = "mobius-survival"
    MOBIUS_CDF = "mobius-cdf"
    MLE_PRIMAL = "mle-primal"
    MLE_DUAL = "mle-dual"
    MLE_PRIMAL_MOBIUS = "mle-primal-mobius"
    MLE_DUAL_MOBIUS = "mle-dual-mobius"
    MLE_DNF = "mle-dnf"
    MLE_CNF = "mle-cnf"
    MLE_PIVOTAL = "mle-pivotal"

    @property
    def mle_form(self) -> Optional[FormTag]:
        return _MLE_FORMS.get(self)


_MLE_FORMS = {
    Formula.MLE_PRIMAL: FormTag.PRIMAL,
    Formula.MLE_DUAL: FormTag.DUAL,
    Formula.MLE_PRIMAL_MOBIUS: FormTag.PRIMAL_MOBIUS,
    Formula.MLE_DUAL_MOBIUS: FormTag.DUAL_MOBIUS,
    Formula.MLE_DNF: FormTag.DISJUNCTIVE_NORMAL,
    Formula.MLE_CNF: FormTag.CONJUNCTIVE_NORMAL,
    Formula.MLE_PIVOTAL: FormTag.PIVOTAL,
}

GENERAL_FORMULAS = (
    Formula.STATE_VECTOR,
    Formula.STATE_VECTOR_DUAL,
    Formula.MOBIUS_SURVIVAL,
    Formula.MOBIUS_CDF,
)
MLE_FORMULAS = tuple(_MLE_FORMS)

CLOSED_FORM_EXPONENTIAL = "closed_form_exponential"
PIECEWISE_QUADRATURE = "piecewise_quadrature"


def applicable_formulas(lifetimes: JointLifetimeModel) -> List[Formula]:
    out = list(GENERAL_FORMULAS)
    if lifetimes.is_independent:
        out.extend(MLE_FORMULAS)
    return out


class _Family:
    """phi_{v_t} as a function of t, with one cached structure per breakpoint interval."""

    def __init__(self, system: System):
        self.system = system
        self.n = system.n
        if isinstance(system, SystemStructure):
            self.breakpoints = np.empty(0)
        elif isinstance(system, WeightedLatticePolynomial):
            self.breakpoints = system.breakpoints()
        else:
            raise TypeError(f"unsupported system type {type(system).__name__}")
        self._cache: Dict[int, SystemStructure] = {}

    def interval(self, t: float) -> int:
        return int(np.searchsorted(self.breakpoints, t, side="right"))

    def structure(self, t: float) -> SystemStructure:
        if isinstance(self.system, SystemStructure):
            return self.system
        key = self.interval(t)
        s = self._cache.get(key)
        if s is None:
            s = self._cache[key] = self.system.threshold(t)
        return s


@dataclass(frozen=True)
class ReliabilityQuery:
    system: System
    lifetimes: JointLifetimeModel
    formula: Formula = Formula.AUTO

    def __post_init__(self):
        object.__setattr__(self, "formula", Formula(self.formula))
        if self.system.n != self.lifetimes.n:
            raise DimensionMismatch(
                f"system has {self.system.n} components, lifetimes describe {self.lifetimes.n}"
            )
        if self.formula.mle_form is not None and not self.lifetimes.is_independent:
            raise ModelMismatch(
                f"formula {self.formula.value} needs independent lifetimes, "
                f"got {self.lifetimes.kind}"
            )

    @property
    def resolved_formula(self) -> Formula:
        if self.formula is not Formula.AUTO:
            return self.formula
        if self.lifetimes.is_independent:
            return Formula.MLE_PRIMAL_MOBIUS
        return Formula.MOBIUS_SURVIVAL


@dataclass(frozen=True)
class MttfResult:
    value: float
    method: str

    def __iter__(self):
        return iter((self.value, self.method))


@dataclass
class ReliabilityReport:
    grid: np.ndarray
    values: np.ndarray
    formula_used: List[Formula]
    mttf: Optional[MttfResult] = None
    notes: List[str] = field(default_factory=list)


def _route(s: SystemStructure, lifetimes: JointLifetimeModel, ts: np.ndarray,
           formula: Formula) -> np.ndarray:
    """R_S at the times ``ts``, all of which share the structure ``s``."""
    if formula is Formula.STATE_VECTOR:
        return s.table.astype(np.float64) @ lifetimes.state_probs(ts)
    if formula is Formula.STATE_VECTOR_DUAL:
        probs = lifetimes.state_probs(ts)
        return 1.0 - s.v_star.values.astype(np.float64) @ probs[::-1]
    if formula is Formula.MOBIUS_SURVIVAL:
        return s.m_v.coefficients.astype(np.float64) @ lifetimes.survival_on_subsets(ts)
    if formula is Formula.MOBIUS_CDF:
        return 1.0 - s.m_v_star.coefficients.astype(np.float64) @ lifetimes.cdf_on_subsets(ts)
    form = formula.mle_form
    if form is None:
        raise ValueError(f"unresolved formula {formula!r}")
    return s._mle(lifetimes.marginal_survival(ts).T, form)


def _times(ts) -> np.ndarray:
    ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
    if np.isnan(ts).any() or (ts < 0).any():
        raise DomainError("reliability is evaluated at times t >= 0")
    return ts


def _evaluate(family: _Family, lifetimes: JointLifetimeModel, ts: np.ndarray,
              formula: Formula) -> np.ndarray:
    out = np.empty(ts.shape[0])
    keys = np.searchsorted(family.breakpoints, ts, side="right")
    for key in np.unique(keys):
        sel = keys == key
        s = family.structure(float(ts[sel][0]))
        out[sel] = _route(s, lifetimes, ts[sel], formula)
    return out


def reliability_values(q: ReliabilityQuery, ts, family: Optional[_Family] = None) -> np.ndarray:
    """Unclipped R_S at many times; the quadrature integrand."""
    family = family or _Family(q.system)
    return _evaluate(family, q.lifetimes, _times(ts), q.resolved_formula)


def reliability_at(q: ReliabilityQuery, t: float) -> float:
    val = reliability_values(q, [t])[0]
    return float(min(1.0, max(0.0, val)))


def reliability_curve(q: ReliabilityQuery, grid: Sequence[float], with_mttf: bool = False
                      ) -> ReliabilityReport:
    ts = _times(grid)
    if np.any(np.diff(ts) < 0):
        raise DomainError("grid must be sorted ascending")
    family = _Family(q.system)
    values = np.clip(reliability_values(q, ts, family), 0.0, 1.0)
    report = ReliabilityReport(ts, values, [q.resolved_formula] * len(ts))
    if with_mttf:
        report.mttf = mttf(q)
    return report


def all_routes(system: System, lifetimes: JointLifetimeModel, t: float) -> Dict[Formula, float]:
    """R_S(t) by every route applicable to the lifetime model."""
    out = {}
    for f in applicable_formulas(lifetimes):
        out[f] = float(reliability_values(ReliabilityQuery(system, lifetimes, f), [t])[0])
    return out


# -- mean time to failure ----------------------------------------------------

def _rate_sums(rates: np.ndarray) -> np.ndarray:
    """lambda_A for every mask A."""
    out = np.zeros(1)
    for r in rates:
        out = np.concatenate([out, out + r])
    return out


def mttf_exponential_unweighted(s: SystemStructure, rates: Sequence[float]) -> float:
    """sum over nonempty A of m_v(A) / lambda_A."""
    lam = _rate_sums(np.asarray(rates, dtype=np.float64))
    m = s.m_v.coefficients
    return math.fsum(float(m[a]) / lam[a] for a in np.flatnonzero(m) if a != 0)


def mttf_exponential_weighted(p: WeightedLatticePolynomial, rates: Sequence[float]) -> float:
    """w(empty) + sum_{A nonempty} sum_{B<=A} (-1)^{|A|-|B|} (1 - exp(-lambda_A w(B))) / lambda_A."""
    w = p.weights
    if w[0] == np.inf:
        return math.inf
    lam = _rate_sums(np.asarray(rates, dtype=np.float64))
    card = cardinalities(p.n)
    terms = [float(w[0])]
    for a in range(1, 1 << p.n):
        subs = submasks(a)
        signs = np.where((card[a] - card[subs]) % 2 == 0, 1.0, -1.0)
        numer = math.fsum(signs * -np.expm1(-lam[a] * w[subs]))
        if numer != 0.0:
            terms.append(numer / lam[a])
    return math.fsum(terms)


def _closed_form_applies(q: ReliabilityQuery) -> bool:
    j = q.lifetimes
    return isinstance(j, Independent) and j.all_exponential


def _closed_form(q: ReliabilityQuery) -> float:
    rates = [m.rate for m in q.lifetimes.marginals]
    system = q.system
    if isinstance(system, SystemStructure):
        return mttf_exponential_unweighted(system, rates)
    if system.is_unweighted:
        return mttf_exponential_unweighted(
            SystemStructure.from_table((system.weights == np.inf).astype(np.int8)), rates
        )
    return mttf_exponential_weighted(system, rates)


def mttf_quadrature(q: ReliabilityQuery) -> float:
    """Integral of R_S split at weight and model breakpoints; the last piece runs to infinity."""
    family = _Family(q.system)
    if isinstance(q.system, WeightedLatticePolynomial) and q.system.weights[0] == np.inf:
        return math.inf
    cuts = np.concatenate([family.breakpoints, q.lifetimes.breakpoints()])
    cuts = np.unique(cuts[np.isfinite(cuts) & (cuts > 0)])

    def integrand(ts):
        return reliability_values(q, ts, family)

    pieces = []
    lo = 0.0
    for hi in cuts:
        pieces.append(integrate(integrand, lo, float(hi)))
        lo = float(hi)
    pieces.append(integrate_tail(integrand, lo, q.lifetimes.time_scale()))
    return math.fsum(pieces)


def mttf(q: ReliabilityQuery, method: Optional[str] = None) -> MttfResult:
    """MTTF, by the exponential closed form when it applies, else by quadrature."""
    if method is None:
        method = CLOSED_FORM_EXPONENTIAL if _closed_form_applies(q) else PIECEWISE_QUADRATURE
    if method == CLOSED_FORM_EXPONENTIAL:
        if not _closed_form_applies(q):
            raise ModelMismatch("the closed form needs independent exponential lifetimes")
        return MttfResult(_closed_form(q), method)
    if method == PIECEWISE_QUADRATURE:
        return MttfResult(mttf_quadrature(q), method)
    raise ValueError(f"unknown MTTF method {method!r}")


# -- distribution of p_w(T) ----------------------------------------------------

def distribution_routes(p: System, j: JointLifetimeModel, t: float) -> Dict[str, float]:
    """F_{p_w}(t) = Pr(p_w(T) <= t) by the four general and (if independent) four product formulas."""
    if p.n != j.n:
        raise DimensionMismatch("system and lifetimes disagree on n")
    if t < 0:
        raise DomainError("t must be >= 0")
    s = _Family(p).structure(t)
    ts = np.array([float(t)])
    vt = s.table.astype(np.float64)
    vst = s.v_star.values.astype(np.float64)
    m = s.m_v.coefficients.astype(np.float64)
    ms = s.m_v_star.coefficients.astype(np.float64)
    probs = j.state_probs(ts)[:, 0]
    out = {
        "statevec": 1.0 - vt @ probs,
        "statevec-dual": vst @ probs[::-1],
        "mobius-survival": 1.0 - m @ j.survival_on_subsets(ts)[:, 0],
        "mobius-cdf": ms @ j.cdf_on_subsets(ts)[:, 0],
    }
    if j.is_independent:
        F = j.marginal_cdf(ts)[:, 0]
        up = np.ones(1)
        down = np.ones(1)
        w_up = np.ones(1)
        w_down = np.ones(1)
        for fi in F:
            up = np.concatenate([up, up * (1.0 - fi)])
            down = np.concatenate([down, down * fi])
            w_up = np.concatenate([w_up * fi, w_up * (1.0 - fi)])
            w_down = np.concatenate([w_down * (1.0 - fi), w_down * fi])
        out["independent-statevec"] = 1.0 - math.fsum(vt * w_up)
        out["independent-statevec-dual"] = math.fsum(vst * w_down)
        out["independent-mobius-survival"] = 1.0 - m @ up
        out["independent-mobius-cdf"] = ms @ down
    return {k: float(v) for k, v in out.items()}


def wlp_distribution_at(p: System, j: JointLifetimeModel, t: float,
                        formula: Formula = Formula.AUTO) -> float:
    q = ReliabilityQuery(p, j, formula)
    val = 1.0 - reliability_values(q, [t])[0]
    return float(min(1.0, max(0.0, val)))


def symmetric_reliability_at(profile: SymmetricProfile, j: JointLifetimeModel, t: float) -> float:
    """Pr(|X(t)| >= k(t)) with k(t) the smallest k whose profile value exceeds t."""
    if profile.n != j.n:
        raise DimensionMismatch("profile and lifetimes disagree on n")
    k = profile.k_at(t)
    if k > profile.n:
        return 0.0
    counts = state_vector_dist(j, t).count_distribution()
    return float(min(1.0, math.fsum(counts[k:])))


def symmetric_system(profile: SymmetricProfile) -> WeightedLatticePolynomial:
    return make_symmetric(profile)


# -- weighted minimum / maximum closed forms -----------------------------------

def _alive_bounds(bounds: np.ndarray, t: float) -> np.ndarray:
    return (bounds > t).astype(np.float64)


def weighted_min_bounds(p: WeightedLatticePolynomial) -> np.ndarray:
    """Per-component lower bounds b_i = w([n] minus {i}) of a weighted minimum."""
    full = (1 << p.n) - 1
    return np.array([p.weights[full ^ (1 << i)] for i in range(p.n)])


def weighted_max_bounds(p: WeightedLatticePolynomial) -> np.ndarray:
    """Per-component upper bounds b_i = w({i}) of a weighted maximum."""
    return np.array([p.weights[1 << i] for i in range(p.n)])


def weighted_min_reliability(p: WeightedLatticePolynomial, j: JointLifetimeModel, t: float,
                             independent_form: bool = True) -> float:
    """R_S for p(t) = min_i (b_i v t_i).

    Independent form: prod_i (Ind(b_i > t) coproduct R_i(t)).
    General form: 1 - sum_{A nonempty} (-1)^{|A|+1} Pr(T_A <= t) prod_{i in A} (1 - Ind(b_i > t)).
    """
    alive = _alive_bounds(weighted_min_bounds(p), t)
    ts = np.array([float(t)])
    if independent_form:
        if not j.is_independent:
            raise ModelMismatch("the product form needs independent lifetimes")
        r = j.marginal_survival(ts)[:, 0]
        return float(np.prod(1.0 - (1.0 - alive) * (1.0 - r)))
    cdf = j.cdf_on_subsets(ts)[:, 0]
    card = cardinalities(p.n)
    total = []
    for a in range(1, 1 << p.n):
        idx = [i for i in range(p.n) if a >> i & 1]
        gate = float(np.prod(1.0 - alive[idx]))
        if gate:
            total.append((-1.0) ** (card[a] + 1) * cdf[a] * gate)
    return 1.0 - math.fsum(total)


def weighted_max_reliability(p: WeightedLatticePolynomial, j: JointLifetimeModel, t: float,
                             independent_form: bool = True) -> float:
    """R_S for p(t) = max_i (b_i ^ t_i).

    Independent form: coproduct_i Ind(b_i > t) R_i(t).
    General form: sum_{A nonempty} (-1)^{|A|+1} Pr(T_A > t) prod_{i in A} Ind(b_i > t).
    """
    alive = _alive_bounds(weighted_max_bounds(p), t)
    ts = np.array([float(t)])
    if independent_form:
        if not j.is_independent:
            raise ModelMismatch("the product form needs independent lifetimes")
        r = j.marginal_survival(ts)[:, 0]
        return float(1.0 - np.prod(1.0 - alive * r))
    surv = j.survival_on_subsets(ts)[:, 0]
    card = cardinalities(p.n)
    total = []
    for a in range(1, 1 << p.n):
        idx = [i for i in range(p.n) if a >> i & 1]
        gate = float(np.prod(alive[idx]))
        if gate:
            total.append((-1.0) ** (card[a] + 1) * surv[a] * gate)
    return math.fsum(total)


def state_probs_via_pgf(j: JointLifetimeModel, t: float) -> np.ndarray:
    """Pr(X(t) = e_A) as the Moebius transform of B -> G(e_B, t) = F(e_B^{t,inf})."""
    g = j.cdf_on_subsets(np.array([float(t)]))[::-1, 0]
    return mobius_array(g)
