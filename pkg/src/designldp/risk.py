"""Exact variances, risk and lower bounds for design-based estimators.

Several independent formula routes produce the same total variance; the
tests and :func:`risk_report` cross-check them against each other.
``communication_cost`` is the only floating-point result here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import comb
from typing import Optional, Sequence

from .designs import DesignKind, DesignProfile, SetSystem, classify
from .errors import (
    DegenerateGap,
    DimensionMismatch,
    InvalidDistribution,
    InvalidK,
    NotBIBD,
    NotPureDesign,
    GammaNotGreaterThanOne,
    ZeroInducedProbability,
)
from .estimators import (
    EstimatorMatrix,
    closed_form_estimator,
    cn_optimal_estimator,
    invert_ci_dj,
    moore_penrose,
    qtq_closed_form,
)
from .linalg import RationalMatrix, as_fraction, frac_str
from .protocol import ProtocolParams, build_tpm


@dataclass(frozen=True)
class Distribution:
    probs: tuple[Fraction, ...]

    def __post_init__(self):
        probs = tuple(as_fraction(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if not probs:
            raise InvalidDistribution("empty distribution")
        if any(p < 0 for p in probs):
            raise InvalidDistribution("probabilities must be non-negative")
        if sum(probs) != 1:
            raise InvalidDistribution(f"probabilities sum to {frac_str(sum(probs))}, not 1")

    @classmethod
    def uniform(cls, n: int) -> "Distribution":
        return cls((Fraction(1, n),) * n)

    @classmethod
    def point_mass(cls, n: int, j: int) -> "Distribution":
        return cls(tuple(Fraction(int(i == j)) for i in range(n)))

    @classmethod
    def parse(cls, text: str) -> "Distribution":
        """From comma-separated rationals, e.g. ``"5/12,1/4,1/4,1/12"``."""
        return cls(tuple(Fraction(p.strip()) for p in text.split(",") if p.strip()))

    def __len__(self) -> int:
        return len(self.probs)

    def __iter__(self):
        return iter(self.probs)

    def __getitem__(self, i):
        return self.probs[i]

    def sum_of_squares(self) -> Fraction:
        return sum((p * p for p in self.probs), Fraction(0))

    def to_list(self) -> list[str]:
        return [frac_str(p) for p in self.probs]


def _dist(pi) -> Distribution:
    return pi if isinstance(pi, Distribution) else Distribution(tuple(pi))


def _require_pure(profile: DesignProfile) -> None:
    if not profile.is_pure:
        raise NotPureDesign("variance formulas need an (r, lambda)-design")


def _gap(params: ProtocolParams) -> Fraction:
    gap = params.p_star - params.q_star
    if gap <= 0:
        raise DegenerateGap("p* must exceed q*")
    return gap


def induced_distribution(Q: RationalMatrix, pi) -> Distribution:
    """``rho = Q pi``: the distribution of one randomised report."""
    pi = _dist(pi)
    if len(pi) != Q.cols:
        raise DimensionMismatch(f"pi has {len(pi)} entries, Q has {Q.cols} columns")
    return Distribution(tuple((Q @ RationalMatrix.column(pi.probs)).flat()))


# -- variance routes ------------------------------------------------------


def variance_coordinate(profile: DesignProfile, params: ProtocolParams, p_j, t: int) -> Fraction:
    """Variance of one coordinate estimate; ``T_j`` is binomial with success
    probability ``p_j (p* - q*) + q*``."""
    _require_pure(profile)
    gap = _gap(params)
    p_j = as_fraction(p_j)
    q = params.q_star
    return ((1 - 2 * q) * p_j * gap + q - p_j**2 * gap**2 - q**2) / (t * gap**2)


def variance_total(profile: DesignProfile, params: ProtocolParams, pi, t: int) -> Fraction:
    """Total variance (sum over coordinates) in closed form, valid for any (r, lambda)-design."""
    _require_pure(profile)
    pi = _dist(pi)
    if len(pi) != profile.v:
        raise DimensionMismatch(f"pi has {len(pi)} entries, design has {profile.v} points")
    gap = _gap(params)
    q = params.q_star
    n = profile.v
    return (1 - 2 * q) / (t * gap) + n * q * (1 - q) / (t * gap**2) - pi.sum_of_squares() / t


def variance_by_coordinates(profile: DesignProfile, params: ProtocolParams, pi, t: int) -> list[Fraction]:
    pi = _dist(pi)
    if len(pi) != profile.v:
        raise DimensionMismatch(f"pi has {len(pi)} entries, design has {profile.v} points")
    return [variance_coordinate(profile, params, p, t) for p in pi]


def warner_variance(theta, p1, t: int) -> Fraction:
    """Warner's randomised-response variance of the estimate of ``p1``."""
    theta, p1 = as_fraction(theta), as_fraction(p1)
    if theta == Fraction(1, 2):
        raise DegenerateGap("theta = 1/2 carries no information")
    return (Fraction(1, 4) / (2 * theta - 1) ** 2 - (p1 - Fraction(1, 2)) ** 2) / t


def variance_pnl_bibd(profile: DesignProfile, gamma, pi, t: int) -> Fraction:
    """Total variance written in terms of ``(n, k, gamma)`` for BIBDs."""
    if profile.kind is not DesignKind.BIBD:
        raise NotBIBD("this variance formula needs constant block size")
    gamma = as_fraction(gamma)
    if gamma <= 1:
        raise GammaNotGreaterThanOne("gamma must exceed 1")
    pi = _dist(pi)
    n, k = profile.v, profile.block_size
    main = Fraction((n - 1) ** 2) * (k * gamma + n - k) ** 2 / (k * (n - k) * (gamma - 1) ** 2 * n)
    return (main + Fraction(1, n) - pi.sum_of_squares()) / t


def variance_pnl_rlambda(profile: DesignProfile, gamma, pi, t: int) -> Fraction:
    """Total variance written in terms of ``(n, m, r, lambda, gamma)`` for (r, lambda)-designs."""
    _require_pure(profile)
    gamma = as_fraction(gamma)
    if gamma <= 1:
        raise GammaNotGreaterThanOne("gamma must exceed 1")
    pi = _dist(pi)
    n, m, r, lam = profile.v, profile.b, profile.replication, profile.index
    num = (r * gamma + (n - 1) * (lam * gamma + r - lam)) * (n * (m - r) + (n - 1) * (r - lam) * (gamma - 1))
    main = num / ((r - lam) ** 2 * (gamma - 1) ** 2 * n)
    return (main + Fraction(1, n) - pi.sum_of_squares()) / t


def risk_trace(L: EstimatorMatrix | RationalMatrix, rho, pi) -> Fraction:
    """Risk ``trace(L D_rho L^T) - sum p_i^2``; the variance is this over t."""
    Lm = L.L if isinstance(L, EstimatorMatrix) else L
    rho, pi = _dist(rho), _dist(pi)
    if len(rho) != Lm.cols or len(pi) != Lm.rows:
        raise DimensionMismatch(f"L is {Lm.shape}, rho has {len(rho)} entries, pi has {len(pi)}")
    # diagonal of L D L^T only
    tr = sum((sum((rk * lik * lik for rk, lik in zip(rho, row)), Fraction(0)) for row in Lm), Fraction(0))
    return tr - pi.sum_of_squares()


# -- bounds ---------------------------------------------------------------


def information_matrix(Q: RationalMatrix, rho) -> RationalMatrix:
    """``Q^T D_rho^-1 Q``."""
    rho = _dist(rho)
    if len(rho) != Q.rows:
        raise DimensionMismatch(f"rho has {len(rho)} entries, Q has {Q.rows} rows")
    if any(p == 0 for p in rho):
        raise ZeroInducedProbability("D_rho is singular: some report has probability zero")
    return Q.T @ RationalMatrix.diagonal([1 / p for p in rho]) @ Q


def information_trace(Q: RationalMatrix, rho) -> Fraction:
    """``trace((Q^T D_rho^-1 Q)^-1)``."""
    return information_matrix(Q, rho).inverse().trace()


def cn_lower_bound(Q: RationalMatrix, rho, pi, t: int) -> Fraction:
    """Smallest variance any unbiased linear estimator can reach at ``(Q, pi)``."""
    pi = _dist(pi)
    return (information_trace(Q, rho) - pi.sum_of_squares()) / t


def trace_uniform_bibd(profile: DesignProfile, params: ProtocolParams) -> Fraction:
    """``trace((Q^T Q)^-1) = v (c' + d')`` for a BIBD TPM."""
    if profile.kind is not DesignKind.BIBD:
        raise NotBIBD("closed-form trace needs a BIBD")
    c, d = qtq_closed_form(profile, params)
    cp, dp = invert_ci_dj(c, d, profile.v)
    return profile.v * (cp + dp)


def uniform_bound_bibd(profile: DesignProfile, params: ProtocolParams, t: int) -> Fraction:
    """The lower bound at uniform pi for a BIBD: ``(v(c'+d')/b - 1/v) / t``."""
    return (trace_uniform_bibd(profile, params) / profile.b - Fraction(1, profile.v)) / t


def _cn_f(v: int, k: int, gamma: Fraction) -> Fraction:
    return Fraction(v * v) * (k * gamma**2 + v - k) / (k * gamma + v - k) ** 2


def cn_trace_bound(v: int, k: int, gamma) -> Fraction:
    """Lower bound on ``trace((Q^T D_rho^-1 Q)^-1)`` for block size k and ratio gamma."""
    if not (1 <= k < v):
        raise InvalidK(f"need 1 <= k < v, got v={v}, k={k}")
    gamma = as_fraction(gamma)
    if gamma <= 1:
        raise GammaNotGreaterThanOne("gamma must exceed 1")
    return Fraction((v - 1) ** 2) / (_cn_f(v, k, gamma) - v) + Fraction(1, v)


def tight_structure(v: int, k: int, gamma) -> tuple[Fraction, Fraction]:
    """``(sigma, tau)`` such that the bound is attained when ``Q^T D^-1 Q = sigma I + tau J``."""
    gamma = as_fraction(gamma)
    sigma = (_cn_f(v, k, gamma) - v) / (v - 1)
    return sigma, 1 - sigma / v


def communication_cost(m: int) -> float:
    """Bits needed to send one report out of m."""
    if m < 1:
        raise DimensionMismatch("m must be positive")
    return math.log2(m)


# -- exhaustive law of T_j ------------------------------------------------


def binomial_pmf(t: int, p) -> list[Fraction]:
    p = as_fraction(p)
    return [comb(t, i) * p**i * (1 - p) ** (t - i) for i in range(t + 1)]


def exact_count_distribution(s: SetSystem, Q: RationalMatrix, pi, t: int, j: int) -> list[Fraction]:
    """Exact law of ``T_j`` by enumerating every sequence of (input, report) pairs.

    Cost is ``(v*b)**t``; only for tiny systems.
    """
    pi = _dist(pi)
    in_Yj = [j in B for B in s.blocks]
    pairs = [(x, y, pi[x] * Q[y, x]) for x in range(s.v) for y in range(s.b)]
    pmf = [Fraction(0)] * (t + 1)
    for seq in product(pairs, repeat=t):
        prob = Fraction(1)
        hits = 0
        for _, y, w in seq:
            prob *= w
            hits += in_Yj[y]
        pmf[hits] += prob
    return pmf


# -- report ---------------------------------------------------------------


@dataclass
class RiskReport:
    per_coordinate: list[Fraction]
    total: Fraction
    route: str
    bound_cn: Fraction
    bound_trace: Optional[Fraction]
    tight: bool
    information_trace: Fraction
    estimator: str
    t: int
    estimator_variance: Fraction
    routes: dict = field(default_factory=dict)
    communication_cost: float = 0.0

    @property
    def routes_agree(self) -> bool:
        return len(set(self.routes.values())) == 1

    def to_dict(self) -> dict:
        def both(x):
            return {"value": frac_str(x), "value_float": float(x)}

        return {
            "route": self.route,
            "estimator": self.estimator,
            "t": self.t,
            "per_coordinate": [frac_str(x) for x in self.per_coordinate],
            "per_coordinate_float": [float(x) for x in self.per_coordinate],
            "total": frac_str(self.total),
            "total_float": float(self.total),
            "bound_cn": frac_str(self.bound_cn),
            "bound_cn_float": float(self.bound_cn),
            "information_trace": frac_str(self.information_trace),
            "information_trace_float": float(self.information_trace),
            "bound_trace": None if self.bound_trace is None else frac_str(self.bound_trace),
            "bound_trace_float": None if self.bound_trace is None else float(self.bound_trace),
            "estimator_variance": frac_str(self.estimator_variance),
            "estimator_variance_float": float(self.estimator_variance),
            "tight": self.tight,
            "routes": {name: both(v) for name, v in self.routes.items()},
            "routes_agree": self.routes_agree,
            "communication_cost_float": self.communication_cost,
        }


def risk_report(s: SetSystem, params: ProtocolParams, pi, t: int, estimator: str = "closed") -> RiskReport:
    """Every variance route plus the bounds for one (design, params, pi, t).

    The formula routes all describe the closed-form estimator. ``estimator``
    (``closed``, ``mp`` or ``cn``) picks the matrix whose own variance is
    reported as ``estimator_variance`` and compared with the lower bound to
    set ``tight``. On non-BIBD designs ``mp`` and ``cn`` can beat the
    closed-form variance.
    """
    profile = classify(s)
    _require_pure(profile)
    pi = _dist(pi)
    Q = build_tpm(s, params)
    rho = induced_distribution(Q, pi)
    if estimator == "closed":
        L = closed_form_estimator(s, params)
    elif estimator == "mp":
        L = moore_penrose(Q, profile, params)
    elif estimator == "cn":
        L = cn_optimal_estimator(Q, rho)
    else:
        raise ValueError(f"unknown estimator {estimator!r}")

    per = variance_by_coordinates(profile, params, pi, t)
    total = variance_total(profile, params, pi, t)
    routes = {
        "per_coordinate_sum": sum(per, Fraction(0)),
        "el2_total": total,
        "pnl_rlambda": variance_pnl_rlambda(profile, params.gamma, pi, t),
    }
    if profile.kind is DesignKind.BIBD:
        routes["pnl_bibd"] = variance_pnl_bibd(profile, params.gamma, pi, t)
    closed = L if estimator == "closed" else closed_form_estimator(s, params)
    routes["risk_trace"] = risk_trace(closed, rho, pi) / t

    info_tr = information_trace(Q, rho)
    bound_cn = (info_tr - pi.sum_of_squares()) / t
    bound_trace = None
    if profile.kind is DesignKind.BIBD:
        bound_trace = cn_trace_bound(profile.v, profile.block_size, params.gamma)
    achieved = risk_trace(L, rho, pi) / t
    return RiskReport(
        per_coordinate=per,
        total=total,
        route="el2_total",
        bound_cn=bound_cn,
        bound_trace=bound_trace,
        tight=achieved == bound_cn,
        estimator_variance=achieved,
        information_trace=info_tr,
        estimator=estimator,
        t=t,
        routes=routes,
        communication_cost=communication_cost(s.b),
    )
