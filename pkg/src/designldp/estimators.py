"""Unbiased linear estimators (left inverses of the TPM).

All arithmetic is exact. Every builder checks ``L @ Q == I`` before
returning; a failure there is a bug in this module, not a data problem.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from .designs import DesignKind, DesignProfile, SetSystem, incidence_matrix
from .errors import (
    DegenerateGap,
    DimensionMismatch,
    InvalidCounts,
    NotPureDesign,
    SingularC,
    SingularSum,
    ZeroInducedProbability,
)
from .linalg import RationalMatrix, as_fraction
from .protocol import ProtocolParams, build_tpm


class Provenance(str, Enum):
    CLOSED_FORM = "CLOSED_FORM"
    MOORE_PENROSE_CLOSED = "MOORE_PENROSE_CLOSED"
    MOORE_PENROSE_GENERIC = "MOORE_PENROSE_GENERIC"
    CHAI_NAYAK = "CHAI_NAYAK"


@dataclass(frozen=True)
class EstimatorMatrix:
    L: RationalMatrix
    provenance: Provenance

    def apply(self, rho_hat: Sequence) -> list[Fraction]:
        """Estimate of pi from an empirical report distribution."""
        if len(rho_hat) != self.L.cols:
            raise DimensionMismatch(f"expected {self.L.cols} frequencies, got {len(rho_hat)}")
        return (self.L @ RationalMatrix.column(rho_hat)).flat()

    def to_dict(self) -> dict:
        return {"provenance": self.provenance.value, "matrix": self.L.to_strings()}


def _checked(L: RationalMatrix, Q: RationalMatrix, provenance: Provenance) -> EstimatorMatrix:
    if not (L @ Q).is_identity():
        raise RuntimeError(f"{provenance.value} estimator is not a left inverse of Q")
    return EstimatorMatrix(L, provenance)


@dataclass(frozen=True)
class CountVector:
    """Report frequencies ``f`` over the b blocks, with ``sum(f) == t``."""

    f: tuple[int, ...]
    t: int

    def __post_init__(self):
        f = tuple(int(x) for x in self.f)
        object.__setattr__(self, "f", f)
        if any(x < 0 for x in f):
            raise InvalidCounts("counts must be non-negative")
        if self.t < 1:
            raise InvalidCounts("t must be positive")
        if sum(f) != self.t:
            raise InvalidCounts(f"counts sum to {sum(f)}, not t={self.t}")

    @classmethod
    def from_counts(cls, f: Sequence[int]) -> "CountVector":
        return cls(tuple(f), sum(int(x) for x in f))

    @property
    def rho_hat(self) -> list[Fraction]:
        return [Fraction(x, self.t) for x in self.f]


def estimator_coefficients(params: ProtocolParams) -> tuple[Fraction, Fraction]:
    """``(gamma1, gamma2)``: the estimator weight on in-block and off-block reports."""
    gap = params.p_star - params.q_star
    if gap == 0:
        raise DegenerateGap("p* equals q*; no unbiased estimator of this form exists")
    return (1 - params.q_star) / gap, -params.q_star / gap


def closed_form_estimator(s: SetSystem, params: ProtocolParams) -> EstimatorMatrix:
    """``L = gamma1 * A^T + gamma2 * (J - A^T)``."""
    g1, g2 = estimator_coefficients(params)
    Q = build_tpm(s, params)
    At = incidence_matrix(s).T
    L = RationalMatrix([[g1 if a else g2 for a in row] for row in At])
    return _checked(L, Q, Provenance.CLOSED_FORM)


def qtq_closed_form(profile: DesignProfile, params: ProtocolParams) -> tuple[Fraction, Fraction]:
    """``(c, d)`` with ``Q^T Q = c I + d J`` for an (r, lambda)-design TPM."""
    if not profile.is_pure:
        raise NotPureDesign("Q^T Q has the cI + dJ form only for (r, lambda)-designs")
    r, lam, b = profile.replication, profile.index, profile.b
    a1, a2 = params.alpha1, params.alpha2
    diff = a1 - a2
    c = (r - lam) * diff**2
    d = lam * diff**2 + 2 * r * a2 * diff + a2**2 * b
    return c, d


def invert_ci_dj(c, d, v: int) -> tuple[Fraction, Fraction]:
    """``(c', d')`` with ``(cI + dJ)^-1 = c'I + d'J`` for v x v matrices."""
    c, d = as_fraction(c), as_fraction(d)
    if c == 0:
        raise SingularC("c is zero; cI + dJ is singular")
    if v * d + c == 0:
        raise SingularSum("v*d + c is zero; cI + dJ is singular")
    return 1 / c, -d / (c * (v * d + c))


def ci_dj(c, d, v: int) -> RationalMatrix:
    c, d = as_fraction(c), as_fraction(d)
    return RationalMatrix([[c + d if i == j else d for j in range(v)] for i in range(v)])


def moore_penrose_generic(Q: RationalMatrix) -> EstimatorMatrix:
    """``(Q^T Q)^-1 Q^T`` by exact elimination; raises RankDeficient if singular."""
    Qt = Q.T
    return _checked((Qt @ Q).solve(Qt), Q, Provenance.MOORE_PENROSE_GENERIC)


def moore_penrose(
    Q: RationalMatrix,
    profile: Optional[DesignProfile] = None,
    params: Optional[ProtocolParams] = None,
) -> EstimatorMatrix:
    """Moore-Penrose left inverse of Q.

    For BIBDs (profile and params given) the inverse of ``Q^T Q`` comes from
    the ``cI + dJ`` closed form; everything else goes through the generic solve.
    """
    if profile is not None and params is not None and profile.kind is DesignKind.BIBD:
        c, d = qtq_closed_form(profile, params)
        cp, dp = invert_ci_dj(c, d, profile.v)
        L = ci_dj(cp, dp, profile.v) @ Q.T
        return _checked(L, Q, Provenance.MOORE_PENROSE_CLOSED)
    return moore_penrose_generic(Q)


def cn_optimal_estimator(Q: RationalMatrix, rho: Sequence) -> EstimatorMatrix:
    """``(Q^T D^-1 Q)^-1 Q^T D^-1`` with ``D = diag(rho)``."""
    rho = [as_fraction(x) for x in rho]
    if len(rho) != Q.rows:
        raise DimensionMismatch(f"rho has length {len(rho)}, Q has {Q.rows} rows")
    if any(x <= 0 for x in rho):
        raise ZeroInducedProbability("every induced report probability must be positive")
    QtDinv = Q.T @ RationalMatrix.diagonal([1 / x for x in rho])
    return _checked((QtDinv @ Q).solve(QtDinv), Q, Provenance.CHAI_NAYAK)


def penrose_conditions(Q: RationalMatrix, L: RationalMatrix) -> dict[str, bool]:
    """The four defining identities of the pseudoinverse ``L`` of ``Q``."""
    QL, LQ = Q @ L, L @ Q
    return {
        "QLQ=Q": QL @ Q == Q,
        "LQL=L": LQ @ L == L,
        "QL symmetric": QL.T == QL,
        "LQ symmetric": LQ.T == LQ,
    }


def span_left_inverse(alpha, beta, r: int, lam: int, b: int) -> tuple[Fraction, Fraction]:
    """Solve for ``(g, h)`` with ``(g A^T + h J)(alpha A + beta J) = I``.

    Both sides reduce to multiples of I and J, leaving two linear equations
    in ``g`` and ``h``; they are solved here with the generic exact solver.
    """
    alpha, beta = as_fraction(alpha), as_fraction(beta)
    # rows: I-coefficient, J-coefficient
    M = RationalMatrix([[alpha * (r - lam), 0], [alpha * lam + r * beta, r * alpha + beta * b]])
    return tuple(M.solve(RationalMatrix.column([1, 0])).flat())


def estimate_from_counts(s: SetSystem, params: ProtocolParams, counts: CountVector) -> list[Fraction]:
    """``p_j = (T_j - t q*) / (t (p* - q*))`` with ``T_j`` the reports landing in ``Y_j``.

    No clipping or renormalisation: entries can fall outside [0, 1].
    """
    if len(counts.f) != s.b:
        raise DimensionMismatch(f"expected {s.b} counts (one per block), got {len(counts.f)}")
    gap = params.p_star - params.q_star
    if gap == 0:
        raise DegenerateGap("p* equals q*")
    T = [0] * s.point_count
    for fi, B in zip(counts.f, s.blocks):
        for x in B:
            T[x] += fi
    t = counts.t
    return [(Tj - t * params.q_star) / (t * gap) for Tj in T]


def project_simplex(p: Sequence) -> list[Fraction]:
    """Euclidean projection onto the probability simplex, exactly.

    Optional post-processing for display; the unbiased estimate is the
    unprojected vector.
    """
    p = [as_fraction(x) for x in p]
    u = sorted(p, reverse=True)
    running = Fraction(0)
    shift = Fraction(0)
    for i, ui in enumerate(u, start=1):
        running += ui
        cand = (running - 1) / i
        if ui - cand > 0:
            shift = cand
    return [max(x - shift, Fraction(0)) for x in p]

