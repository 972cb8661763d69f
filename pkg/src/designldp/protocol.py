"""Protocol parameters, transition probability matrices and privacy checks.

The privacy ratio ``gamma = e**eps`` is the canonical privacy input so that
all arithmetic stays rational; ``eps`` only appears as a float for display.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Optional

from .designs import DesignProfile, SetSystem, classify, pair_indices
from .errors import (
    DegenerateDesign,
    GammaNotGreaterThanOne,
    InfiniteRatio,
    NonPositivePrivacyGap,
    NotColumnStochastic,
    NotPureDesign,
    ParamMismatch,
    SamePoint,
    ThetaOutOfRange,
    IndexOutOfRange,
)
from .linalg import RationalMatrix, as_fraction, frac_str


@dataclass(frozen=True)
class ProtocolParams:
    theta: Fraction
    gamma: Fraction
    alpha1: Fraction
    alpha2: Fraction
    p_star: Fraction
    q_star: Fraction
    # design parameters the values were derived for
    r: int
    b: int
    lam: int

    @property
    def gap(self) -> Fraction:
        """``p* - q*``."""
        return self.p_star - self.q_star

    @property
    def epsilon_float(self) -> float:
        return math.log(self.gamma)

    def to_dict(self) -> dict:
        return {
            "theta": frac_str(self.theta),
            "gamma": frac_str(self.gamma),
            "alpha1": frac_str(self.alpha1),
            "alpha2": frac_str(self.alpha2),
            "p_star": frac_str(self.p_star),
            "q_star": frac_str(self.q_star),
            "epsilon_float": self.epsilon_float,
        }


def _check_pure(profile: DesignProfile) -> None:
    if not profile.is_pure:
        raise NotPureDesign("protocol parameters need an (r, lambda)-design; classify() says GENERAL")
    r, b, lam = profile.replication, profile.b, profile.index
    if r >= b or r <= lam:
        raise DegenerateDesign(f"need lambda < r < b, got r={r}, b={b}, lambda={lam}")


def params_from_theta(profile: DesignProfile, theta) -> ProtocolParams:
    _check_pure(profile)
    theta = as_fraction(theta)
    if not 0 < theta < 1:
        raise ThetaOutOfRange(f"theta must lie strictly between 0 and 1, got {frac_str(theta)}")
    r, b, lam = profile.replication, profile.b, profile.index
    alpha1 = theta / r
    alpha2 = (1 - theta) / (b - r)
    if alpha1 <= alpha2:
        raise NonPositivePrivacyGap(
            f"theta={frac_str(theta)} gives alpha1={frac_str(alpha1)} <= alpha2={frac_str(alpha2)}"
        )
    q_star = theta * lam / r + (1 - theta) * (r - lam) / (b - r)
    return ProtocolParams(theta, alpha1 / alpha2, alpha1, alpha2, theta, q_star, r, b, lam)


def params_from_gamma(profile: DesignProfile, gamma) -> ProtocolParams:
    """Parameters for privacy ratio ``gamma``, assuming equality in the LDP constraint."""
    _check_pure(profile)
    gamma = as_fraction(gamma)
    if gamma <= 1:
        raise GammaNotGreaterThanOne(f"gamma must exceed 1, got {frac_str(gamma)}")
    r, b, lam = profile.replication, profile.b, profile.index
    denom = b + r * (gamma - 1)
    theta = r * gamma / denom
    alpha1 = gamma / denom
    alpha2 = 1 / denom
    q_star = theta * lam / r + (1 - theta) * (r - lam) / (b - r)
    return ProtocolParams(theta, gamma, alpha1, alpha2, theta, q_star, r, b, lam)


def build_tpm(s: SetSystem, params: ProtocolParams) -> RationalMatrix:
    """``Q = alpha1 * A + alpha2 * (J - A)``, rows indexed by blocks, columns by points."""
    profile = classify(s)
    if not profile.is_pure:
        raise NotPureDesign("build_tpm needs an (r, lambda)-design; use raw_tpm for general systems")
    if (profile.replication, profile.b, profile.index) != (params.r, params.b, params.lam):
        raise ParamMismatch(
            f"params were derived for (r, b, lambda)=({params.r}, {params.b}, {params.lam}), "
            f"design has ({profile.replication}, {profile.b}, {profile.index})"
        )
    a1, a2 = params.alpha1, params.alpha2
    return RationalMatrix([[a1 if x in B else a2 for x in range(s.point_count)] for B in map(set, s.blocks)])


def raw_tpm(s: SetSystem, theta) -> RationalMatrix:
    """TPM of the local randomiser for an arbitrary set system.

    Column x puts ``theta / |Y_x|`` on each block containing x and
    ``(1 - theta) / (b - |Y_x|)`` on every other block.
    """
    theta = as_fraction(theta)
    if not 0 < theta < 1:
        raise ThetaOutOfRange(f"theta must lie strictly between 0 and 1, got {frac_str(theta)}")
    reps = s.replication_counts()
    b = s.b
    if any(rx == b for rx in reps):
        raise DegenerateDesign("a point lying in every block leaves no low-probability reports")
    cols = []
    for x in range(s.point_count):
        hi, lo = theta / reps[x], (1 - theta) / (b - reps[x])
        cols.append([hi if x in B else lo for B in s.blocks])
    return RationalMatrix(cols).T


def verify_ldp(Q: RationalMatrix) -> Fraction:
    """Realised privacy ratio: the largest ratio between two entries of a row."""
    for j, total in enumerate(Q.col_sums()):
        if total != 1:
            raise NotColumnStochastic(f"column {j} sums to {frac_str(total)}")
    worst = Fraction(1)
    for i, row in enumerate(Q):
        lo = min(row)
        if lo <= 0:
            raise InfiniteRatio(f"row {i} has a non-positive entry; the privacy ratio is unbounded")
        worst = max(worst, max(row) / lo)
    return worst


# ---------------------------------------------------------------------------
# purity


@dataclass(frozen=True)
class PurityResult:
    pure: bool
    witness: Optional[dict] = None

    def __bool__(self) -> bool:
        return self.pure


def _deviant(values: dict):
    mode, _ = Counter(values.values()).most_common(1)[0]
    for key, val in values.items():
        if val != mode:
            return key, val, mode
    return None


def pure_check(s: SetSystem) -> PurityResult:
    """Whether ``s`` gives a pure protocol, with a counterexample when it does not."""
    if classify(s).is_pure:
        return PurityResult(True)
    dev = _deviant(dict(enumerate(s.replication_counts())))
    if dev is not None:
        point, got, expected = dev
        return PurityResult(False, {"type": "replication", "point": point, "count": got, "expected": expected})
    pair, got, expected = _deviant(pair_indices(s))
    return PurityResult(False, {"type": "index", "pair": list(pair), "count": got, "expected": expected})


def _dual_sets(s: SetSystem) -> list[set[int]]:
    ys = [set() for _ in range(s.point_count)]
    for i, B in enumerate(s.blocks):
        for x in B:
            ys[x].add(i)
    return ys


def _pair_sizes(s: SetSystem, x: int, x_prime: int) -> tuple[int, int, int]:
    n = s.point_count
    if not (0 <= x < n and 0 <= x_prime < n):
        raise IndexOutOfRange(f"points must lie in [0, {n})")
    if x == x_prime:
        raise SamePoint("q* is defined for distinct points only")
    ys = _dual_sets(s)
    ell = len(ys[x])
    mu = len(ys[x] & ys[x_prime])
    if ell == s.b:
        raise DegenerateDesign(f"point {x} lies in every block")
    return ell, mu, s.b


def qstar_coefficients(s: SetSystem, x: int, x_prime: int) -> tuple[Fraction, Fraction]:
    """``(slope, intercept)`` of q* as a linear function of theta for the pair."""
    ell, mu, m = _pair_sizes(s, x, x_prime)
    intercept = Fraction(ell - mu, m - ell)
    return Fraction(mu, ell) - intercept, intercept


def qstar_bruteforce(s: SetSystem, theta, x: int, x_prime: int) -> Fraction:
    """q* for one ordered pair, counted directly from the dual blocks.

    Uses ``|Y_x & Y_x'| * theta/|Y_x| + |Y_x - Y_x'| * (1-theta)/(|Y| - |Y_x|)``.
    For (r, lambda)-designs this is ``Prob[f(x') in Y_x]``; see
    :func:`hit_probability` for the exact probability on arbitrary systems.
    """
    theta = as_fraction(theta)
    ell, mu, m = _pair_sizes(s, x, x_prime)
    return mu * theta / ell + (ell - mu) * (1 - theta) / (m - ell)


def hit_probability(s: SetSystem, theta, x: int, x_prime: int) -> Fraction:
    """``Prob[f(x') in Y_x]`` summed from the raw TPM column of ``x'``."""
    _pair_sizes(s, x, x_prime)
    Q = raw_tpm(s, theta)
    return sum((Q[i, x_prime] for i, B in enumerate(s.blocks) if x in B), Fraction(0))


def qstar_is_constant(s: SetSystem) -> bool:
    """True iff both theta-coefficients of q* agree across all ordered pairs."""
    coeffs = {qstar_coefficients(s, x, y) for x, y in permutations(range(s.point_count), 2)}
    return len(coeffs) <= 1
