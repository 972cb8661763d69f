"""Monte Carlo sampling of the local randomiser.

Randomness contract
-------------------
* Generator: Philox4x64-10 (counter-based, ``numpy.random.Philox``). Only
  its raw 64-bit output words are consumed, never numpy's derived
  distributions, so streams do not depend on numpy's sampling algorithms.
* Rep ``i`` of a run with master seed ``s`` uses the stream
  ``Philox(key=[s, i])``; reps are therefore independent of execution order.
* Each sample consumes three words ``u0, u1, u2``:
  ``u0`` picks the input x by comparing against exact cumulative thresholds
  ``floor(F_i * 2**64)`` of pi; ``u1 < floor(theta * 2**64)`` is the coin
  (report from ``Y_x``); ``u2`` picks uniformly inside the chosen side via
  the multiply-shift map ``(u2 * size) >> 64``. Each step is biased by at
  most ``size / 2**64``.
"""
from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import sqrt
from typing import Optional

import numpy as np

from .designs import SetSystem, classify
from .errors import DesignLDPError, DimensionMismatch, NotPureDesign
from .estimators import CountVector
from .linalg import frac_str
from .protocol import ProtocolParams
from .risk import Distribution, variance_coordinate, variance_total

_TWO64 = 1 << 64


@dataclass(frozen=True)
class RandomiserSpec:
    design: SetSystem
    params: ProtocolParams
    dual_blocks: tuple[tuple[int, ...], ...]
    # complements of the dual blocks, i.e. the low-probability reports
    off_blocks: tuple[tuple[int, ...], ...]

    @property
    def v(self) -> int:
        return self.design.point_count

    @property
    def b(self) -> int:
        return self.design.b


def make_randomiser(s: SetSystem, params: ProtocolParams) -> RandomiserSpec:
    profile = classify(s)
    if not profile.is_pure:
        raise NotPureDesign("the simulator works with (r, lambda)-designs")
    if (profile.replication, profile.b, profile.index) != (params.r, params.b, params.lam):
        raise DesignLDPError("params were derived for a different design")
    ys = [[i for i, B in enumerate(s.blocks) if x in B] for x in range(s.point_count)]
    off = [[i for i in range(s.b) if i not in set(y)] for y in ys]
    return RandomiserSpec(s, params, tuple(map(tuple, ys)), tuple(map(tuple, off)))


def rep_generator(seed: int, rep: int) -> np.random.Generator:
    """The stream for one rep: ``Philox(key=[seed, rep])``."""
    if not 0 <= seed < _TWO64:
        raise DesignLDPError("seed must be an unsigned 64-bit integer")
    return np.random.Generator(np.random.Philox(key=np.array([seed, rep], dtype=np.uint64)))


def _threshold(p: Fraction) -> int:
    return (p.numerator * _TWO64) // p.denominator


def _mulshift(u: np.ndarray, size) -> np.ndarray:
    """``(u * size) >> 64`` for uint64 ``u`` and ``size < 2**32``."""
    size = np.asarray(size, dtype=np.uint64)
    hi = u >> np.uint64(32)
    lo = u & np.uint64(0xFFFFFFFF)
    return (hi * size + ((lo * size) >> np.uint64(32))) >> np.uint64(32)


class _Sampler:
    """Vectorised tables for one randomiser and input distribution."""

    def __init__(self, spec: RandomiserSpec, pi: Distribution):
        if len(pi) != spec.v:
            raise DimensionMismatch(f"pi has {len(pi)} entries, design has {spec.v} points")
        cum = Fraction(0)
        cuts = []
        for p in pi.probs[:-1]:
            cum += p
            cuts.append(_threshold(cum))
        # a cut of 2**64 (trailing zero-probability points) is never reached
        while cuts and cuts[-1] == _TWO64:
            cuts.pop()
        self.cuts = np.array(cuts, dtype=np.uint64)
        self.coin = np.uint64(_threshold(spec.params.theta))
        self.on = np.array(spec.dual_blocks, dtype=np.int64)
        self.off = np.array(spec.off_blocks, dtype=np.int64)
        self.r = self.on.shape[1]
        self.b = spec.b

    def reports(self, raw: np.ndarray) -> np.ndarray:
        u0, u1, u2 = raw[0::3], raw[1::3], raw[2::3]
        xs = np.searchsorted(self.cuts, u0, side="right")
        high = u1 < self.coin
        y_on = self.on[xs, _mulshift(u2, self.r).astype(np.int64)]
        y_off = self.off[xs, _mulshift(u2, self.b - self.r).astype(np.int64)]
        return np.where(high, y_on, y_off)


def perturb(spec: RandomiserSpec, x: int, rng: np.random.Generator) -> int:
    """One report for input ``x``: coin with bias theta, then a uniform pick."""
    if not 0 <= x < spec.v:
        raise DimensionMismatch(f"point {x} outside [0, {spec.v})")
    u1, u2 = (int(w) for w in rng.bit_generator.random_raw(2))
    side = spec.dual_blocks[x] if u1 < _threshold(spec.params.theta) else spec.off_blocks[x]
    return side[(u2 * len(side)) >> 64]


def run_trial(spec: RandomiserSpec, pi, t: int, rng: np.random.Generator) -> CountVector:
    """Draw t inputs from pi, randomise each, and tally the reports."""
    if t < 1:
        raise DesignLDPError("t must be at least 1")
    pi = pi if isinstance(pi, Distribution) else Distribution(tuple(pi))
    ys = _Sampler(spec, pi).reports(rng.bit_generator.random_raw(3 * t))
    return CountVector(tuple(np.bincount(ys, minlength=spec.b).tolist()), t)


def rep_counts(spec: RandomiserSpec, pi, t: int, seed: int, rep: int) -> CountVector:
    """Counts observed in rep ``rep`` of ``monte_carlo(..., seed=seed)``."""
    return run_trial(spec, pi, t, rep_generator(seed, rep))


def _run_reps(args) -> np.ndarray:
    spec, pi, t, seed, reps = args
    sampler = _Sampler(spec, pi)
    out = np.empty((len(reps), spec.b), dtype=np.int64)
    for row, rep in enumerate(reps):
        raw = rep_generator(seed, rep).bit_generator.random_raw(3 * t)
        out[row] = np.bincount(sampler.reports(raw), minlength=spec.b)
    return out


@dataclass
class SimulationReport:
    reps: int
    t: int
    seed: int
    empirical_mean: list[float]
    empirical_variance_total: float
    analytic_variance_total: Fraction
    per_coordinate_z: list[float]
    counts_checksum: int
    mean_exact: list[Fraction] = field(repr=False, default_factory=list)
    hit_rate: list[float] = field(default_factory=list)
    analytic_hit_rate: list[Fraction] = field(default_factory=list)
    analytic_variance_coordinate: list[Fraction] = field(default_factory=list)
    estimates: Optional[np.ndarray] = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {
            "reps": self.reps,
            "t": self.t,
            "seed": self.seed,
            "empirical_mean_float": self.empirical_mean,
            "empirical_mean": [frac_str(x) for x in self.mean_exact],
            "empirical_variance_total_float": self.empirical_variance_total,
            "analytic_variance_total": frac_str(self.analytic_variance_total),
            "analytic_variance_total_float": float(self.analytic_variance_total),
            "analytic_variance_coordinate": [frac_str(x) for x in self.analytic_variance_coordinate],
            "per_coordinate_z_float": self.per_coordinate_z,
            "hit_rate_float": self.hit_rate,
            "analytic_hit_rate": [frac_str(x) for x in self.analytic_hit_rate],
            "counts_checksum": self.counts_checksum,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def monte_carlo(
    spec: RandomiserSpec,
    pi,
    t: int,
    reps: int,
    seed: int,
    workers: int = 1,
    keep_estimates: bool = False,
) -> SimulationReport:
    """Repeat the survey ``reps`` times and compare with the analytic variance.

    Per-rep estimates are affine in the integer tallies ``T_j``, so the
    aggregate is built from exact integer sums of ``T_j`` and ``T_j**2``;
    the result does not depend on how reps are split across workers.
    """
    if reps < 2:
        raise DesignLDPError("reps must be at least 2")
    if t < 1:
        raise DesignLDPError("t must be at least 1")
    pi = pi if isinstance(pi, Distribution) else Distribution(tuple(pi))
    if len(pi) != spec.v:
        raise DimensionMismatch(f"pi has {len(pi)} entries, design has {spec.v} points")

    if workers > 1:
        chunks = [list(range(w, reps, workers)) for w in range(workers)]
        counts = np.empty((reps, spec.b), dtype=np.int64)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for idx, part in zip(chunks, pool.map(_run_reps, [(spec, pi, t, seed, c) for c in chunks])):
                counts[idx] = part
    else:
        counts = _run_reps((spec, pi, t, seed, range(reps)))

    incidence = np.zeros((spec.b, spec.v), dtype=np.int64)
    for i, B in enumerate(spec.design.blocks):
        incidence[i, list(B)] = 1
    T = counts @ incidence  # reps x v tallies

    params = spec.params
    gap = params.p_star - params.q_star
    scale = t * gap
    sum_T = [int(x) for x in T.sum(axis=0)]
    sum_T2 = [int(x) for x in (T.astype(object) ** 2).sum(axis=0)]

    mean_exact = [(Fraction(s, reps) - t * params.q_star) / scale for s in sum_T]
    var_coord = [
        (Fraction(s2) - Fraction(s * s, reps)) / (reps - 1) / scale**2 for s, s2 in zip(sum_T, sum_T2)
    ]
    profile = classify(spec.design)
    analytic_coord = [variance_coordinate(profile, params, p, t) for p in pi]
    z = []
    for m, p, var in zip(mean_exact, pi, analytic_coord):
        se = sqrt(float(var) / reps)
        z.append(float(m - p) / se if se > 0 else 0.0)

    digest = hashlib.sha256(np.ascontiguousarray(counts, dtype="<i8").tobytes()).digest()
    estimates = None
    if keep_estimates:
        estimates = np.array([[float((int(x) - t * params.q_star) / scale) for x in row] for row in T])

    return SimulationReport(
        reps=reps,
        t=t,
        seed=seed,
        empirical_mean=[float(m) for m in mean_exact],
        empirical_variance_total=float(sum(var_coord, Fraction(0))),
        analytic_variance_total=variance_total(profile, params, pi, t),
        per_coordinate_z=z,
        counts_checksum=int.from_bytes(digest[:8], "big") >> 1,
        mean_exact=mean_exact,
        hit_rate=[s / (reps * t) for s in sum_T],
        analytic_hit_rate=[gap * p + params.q_star for p in pi],
        analytic_variance_coordinate=analytic_coord,
        estimates=estimates,
    )
