"""Acceptance suite: one test per criterion, each logging a PASS/FAIL line.

The lines are collected in ``conftest.ACCEPTANCE_LINES`` and printed in the
terminal summary, so they show up even when output capture is on.
"""
import json
import random
import time
from contextlib import contextmanager
from fractions import Fraction as F
from itertools import permutations

from designldp.cli import main
from designldp.designs import DesignKind, catalog_lookup, catalog_names, classify, validate_set_system
from designldp.estimators import (
    CountVector,
    closed_form_estimator,
    estimate_from_counts,
    estimator_coefficients,
    moore_penrose,
    moore_penrose_generic,
    qtq_closed_form,
    invert_ci_dj,
)
from designldp.errors import NonPositivePrivacyGap
from designldp.linalg import RationalMatrix
from designldp.protocol import (
    build_tpm,
    params_from_gamma,
    params_from_theta,
    pure_check,
    qstar_bruteforce,
    qstar_is_constant,
    verify_ldp,
)
from designldp.risk import (
    Distribution,
    binomial_pmf,
    cn_lower_bound,
    cn_trace_bound,
    exact_count_distribution,
    induced_distribution,
    information_trace,
    risk_trace,
    variance_by_coordinates,
    variance_coordinate,
    variance_pnl_bibd,
    variance_total,
    warner_variance,
)
from designldp.simulate import make_randomiser, monte_carlo

from conftest import ACCEPTANCE_LINES


@contextmanager
def criterion(number: int, title: str, limit: float | None = None):
    """Run a criterion body, log one PASS/FAIL line, and re-raise failures."""
    start = time.perf_counter()
    notes: list[str] = []
    try:
        yield notes
        elapsed = time.perf_counter() - start
        if limit is not None:
            assert elapsed < limit, f"took {elapsed:.2f}s, limit {limit}s"
    except BaseException as exc:
        reason = str(exc).splitlines()[0] if str(exc) else ""
        line = f"criterion {number}: FAIL  {title} ({type(exc).__name__}: {reason})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        raise
    extra = f" [{'; '.join(notes)}]" if notes else ""
    line = f"criterion {number}: PASS  {title} ({elapsed:.2f}s){extra}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def _matrix(rows: str) -> RationalMatrix:
    return RationalMatrix([line.split() for line in rows.strip().splitlines()])


AG23_TPM = _matrix("""
3/16 3/16 3/16 1/32 1/32 1/32 1/32 1/32 1/32
1/32 1/32 1/32 3/16 3/16 3/16 1/32 1/32 1/32
1/32 1/32 1/32 1/32 1/32 1/32 3/16 3/16 3/16
3/16 1/32 1/32 3/16 1/32 1/32 3/16 1/32 1/32
1/32 3/16 1/32 1/32 3/16 1/32 1/32 3/16 1/32
1/32 1/32 3/16 1/32 1/32 3/16 1/32 1/32 3/16
3/16 1/32 1/32 1/32 3/16 1/32 1/32 1/32 3/16
1/32 3/16 1/32 1/32 1/32 3/16 3/16 1/32 1/32
1/32 1/32 3/16 3/16 1/32 1/32 1/32 3/16 1/32
3/16 1/32 1/32 1/32 1/32 3/16 1/32 3/16 1/32
1/32 3/16 1/32 3/16 1/32 1/32 1/32 1/32 3/16
1/32 1/32 3/16 1/32 3/16 1/32 3/16 1/32 1/32
""")

# Reference estimator as published. Row 1, column 3 reads 3/5 there; every
# other entry, the stated gamma2 and L Q = I all require -3/5.
AG23_L_PUBLISHED = _matrix("""
23/15 -3/5 3/5 23/15 -3/5 -3/5 23/15 -3/5 -3/5 23/15 -3/5 -3/5
23/15 -3/5 -3/5 -3/5 23/15 -3/5 -3/5 23/15 -3/5 -3/5 23/15 -3/5
23/15 -3/5 -3/5 -3/5 -3/5 23/15 -3/5 -3/5 23/15 -3/5 -3/5 23/15
-3/5 23/15 -3/5 23/15 -3/5 -3/5 -3/5 -3/5 23/15 -3/5 23/15 -3/5
-3/5 23/15 -3/5 -3/5 23/15 -3/5 23/15 -3/5 -3/5 -3/5 -3/5 23/15
-3/5 23/15 -3/5 -3/5 -3/5 23/15 -3/5 23/15 -3/5 23/15 -3/5 -3/5
-3/5 -3/5 23/15 23/15 -3/5 -3/5 -3/5 23/15 -3/5 -3/5 -3/5 23/15
-3/5 -3/5 23/15 -3/5 23/15 -3/5 -3/5 -3/5 23/15 23/15 -3/5 -3/5
-3/5 -3/5 23/15 -3/5 -3/5 23/15 23/15 -3/5 -3/5 -3/5 23/15 -3/5
""")


def test_criterion_01_worked_estimate():
    with criterion(1, "pairs-4 worked estimate is (5/12, 1/4, 1/4, 1/12)", limit=1.0):
        s = catalog_lookup("pairs-4")
        params = params_from_theta(classify(s), F(3, 4))
        est = estimate_from_counts(s, params, CountVector((4, 4, 2, 2, 3, 3), 18))
        assert est == [F(5, 12), F(1, 4), F(1, 4), F(1, 12)], est


def test_criterion_02_worked_protocol():
    with criterion(2, "ag23 protocol parameters, TPM and estimator", limit=1.0) as notes:
        s = catalog_lookup("ag23")
        params = params_from_theta(classify(s), F(3, 4))
        assert (params.alpha1, params.alpha2) == (F(3, 16), F(1, 32))
        assert (params.p_star, params.q_star) == (F(3, 4), F(9, 32))
        Q = build_tpm(s, params)
        assert verify_ldp(Q) == 6
        assert estimator_coefficients(params) == (F(23, 15), F(-3, 5))
        assert Q == AG23_TPM
        L = closed_form_estimator(s, params).L
        diff = [(i, j) for i in range(9) for j in range(12) if L[i, j] != AG23_L_PUBLISHED[i, j]]
        assert diff == [(0, 2)], diff
        assert L[0, 2] == -AG23_L_PUBLISHED[0, 2] == F(-3, 5)
        # the published cell cannot be right: with it, L Q is not the identity
        assert not (AG23_L_PUBLISHED @ Q).is_identity()
        assert (L @ Q).is_identity()
        notes.append("TPM matches all 108 entries; L matches 107 of 108, the published L[1,3]=3/5 is a sign typo")


def test_criterion_03_moore_penrose():
    with criterion(3, "closed-form estimator equals generic Q+ on catalog BIBDs", limit=5.0) as notes:
        checked = 0
        for name in catalog_names():
            s = catalog_lookup(name)
            profile = classify(s)
            if profile.kind is not DesignKind.BIBD:
                continue
            for theta in (F(1, 3), F(1, 2), F(3, 4)):
                try:
                    params = params_from_theta(profile, theta)
                except NonPositivePrivacyGap:
                    continue
                Q = build_tpm(s, params)
                assert closed_form_estimator(s, params).L == moore_penrose_generic(Q).L, (name, theta)
                checked += 1
        notes.append(f"{checked} (design, theta) pairs; pairs with alpha1 <= alpha2 have no protocol")


def test_criterion_04_variance_value():
    with criterion(4, "ag23 variance 256/45 by five routes", limit=1.0):
        s = catalog_lookup("ag23")
        profile = classify(s)
        params = params_from_theta(profile, F(1, 2))
        pi = Distribution.uniform(9)
        t = 10
        Q = build_tpm(s, params)
        rho = induced_distribution(Q, pi)
        routes = {
            "per-coordinate": sum(variance_by_coordinates(profile, params, pi, t), F(0)),
            "total": variance_total(profile, params, pi, t),
            "bibd": variance_pnl_bibd(profile, params.gamma, pi, t),
            "risk-trace": risk_trace(moore_penrose(Q, profile, params), rho, pi) / t,
            "lower-bound": cn_lower_bound(Q, rho, pi, t),
        }
        assert set(routes.values()) == {F(256, 45)}, routes


def test_criterion_05_bound_tightness():
    with criterion(5, "(25,50,8,4,1) at gamma=21/4 meets the trace bound 54271/2023", limit=5.0) as notes:
        s = catalog_lookup("bibd-25-4-1")
        profile = classify(s)
        assert profile.parameters == (25, 50, 8, 4, 1)
        params = params_from_gamma(profile, F(21, 4))
        Q = build_tpm(s, params)
        rho = induced_distribution(Q, Distribution.uniform(25))
        generic = information_trace(Q, rho)
        c, d = qtq_closed_form(profile, params)
        cp, dp = invert_ci_dj(c, d, 25)
        # rho is uniform 1/b, so (Q^T D^-1 Q)^-1 = (Q^T Q)^-1 / b
        closed = 25 * (cp + dp) / profile.b
        bound = cn_trace_bound(25, 4, F(21, 4))
        assert generic == closed == bound == F(54271, 2023)
        assert bound != F(98213, 36125)
        notes.append("the value 98213/36125 sometimes quoted for this case does not match either oracle")


def _random_system(rng: random.Random):
    v = rng.randint(5, 7)
    while True:
        blocks = [
            sorted(rng.sample(range(v), rng.randint(1, v - 1))) for _ in range(rng.randint(3, 10))
        ]
        covered = set().union(*map(set, blocks))
        blocks += [[x] for x in range(v) if x not in covered]
        s = validate_set_system(v, blocks)
        if all(c < s.b for c in s.replication_counts()):
            return s


def test_criterion_06_purity_equivalence():
    with criterion(6, "q* constancy iff (r,lambda)-design; fano-minus-point q* = (2-theta)/3", limit=10.0):
        rng = random.Random(20240601)
        systems = [catalog_lookup(n) for n in catalog_names()] + [_random_system(rng) for _ in range(50)]
        for s in systems:
            assert qstar_is_constant(s) == classify(s).is_pure == pure_check(s).pure, s
        s = catalog_lookup("fano-minus-point")
        mismatches = []
        for theta in (F(1, 4), F(1, 3), F(1, 2), F(2, 3), F(3, 4)):
            values = {qstar_bruteforce(s, theta, x, y) for x, y in permutations(range(s.v), 2)}
            assert len(values) == 1
            (q,) = values
            if q != (2 - theta) / 3:
                mismatches.append(f"theta={theta}: q*={q}, (2-theta)/3={(2 - theta) / 3}")
        # the exact value is theta/3 + 2(1 - theta)/4 = (3 - theta)/6 (|Y| = 7, |Y_x| = 3)
        assert not mismatches, "; ".join(mismatches)


def test_criterion_07_warner_cross_check():
    with criterion(7, "Warner variance equals the per-coordinate formula"):
        profile = classify(catalog_lookup("warner"))
        for theta in (F(3, 5), F(3, 4), F(9, 10)):
            params = params_from_theta(profile, theta)
            for p1 in (F(0), F(1, 4), F(1, 2), F(1)):
                assert warner_variance(theta, p1, 1) == variance_coordinate(profile, params, p1, 1)


def test_criterion_08_monte_carlo():
    with criterion(8, "pairs-4 Monte Carlo means within 4 SE, total variance within 10%", limit=60.0) as notes:
        s = catalog_lookup("pairs-4")
        params = params_from_theta(classify(s), F(3, 4))
        pi = Distribution.parse("5/12,1/4,1/4,1/12")
        rep = monte_carlo(make_randomiser(s, params), pi, t=1000, reps=2000, seed=42)
        assert max(abs(z) for z in rep.per_coordinate_z) < 4, rep.per_coordinate_z
        ratio = rep.empirical_variance_total / float(rep.analytic_variance_total)
        assert abs(ratio - 1) < 0.10, ratio
        notes.append(f"max |z|={max(abs(z) for z in rep.per_coordinate_z):.2f}, variance ratio={ratio:.3f}")


def test_criterion_09_binomial_law():
    with criterion(9, "warner T_1 is exactly binomial", limit=5.0):
        s = catalog_lookup("warner")
        params = params_from_theta(classify(s), F(3, 4))
        Q = build_tpm(s, params)
        for t in (1, 2, 3, 4):
            for p1 in (F(1, 4), F(1, 2)):
                pmf = exact_count_distribution(s, Q, Distribution((p1, 1 - p1)), t, 0)
                assert pmf == binomial_pmf(t, p1 * (params.p_star - params.q_star) + params.q_star)


def test_criterion_10_determinism(tmp_path):
    with criterion(10, "simulate output is byte-identical across runs"):
        outs = []
        for i in range(2):
            path = tmp_path / f"run{i}.json"
            code = main(["simulate", "pairs-4", "--theta", "3/4", "--dist", "5/12,1/4,1/4,1/12",
                         "--t", "1000", "--reps", "200", "--seed", "42", "--out", str(path)])
            assert code == 0
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]
        assert json.loads(outs[0])["reps"] == 200
