"""Acceptance suite: ten numbered criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v``; the lines are written to the
terminal even when output capture is on.
"""

import math
import random
import time
from fractions import Fraction

import pytest

import oracles
from conftest import EXAMPLE_SPACES, random_linf_space
from covering_lab import (Ball, BallFamily, ExtendedConstant, ball, blossom, bounded_outcome,
                          constants_report, empirical_weak_norm, full_select, grid_zd,
                          local_comparability, lshape_net, make_lacunary, microblossom,
                          microdoubling, ngon_chordal, radius_intervals, report_for,
                          scale_sequence, sparse_select, theoretical_bounds, three_point_delta,
                          uncentered_blossom, verify_covering_bounds, weak_type_profile)
from covering_lab.constants import ConstantsReport
from covering_lab.covering import random_family
from covering_lab.maximal import (CUBE_SPARSE_BOUND, full_bound, lebesgue_sparse_bound,
                                  sparse_bound)
from covering_lab.sweep import sweep

HALF = Fraction(1, 2)


class Criterion:
    def __init__(self):
        self.number, self.title, self.limit = None, "", None
        self.start = time.perf_counter()
        self.ok = False

    def __call__(self, number, title, limit=None):
        self.number, self.title, self.limit = number, title, limit
        self.start = time.perf_counter()

    def passed(self):
        self.ok = True


@pytest.fixture
def criterion(capsys):
    """Records one criterion and prints its PASS/FAIL line when the test ends."""
    crit = Criterion()
    yield crit
    elapsed = time.perf_counter() - crit.start
    with capsys.disabled():
        print(f"\ncriterion {crit.number:>2} {'PASS' if crit.ok else 'FAIL'} "
              f"({elapsed:.2f}s) {crit.title}")
    assert crit.limit is None or elapsed <= crit.limit, \
        f"criterion {crit.number} took {elapsed:.2f}s, limit {crit.limit}s"


def test_criterion_01_example_space_exactness(criterion):
    criterion(1, "three_point_delta: microblossom(1/2) = 1 and local comparability = inf", 1.0)
    sp = three_point_delta()
    assert microblossom(sp, HALF).value == 1
    c = local_comparability(sp)
    assert c.value == math.inf and c.witness is not None
    # independent brute force agrees
    assert oracles.microblossom(sp, HALF) == 1
    assert oracles.local_comparability(sp) == math.inf
    criterion.passed()


@pytest.mark.parametrize("d", [2, 3])
def test_criterion_02_lattice_microdoubling_failure(criterion, d):
    criterion(2, f"Z^{d}: microdoubling(t) >= 3^{d} near r = 1 for t in 0.01, 0.1, 0.5", 1.0)
    sp = grid_zd(d, 2)
    for t in ("0.01", "0.1", "0.5"):
        t = Fraction(t)
        window = (1 / (1 + t), 1)
        k = microdoubling(sp, t, window=window)
        assert k.value >= 3 ** d
        assert k.witness.interval.lo == 1 / (1 + t) and k.witness.interval.hi == 1
        assert microdoubling(sp, t).value >= 3 ** d
    criterion.passed()


@pytest.mark.parametrize("d", [2, 3])
def test_criterion_03_lattice_microblossoming_in_the_small(criterion, d):
    criterion(3, f"Z^{d}, half-width {d + 1}: microblossom(1/{d}) on (0, {d}] is exactly 1", 5.0)
    sp = grid_zd(d, d + 1)
    assert microblossom(sp, Fraction(1, d), window=(0, d)).value == 1
    criterion.passed()


def test_criterion_04_sparse_covering_theorem(criterion):
    criterion(4, "grid{2, hw=8}: 100 sparse families pass (set) and (bound)", 10.0)
    sp = grid_zd(2, 8)
    rset = make_lacunary(1, 2, 1, 16)
    rng = random.Random(2024)
    reports = {}
    failures = 0
    for _ in range(100):
        fam = random_family(sp, rng, rng.randint(1, 16), HALF, mode="sparse", radii_set=rset)
        out = sparse_select(sp, fam)
        key = fam.window()
        if key not in reports:
            reports[key] = report_for(sp, fam)
        ver = verify_covering_bounds(sp, out, reports[key], "sparse")
        assert not ver.vacuous
        failures += not ver.passed
    assert failures == 0
    criterion.passed()


def test_criterion_05_combined_covering_theorem(criterion):
    criterion(5, "20 random 40-point l-inf spaces: full_select passes (bound2)", 30.0)
    for seed in range(20):
        rng = random.Random(5000 + seed)
        sp = random_linf_space(rng, 40, dim=rng.choice([1, 2, 3]))
        t = Fraction(1, rng.choice([2, 3, 4]))
        fam = random_family(sp, rng, 24, t, mode="combined")
        out = full_select(sp, fam)
        ver = verify_covering_bounds(sp, out, report_for(sp, fam), "combined")
        assert not ver.vacuous
        bound2 = [c for c in ver.checks if c.name == "bound2"][0]
        assert float(bound2.lhs) <= bound2.rhs + 1e-12 * max(1.0, bound2.rhs)
        assert ver.passed
    criterion.passed()


def test_criterion_06_bounded_radii_and_scale_sequence(criterion):
    criterion(6, "grid{1, hw=16}: bounded families pass (sum); K^N <= K2 on every scale run", 10.0)
    sp = grid_zd(1, 16)
    rng = random.Random(6)
    for r, T in ((1, 2), (Fraction(3, 2), 3), (2, 4), (Fraction(1, 2), 8)):
        r, T = Fraction(r), Fraction(T)
        fams = []
        for _ in range(6):
            # equal radii
            s = r + (T - 1) * r * Fraction(rng.randrange(8), 8)
            fams.append(tuple((rng.randrange(sp.n), s) for _ in range(10)))
            # mixed radii in any order
            fams.append(random_family(sp, rng, 10, HALF, mode="bounded", r=r, T=T).balls)
        for balls in fams:
            fam = BallFamily(balls, HALF, "bounded", r=r, T=T)
            rep = report_for(sp, fam)
            out = bounded_outcome(sp, fam)
            ver = verify_covering_bounds(sp, out, rep, "bounded")
            assert ver.passed and not ver.vacuous
            K = max(float(rep.k_blossom.value), math.e)
            k2 = rep.k2.value
            for y, s in balls:
                if s < T * r:
                    diag = scale_sequence(sp, y, s, T * r, K)
                    assert diag.satisfies_count_bound(k2)
                    assert K ** diag.steps <= float(k2) * (1 + 1e-12)
    criterion.passed()


def _test_spaces():
    spaces = {name: make() for name, make in EXAMPLE_SPACES.items()}
    for seed in range(3):
        spaces[f"random{seed}"] = random_linf_space(random.Random(700 + seed), 14)
    return spaces


def test_criterion_07_weak_type(criterion):
    criterion(7, "delta_scan on grid{1,2} = 5/3; level ratios below full_bound and sparse_bound", 10.0)
    line = grid_zd(1, 2)
    q, _ = empirical_weak_norm(line, "delta_scan")
    # exhaustive oracle: every point mass, brute-force maximal function and level sup
    ref = max(oracles.weak_sup(line, f, oracles.maximal(line, f))
              for f in ([int(i == p) for i in range(line.n)] for p in range(line.n)))
    assert q == ref == Fraction(5, 3)
    t = HALF
    checked = 0
    for name, sp in _test_spaces().items():
        rep = constants_report(sp, t)
        bounds = theoretical_bounds(rep)
        diam = max(max(row) for row in sp.distance_matrix())
        radii = make_lacunary(Fraction(1, 4), 2, Fraction(1, 4), 4 * diam + 4)
        rep_r = constants_report(sp, t, 2, window=(t * radii.radii[0] / 2, radii.radii[-1]))
        sparse = theoretical_bounds(rep_r).sparse_bound
        probes = [f for _, f in (empirical_weak_norm(sp, "delta_scan"),
                                 empirical_weak_norm(sp, "delta_scan", radii.radii),
                                 empirical_weak_norm(sp, "random", count=8, seed=7))]
        rng = random.Random(name)
        probes += [[Fraction(rng.randrange(0, 6)) for _ in range(sp.n)] for _ in range(6)]
        for f in probes:
            if not any(v * w for v, w in zip(f, sp.weights)):
                continue
            if bounds.full_bound is not None:
                for _, _, ratio in weak_type_profile(sp, f).levels:
                    assert float(ratio) <= bounds.full_bound
                    checked += 1
            if sparse is not None:
                for _, _, ratio in weak_type_profile(sp, f, radii.radii).levels:
                    assert float(ratio) <= sparse
                    checked += 1
    assert checked > 0
    criterion.passed()


def test_criterion_08_bound_formulas(criterion):
    criterion(8, "bound formulas: (e^2+1)^2, limit 6, (e^(1/d)+1)(1+2e^(1/d)) for d = 1..10", None)
    e2 = math.exp(2)
    one = ExtendedConstant(Fraction(1), None)
    rep = ConstantsReport(t=HALF, T=2, window=None, c_mu=one, k_micro=one, k_strong=one,
                          k_blossom=ExtendedConstant(e2, None), k_blossom_bounded=one, k2=one)
    got = theoretical_bounds(rep).sparse_bound
    assert round(got, 12) == round((e2 + 1) ** 2, 12)
    assert sparse_bound(e2, 1) == got
    assert CUBE_SPARSE_BOUND == 6
    assert abs(lebesgue_sparse_bound(10**8) - 6) < 1e-7
    for d in range(1, 11):
        ed = math.e ** (1 / d)
        assert round(lebesgue_sparse_bound(d), 12) == round((ed + 1) * (1 + 2 * ed), 12)
        assert theoretical_bounds(rep, d).lebesgue_sparse_bound == lebesgue_sparse_bound(d)
    assert full_bound(1, 1, 1) >= 1
    criterion.passed()


def test_criterion_09_blossom_invariants(criterion):
    criterion(9, "Bl(B(x,r),s) within B(x,r+s); lattice surrogate; L-shape Blu is no ball", None)
    spaces = _test_spaces()
    spaces["ngon9"] = ngon_chordal(9)
    for sp in spaces.values():
        reps = [iv.rep for iv in radius_intervals(sp)]
        for x in range(sp.n):
            for r in reps:
                b = ball(sp, Ball(x, r))
                for s in reps:
                    assert blossom(sp, b, s) <= ball(sp, Ball(x, r + s))
    g = grid_zd(2, 6)
    halves = [Fraction(k, 2) for k in range(1, 15)]
    for x in range(g.n):
        for r in halves:
            b = ball(g, Ball(x, r))
            for s in halves:
                if r + s >= 3:
                    assert ball(g, Ball(x, r + s - 2)) <= blossom(g, b, s)
    net = lshape_net(Fraction(1, 12))
    x = net.index_of((1, 0))
    blu = set(uncentered_blossom(net, ball(net, Ball(x, 1)), Fraction(1, 6)))
    D = net.distance_matrix()
    levels = sorted({v for row in D for v in row})
    for c in range(net.n):
        for r in levels:
            assert blu != oracles.ball(D, c, r) and blu != oracles.ball(D, c, r, closed=True)
    criterion.passed()


def test_criterion_10_sweep_consistency(criterion):
    criterion(10, "sweep d = 1, 2, 3: observed max density below C K + 1", 60.0)
    res = sweep([1, 2, 3], 4, seed=0)
    assert len(res.rows) == 3 and res.consistent
    for row in res.rows:
        assert row.ck_plus_one is not None
        assert row.max_density <= row.ck_plus_one
    criterion.passed()
