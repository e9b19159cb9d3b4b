"""Stein-Stromberg ball selection, disjointification and covering bounds.

A family is an ordered list of balls ``B(x_i, s_i)`` with a reduction factor
``t``. The selection walks the family in the given order: the candidate
``B(x, s)`` is accepted when the accumulated density

    sum_j  mu(D_j) / mu(B_j) * 1[x in Bl(B_j, t s_j)]

over the previously accepted balls is at most the threshold (1 by default),
where ``D_j`` are the disjointifications of the accepted reduced balls
``B(x_j, t s_j)`` in acceptance order.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .constants import ConstantsReport, ExtendedConstant, constants_report
from .pointset import PointSet
from .space import Ball, Number, Space, exact_number

MODES = ("sparse", "bounded", "combined")
GUARD = 1e-12


class FamilyError(ValueError):
    """A ball family violates the preconditions of its mode."""


def disjointify(sets: Sequence[PointSet]) -> list[PointSet]:
    """``D_1 = A_1`` and ``D_{n+1} = A_{n+1} minus (A_1 u ... u A_n)``."""
    out = []
    seen = None
    for a in sets:
        if seen is None:
            out.append(a)
            seen = a
        else:
            out.append(a - seen)
            seen = seen | a
    return out


@dataclass(frozen=True)
class RadiiSet:
    radii: tuple
    T: Number

    def __post_init__(self):
        if not self.T > 1:
            raise ValueError(f"lacunarity must exceed 1, got {self.T}")
        for a, b in zip(self.radii, self.radii[1:]):
            if b < a * self.T:
                raise ValueError(f"radii {a} and {b} are not {self.T}-lacunary")

    def __contains__(self, r) -> bool:
        return r in self.radii

    def __iter__(self):
        return iter(self.radii)

    def __len__(self):
        return len(self.radii)


def make_lacunary(r0, T, r_min, r_max) -> RadiiSet:
    """``{r0 T^k : k integer}`` intersected with ``[r_min, r_max]``."""
    r0, T, r_min, r_max = (exact_number(v) for v in (r0, T, r_min, r_max))
    if not T > 1:
        raise ValueError(f"lacunarity must exceed 1, got {T}")
    if not (0 < r_min <= r0 <= r_max):
        raise ValueError(f"need 0 < r_min <= r0 <= r_max, got {r_min}, {r0}, {r_max}")
    radii = []
    r = r0
    while r >= r_min:
        radii.append(r)
        r = r / T
    r = r0 * T
    while r <= r_max:
        radii.append(r)
        r = r * T
    radii = tuple(sorted(radii))
    if not radii:
        raise ValueError("empty lacunary radii set")
    return RadiiSet(radii, T)


def scale_count(t, T) -> int:
    """Least m with ``T^m >= 1/t``: radius levels of a T-lacunary set in [s, s/t)."""
    t, T = exact_number(t), exact_number(T)
    m, p = 0, Fraction(1)
    while p < 1 / t:
        p *= T
        m += 1
    return max(m, 1)


@dataclass(frozen=True)
class BallFamily:
    """Ordered balls ``(center, radius)`` with reduction factor ``t``.

    sparse: radii from ``radii_set`` in non-increasing order.
    bounded: radii in ``[r, T r)``, any order.
    combined: non-increasing radii, no lacunarity assumption.
    """

    balls: tuple
    t: Number
    mode: str = "combined"
    radii_set: RadiiSet | None = None
    r: Number | None = None
    T: Number | None = None

    def __post_init__(self):
        object.__setattr__(self, "balls", tuple((int(c), exact_number(s)) for c, s in self.balls))
        object.__setattr__(self, "t", exact_number(self.t))
        if self.r is not None:
            object.__setattr__(self, "r", exact_number(self.r))
        if self.T is not None:
            object.__setattr__(self, "T", exact_number(self.T))
        if self.mode not in MODES:
            raise FamilyError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if not 0 < self.t <= 1:
            raise FamilyError(f"t must lie in (0, 1], got {self.t}")

    def __len__(self):
        return len(self.balls)

    @property
    def radii(self) -> list[Fraction]:
        return [s for _, s in self.balls]

    def validate(self, space: Space) -> None:
        radii = self.radii
        for i, (c, s) in enumerate(self.balls):
            if not 0 <= c < space.n:
                raise FamilyError(f"ball {i}: centre {c} out of range")
            if not s > 0:
                raise FamilyError(f"ball {i}: radius must be positive")
            if space.scaled_measure(space.ball_mask(c, s)) == 0:
                raise FamilyError(f"ball {i}: B({c}, {s}) has zero measure")
        if self.mode in ("sparse", "combined"):
            for i in range(1, len(radii)):
                if radii[i] > radii[i - 1]:
                    raise FamilyError(f"radii must be non-increasing; ball {i} has radius "
                                      f"{radii[i]} > {radii[i - 1]}")
        if self.mode == "sparse":
            if self.radii_set is None:
                raise FamilyError("sparse mode needs a lacunary radii set")
            for i, s in enumerate(radii):
                if s not in self.radii_set:
                    raise FamilyError(f"ball {i}: radius {s} not in the radii set")
        if self.mode == "bounded":
            if self.r is None or self.T is None:
                raise FamilyError("bounded mode needs r and T")
            if not self.T > 1:
                raise FamilyError(f"T must exceed 1, got {self.T}")
            for i, s in enumerate(radii):
                if not self.r <= s < self.T * self.r:
                    raise FamilyError(f"ball {i}: radius {s} outside [{self.r}, {self.T * self.r})")

    def scales(self) -> int:
        """Radius levels below the 1/t ratio that a sparse bound must count."""
        if self.mode != "sparse":
            return 1
        return scale_count(self.t, self.radii_set.T)

    def window(self) -> tuple[Fraction, Fraction]:
        """Radius window that the covering constants must cover.

        It contains every family radius and its t-reduction, plus the radii
        up to ``s_max / t`` (combined) or ``T r`` (bounded) that the scale
        argument visits.
        """
        radii = self.radii
        if self.mode == "bounded":
            return (self.t * self.r / 2, self.T * self.r)
        lo = self.t * min(radii) / 2
        hi = max(radii) / self.t if self.mode == "combined" else max(radii)
        return (lo, hi)


@dataclass(frozen=True)
class SelectionOutcome:
    family: BallFamily
    accepted: tuple
    disjointifications: tuple
    u_set: PointSet
    v_set: PointSet
    density: tuple
    threshold: Number = 1

    def max_density(self, where: PointSet | None = None):
        vals = self.density if where is None else [self.density[i] for i in where]
        return max(vals, default=Fraction(0))


def _weights(space: Space, balls, dsets) -> list[Fraction]:
    out = []
    for (c, s), d in zip(balls, dsets):
        den = space.scaled_measure(space.ball_mask(c, s))
        if den == 0:
            raise ValueError(f"B({c}, {s}) has zero measure")
        out.append(Fraction(space.scaled_measure(d.mask), den))
    return out


def density_sum(space: Space, entries: Sequence[tuple[Ball, PointSet]]) -> list[Fraction]:
    """``sum_j mu(D_j)/mu(B_j) * 1_{B_j}`` evaluated at every point."""
    balls = [(b.center, b.radius) for b, _ in entries]
    ws = _weights(space, balls, [d for _, d in entries])
    out = [Fraction(0)] * space.n
    for (b, _), w in zip(entries, ws):
        if w == 0:
            continue
        for i in np.flatnonzero(space.ball_mask(b.center, b.radius, b.closed)):
            out[i] += w
    return out


def _select(space: Space, family: BallFamily, threshold) -> SelectionOutcome:
    threshold = exact_number(threshold)
    n = space.n
    acc = [Fraction(0)] * n
    accepted, reduced = [], []
    seen = np.zeros(n, dtype=bool)
    u = np.zeros(n, dtype=bool)
    for i, (c, s) in enumerate(family.balls):
        red = space.ball_mask(c, family.t * s)
        u |= red
        if accepted and acc[c] > threshold:
            continue
        accepted.append(i)
        d = red & ~seen
        seen |= red
        reduced.append(PointSet(d))
        w = Fraction(space.scaled_measure(d), space.scaled_measure(space.ball_mask(c, s)))
        if w:
            # centred blossom Bl(B(c, s), t s)
            ball_s = space.ball_mask(c, s)
            bl = space.ball_matrix(space.cut(family.t * s))[ball_s].any(axis=0)
            for j in np.flatnonzero(bl):
                acc[j] += w
    balls = [family.balls[i] for i in accepted]
    entries = [(Ball(c, s), d) for (c, s), d in zip(balls, reduced)]
    return SelectionOutcome(
        family=family,
        accepted=tuple(accepted),
        disjointifications=tuple(reduced),
        u_set=PointSet(u),
        v_set=PointSet(seen),
        density=tuple(density_sum(space, entries)),
        threshold=threshold,
    )


def sparse_select(space: Space, family: BallFamily, threshold=1) -> SelectionOutcome:
    if family.mode != "sparse":
        raise FamilyError(f"sparse_select needs a sparse family, got {family.mode}")
    family.validate(space)
    return _select(space, family, threshold)


def full_select(space: Space, family: BallFamily, threshold=1) -> SelectionOutcome:
    """Same selection as ``sparse_select`` without the lacunarity assumption."""
    if family.mode == "bounded":
        raise FamilyError("full_select needs an ordered family (sparse or combined)")
    family.validate(space)
    return _select(space, family, threshold)


def bounded_outcome(space: Space, family: BallFamily) -> SelectionOutcome:
    """Keep every ball: D are the disjointifications of all reduced balls."""
    family.validate(space)
    reduced = [PointSet(space.ball_mask(c, family.t * s)) for c, s in family.balls]
    dsets = disjointify(reduced)
    union = PointSet.empty(space.n)
    for r in reduced:
        union = union | r
    entries = [(Ball(c, s), d) for (c, s), d in zip(family.balls, dsets)]
    return SelectionOutcome(
        family=family,
        accepted=tuple(range(len(family))),
        disjointifications=tuple(dsets),
        u_set=union,
        v_set=union,
        density=tuple(density_sum(space, entries)),
    )


# -- scale sequence ------------------------------------------------------------


@dataclass(frozen=True)
class ScaleDiagnostic:
    center: int
    start: Number
    end: Number
    radii: tuple
    increments: tuple
    steps: int
    K: float

    def satisfies_count_bound(self, k2) -> bool:
        """``K^N <= K2`` within the float guard."""
        if self.steps == 0:
            return True
        if not math.isfinite(float(k2)):
            return True
        return self.steps * math.log(self.K) <= math.log(float(k2)) + GUARD


def scale_sequence(space: Space, y: int, s, r_max, K) -> ScaleDiagnostic:
    """Adaptive radii ``s = rho_0 < rho_1 < ... = r_max``.

    Each step goes to the largest radius R <= r_max with
    ``mu B(y, R) <= K mu B_closed(y, rho)``. Open-ball measure is
    left-continuous in R, so this supremum is attained at a distance level
    or at r_max and is computed exactly. ``steps`` is N, the number of
    intermediate radii.
    """
    space._check_index(y)
    s, r_max = space.num(s), space.num(r_max)
    if not 0 < s < r_max:
        raise ValueError(f"need 0 < s < r_max, got s={s}, r_max={r_max}")
    if not K >= math.e:
        raise ValueError(f"K must be at least e, got {K}")
    if space.scaled_measure(space.ball_mask(y, r_max)) == 0:
        raise ValueError(f"B({y}, {r_max}) has zero measure")
    k_exact = Fraction(K)
    order = np.argsort(space.rank[y], kind="stable")
    ranks = space.rank[y][order]
    cum = np.cumsum(space.scaled_weights[order])
    # closed-ball measure at each distance level present in row y
    level_ids, counts = np.unique(ranks, return_counts=True)
    ends = np.cumsum(counts) - 1
    level_vals = [space.levels[int(k)] for k in level_ids]
    closed_meas = [int(cum[e]) for e in ends]

    def closed_at(rho) -> int:
        k = space.cut(rho, closed=True)
        return space.scaled_measure(space.rank[y] < k)

    radii = [s]
    rho = s
    while True:
        cap = k_exact * closed_at(rho)
        nxt = r_max
        for v, m in zip(level_vals, closed_meas):
            if v > rho and m > cap:
                nxt = min(v, r_max)
                break
        radii.append(nxt)
        if nxt >= r_max:
            break
        rho = nxt
    incs = tuple(b / a - 1 for a, b in zip(radii, radii[1:]))
    return ScaleDiagnostic(y, s, r_max, tuple(radii), incs, len(radii) - 2, float(K))


# -- verification --------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    lhs: object
    rhs: object
    passed: bool
    vacuous: bool = False
    note: str = ""

    def line(self) -> str:
        verdict = "vacuous" if self.vacuous else ("pass" if self.passed else "FAIL")
        return f"{self.name}: {self.lhs} <= {self.rhs} ... {verdict}"


@dataclass(frozen=True)
class VerificationReport:
    theorem: str
    checks: tuple = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.passed or c.vacuous for c in self.checks)

    @property
    def vacuous(self) -> bool:
        return any(c.vacuous for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not (c.passed or c.vacuous)]


def log_bound(c_mu, k1, k2) -> float:
    """``C K1 K (2 + log K2 / log K)`` with ``K = max(K1, e)``."""
    k = max(float(k1), math.e)
    return float(c_mu) * float(k1) * k * (2 + math.log(float(k2)) / math.log(k))


def _finite(*cs: ExtendedConstant) -> bool:
    return all(c.finite for c in cs)


def _le_float(lhs, rhs: float) -> bool:
    return float(lhs) <= rhs + GUARD * max(1.0, abs(rhs))


def verify_covering_bounds(space: Space, outcome: SelectionOutcome, report: ConstantsReport,
                           theorem: str) -> VerificationReport:
    """Evaluate both sides of the covering inequalities for one outcome.

    sparse: ``mu U <= (K+1) mu V`` and ``density <= 1 + m C K`` everywhere,
    with m = 1 when ``T t >= 1``.
    combined: the same set bound and ``density <= 1 + C K1 K (2 + log K2/log K)``.
    bounded: ``density <= C K1 K (2 + log K2/log K)``.
    Log-form bounds involve K2 = mri on the support only, so they are
    evaluated on the support of the measure.
    """
    fam = outcome.family
    if theorem not in MODES:
        raise ValueError(f"unknown theorem {theorem!r}")
    if space.num(report.t) != space.num(fam.t):
        raise ValueError(f"report computed at t={report.t}, family uses t={fam.t}")
    checks = []
    mu_u = space.measure_of_scaled(space.scaled_measure(outcome.u_set.mask))
    mu_v = space.measure_of_scaled(space.scaled_measure(outcome.v_set.mask))
    c, k1 = report.c_mu, report.k_blossom

    if theorem in ("sparse", "combined"):
        name = "set" if theorem == "sparse" else "set2"
        if not _finite(k1):
            checks.append(Check(name, mu_u, "inf", True, vacuous=True))
        else:
            rhs = (k1.value + 1) * mu_v
            checks.append(Check(name, mu_u, rhs, mu_u <= rhs))

    if theorem == "sparse":
        m = fam.scales()
        lhs = outcome.max_density()
        if not _finite(c, k1):
            checks.append(Check("bound", lhs, "inf", True, vacuous=True))
        else:
            rhs = 1 + m * c.value * k1.value
            checks.append(Check("bound", lhs, rhs, lhs <= rhs,
                                note="" if m == 1 else f"{m} radius levels below s/t"))
    else:
        supp = space.support()
        lhs = outcome.max_density(supp)
        name = "bound2" if theorem == "combined" else "sum"
        if not _finite(c, k1, report.k2):
            checks.append(Check(name, lhs, "inf", True, vacuous=True))
        else:
            rhs = log_bound(c.value, k1.value, report.k2.value)
            if theorem == "combined":
                rhs += 1
            checks.append(Check(name, lhs, rhs, _le_float(lhs, rhs)))
    return VerificationReport(theorem, tuple(checks))


def report_for(space: Space, family: BallFamily) -> ConstantsReport:
    """Constants over the family's radius window with the matching K2."""
    window = family.window()
    if family.mode == "bounded":
        return constants_report(space, family.t, family.T, window,
                                k2_ratio=family.T, k2_radius=family.r)
    T = family.radii_set.T if family.mode == "sparse" else None
    return constants_report(space, family.t, T, window)


# -- random families -----------------------------------------------------------


def random_family(space: Space, rng: random.Random, size: int, t, *, mode: str,
                  radii_set: RadiiSet | None = None, r=None, T=None,
                  radii: Sequence | None = None) -> BallFamily:
    """Random valid family: positive-measure balls, ordered as the mode needs."""
    t = exact_number(t)
    support = space.support().indices()
    if not support:
        raise ValueError("space has zero total measure")
    balls = []
    while len(balls) < size:
        c = rng.randrange(space.n)
        if mode == "sparse":
            s = rng.choice(radii_set.radii)
        elif mode == "bounded":
            r_, T_ = exact_number(r), exact_number(T)
            s = r_ + (T_ - 1) * r_ * Fraction(rng.randrange(64), 64)
        else:
            s = exact_number(rng.choice(radii)) if radii is not None else \
                Fraction(rng.randrange(1, 65), 8)
        if space.scaled_measure(space.ball_mask(c, s)) > 0:
            balls.append((c, s))
    if mode != "bounded":
        balls.sort(key=lambda b: -b[1])
    return BallFamily(tuple(balls), t, mode, radii_set=radii_set,
                      r=None if r is None else exact_number(r),
                      T=None if T is None else exact_number(T))
