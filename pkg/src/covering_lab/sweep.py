"""Dimension sweep on lattice grids with the Lebesgue-style parameters.

For each d the grid ``{-hw..hw}^d`` is covered by random families with
radii from a T-lacunary set (T = d, at least 2) and reduction t = 1/d^2.
Observed density sums and weak-type lower bounds are compared with the
bounds computed from the grid's own constants. ``density_bound`` is
``1 + m C K`` with m the number of radius levels in ``[s, s/t)``, and
``ck_plus_one`` is the single-level value ``C K + 1``.
"""

from __future__ import annotations

import math
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .builders import grid_zd
from .constants import constants_report
from .covering import make_lacunary, random_family, scale_count, sparse_select
from .maximal import empirical_weak_norm, lebesgue_sparse_bound

DEFAULT_BUDGET = 2_000_000

HEADER = ("d", "half_width", "t", "T", "points", "max_density", "density_bound", "ck_plus_one",
          "weak_lower_bound", "weak_bound", "lebesgue_sparse_bound", "d_log_d", "consistent")


def max_threads() -> int:
    """Thread cap from COVERING_LAB_THREADS (default: CPU count)."""
    raw = os.environ.get("COVERING_LAB_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValueError(f"COVERING_LAB_THREADS must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


@dataclass(frozen=True)
class SweepRow:
    d: int
    half_width: int
    t: Fraction
    T: Fraction
    points: int
    max_density: Fraction
    density_bound: Fraction | None
    ck_plus_one: Fraction | None
    weak_lower_bound: Fraction
    weak_bound: float | None
    lebesgue_sparse_bound: float
    d_log_d: float

    @property
    def consistent(self) -> bool:
        ok = self.density_bound is None or self.max_density <= self.density_bound
        return ok and (self.weak_bound is None or float(self.weak_lower_bound) <= self.weak_bound)

    def cells(self) -> tuple:
        return (self.d, self.half_width, self.t, self.T, self.points, self.max_density,
                self.density_bound, self.ck_plus_one, self.weak_lower_bound, self.weak_bound,
                self.lebesgue_sparse_bound, self.d_log_d, int(self.consistent))


@dataclass(frozen=True)
class SweepResult:
    rows: tuple

    @property
    def consistent(self) -> bool:
        return all(r.consistent for r in self.rows)


def default_t(d: int) -> Fraction:
    return Fraction(1, d * d)


def default_T(d: int) -> Fraction:
    return Fraction(max(d, 2))


def _row(d: int, hw: int, t, T, seed: int, families: int, family_size: int) -> SweepRow:
    space = grid_zd(d, hw)
    radii = make_lacunary(1, T, 1, 2 * hw + 1)
    rng = random.Random(seed * 1000003 + d)
    window = (t * radii.radii[0] / 2, radii.radii[-1])
    report = constants_report(space, t, T, window)
    c, k = report.c_mu, report.k_blossom
    m = scale_count(t, T)
    finite = c.finite and k.finite
    density_bound = 1 + m * c.value * k.value if finite else None
    ck_plus_one = 1 + c.value * k.value if finite else None
    weak_bound = (float(k.value) + 1) * float(density_bound) if finite else None
    worst = Fraction(0)
    for _ in range(families):
        fam = random_family(space, rng, family_size, t, mode="sparse", radii_set=radii)
        out = sparse_select(space, fam)
        worst = max(worst, out.max_density())
    weak, _ = empirical_weak_norm(space, "delta_scan", radii=radii.radii)
    return SweepRow(d, hw, t, T, space.n, worst, density_bound, ck_plus_one, weak, weak_bound,
                    lebesgue_sparse_bound(d), d * math.log(d))


def sweep(dims: Sequence[int], half_width: int | Callable[[int], int] = 4,
          t_rule: Callable[[int], Fraction] = default_t,
          T_rule: Callable[[int], Fraction] = default_T,
          seed: int = 0, families: int = 20, family_size: int = 12,
          budget: int = DEFAULT_BUDGET) -> SweepResult:
    plan = []
    for d in dims:
        if d < 1:
            raise ValueError(f"dimension must be >= 1, got {d}")
        hw = half_width(d) if callable(half_width) else half_width
        npts = (2 * hw + 1) ** d
        if npts > budget:
            raise ValueError(f"d={d}, half_width={hw} needs {npts} points, over the budget of {budget}")
        plan.append((d, hw, Fraction(t_rule(d)), Fraction(T_rule(d))))
    if not plan:
        return SweepResult(())
    with ThreadPoolExecutor(max_workers=min(max_threads(), len(plan))) as pool:
        rows = list(pool.map(lambda p: _row(*p, seed, families, family_size), plan))
    return SweepResult(tuple(rows))
