"""Centred maximal functions, weak type (1,1) profiles and bound formulas."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .constants import ConstantsReport
from .space import Space, exact_number


@dataclass(frozen=True)
class MaximalValues:
    """``Mf`` at every point; ``undefined`` marks points with no positive-measure ball."""

    values: tuple
    undefined: tuple

    def __getitem__(self, i):
        return self.values[i]

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


def _as_function(f) -> list[Fraction]:
    return [abs(exact_number(v)) for v in f]


def l1_norm(space: Space, f) -> Fraction:
    return sum((abs(exact_number(v)) * w for v, w in zip(f, space.weights)), Fraction(0))


def _scaled_function(space: Space, f):
    """|f| * weight as integers over a common denominator."""
    g = _as_function(f)
    if len(g) != space.n:
        raise ValueError(f"function has {len(g)} values, space has {space.n} points")
    fscale = 1
    for v in g:
        fscale = math.lcm(fscale, v.denominator)
    w = space.scaled_weights
    gw = [int(v * fscale) * int(wi) for v, wi in zip(g, w)]
    big = sum(gw) >= 2**62 or w.dtype == object
    return np.array(gw, dtype=object if big else np.int64), fscale


def _exact_row_max(num: np.ndarray, den: np.ndarray):
    """Exact ``max num/den`` over entries with ``den > 0``; None if there are none."""
    ok = den > 0
    if not ok.any():
        return None
    nn, dd = num[ok], den[ok]
    approx = nn.astype(float) / dd.astype(float)
    top = approx.max()
    best = None
    for j in np.flatnonzero(approx >= top * (1 - 1e-9)):
        v = Fraction(int(nn[j]), int(dd[j]))
        if best is None or v > best:
            best = v
    return best


def maximal_function(space: Space, f: Sequence, radii: Sequence | None = None) -> MaximalValues:
    """Centred maximal function of ``|f|``; with ``radii`` only those radii are used.

    Unrestricted, the balls centred at x are exactly the closed balls at the
    distinct distances from x, so the supremum is a maximum over them.
    """
    gw, fscale = _scaled_function(space, f)
    w = space.scaled_weights
    n = space.n
    values, undefined = [], []
    if radii is None:
        order = np.argsort(space.rank, axis=1, kind="stable")
        ranks = np.take_along_axis(space.rank, order, axis=1)
        cnum = np.cumsum(gw[order], axis=1)
        cden = np.cumsum(w[order], axis=1)
        # only the last entry of each run of equal distances is a ball
        ends = np.ones_like(ranks, dtype=bool)
        ends[:, :-1] = ranks[:, :-1] != ranks[:, 1:]
        for x in range(n):
            best = _exact_row_max(cnum[x][ends[x]], cden[x][ends[x]])
            undefined.append(best is None)
            values.append(Fraction(0) if best is None else best / fscale)
    else:
        radii = list(radii)
        if not radii:
            raise ValueError("restricted maximal function needs at least one radius")
        nums, dens = [], []
        for r in radii:
            a = space.ball_matrix(space.cut(r)).astype(gw.dtype)
            nums.append(a @ gw)
            dens.append(space.ball_measures(space.cut(r)))
        nums = np.stack(nums, axis=1)
        dens = np.stack(dens, axis=1)
        for x in range(n):
            best = _exact_row_max(nums[x], dens[x])
            undefined.append(best is None)
            values.append(Fraction(0) if best is None else best / fscale)
    return MaximalValues(tuple(values), tuple(undefined))


@dataclass(frozen=True)
class WeakTypeProfile:
    """Rows ``(level, mu{Mf >= level}, level * mu{Mf >= level} / |f|_1)``.

    Each row is the left limit of ``a mu{Mf > a} / |f|_1`` as ``a`` rises to
    a distinct value of ``Mf``.
    """

    levels: tuple
    supremum: Fraction
    argmax: Fraction | None
    norm: Fraction

    def tsv_rows(self) -> list[str]:
        rows = ["level\tmeasure\tratio"]
        rows += [f"{a}\t{m}\t{q}" for a, m, q in self.levels]
        return rows


def weak_type_profile(space: Space, f: Sequence, radii: Sequence | None = None,
                      mf: MaximalValues | None = None) -> WeakTypeProfile:
    norm = l1_norm(space, f)
    if norm == 0:
        raise ValueError("weak-type profile needs a function with positive L1 norm")
    if mf is None:
        mf = maximal_function(space, f, radii)
    rows = []
    best, arg = Fraction(0), None
    for v in sorted({v for v in mf.values if v > 0}, reverse=True):
        mu = sum((w for val, w in zip(mf.values, space.weights) if val >= v), Fraction(0))
        q = v * mu / norm
        rows.append((v, mu, q))
        if q > best:
            best, arg = q, v
    rows.reverse()
    return WeakTypeProfile(tuple(rows), best, arg, norm)


def _delta_ratios(space: Space, radii: Sequence | None = None) -> list[tuple[int, Fraction]]:
    """Supremum level ratio for the point mass at each support point.

    For ``f = 1_{p}`` the best ball around x is the smallest admissible one
    containing p, so ``Mf(x) = w_p / c[x]`` with ``c[x]`` the measure of that
    ball, and the ratio at level ``w_p / c`` is ``mu{x : c[x] <= c} / c``.
    """
    w = space.scaled_weights
    n = space.n
    rank = space.rank
    if radii is None:
        order = np.argsort(rank, axis=1, kind="stable")
        ranks = np.take_along_axis(rank, order, axis=1)
        cum = np.cumsum(w[order], axis=1)
        # closed-ball measure at d(x, order[x, j]) = cum at the end of its run
        closed = np.empty_like(cum)
        for x in range(n):
            ends = np.searchsorted(ranks[x], ranks[x], side="right") - 1
            closed[x, order[x]] = cum[x, ends]
        cmat = closed  # cmat[x, p]
    else:
        cuts = sorted({space.cut(r) for r in radii})
        cmat = np.zeros((n, n), dtype=w.dtype)
        found = np.zeros((n, n), dtype=bool)
        for k in cuts:
            a = space.ball_matrix(k)
            m = space.ball_measures(k)
            # smallest admissible radius (positive measure) whose ball holds p
            take = a & ~found & (m[:, None] > 0)
            cmat = np.where(take, m[:, None], cmat)
            found |= take
    out = []
    for p in np.flatnonzero(w > 0):
        col = cmat[:, p]
        if radii is not None:
            col = np.where(found[:, p], col, 0)
        has = col > 0
        cs = col[has]
        ws = w[has]
        idx = np.argsort(cs.astype(float), kind="stable")
        cs, ws = cs[idx], ws[idx]
        cum = np.cumsum(ws)
        best = Fraction(0)
        j = 0
        m = len(cs)
        while j < m:
            k = j
            while k + 1 < m and cs[k + 1] == cs[j]:
                k += 1
            q = Fraction(int(cum[k]), int(cs[j]))
            if q > best:
                best = q
            j = k + 1
        out.append((int(p), best))
    return out


def empirical_weak_norm(space: Space, probe="delta_scan", radii: Sequence | None = None,
                        *, count: int = 32, seed: int = 0):
    """Largest level ratio found over probe functions: a lower bound for the weak norm.

    ``probe`` is ``"delta_scan"`` (point masses at support points) or
    ``"random"`` (``count`` nonnegative rational functions from ``seed``).
    Returns ``(ratio, f)``.
    """
    if space.total_measure() == 0:
        raise ValueError("space has zero total measure")
    n = space.n
    best, best_f = Fraction(0), None
    if probe == "delta_scan":
        for p, q in _delta_ratios(space, radii):
            if best_f is None or q > best:
                best = q
                best_f = [Fraction(int(i == p)) for i in range(n)]
        return best, best_f
    if probe != "random":
        raise ValueError(f"unknown probe {probe!r}")
    rng = random.Random(seed)
    support = space.support().indices()
    for _ in range(count):
        k = rng.randint(1, min(len(support), 6))
        f = [Fraction(0)] * n
        for i in rng.sample(support, k):
            f[i] = Fraction(rng.randint(1, 9), rng.randint(1, 4))
        q = weak_type_profile(space, f, radii).supremum
        if best_f is None or q > best:
            best, best_f = q, f
    return best, best_f


# -- bound formulas ---------------------------------------------------------------


def sparse_bound(k, c) -> float:
    """``(K+1)(C K + 1)``: weak norm of the radius-restricted operator."""
    return (float(k) + 1) * (float(c) * float(k) + 1)


def naor_tao_bound(k, c, t) -> float:
    """``N K^(1/2) (K+1) (C K^(1/2) + 1)``, N least with ``(1+t)^N >= 1/t``."""
    t = exact_number(t)
    big_n, p = 0, Fraction(1)
    while p < 1 / t:
        p *= 1 + t
        big_n += 1
    big_n = max(big_n, 1)
    rk = math.sqrt(float(k))
    return big_n * rk * (float(k) + 1) * (float(c) * rk + 1)


def full_bound(k1, c, k2) -> float:
    """``(K1+1)(1 + C K1 K (2 + log K2 / log K))`` with ``K = max(K1, e)``."""
    k = max(float(k1), math.e)
    return (float(k1) + 1) * (1 + float(c) * float(k1) * k * (2 + math.log(float(k2)) / math.log(k)))


def lebesgue_sparse_bound(d: int) -> float:
    """``(e^(1/d) + 1)(1 + 2 e^(1/d))``."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    q = math.exp(1 / d)
    return (q + 1) * (1 + 2 * q)


CUBE_SPARSE_BOUND = 6.0


@dataclass(frozen=True)
class BoundsReport:
    sparse_bound: float | None
    naor_tao_bound: float | None
    full_bound: float | None
    lebesgue_sparse_bound: float | None
    cube_sparse_bound: float = CUBE_SPARSE_BOUND

    def as_dict(self) -> dict[str, str]:
        return {k: "vacuous" if v is None else repr(v) for k, v in self.__dict__.items()}


def theoretical_bounds(report: ConstantsReport, d: int | None = None) -> BoundsReport:
    """Plug the report's constants into each bound; None where one is infinite."""
    c, k1, km, k2 = report.c_mu, report.k_blossom, report.k_micro, report.k2
    sparse = sparse_bound(k1.value, c.value) if c.finite and k1.finite else None
    # the Naor-Tao corollary needs microdoubling with constant K^(1/2)
    nt = (naor_tao_bound(float(km.value) ** 2, c.value, report.t)
          if c.finite and km.finite else None)
    full = full_bound(k1.value, c.value, k2.value) if c.finite and k1.finite and k2.finite else None
    leb = lebesgue_sparse_bound(d) if d is not None else None
    return BoundsReport(sparse, nt, full, leb)
