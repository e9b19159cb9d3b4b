"""Regularity constants of a finite metric measure space.

Each constant is the supremum of a ratio of ball (or blossom) measures over
centres and radii. Radii are reduced to one representative per interval of
a merged breakpoint set, on which every open-ball quantity involved is
constant, so the suprema below are exact.

Ratios 0/0 are skipped since any constant satisfies the inequality there;
a positive numerator over a zero denominator makes the constant infinite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from .space import Number, RadiusInterval, Space, critical_radii, radius_intervals

INF = math.inf


@dataclass(frozen=True)
class Witness:
    x: int
    y: int | None
    interval: RadiusInterval

    def __str__(self) -> str:
        who = f"x={self.x}" if self.y is None else f"x={self.x}, y={self.y}"
        return f"{who}, r in {self.interval}"


@dataclass(frozen=True)
class ExtendedConstant:
    """A nonnegative number or +inf, with the point/interval that attains it."""

    value: Number
    witness: Witness | None = None

    @property
    def finite(self) -> bool:
        return not (isinstance(self.value, float) and math.isinf(self.value))

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        return "inf" if not self.finite else str(self.value)


def _best_in_block(space: Space, num: np.ndarray, den: np.ndarray,
                   valid: np.ndarray | None = None):
    """Exact maximum of ``num/den`` over a block, and its first flat index.

    ``num`` and ``den`` are scaled measures (same scale). Returns ``None``
    when every entry is 0/0 or masked out.
    """
    num = np.asarray(num).ravel()
    den = np.asarray(den).ravel()
    ok = ~((num == 0) & (den == 0))
    if valid is not None:
        ok &= np.asarray(valid).ravel()
    if not ok.any():
        return None
    inf = ok & (den == 0) & (num > 0)
    if inf.any():
        return INF, int(np.flatnonzero(inf)[0])
    idx = np.flatnonzero(ok)
    nn, dd = num[idx], den[idx]
    approx = nn.astype(float) / dd.astype(float)
    top = approx.max()
    # float shortlist, exact comparison among near-ties
    near = np.flatnonzero(approx >= top * (1 - 1e-9))
    best, best_i = None, None
    for j in near:
        v = Fraction(int(nn[j]), int(dd[j]))
        if best is None or v > best:
            best, best_i = v, int(idx[j])
    return best, best_i


def _supremum(space: Space, intervals: list[RadiusInterval],
              block: Callable[[RadiusInterval], tuple], pair: bool) -> ExtendedConstant:
    """Combine per-interval blocks; ties go to the smallest (x, y, interval)."""
    best_val, best_key = None, None
    for i, iv in enumerate(intervals):
        res = _best_in_block(space, *block(iv))
        if res is None:
            continue
        val, flat = res
        if pair:
            x, y = divmod(flat, space.n)
        else:
            x, y = flat, None
        key = (x, -1 if y is None else y, i)
        if best_val is None or val > best_val or (val == best_val and key < best_key):
            best_val, best_key = val, key
    if best_val is None:
        return ExtendedConstant(Fraction(1), None)
    x, y, i = best_key
    return ExtendedConstant(best_val, Witness(x, None if y < 0 else y, intervals[i]))


def _intervals(space: Space, factors: Iterable[Number], window) -> list[RadiusInterval]:
    dk = critical_radii(space)
    pts = set(dk)
    for f in factors:
        f = space.num(f)
        pts.update(d / f for d in dk)
    return radius_intervals(space, pts, window)


def local_comparability(space: Space, window=None) -> ExtendedConstant:
    """Least C with mu B(x,r) <= C mu B(y,r) whenever d(x,y) < r."""
    def block(iv):
        k = space.cut(iv.rep)
        a = space.ball_matrix(k)
        m = space.ball_measures(k)
        n = space.n
        return np.broadcast_to(m[:, None], (n, n)), np.broadcast_to(m[None, :], (n, n)), a
    return _supremum(space, _intervals(space, (), window), block, pair=True)


def microdoubling(space: Space, t, strong: bool = False, window=None) -> ExtendedConstant:
    """Least K with mu B(x,(1+t)r) <= K mu B(x,r) for all x, r.

    The strong variant moves the left-hand centre to any y in B(x,r).
    """
    t = space.num(t)
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    grow = 1 + t

    def block(iv):
        k = space.cut(iv.rep)
        small = space.ball_measures(k)
        big = space.ball_measures(space.cut(iv.rep * grow))
        if not strong:
            return big, small, None
        n = space.n
        a = space.ball_matrix(k)
        return np.broadcast_to(big[None, :], (n, n)), np.broadcast_to(small[:, None], (n, n)), a
    return _supremum(space, _intervals(space, (grow,), window), block, pair=strong)


def blossom_measures(space: Space, r, s) -> np.ndarray:
    """Scaled measure of the uncentered s-blossom of B(x, r), for every x."""
    a_r = space.ball_matrix(space.cut(r)).astype(np.float32)
    a_s = space.ball_matrix(space.cut(s)).astype(np.float32)
    inner = (a_r @ a_s) > 0
    outer = (inner.astype(np.float32) @ a_s) > 0
    return outer.astype(space.scaled_weights.dtype) @ space.scaled_weights


def microblossom(space: Space, t, window=None) -> ExtendedConstant:
    """Least K with mu Blu(B(x,r), t r) <= K mu B(x,r); t = 1 is bounded blossoming."""
    t = space.num(t)
    if not 0 < t <= 1:
        raise ValueError(f"microblossom needs 0 < t <= 1, got {t}")

    def block(iv):
        small = space.ball_measures(space.cut(iv.rep))
        return blossom_measures(space, iv.rep, t * iv.rep), small, None
    factors = (t, 1 + t) if t != 1 else (t, 2)
    return _supremum(space, _intervals(space, factors, window), block, pair=False)


def relative_increment(space: Space, x: int, r, t) -> Fraction:
    """``mu B(x, t r) / mu B(x, r)`` for x in the support of the measure."""
    space._check_index(x)
    if space.weights[x] <= 0:
        raise ValueError(f"relative increment is defined on the support; point {x} has weight 0")
    r, t = space.num(r), space.num(t)
    if not (r > 0 and t > 0):
        raise ValueError("r and t must be positive")
    num = space.ball_measures(space.cut(t * r))[x]
    den = space.ball_measures(space.cut(r))[x]
    return Fraction(int(num), int(den))


def mri(space: Space, r, t) -> Fraction:
    """Largest relative increment over the support; 1 on an empty support."""
    r, t = space.num(r), space.num(t)
    if not (r > 0 and t > 0):
        raise ValueError("r and t must be positive")
    supp = space.scaled_weights > 0
    res = _best_in_block(space, space.ball_measures(space.cut(t * r)),
                         space.ball_measures(space.cut(r)), supp)
    if res is None:
        return Fraction(1)
    return res[0]


def sup_mri(space: Space, t, window=None) -> ExtendedConstant:
    """``sup_r mri(r, t)`` over the window, with a witness."""
    t = space.num(t)
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    supp = space.scaled_weights > 0

    def block(iv):
        return (space.ball_measures(space.cut(t * iv.rep)),
                space.ball_measures(space.cut(iv.rep)), supp)
    return _supremum(space, _intervals(space, (t,), window), block, pair=False)


def doubling(space: Space, window=None) -> ExtendedConstant:
    return sup_mri(space, 2, window)


@dataclass(frozen=True)
class ConstantsReport:
    t: Number
    T: Number | None
    window: tuple | None
    c_mu: ExtendedConstant
    k_micro: ExtendedConstant
    k_strong: ExtendedConstant
    k_blossom: ExtendedConstant
    k_blossom_bounded: ExtendedConstant
    k2: ExtendedConstant
    k2_ratio: Number = field(default=None)

    def as_dict(self) -> dict[str, str]:
        lo, hi = self.window if self.window is not None else (0, None)
        out = {
            "t": str(self.t),
            "T": "" if self.T is None else str(self.T),
            "window_lo": str(lo),
            "window_hi": "inf" if hi is None else str(hi),
            "k2_ratio": str(self.k2_ratio),
        }
        for name in ("c_mu", "k_micro", "k_strong", "k_blossom", "k_blossom_bounded", "k2"):
            c = getattr(self, name)
            out[name] = str(c)
            if c.witness is not None:
                out[f"{name}_witness"] = str(c.witness)
        return out


def constants_report(space: Space, t, T=None, window=None, *,
                     k2_ratio=None, k2_radius=None) -> ConstantsReport:
    """All constants at parameters t (and T) over an optional radius window.

    ``k2`` is ``sup_r mri(r, k2_ratio)`` with ``k2_ratio`` defaulting to 1/t;
    if ``k2_radius`` is given it is ``mri(k2_radius, k2_ratio)`` at that single
    radius instead, as the bounded-radii covering theorem requires.
    """
    t = space.num(t)
    if not 0 < t <= 1:
        raise ValueError(f"t must lie in (0, 1], got {t}")
    if T is not None:
        T = space.num(T)
        if not T > 1:
            raise ValueError(f"T must exceed 1, got {T}")
    ratio = space.num(k2_ratio) if k2_ratio is not None else 1 / t
    if k2_radius is not None:
        k2 = ExtendedConstant(mri(space, k2_radius, ratio), None)
    else:
        k2 = sup_mri(space, ratio, window)
    return ConstantsReport(
        t=t, T=T, window=window,
        c_mu=local_comparability(space, window),
        k_micro=microdoubling(space, t, window=window),
        k_strong=microdoubling(space, t, strong=True, window=window),
        k_blossom=microblossom(space, t, window),
        k_blossom_bounded=microblossom(space, 1, window),
        k2=k2,
        k2_ratio=ratio,
    )
