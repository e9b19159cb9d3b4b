"""Finite metric measure spaces: balls, blossoms and critical radii.

Distances are held as a dense matrix. Exact spaces store them as integers
over a common denominator so every ball-membership test is an integer
comparison; float spaces (chordal polygons, float distance matrices) compare
with a relative tolerance of ``REL_TOL``.

Every radius-dependent open-ball quantity is a step function of the radius,
constant on each interval ``(d_k, d_{k+1}]`` between consecutive distances.
``radius_intervals`` turns a set of breakpoints into one representative radius
per such interval so that suprema over ``r > 0`` become finite maxima.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

import numpy as np

from .pointset import PointSet

Number = Union[Fraction, float]

REL_TOL = 1e-9
_INT64_SAFE = 2**62


class MetricError(ValueError):
    """Raised when a distance matrix violates the metric axioms."""


def exact_number(x) -> Fraction:
    """Convert ``x`` to a Fraction, reading floats through their shortest repr.

    ``0.1`` becomes ``1/10`` rather than its binary expansion, so parameters
    typed as decimals behave as the decimals they look like.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (bool, np.bool_)):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(repr(float(x)))
    if isinstance(x, Decimal):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as a rational number")


def _is_exact_entry(x) -> bool:
    if isinstance(x, (bool, np.bool_)):
        return False
    return isinstance(x, (int, np.integer, Rational, Decimal, str))


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= REL_TOL * max(abs(a), abs(b), 1e-300)


def _lcm_denominators(values: Iterable[Fraction]) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, v.denominator)
    return out


def _int_array(values: Sequence[int], shape=None) -> np.ndarray:
    """int64 when every partial sum is safe, object dtype otherwise."""
    total = sum(abs(v) for v in values)
    dtype = np.int64 if total < _INT64_SAFE else object
    arr = np.array(values, dtype=dtype)
    return arr.reshape(shape) if shape is not None else arr


@dataclass(frozen=True)
class Ball:
    center: int
    radius: Number
    closed: bool = False

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"ball radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class RadiusInterval:
    """Half-open radius interval ``(lo, hi]``; ``hi is None`` means unbounded."""

    lo: Number
    hi: Number | None
    rep: Number

    def __str__(self) -> str:
        hi = "inf" if self.hi is None else str(self.hi)
        return f"({self.lo}, {hi}]"


class Space:
    """A finite metric space with a measure given by point weights.

    ``dist`` is an ``n x n`` matrix. If every entry is an int, Fraction or
    decimal string the space is exact; otherwise distances are floats.
    Weights are always exact rationals.
    """

    def __init__(self, dist, weights, labels=None, *, validate: bool = True):
        rows = [list(r) for r in dist]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise MetricError("distance matrix must be square")
        flat = [x for r in rows for x in r]
        if all(_is_exact_entry(x) for x in flat):
            fr = [exact_number(x) for x in flat]
            scale = _lcm_denominators(fr)
            ints = [int(v * scale) for v in fr]
            dmat = _int_array(ints, (n, n)) if n else np.zeros((0, 0), dtype=np.int64)
            self._setup(dmat, scale, weights, labels, validate=validate)
        else:
            dmat = np.array(flat, dtype=float).reshape(n, n)
            self._setup(dmat, None, weights, labels, validate=validate)

    @classmethod
    def from_scaled(cls, dmat: np.ndarray, scale: int, weights, labels=None,
                    *, validate: bool = True) -> Space:
        """Build an exact space from integer distances ``dmat / scale``."""
        self = cls.__new__(cls)
        self._setup(np.asarray(dmat), int(scale), weights, labels, validate=validate)
        return self

    @classmethod
    def from_float(cls, dmat: np.ndarray, weights, labels=None,
                   *, validate: bool = True) -> Space:
        self = cls.__new__(cls)
        self._setup(np.asarray(dmat, dtype=float), None, weights, labels, validate=validate)
        return self

    def _setup(self, dmat, scale, weights, labels, *, validate):
        n = dmat.shape[0]
        if dmat.shape != (n, n):
            raise MetricError("distance matrix must be square")
        self.n = n
        self.exact = scale is not None
        self._scale = scale
        self._d = dmat
        self._d.flags.writeable = False

        w = [exact_number(x) for x in weights]
        if len(w) != n:
            raise ValueError(f"expected {n} weights, got {len(w)}")
        for i, x in enumerate(w):
            if x < 0:
                raise ValueError(f"weight of point {i} is negative: {x}")
        self.weights = tuple(w)
        self._wscale = _lcm_denominators(w)
        self._w = _int_array([int(x * self._wscale) for x in w])

        if labels is not None:
            labels = tuple(tuple(lab) if isinstance(lab, (list, tuple)) else (lab,)
                           for lab in labels)
            if len(labels) != n:
                raise ValueError(f"expected {n} labels, got {len(labels)}")
        self.labels = labels

        if validate:
            self._validate()
        self._build_levels()
        self._ball_cache: dict[int, np.ndarray] = {}
        self._bmeas_cache: dict[int, np.ndarray] = {}

    # -- construction helpers -------------------------------------------------

    def _validate(self):
        d = self._d
        n = self.n
        if n == 0:
            return
        if self.exact:
            if np.any(np.diagonal(d) != 0):
                i = int(np.flatnonzero(np.diagonal(d) != 0)[0])
                raise MetricError(f"dist({i},{i}) must be 0")
            asym = np.argwhere(d != d.T)
            if len(asym):
                i, j = map(int, asym[0])
                raise MetricError(f"asymmetric distances: dist({i},{j}) != dist({j},{i})")
            neg = np.argwhere(d < 0)
            if len(neg):
                i, j = map(int, neg[0])
                raise MetricError(f"negative distance dist({i},{j})")
            self._check_separated(d == 0)
            for k in range(n):
                bad = d > d[:, k, None] + d[None, k, :]
                if bad.any():
                    i, j = map(int, np.argwhere(bad)[0])
                    raise MetricError(
                        f"triangle inequality violated by triple ({i}, {j}, {k}): "
                        f"dist({i},{j}) > dist({i},{k}) + dist({k},{j})")
        else:
            if not np.all(np.isfinite(d)):
                raise MetricError("distances must be finite")
            scale = max(float(np.abs(d).max()), 1.0)
            tol = REL_TOL * scale
            if np.any(np.abs(np.diagonal(d)) > tol):
                i = int(np.flatnonzero(np.abs(np.diagonal(d)) > tol)[0])
                raise MetricError(f"dist({i},{i}) must be 0")
            asym = np.argwhere(np.abs(d - d.T) > tol)
            if len(asym):
                i, j = map(int, asym[0])
                raise MetricError(f"asymmetric distances: dist({i},{j}) != dist({j},{i})")
            neg = np.argwhere(d < -tol)
            if len(neg):
                i, j = map(int, neg[0])
                raise MetricError(f"negative distance dist({i},{j})")
            self._check_separated(np.abs(d) <= tol)
            for k in range(n):
                bad = d > d[:, k, None] + d[None, k, :] + tol
                if bad.any():
                    i, j = map(int, np.argwhere(bad)[0])
                    raise MetricError(
                        f"triangle inequality violated by triple ({i}, {j}, {k}): "
                        f"dist({i},{j}) > dist({i},{k}) + dist({k},{j})")

    def _check_separated(self, zero: np.ndarray) -> None:
        zero = zero & ~np.eye(self.n, dtype=bool)
        if zero.any():
            i, j = map(int, np.argwhere(zero)[0])
            raise MetricError(f"distinct points {i} and {j} are at distance 0")

    def _build_levels(self):
        if self.n == 0:
            self.levels = ()
            self._rank = np.zeros((0, 0), dtype=np.int32)
            return
        vals, inv = np.unique(self._d, return_inverse=True)
        inv = inv.reshape(self.n, self.n)
        if self.exact:
            self.levels = tuple(Fraction(int(v), self._scale) for v in vals)
            self._rank = inv.astype(np.int32)
        else:
            # merge float distances that agree up to the relative tolerance
            cluster = np.zeros(len(vals), dtype=np.int32)
            reps = [float(vals[0])]
            for i in range(1, len(vals)):
                if _close(float(vals[i]), reps[-1]) or (reps[-1] == 0 and abs(vals[i]) <= REL_TOL):
                    cluster[i] = cluster[i - 1]
                else:
                    cluster[i] = cluster[i - 1] + 1
                    reps.append(float(vals[i]))
            self.levels = tuple(0.0 if i == 0 and abs(r) <= REL_TOL else r
                                for i, r in enumerate(reps))
            self._rank = cluster[inv]
        self._rank.flags.writeable = False

    # -- numbers ---------------------------------------------------------------

    def num(self, x) -> Number:
        """Coerce a radius or parameter to this space's number type."""
        if self.exact:
            return exact_number(x)
        return float(x)

    def dist(self, i: int, j: int) -> Number:
        v = self._d[i, j]
        if self.exact:
            return Fraction(int(v), self._scale)
        return float(v)

    def distance_matrix(self) -> list[list[Number]]:
        return [[self.dist(i, j) for j in range(self.n)] for i in range(self.n)]

    def cut(self, r, closed: bool = False) -> int:
        """Number of distance levels strictly below ``r`` (or ``<= r`` if closed).

        A point y lies in the ball around x iff ``rank[x, y] < cut(r)``.
        """
        r = self.num(r)
        if self.exact:
            return (bisect_right if closed else bisect_left)(self.levels, r)
        k = bisect_left(self.levels, r)
        # absorb levels equal to r within tolerance
        if closed:
            while k < len(self.levels) and (self.levels[k] <= r or _close(self.levels[k], r)):
                k += 1
        else:
            while k > 0 and _close(self.levels[k - 1], r):
                k -= 1
        return k

    # -- balls and measures ----------------------------------------------------

    def ball_matrix(self, k: int) -> np.ndarray:
        """Boolean matrix whose row x is the ball around x at level cut ``k``."""
        a = self._ball_cache.get(k)
        if a is None:
            if len(self._ball_cache) > 256:
                self._ball_cache.clear()
            a = self._rank < k
            a.flags.writeable = False
            self._ball_cache[k] = a
        return a

    def ball_measures(self, k: int) -> np.ndarray:
        """Scaled measures of the balls at level cut ``k`` for every center."""
        m = self._bmeas_cache.get(k)
        if m is None:
            if len(self._bmeas_cache) > 1024:
                self._bmeas_cache.clear()
            m = self.ball_matrix(k).astype(self._w.dtype) @ self._w
            m.flags.writeable = False
            self._bmeas_cache[k] = m
        return m

    def ball_mask(self, center: int, r, closed: bool = False) -> np.ndarray:
        self._check_index(center)
        return self._rank[center] < self.cut(r, closed)

    def scaled_measure(self, mask: np.ndarray) -> int:
        return int(self._w[np.asarray(mask, dtype=bool)].sum())

    def measure_of_scaled(self, v) -> Fraction:
        return Fraction(int(v), self._wscale)

    @property
    def weight_scale(self) -> int:
        return self._wscale

    @property
    def scaled_weights(self) -> np.ndarray:
        return self._w

    @property
    def rank(self) -> np.ndarray:
        return self._rank

    def total_measure(self) -> Fraction:
        return self.measure_of_scaled(self._w.sum())

    def support(self) -> PointSet:
        return PointSet(self._w > 0)

    def _check_index(self, i: int) -> None:
        if not isinstance(i, (int, np.integer)) or not 0 <= i < self.n:
            raise IndexError(f"point index {i!r} out of range for n={self.n}")

    def index_of(self, label) -> int:
        """Index of the point whose coordinate label equals ``label``."""
        if self.labels is None:
            raise KeyError("space has no labels")
        if not isinstance(label, (list, tuple)):
            label = (label,)
        target = tuple(exact_number(c) if _is_exact_entry(c) or isinstance(c, float) else c
                       for c in label)
        for i, lab in enumerate(self.labels):
            if len(lab) == len(target) and all(a == b for a, b in zip(lab, target)):
                return i
        raise KeyError(f"no point labelled {label!r}")

    def __repr__(self) -> str:
        kind = "exact" if self.exact else "float"
        return f"Space(n={self.n}, {kind}, total_measure={self.total_measure()})"


# -- module-level operations ---------------------------------------------------


def ball(space: Space, b: Ball) -> PointSet:
    return PointSet(space.ball_mask(b.center, b.radius, b.closed))


def measure(space: Space, s: PointSet) -> Fraction:
    return space.measure_of_scaled(space.scaled_measure(s.mask))


def _blossom_mask(space: Space, mask: np.ndarray, radius) -> np.ndarray:
    if not space.num(radius) > 0:
        raise ValueError(f"blossom radius must be positive, got {radius}")
    if not mask.any():
        return np.zeros(space.n, dtype=bool)
    a = space.ball_matrix(space.cut(radius))
    return a[mask].any(axis=0)


def blossom(space: Space, s: PointSet, radius) -> PointSet:
    """Union of the open balls of the given radius centred at points of ``s``."""
    return PointSet(_blossom_mask(space, s.mask, radius))


def uncentered_blossom(space: Space, s: PointSet, radius) -> PointSet:
    """Union of all open radius-balls (any centre) that meet ``s``.

    A ball B(y, radius) meets s exactly when y lies in the centred blossom,
    so this is the centred blossom applied twice.
    """
    inner = _blossom_mask(space, s.mask, radius)
    return PointSet(_blossom_mask(space, inner, radius))


def critical_radii(space: Space) -> tuple[Number, ...]:
    """Sorted distinct positive pairwise distances."""
    return tuple(v for v in space.levels if v > 0)


def _merge_breakpoints(space: Space, points: Iterable[Number]) -> list[Number]:
    vals = sorted({space.num(p) for p in points if p > 0})
    if space.exact or not vals:
        return vals
    merged = [vals[0]]
    for v in vals[1:]:
        if not _close(v, merged[-1]):
            merged.append(v)
    return merged


def normalize_window(space: Space, window) -> tuple[Number, Number | None]:
    """``None`` or ``(lo, hi)`` to a half-open window ``(lo, hi]``."""
    if window is None:
        return (space.num(0), None)
    lo, hi = window
    lo = space.num(0 if lo is None else lo)
    if hi is not None and not (isinstance(hi, float) and math.isinf(hi)):
        hi = space.num(hi)
        if not hi > lo:
            raise ValueError(f"empty radius window ({lo}, {hi}]")
    else:
        hi = None
    if lo < 0:
        raise ValueError("radius window must lie in (0, inf)")
    return lo, hi


def radius_intervals(space: Space, breakpoints: Iterable[Number] | None = None,
                     window=None) -> list[RadiusInterval]:
    """One representative radius per interval between merged breakpoints.

    With no breakpoints the critical radii are used. The window ``(lo, hi]``
    adds its endpoints as breakpoints and drops intervals outside it; an
    unbounded window ends with an interval above the largest breakpoint.
    """
    if breakpoints is None:
        breakpoints = critical_radii(space)
    lo, hi = normalize_window(space, window)
    pts = [p for p in _merge_breakpoints(space, breakpoints)
           if p > lo and (hi is None or p < hi)]
    if not space.exact:
        pts = [p for p in pts if not _close(p, lo) and (hi is None or not _close(p, hi))]
    edges = [lo] + pts + ([hi] if hi is not None else [])
    out = []
    for a, b in zip(edges, edges[1:]):
        out.append(RadiusInterval(a, b, (a + b) / 2))
    if hi is None:
        top = edges[-1]
        rep = top * 2 if top > 0 else space.num(1)
        out.append(RadiusInterval(top, None, rep))
    return out


def midpoint_defect(space: Space, x: int, y: int) -> Number:
    """``min_z max(d(x,z), d(z,y)) - d(x,y)/2``; zero iff an exact midpoint exists."""
    space._check_index(x)
    space._check_index(y)
    if x == y:
        raise ValueError("midpoint defect needs two distinct points")
    d = space._d
    best = np.maximum(d[x], d[y]).min()
    if space.exact:
        return Fraction(int(best), space._scale) - Fraction(int(d[x, y]), 2 * space._scale)
    return max(float(best) - float(d[x, y]) / 2, 0.0)
