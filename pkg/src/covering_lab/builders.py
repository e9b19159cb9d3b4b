"""Constructors for the example spaces and for user-supplied data."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Sequence

import numpy as np

from .space import Space, exact_number

NORMS = ("linf", "l1", "l2")


@dataclass(frozen=True)
class SpaceSpec:
    """A builder tag plus its parameters.

    kinds: ``grid_zd`` (d, half_width, origin_weight=1), ``distance_matrix``
    (dist, weights), ``points`` (points, norm, weights), ``lshape_net`` (pitch),
    ``ngon_chordal`` (n), ``three_point_delta``.
    """

    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)


def grid_zd(d: int, half_width: int, origin_weight=1) -> Space:
    """``{-hw..hw}^d`` with the l-infinity metric and counting measure.

    ``origin_weight`` replaces the unit mass at the origin.
    """
    if d < 1:
        raise ValueError(f"grid dimension must be >= 1, got {d}")
    if half_width < 0:
        raise ValueError(f"half_width must be >= 0, got {half_width}")
    side = np.arange(-half_width, half_width + 1, dtype=np.int64)
    coords = np.array(list(itertools.product(side, repeat=d)), dtype=np.int64)
    n = len(coords)
    dmat = np.zeros((n, n), dtype=np.int64)
    for a in range(d):
        col = coords[:, a]
        np.maximum(dmat, np.abs(col[:, None] - col[None, :]), out=dmat)
    weights = [Fraction(1)] * n
    origin = n // 2
    weights[origin] = exact_number(origin_weight)
    labels = [tuple(int(c) for c in row) for row in coords]
    return Space.from_scaled(dmat, 1, weights, labels, validate=False)


def three_point_delta() -> Space:
    """``X = {0, 1, 3}`` in the line with all mass on the point 3."""
    dist = [[0, 1, 3], [1, 0, 2], [3, 2, 0]]
    return Space(dist, [0, 0, 1], labels=[(0,), (1,), (3,)])


def lshape_net(pitch) -> Space:
    """Net of pitch ``pitch`` on ``{0}x[0,1] U [0,1]x{0}`` with the l-infinity metric."""
    pitch = exact_number(pitch)
    if pitch <= 0 or (1 / pitch).denominator != 1:
        raise ValueError(f"pitch must divide 1, got {pitch}")
    m = int(1 / pitch)
    # integer coordinates in units of pitch; horizontal arm then vertical arm
    pts = [(i, 0) for i in range(m + 1)] + [(0, j) for j in range(1, m + 1)]
    arr = np.array(pts, dtype=np.int64)
    dmat = np.maximum(np.abs(arr[:, 0, None] - arr[None, :, 0]),
                      np.abs(arr[:, 1, None] - arr[None, :, 1]))
    labels = [(Fraction(a, m), Fraction(b, m)) for a, b in pts]
    return Space.from_scaled(dmat, m, [1] * len(pts), labels, validate=False)


def ngon_chordal(n: int) -> Space:
    """Regular n-gon on the unit-circumference circle with the chordal metric.

    Chords are ``2 R sin(pi k / n)`` with ``R = 1/(2 pi)``, stored as floats.
    """
    if n < 3:
        raise ValueError(f"ngon needs n >= 3, got {n}")
    radius = 1 / (2 * math.pi)
    k = np.arange(n)
    steps = np.minimum(np.abs(k[:, None] - k[None, :]), n - np.abs(k[:, None] - k[None, :]))
    dmat = 2 * radius * np.sin(np.pi * steps / n)
    np.fill_diagonal(dmat, 0.0)
    labels = [(radius * math.cos(2 * math.pi * i / n), radius * math.sin(2 * math.pi * i / n))
              for i in range(n)]
    return Space.from_float(dmat, [1] * n, labels)


def from_distance_matrix(dist, weights, labels=None) -> Space:
    return Space(dist, weights, labels)


def from_points(points: Sequence[Sequence], norm: str, weights) -> Space:
    """Space of coordinate vectors under the linf, l1 or l2 norm.

    linf and l1 keep rational coordinates exact; l2 falls back to floats
    unless every distance happens to be rational.
    """
    if norm not in NORMS:
        raise ValueError(f"unknown norm {norm!r}; expected one of {NORMS}")
    coords = [[exact_number(c) for c in p] for p in points]
    if coords and len({len(p) for p in coords}) != 1:
        raise ValueError("all points must have the same dimension")
    n = len(coords)
    scale = 1
    for p in coords:
        for c in p:
            scale = math.lcm(scale, c.denominator)
    ints = [[int(c * scale) for c in p] for p in coords]
    dim = len(ints[0]) if ints else 0
    big = any(abs(c) >= 2**30 for p in ints for c in p)
    arr = np.array(ints, dtype=object if big else np.int64).reshape(n, dim)
    diff = np.abs(arr[:, None, :] - arr[None, :, :])
    if norm == "linf":
        dmat = diff.max(axis=2) if dim else np.zeros((n, n), dtype=np.int64)
        return Space.from_scaled(dmat, scale, weights, coords)
    if norm == "l1":
        return Space.from_scaled(diff.sum(axis=2), scale, weights, coords)
    sq = (diff * diff).sum(axis=2)
    roots = [[math.isqrt(int(v)) for v in row] for row in sq]
    if all(r * r == int(v) for rr, row in zip(roots, sq) for r, v in zip(rr, row)):
        return Space.from_scaled(np.array(roots, dtype=np.int64), scale, weights, coords)
    dmat = np.sqrt(sq.astype(float)) / scale
    return Space.from_float(dmat, weights, coords)


def build_space(spec: SpaceSpec) -> Space:
    p = dict(spec.params)
    kind = spec.kind
    if kind == "grid_zd":
        return grid_zd(int(p["d"]), int(p["half_width"]), p.get("origin_weight", 1))
    if kind == "three_point_delta":
        return three_point_delta()
    if kind == "lshape_net":
        return lshape_net(p["pitch"])
    if kind == "ngon_chordal":
        return ngon_chordal(int(p["n"]))
    if kind == "distance_matrix":
        return from_distance_matrix(p["dist"], p["weights"], p.get("labels"))
    if kind == "points":
        return from_points(p["points"], p.get("norm", "linf"), p["weights"])
    raise ValueError(f"unknown space kind {kind!r}")


_ALIASES = {
    "grid": "grid_zd", "grid_zd": "grid_zd",
    "three-point-delta": "three_point_delta", "three_point_delta": "three_point_delta",
    "lshape": "lshape_net", "lshape_net": "lshape_net",
    "ngon": "ngon_chordal", "ngon_chordal": "ngon_chordal",
}
_KEYS = {"hw": "half_width", "ow": "origin_weight"}


def parse_space_spec(text: str) -> SpaceSpec:
    """Parse ``grid:d=2,hw=3[,origin_weight=1/4]``, ``three-point-delta``,
    ``lshape:pitch=1/12`` or ``ngon:n=8``."""
    name, _, rest = text.partition(":")
    kind = _ALIASES.get(name.strip())
    if kind is None:
        raise ValueError(f"unknown builtin space {name!r}")
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, value = item.partition("=")
        if not eq:
            raise ValueError(f"expected key=value in space spec, got {item!r}")
        params[_KEYS.get(key.strip(), key.strip())] = value.strip()
    return SpaceSpec(kind, params)
