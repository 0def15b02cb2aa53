"""Closed polygonal plane curves, their R^4 lifts, and pointwise diagnostics.

A curve is a closed polygon gamma: [0, 2pi) -> R^2, sampled at strictly
increasing parameters and interpolated linearly in parameter between
samples.  Lifting attaches a parameter circle of radius eps in two extra
coordinates,

    gamma_eps(t) = (gamma(t), eps cos t, eps sin t),

which separates every self-intersection of the planar curve as soon as
eps > 0: distinct parameters always differ in the last two coordinates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import IndeterminateWindingError, InvalidCurveError

TWO_PI = 2.0 * np.pi


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ClosedCurve:
    """Closed polygon with explicit sample parameters.

    params : (n,) strictly increasing values in [0, 2pi), params[0] == 0
    points : (n, 2) sample positions; the loop closes from points[-1]
             back to points[0]
    """

    params: np.ndarray
    points: np.ndarray

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        params = np.asarray(self.params, dtype=float)
        if points.ndim != 2 or points.shape[1] != 2:
            raise InvalidCurveError("points must be an (n, 2) array")
        n = points.shape[0]
        if n < 3:
            raise InvalidCurveError(f"need at least 3 samples, got {n}")
        if params.shape != (n,):
            raise InvalidCurveError(
                f"params shape {params.shape} does not match {n} points"
            )
        bad = ~np.isfinite(points).all(axis=1)
        if bad.any():
            i = int(np.argmax(bad))
            raise InvalidCurveError(f"non-finite coordinates at sample {i}", index=i)
        if not np.isfinite(params).all():
            i = int(np.argmax(~np.isfinite(params)))
            raise InvalidCurveError(f"non-finite parameter at sample {i}", index=i)
        if params[0] != 0.0:
            raise InvalidCurveError("first parameter must be 0")
        if (np.diff(params) <= 0).any():
            i = int(np.argmax(np.diff(params) <= 0)) + 1
            raise InvalidCurveError(f"parameters not increasing at sample {i}", index=i)
        if params[-1] >= TWO_PI:
            raise InvalidCurveError("parameters must stay below 2*pi")
        seg = np.vstack([points[1:], points[:1]]) - points
        lengths = np.hypot(seg[:, 0], seg[:, 1])
        if (lengths == 0.0).any():
            i = int(np.argmax(lengths == 0.0))
            raise InvalidCurveError(
                f"repeated consecutive point at sample {(i + 1) % n}",
                index=(i + 1) % n,
            )
        object.__setattr__(self, "params", _freeze(params))
        object.__setattr__(self, "points", _freeze(points))

    @classmethod
    def uniform(cls, points: np.ndarray) -> "ClosedCurve":
        """Curve with implicit uniform parameters 2*pi*k/n."""
        points = np.asarray(points, dtype=float)
        n = len(points)
        return cls(TWO_PI * np.arange(n) / n, points)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @cached_property
    def segment_lengths(self) -> np.ndarray:
        seg = np.vstack([self.points[1:], self.points[:1]]) - self.points
        return _freeze(np.hypot(seg[:, 0], seg[:, 1]))

    @cached_property
    def length(self) -> float:
        return float(self.segment_lengths.sum())

    @cached_property
    def param_steps(self) -> np.ndarray:
        steps = np.empty(self.n)
        steps[:-1] = np.diff(self.params)
        steps[-1] = TWO_PI - self.params[-1]
        return _freeze(steps)

    @cached_property
    def diameter(self) -> float:
        p = self.points
        d2 = ((p[:, None, :] - p[None, :, :]) ** 2).sum(axis=2)
        return float(np.sqrt(d2.max()))

    @cached_property
    def lipschitz(self) -> float:
        """Max secant slope of the polygon: sup |gamma(t)-gamma(s)| / |t-s|.

        For a parameter-linear polygon the supremum is attained on a
        single segment, so the max over segments is exact.
        """
        return float((self.segment_lengths / self.param_steps).max())

    def _locate(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        t = np.mod(np.asarray(t, dtype=float), TWO_PI)
        idx = np.searchsorted(self.params, t, side="right") - 1
        idx = np.clip(idx, 0, self.n - 1)
        frac = (t - self.params[idx]) / self.param_steps[idx]
        return idx, frac

    def evaluate(self, t) -> np.ndarray:
        """Piecewise-linear value gamma(t); t may be scalar or array."""
        idx, frac = self._locate(t)
        nxt = np.vstack([self.points[1:], self.points[:1]])
        out = self.points[idx] + frac[..., None] * (nxt[idx] - self.points[idx])
        return out if np.ndim(t) else out[()]

    def velocity(self, t) -> np.ndarray:
        """Right-continuous segment slope d gamma / dt at t."""
        idx, _ = self._locate(t)
        nxt = np.vstack([self.points[1:], self.points[:1]])
        return (nxt[idx] - self.points[idx]) / self.param_steps[idx][..., None]

    def corner_angles(self) -> np.ndarray:
        """Exterior turning angle at each vertex, a smoothness diagnostic.

        The pipeline never requires differentiability; sharp corners only
        show up here and in reports.
        """
        seg = np.vstack([self.points[1:], self.points[:1]]) - self.points
        prev = np.roll(seg, 1, axis=0)
        cross = prev[:, 0] * seg[:, 1] - prev[:, 1] * seg[:, 0]
        dot = (prev * seg).sum(axis=1)
        return np.arctan2(cross, dot)


@dataclass(frozen=True)
class LiftedCurve:
    """Curve lifted to R^4 with parameter-circle radius epsilon.

    points4[i] == (points[i], eps cos t_i, eps sin t_i) exactly, by
    construction; epsilon == 0 gives the flattened copy (gamma, 0, 0).
    """

    base: ClosedCurve
    epsilon: float
    points4: np.ndarray

    def __post_init__(self):
        pts4 = np.asarray(self.points4, dtype=float)
        expected = _lift_points(self.base, self.epsilon)
        if pts4.shape != expected.shape or not np.array_equal(pts4, expected):
            raise InvalidCurveError("points4 do not match the lift of the base curve")
        object.__setattr__(self, "points4", _freeze(pts4))

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def params(self) -> np.ndarray:
        return self.base.params

    def evaluate(self, t) -> np.ndarray:
        """Piecewise-linear interpolation of the lifted samples at t."""
        idx, frac = self.base._locate(t)
        nxt = np.vstack([self.points4[1:], self.points4[:1]])
        out = self.points4[idx] + frac[..., None] * (nxt[idx] - self.points4[idx])
        return out if np.ndim(t) else out[()]

    def velocity(self, t) -> np.ndarray:
        idx, _ = self.base._locate(t)
        nxt = np.vstack([self.points4[1:], self.points4[:1]])
        return (nxt[idx] - self.points4[idx]) / self.base.param_steps[idx][..., None]


def _lift_points(curve: ClosedCurve, epsilon: float) -> np.ndarray:
    t = curve.params
    return np.column_stack(
        [curve.points, epsilon * np.cos(t), epsilon * np.sin(t)]
    )


def lift(curve: ClosedCurve, epsilon: float) -> LiftedCurve:
    """Lift a planar curve to R^4 at parameter-circle radius epsilon."""
    if not np.isfinite(epsilon) or epsilon < 0.0 or epsilon > 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    return LiftedCurve(curve, float(epsilon), _lift_points(curve, epsilon))


def resample_arclength(curve: ClosedCurve, n: int) -> ClosedCurve:
    """Resample at n equal arc-length steps along the input polygon.

    The output keeps the input's starting point and carries uniform
    parameters 2*pi*k/n.  Sample k sits at arc position k*L/n measured
    along the input, so the arc positions span the full length L.
    """
    if n < 3:
        raise ValueError(f"need at least 3 samples, got {n}")
    closed = np.vstack([curve.points, curve.points[:1]])
    cum = np.concatenate([[0.0], np.cumsum(curve.segment_lengths)])
    total = cum[-1]
    targets = total * np.arange(n) / n
    idx = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, curve.n - 1)
    frac = (targets - cum[idx]) / curve.segment_lengths[idx]
    pts = closed[idx] + frac[:, None] * (closed[idx + 1] - closed[idx])
    pts[0] = curve.points[0]
    return ClosedCurve(TWO_PI * np.arange(n) / n, pts)


def min_lift_separation(lifted: LiftedCurve, param_gap: float) -> float:
    """Smallest lifted distance between samples at circular parameter
    distance >= param_gap.

    Positive for every eps > 0 because the lift coordinates alone keep
    admissible pairs at least 2 eps sin(param_gap / 2) apart.  With
    eps == 0 this is the plain minimum planar distance.
    """
    if not 0.0 < param_gap < np.pi:
        raise ValueError(f"param_gap must lie in (0, pi), got {param_gap}")
    t = lifted.params
    dt = np.abs(t[:, None] - t[None, :])
    circ = np.minimum(dt, TWO_PI - dt)
    admissible = circ >= param_gap
    if not admissible.any():
        raise ValueError("no sample pairs at the requested parameter gap")
    p = lifted.points4
    d2 = ((p[:, None, :] - p[None, :, :]) ** 2).sum(axis=2)
    return float(np.sqrt(d2[admissible].min()))


@dataclass(frozen=True)
class Crossing:
    """One self-intersection: parameter pair, location, and contact type."""

    params: tuple[float, float]
    location: np.ndarray
    kind: str  # "transverse" or "tangential"


@dataclass(frozen=True)
class IntersectionReport:
    crossings: tuple[Crossing, ...]
    tolerance: float

    def __len__(self) -> int:
        return len(self.crossings)

    @property
    def transverse(self) -> tuple[Crossing, ...]:
        return tuple(c for c in self.crossings if c.kind == "transverse")

    @property
    def tangential(self) -> tuple[Crossing, ...]:
        return tuple(c for c in self.crossings if c.kind == "tangential")


def _cross2(a, b) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def _point_segment(p: np.ndarray, a: np.ndarray, b: np.ndarray):
    d = b - a
    denom = float(d @ d)
    s = 0.0 if denom == 0.0 else float(np.clip((p - a) @ d / denom, 0.0, 1.0))
    foot = a + s * d
    return float(np.hypot(*(p - foot))), s


def _segment_pair_closest(p1, p2, q1, q2):
    """Closest approach of two segments: (distance, s on P, u on Q).

    Proper crossings are handled by the caller; for non-crossing segments
    the minimum is attained at an endpoint of one of them.
    """
    best = None
    for p, s_fixed, on_p in ((p1, 0.0, True), (p2, 1.0, True)):
        d, u = _point_segment(p, q1, q2)
        if best is None or d < best[0]:
            best = (d, s_fixed, u)
    for q, u_fixed in ((q1, 0.0), (q2, 1.0)):
        d, s = _point_segment(q, p1, p2)
        if best is None or d < best[0]:
            best = (d, s, u_fixed)
    return best


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int):
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[rj] = ri


def self_intersections(curve: ClosedCurve, tol: float | None = None) -> IntersectionReport:
    """Locate self-intersections of the sampled polygon.

    Non-adjacent segment pairs closer than tol are collected, clustered
    (neighbouring segment pairs describe the same contact), and each
    cluster is classified by whether the strands change side: a sign
    change of the second strand's side function along the first strand
    marks a transverse crossing, otherwise the contact is tangential
    within tolerance.
    """
    if tol is None:
        tol = 1e-9 * curve.length
    if tol <= 0.0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    n = curve.n
    pts = curve.points
    nxt = np.vstack([pts[1:], pts[:1]])

    ii, jj = np.triu_indices(n, k=2)
    keep = ~((ii == 0) & (jj == n - 1))  # wrap-around adjacency
    ii, jj = ii[keep], jj[keep]

    # cheap reject: inflated bounding boxes must overlap
    lo = np.minimum(pts, nxt)
    hi = np.maximum(pts, nxt)
    overlap = (
        (lo[ii] <= hi[jj] + tol).all(axis=1) & (lo[jj] <= hi[ii] + tol).all(axis=1)
    )
    ii, jj = ii[overlap], jj[overlap]

    hits = []  # (i, j, dist, t1, t2, location)
    for i, j in zip(ii, jj):
        p1, p2, q1, q2 = pts[i], nxt[i], pts[j], nxt[j]
        r = p2 - p1
        s = q2 - q1
        d1 = _cross2(s, p1 - q1)
        d2 = _cross2(s, p2 - q1)
        d3 = _cross2(r, q1 - p1)
        d4 = _cross2(r, q2 - p1)
        if (d1 * d2 < 0.0) and (d3 * d4 < 0.0):
            denom = _cross2(r, s)
            sp = _cross2(q1 - p1, s) / denom
            up = _cross2(q1 - p1, r) / denom
            loc = p1 + sp * r
            hits.append((int(i), int(j), 0.0, float(sp), float(up), loc))
            continue
        dist, sp, up = _segment_pair_closest(p1, p2, q1, q2)
        if dist <= tol:
            loc = 0.5 * (p1 + sp * r + q1 + up * s)
            hits.append((int(i), int(j), float(dist), sp, up, loc))

    if not hits:
        return IntersectionReport((), float(tol))

    def _near(u: int, v: int) -> bool:
        return min((u - v) % n, (v - u) % n) <= 1

    uf = _UnionFind(len(hits))
    for a in range(len(hits)):
        ia, ja = hits[a][0], hits[a][1]
        for b in range(a + 1, len(hits)):
            ib, jb = hits[b][0], hits[b][1]
            # same contact, directly or with the strand roles swapped
            if (_near(ia, ib) and _near(ja, jb)) or (_near(ia, jb) and _near(ja, ib)):
                uf.union(a, b)

    clusters: dict[int, list[int]] = {}
    for k in range(len(hits)):
        clusters.setdefault(uf.find(k), []).append(k)

    steps = curve.param_steps
    ext_params = np.append(curve.params, TWO_PI)
    crossings = []
    for members in clusters.values():
        rep = min(members, key=lambda k: hits[k][2])
        i, j, dist, sp, up, loc = hits[rep]
        t1 = float(curve.params[i] + sp * steps[i])
        t2 = float(curve.params[j] + up * steps[j])
        kind = _classify_contact(curve, t1, t2, tol)
        crossings.append(Crossing((t1, t2), _freeze(np.asarray(loc)), kind))

    crossings.sort(key=lambda c: c.params)
    return IntersectionReport(tuple(crossings), float(tol))


def _classify_contact(curve: ClosedCurve, t1: float, t2: float, tol: float) -> str:
    """Transverse iff strand 1 changes side of strand 2's local line."""
    v2 = curve.velocity(t2)
    norm = np.hypot(*v2)
    if norm == 0.0:
        return "tangential"
    v2 = v2 / norm
    base = curve.evaluate(t2)
    h = float(curve.param_steps.min())
    sides = []
    for t in (t1 - h, t1 + h):
        w = curve.evaluate(t) - base
        sides.append(float(v2[0] * w[1] - v2[1] * w[0]))
    clearance = 10.0 * tol
    if sides[0] * sides[1] < 0.0 and min(abs(s) for s in sides) > clearance:
        return "transverse"
    return "tangential"


def winding_number(curve: ClosedCurve, point) -> int:
    """Signed winding of the curve about a point off its image.

    Sums the signed angle increments seen from the point; the total must
    land within 0.25 turns of an integer, otherwise the query is treated
    as indeterminate (too close to the curve for the sampling).
    """
    p = np.asarray(point, dtype=float)
    closed = np.vstack([curve.points, curve.points[:1]])
    # proximity guard: distance to every segment
    a, b = closed[:-1], closed[1:]
    d = b - a
    denom = (d * d).sum(axis=1)
    s = np.clip(((p - a) * d).sum(axis=1) / denom, 0.0, 1.0)
    foot = a + s[:, None] * d
    dist = np.hypot(*(p - foot).T).min()
    guard = 1e-9 * curve.length
    if dist <= guard:
        raise IndeterminateWindingError(
            f"point is within {guard:.3e} of the curve image"
        )
    w = closed - p
    u, v = w[:-1], w[1:]
    cross = u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]
    dot = (u * v).sum(axis=1)
    total = float(np.arctan2(cross, dot).sum()) / TWO_PI
    nearest = round(total)
    if abs(total - nearest) > 0.25:
        raise IndeterminateWindingError(
            f"angle sum {total:.6f} turns is not close to an integer"
        )
    return int(nearest)


# ---------------------------------------------------------------------------
# curve files: {"n": count, "points": [[x, y], ...]} with implicit uniform
# parameters 2*pi*k/n
# ---------------------------------------------------------------------------


def parse_curve(obj) -> ClosedCurve:
    if not isinstance(obj, dict):
        raise InvalidCurveError("curve document must be a JSON object")
    if "n" not in obj or "points" not in obj:
        raise InvalidCurveError("curve document needs 'n' and 'points' fields")
    n = obj["n"]
    points = obj["points"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise InvalidCurveError("'n' must be an integer")
    if not isinstance(points, list):
        raise InvalidCurveError("'points' must be a list")
    if n != len(points):
        raise InvalidCurveError(
            f"'n' is {n} but 'points' holds {len(points)} entries"
        )
    for i, entry in enumerate(points):
        ok = (
            isinstance(entry, (list, tuple))
            and len(entry) == 2
            and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in entry)
            and all(np.isfinite(float(c)) for c in entry)
        )
        if not ok:
            raise InvalidCurveError(
                f"points[{i}] is not a pair of finite numbers", index=i
            )
    return ClosedCurve.uniform(np.asarray(points, dtype=float))


def load_curve(path) -> ClosedCurve:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidCurveError(f"cannot read curve file {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidCurveError(f"curve file {path} is not valid JSON: {exc}") from exc
    return parse_curve(obj)


def dump_curve(curve: ClosedCurve) -> dict:
    return {"n": curve.n, "points": [[float(x), float(y)] for x, y in curve.points]}


def save_curve(curve: ClosedCurve, path) -> None:
    Path(path).write_text(json.dumps(dump_curve(curve), indent=1) + "\n")
