"""Ground truth the solver cannot argue with.

The integral of |winding number| over the plane lower-bounds the area of
any disk spanning the curve, and for the catalog curves here it is known
in closed form.  The winding grid is computed by scanline crossing
counts, deliberately independent of the angle-summation routine in the
curve module, so the two can cross-check each other.

current_mass evaluates the same integral; the point of having both names
is the contrast they measure.  A curve tracing one circle in both
directions has current mass zero (the signed windings cancel cellwise),
yet any null homotopy of it must sweep the disk twice.  The oracle
reports the cancellation; the pipeline reports the sweep.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve import ClosedCurve
from .errors import ConfigurationError

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class GridIntegral:
    """A rasterized integral with an honest error bar.

    error covers the cells skipped near the curve: each contributes its
    area times the larger of 1 and the winding jump across the band.
    """

    value: float
    error: float
    cells_skipped: int
    resolution: int


def _grid_axes(curve: ClosedCurve, resolution: int):
    lo = curve.points.min(axis=0)
    hi = curve.points.max(axis=0)
    ext = hi - lo
    pad = 0.1 * np.where(ext > 0, ext, ext.max())
    x0, y0 = lo - pad
    x1, y1 = hi + pad
    cx = (x1 - x0) / resolution
    cy = (y1 - y0) / resolution
    xc = x0 + (np.arange(resolution) + 0.5) * cx
    yc = y0 + (np.arange(resolution) + 0.5) * cy
    return xc, yc, cx, cy


def _skip_mask(curve: ClosedCurve, xc, yc, cx, cy) -> np.ndarray:
    """True for cells whose center lies within one cell-diagonal of the
    curve, found by walking every edge at half-cell steps."""
    res = len(xc)
    diag = float(np.hypot(cx, cy))
    step = 0.5 * min(cx, cy)
    p = curve.points
    q = np.vstack([p[1:], p[:1]])
    walk = []
    for a, b in zip(p, q):
        k = max(int(np.ceil(np.hypot(*(b - a)) / step)) + 1, 2)
        ts = np.linspace(0.0, 1.0, k)[:, None]
        walk.append(a + ts * (b - a))
    w = np.vstack(walk)

    mask = np.zeros((res, res), dtype=bool)
    ix = np.rint((w[:, 0] - xc[0]) / cx).astype(int)
    iy = np.rint((w[:, 1] - yc[0]) / cy).astype(int)
    reach = int(np.ceil(diag / min(cx, cy))) + 1
    for dx in range(-reach, reach + 1):
        for dy in range(-reach, reach + 1):
            jx = np.clip(ix + dx, 0, res - 1)
            jy = np.clip(iy + dy, 0, res - 1)
            near = np.hypot(xc[jx] - w[:, 0], yc[jy] - w[:, 1]) <= diag
            mask[jy[near], jx[near]] = True
    return mask


def _row_windings(curve: ClosedCurve, xc, yc) -> np.ndarray:
    """Signed winding number at every cell center, one scanline per row.

    A crossing of the horizontal line through y contributes its sign to
    all centers left of it; half-open vertex handling makes the count
    exact for every center not on the curve itself.
    """
    p = curve.points
    q = np.vstack([p[1:], p[:1]])
    out = np.empty((len(yc), len(xc)), dtype=np.int64)
    for j, y in enumerate(yc):
        up = (p[:, 1] <= y) & (q[:, 1] > y)
        dn = (q[:, 1] <= y) & (p[:, 1] > y)
        hit = up | dn
        if not hit.any():
            out[j] = 0
            continue
        ph, qh = p[hit], q[hit]
        xs = ph[:, 0] + (y - ph[:, 1]) / (qh[:, 1] - ph[:, 1]) * (qh[:, 0] - ph[:, 0])
        sg = np.where(up[hit], 1, -1)
        order = np.argsort(xs, kind="stable")
        xs, sg = xs[order], sg[order]
        suffix = np.concatenate([np.cumsum(sg[::-1])[::-1], [0]])
        out[j] = suffix[np.searchsorted(xs, xc, side="right")]
    return out


def _fill_banded(w: np.ndarray, mask: np.ndarray):
    """Give each skipped cell its nearest evaluated row neighbor's value
    and a per-cell uncertainty from the jump across the band."""
    res = w.shape[1]
    cols = np.arange(res)
    filled = w.copy()
    uncertainty = np.zeros_like(w, dtype=float)
    for j in range(w.shape[0]):
        row_mask = mask[j]
        if not row_mask.any():
            continue
        good = ~row_mask
        if not good.any():
            uncertainty[j] = 1.0
            filled[j] = 0
            continue
        left = np.where(good, cols, -1)
        left = np.maximum.accumulate(left)
        right = np.where(good, cols, res)
        right = np.minimum.accumulate(right[::-1])[::-1]
        use_left = (cols - left) <= (right - cols)
        nearest = np.where(use_left & (left >= 0), left, np.minimum(right, res - 1))
        nearest = np.where(left < 0, np.minimum(right, res - 1), nearest)
        fill = w[j, nearest]
        lv = np.where(left >= 0, w[j, np.maximum(left, 0)], fill)
        rv = np.where(right <= res - 1, w[j, np.minimum(right, res - 1)], fill)
        filled[j, row_mask] = fill[row_mask]
        uncertainty[j, row_mask] = np.maximum(1, np.abs(lv - rv))[row_mask]
    return filled, uncertainty


def _abs_winding_integral(curve: ClosedCurve, resolution: int) -> GridIntegral:
    if not (isinstance(resolution, (int, np.integer)) and resolution >= 64):
        raise ConfigurationError("resolution must be an integer >= 64")
    resolution = int(resolution)
    xc, yc, cx, cy = _grid_axes(curve, resolution)
    cell = cx * cy
    mask = _skip_mask(curve, xc, yc, cx, cy)
    w = _row_windings(curve, xc, yc)
    filled, uncertainty = _fill_banded(w, mask)
    value = float(np.abs(filled).sum() * cell)
    error = float(uncertainty.sum() * cell)
    return GridIntegral(
        value=value,
        error=error,
        cells_skipped=int(mask.sum()),
        resolution=resolution,
    )


def winding_area(curve: ClosedCurve, resolution: int) -> GridIntegral:
    """Integral of |winding number| over the plane: the area any disk
    spanning the curve must cover, multiplicity included."""
    return _abs_winding_integral(curve, resolution)


def current_mass(curve: ClosedCurve, resolution: int) -> GridIntegral:
    """Mass of the curve's integration current, rasterized: signed
    windings cancel before the absolute value is taken cellwise.  Zero
    for a circle traversed once each way, even though no null homotopy
    of that curve sweeps zero area."""
    return _abs_winding_integral(curve, resolution)


# ---------------------------------------------------------------- catalog


def circle(radius: float = 1.0, n: int = 96) -> ClosedCurve:
    if radius <= 0:
        raise ConfigurationError("radius must be positive")
    t = TWO_PI * np.arange(n) / n
    return ClosedCurve.uniform(radius * np.column_stack([np.cos(t), np.sin(t)]))


def doubled_circle(radius: float = 1.0, n: int = 96) -> ClosedCurve:
    """The circle traversed twice in the same direction."""
    if radius <= 0:
        raise ConfigurationError("radius must be positive")
    if n % 2:
        raise ConfigurationError("doubled circle needs an even sample count")
    t = TWO_PI * np.arange(n) / n
    return ClosedCurve.uniform(
        radius * np.column_stack([np.cos(2 * t), np.sin(2 * t)])
    )


def figure_eight(
    r1: float = 1.0, r2: float = 0.6, orientation: str = "opposite", n: int = 128
) -> ClosedCurve:
    """Two circles tangent at the origin, traversed as one closed curve.

    The junction is only C0; this is the hard catalog case on purpose.
    orientation 'opposite' winds the lobes against each other (+1/-1),
    'same' winds them alike.
    """
    if r1 <= 0 or r2 <= 0:
        raise ConfigurationError("lobe radii must be positive")
    if orientation not in ("opposite", "same"):
        raise ConfigurationError("orientation must be 'opposite' or 'same'")
    if n % 2:
        raise ConfigurationError("figure eight needs an even sample count")
    t = TWO_PI * np.arange(n) / n
    # right lobe winds counterclockwise (+1); the left lobe's sense is
    # the orientation switch
    right = np.column_stack([r1 * (1 - np.cos(2 * t)), -r1 * np.sin(2 * t)])
    s = 2 * (t - np.pi)
    sign = -1.0 if orientation == "opposite" else 1.0
    left = np.column_stack([-r2 * (1 - np.cos(s)), sign * r2 * np.sin(s)])
    return ClosedCurve.uniform(np.where((t < np.pi)[:, None], right, left))


def coincident_eight(radius: float = 1.0, n: int = 128) -> ClosedCurve:
    """One circle traversed counterclockwise, then clockwise: equal
    coincident lobes with opposite orientations.  Its current mass is
    zero; its minimal null homotopy still sweeps the disk twice."""
    if radius <= 0:
        raise ConfigurationError("radius must be positive")
    if n % 2:
        raise ConfigurationError("coincident eight needs an even sample count")
    t = TWO_PI * np.arange(n) / n
    a = np.where(t < np.pi, 2 * t, 2 * TWO_PI - 2 * t)
    return ClosedCurve.uniform(
        radius * np.column_stack([np.cos(a), np.sin(a)])
    )


@dataclass(frozen=True)
class CatalogEntry:
    """A test curve with independently known answers.

    exact_area None means only the winding lower bound is known.
    rel_tol is the acceptance tolerance on the pipeline's extrapolated
    area for entries with an exact value.
    """

    name: str
    generator: object
    params: dict
    exact_area: float | None
    winding_integral: float
    rel_tol: float | None
    notes: str

    def __post_init__(self):
        if self.exact_area is not None:
            if self.exact_area < self.winding_integral - 1e-9:
                raise ConfigurationError(
                    f"{self.name}: exact area below its own lower bound"
                )

    def make(self, n: int | None = None) -> ClosedCurve:
        kwargs = dict(self.params)
        if n is not None:
            kwargs["n"] = n
        return self.generator(**kwargs)


def catalog() -> tuple:
    pi = float(np.pi)
    return (
        CatalogEntry(
            name="circle",
            generator=circle,
            params={"radius": 1.0, "n": 96},
            exact_area=pi,
            winding_integral=pi,
            rel_tol=0.01,
            notes="unit circle; the flat disk is the exact minimizer",
        ),
        CatalogEntry(
            name="doubled_circle",
            generator=doubled_circle,
            params={"radius": 1.0, "n": 96},
            exact_area=2 * pi,
            winding_integral=2 * pi,
            rel_tol=0.03,
            notes="degree-2 cover; the disk must be swept twice",
        ),
        CatalogEntry(
            name="figure_eight_opposite",
            generator=figure_eight,
            params={"r1": 1.0, "r2": 0.6, "orientation": "opposite", "n": 128},
            exact_area=1.36 * pi,
            winding_integral=1.36 * pi,
            rel_tol=0.04,
            notes="tangent lobes wound against each other; their supports "
            "are disjoint, so nothing cancels and each lobe is swept once",
        ),
        CatalogEntry(
            name="figure_eight_same",
            generator=figure_eight,
            params={"r1": 1.0, "r2": 0.6, "orientation": "same", "n": 128},
            exact_area=None,
            winding_integral=1.36 * pi,
            rel_tol=None,
            notes="tangent lobes wound alike; winding integral is a lower "
            "bound, no independent exact value",
        ),
    )


def match_catalog(curve: ClosedCurve) -> CatalogEntry | None:
    """The catalog entry whose generated curve equals this one, if any."""
    for entry in catalog():
        try:
            candidate = entry.make(n=curve.n)
        except ConfigurationError:
            continue
        if candidate.points.shape != curve.points.shape:
            continue
        tol = 1e-9 * max(curve.diameter, 1.0)
        if np.allclose(candidate.points, curve.points, atol=tol, rtol=0.0):
            return entry
    return None


def catalog_table(resolution: int = 256) -> str:
    """Catalog names and oracle values as comma-separated rows."""
    lines = ["name,parameters,winding_integral,exact_area,current_mass"]
    for entry in catalog():
        mass = current_mass(entry.make(), resolution).value
        params = " ".join(f"{k}={v}" for k, v in sorted(entry.params.items()))
        exact = f"{entry.exact_area:.12g}" if entry.exact_area is not None else ""
        lines.append(
            f"{entry.name},{params},{entry.winding_integral:.12g},{exact},"
            f"{mass:.12g}"
        )
    return "\n".join(lines) + "\n"
