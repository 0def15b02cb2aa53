"""The explicit contraction of a curve to a point through its least disk.

Time runs backwards through the construction: the frame at t=1 is the
input curve, frames in (1/2, 1) reparametrize it (the image set never
moves, only the marking of points on it), the frame at t=1/2 is the
limit disk's boundary trace, and frames below 1/2 are concentric circles
of the limit disk shrinking into its center.  The total area swept is
the disk's area; the reparametrization half sweeps nothing in the limit
and nearly nothing discretely.

Frames are plain (n, 2) point arrays rather than curve objects: the
frame at t=0 is a single repeated point, which no valid closed curve can
represent.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .curve import ClosedCurve
from .diskmesh import DiskMap, interpolate_map, map_area
from .errors import (
    ConfigurationError,
    DiscontinuousParametrizationError,
)
from .plateau import BoundaryParam
from .reportio import round12, write_json, write_text

TWO_PI = 2.0 * np.pi

SPEED_RATIO_LIMIT = 1.25  # admissible non-uniformity of the parametrization


@dataclass(frozen=True)
class Homotopy:
    """Piecewise rule: disk sweep for t < 1/2, boundary blend for t >= 1/2."""

    u0: DiskMap
    phi0: BoundaryParam
    curve: ClosedCurve
    phi_jump_tol: float

    def __post_init__(self):
        if self.u0.dim != 2:
            raise ConfigurationError("limit map must have two coordinates")
        if len(self.phi0.values) != self.u0.mesh.boundary_count:
            raise ConfigurationError(
                "boundary parametrization length does not match the mesh"
            )


def default_phi_jump_tol(boundary_count: int) -> float:
    # four boundary-vertex spacings; the continuum statement is that the
    # limit parametrization has no jumps at all
    return 4.0 * TWO_PI / boundary_count * 2.0


def build_null_homotopy(
    limit, curve: ClosedCurve, phi_jump_tol: float | None = None
) -> Homotopy:
    """Assemble the homotopy and vet its two standing assumptions.

    The boundary parametrization must be continuous at mesh scale: any
    jump across one boundary arc above phi_jump_tol (default eight vertex
    spacings) aborts, because the second-half blend would then tear the
    curve open.  The curve must be close to arc-length parametrized,
    since that is what makes the limit parametrization continuous in the
    first place.
    """
    speeds = curve.segment_lengths / curve.param_steps
    ratio = float(speeds.max() / speeds.min())
    if ratio > SPEED_RATIO_LIMIT:
        raise ConfigurationError(
            f"curve parametrization speed varies by a factor {ratio:.3g}; "
            "resample by arc length first"
        )

    phi0: BoundaryParam = limit.phi0
    if phi_jump_tol is None:
        phi_jump_tol = default_phi_jump_tol(len(phi0.values))
    lifted = np.append(phi0.lift, phi0.lift[0] + TWO_PI)
    jumps = np.diff(lifted)
    worst = int(np.argmax(jumps))
    if jumps[worst] > phi_jump_tol:
        theta = TWO_PI / len(phi0.values)
        raise DiscontinuousParametrizationError(
            f"boundary parametrization jumps by {jumps[worst]:.4g} "
            f"(tolerance {phi_jump_tol:.4g}) across one boundary arc",
            arc=(worst * theta, (worst + 1) * theta),
        )
    return Homotopy(limit.u0, phi0, curve, float(phi_jump_tol))


def _blend_lift(h: Homotopy, thetas: np.ndarray, t: float) -> np.ndarray:
    """(2-2t) phi0(theta) + (2t-1) theta on monotone real-line lifts."""
    angles = h.u0.mesh.boundary_angles
    ext_a = np.append(angles, angles[0] + TWO_PI)
    ext_l = np.append(h.phi0.lift, h.phi0.lift[0] + TWO_PI)
    phi = np.interp(thetas, ext_a, ext_l)
    return (2.0 - 2.0 * t) * phi + (2.0 * t - 1.0) * thetas


def sample_frame(h: Homotopy, t: float, n: int) -> np.ndarray:
    """The frame at time t as n points at uniform domain angles."""
    if not (np.isfinite(t) and 0.0 <= t <= 1.0):
        raise ValueError(f"time must lie in [0, 1], got {t}")
    if not (isinstance(n, (int, np.integer)) and n >= 3):
        raise ValueError("a frame needs at least three points")
    thetas = TWO_PI * np.arange(n) / n
    if t < 0.5:
        radius = 2.0 * t
        pts = radius * np.column_stack([np.cos(thetas), np.sin(thetas)])
        return interpolate_map(h.u0, pts)
    psi = np.remainder(_blend_lift(h, thetas, t), TWO_PI)
    return h.curve.evaluate(psi)


def _strip_area(frame_a: np.ndarray, frame_b: np.ndarray) -> float:
    """Unsigned area between two frames: each space-time quad cell is
    split into two triangles and their areas enter absolutely."""
    a0 = frame_a
    a1 = np.roll(frame_a, -1, axis=0)
    b0 = frame_b
    b1 = np.roll(frame_b, -1, axis=0)

    def tri(p, q, r):
        return 0.5 * np.abs(
            (q[:, 0] - p[:, 0]) * (r[:, 1] - p[:, 1])
            - (q[:, 1] - p[:, 1]) * (r[:, 0] - p[:, 0])
        )

    return float(np.sum(tri(a0, a1, b1)) + np.sum(tri(a0, b1, b0)))


def _swept_on_grid(h: Homotopy, times: np.ndarray, n: int) -> float:
    frames = [sample_frame(h, float(t), n) for t in times]
    return sum(_strip_area(fa, fb) for fa, fb in zip(frames, frames[1:]))


def homotopy_swept_area(h: Homotopy, time_steps: int, n: int) -> float:
    """Total area swept across time_steps uniform time intervals."""
    if not (isinstance(time_steps, (int, np.integer)) and time_steps >= 2):
        raise ValueError("time_steps must be an integer >= 2")
    if not (isinstance(n, (int, np.integer)) and n >= 3):
        raise ValueError("n must be an integer >= 3")
    return _swept_on_grid(h, np.linspace(0.0, 1.0, int(time_steps) + 1), int(n))


def swept_area_parts(h: Homotopy, time_steps: int, n: int) -> tuple:
    """(disk-sweep half, reparametrization half), each on its own grid of
    time_steps intervals.  The second component witnesses that the
    reparametrization half moves along the curve image only."""
    if not (isinstance(time_steps, (int, np.integer)) and time_steps >= 2):
        raise ValueError("time_steps must be an integer >= 2")
    first = _swept_on_grid(h, np.linspace(0.0, 0.5, int(time_steps) + 1), int(n))
    second = _swept_on_grid(h, np.linspace(0.5, 1.0, int(time_steps) + 1), int(n))
    return first, second


def _svg_document(points: np.ndarray, box: tuple) -> str:
    x0, y0, w, hgt = box
    cmds = [f"M {round12(p[0])} {round12(-p[1])}" for p in points[:1]]
    cmds += [f"L {round12(p[0])} {round12(-p[1])}" for p in points[1:]]
    path = " ".join(cmds) + " Z"
    stroke = round12(0.004 * max(w, hgt))
    return (
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{round12(x0)} {round12(y0)} {round12(w)} {round12(hgt)}">\n'
        f'<path d="{path}" fill="none" stroke="black" '
        f'stroke-width="{stroke}"/>\n</svg>\n'
    )


def frame_canvas(curve: ClosedCurve) -> tuple:
    """Fixed drawing box: the curve's bounding square padded 10%."""
    lo = curve.points.min(axis=0)
    hi = curve.points.max(axis=0)
    pad = 0.1 * max(hi - lo)
    x0, y0 = lo - pad
    x1, y1 = hi + pad
    # y flips for drawing, so the box is given in flipped coordinates
    return float(x0), float(-y1), float(x1 - x0), float(y1 - y0)


def export_frames(
    h: Homotopy, time_steps: int, n: int, destination, svg: bool = False
) -> dict:
    """Write the frame archive (and drawings on request) to a directory.

    The archive holds time_steps frames at t = 0, 1/(time_steps-1), .., 1
    plus summary areas.  Output is deterministic: same homotopy, same
    bytes.  Returns the written paths keyed by artifact name.
    """
    if not (isinstance(time_steps, (int, np.integer)) and time_steps >= 2):
        raise ValueError("time_steps must be an integer >= 2")
    times = np.linspace(0.0, 1.0, int(time_steps))
    frames = [sample_frame(h, float(t), n) for t in times]
    area = homotopy_swept_area(h, max(int(time_steps) - 1, 2), n)
    doc = {
        "meta": {
            "time_steps": int(time_steps),
            "n": int(n),
            "area": area,
            "u0_area": map_area(h.u0),
        },
        "frames": [
            {"t": float(t), "points": f.tolist()} for t, f in zip(times, frames)
        ],
    }
    written = {"archive": write_json(Path(destination) / "frames.json", doc)}
    if svg:
        box = frame_canvas(h.curve)
        for i, f in enumerate(frames):
            name = f"frame_{i:03d}.svg"
            written[name] = write_text(
                Path(destination) / name, _svg_document(f, box)
            )
    return written

