"""Least-area disk spanning a lifted curve, computed the Douglas way.

The minimization alternates two moves.  With the boundary parametrization
held fixed, the energy-minimal map is the discrete harmonic extension of
the boundary values, which one sparse solve produces.  With the map held
fixed, the energy is decreased in the boundary parametrization by gradient
descent, projected back onto the cone of weakly monotone parametrizations
that fix three pinned points.  Repeating the two moves drives the Dirichlet
energy toward the least-area value, because for conformal maps energy and
area agree and minimizing over reparametrizations removes the gap.

The three pins at boundary angles 0, 2pi/3, 4pi/3 remove the Moebius
freedom of the disk that would otherwise let the parametrization drift.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .curve import ClosedCurve, LiftedCurve
from .diskmesh import (
    DiskMap,
    DiskMesh,
    dirichlet_energy,
    harmonic_extend,
    map_area,
)
from .errors import (
    ConfigurationError,
    DegenerateCurveError,
    DescentFailureError,
)

TWO_PI = 2.0 * np.pi

CL_DELTAS = tuple(2.0**-k for k in range(3, 9))

# Largest admissible parameter increment across one boundary edge, in
# units of the boundary vertex spacing.  A continuous monotone degree-1
# boundary map covers every curve arc; its sampled counterpart can cheat
# by stepping over an arc in a single edge, replacing the arc with its
# chord and shaving off the enclosed area.  Capping the increment is the
# discrete substitute for that surjectivity.  Two spacings is the
# tightest cap compatible with every pin triple select_pins can emit:
# pins are pairwise >= pi/3 apart, so the widest block spans at most
# 4*pi/3 over a third of the boundary edges, an average increment of
# exactly two spacings.
JUMP_CAP_SPACINGS = 2.0


@dataclass(frozen=True)
class SolverSettings:
    """Knobs for douglas_minimize.

    step0      : largest boundary-descent step ever attempted
    step_min   : backtracking floor; exhausting it means stationarity
    energy_tol : convergence threshold as a fraction of the cone
                 competitor energy, not an absolute energy
    max_outer  : cap on outer alternation rounds
    cl_slack   : allowed factor over the Courant-Lebesgue oscillation bound
    """

    step0: float = 0.5
    step_min: float = 1e-12
    energy_tol: float = 1e-8
    max_outer: int = 500
    cl_slack: float = 3.0

    def __post_init__(self):
        if not (np.isfinite(self.step0) and self.step0 > 0):
            raise ConfigurationError("step0 must be positive")
        if not (np.isfinite(self.step_min) and 0 < self.step_min <= self.step0):
            raise ConfigurationError("step_min must lie in (0, step0]")
        if not (np.isfinite(self.energy_tol) and self.energy_tol > 0):
            raise ConfigurationError("energy_tol must be positive")
        if not (isinstance(self.max_outer, int) and self.max_outer >= 1):
            raise ConfigurationError("max_outer must be a positive integer")
        if not (np.isfinite(self.cl_slack) and self.cl_slack >= 1):
            raise ConfigurationError("cl_slack must be at least 1")


_SETTINGS_FIELDS = ("step0", "step_min", "energy_tol", "max_outer", "cl_slack")


def parse_settings(data: dict) -> SolverSettings:
    """Build settings from a mapping; every field optional, none unknown."""
    if not isinstance(data, dict):
        raise ConfigurationError("solver settings must be a mapping")
    unknown = sorted(set(data) - set(_SETTINGS_FIELDS))
    if unknown:
        raise ConfigurationError(f"unknown solver settings: {', '.join(unknown)}")
    kwargs = {}
    for name in _SETTINGS_FIELDS:
        if name not in data:
            continue
        value = data[name]
        if name == "max_outer":
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigurationError("max_outer must be an integer")
            kwargs[name] = value
        else:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigurationError(f"{name} must be a number")
            kwargs[name] = float(value)
    return SolverSettings(**kwargs)


def load_settings(path) -> SolverSettings:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read solver settings: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"solver settings are not valid JSON: {exc}") from exc
    return parse_settings(data)


def select_pins(curve: ClosedCurve):
    """Three well-spread curve parameters with distinct planar images.

    Tries the symmetric triple {s, s+2pi/3, s+4pi/3} over a deterministic
    list of shifts starting at s=0, accepting the first whose image points
    are pairwise at least 1e-6 of the curve diameter apart.  Falls back to
    a coarse triple search before giving up.
    """
    if curve.diameter < 1e-12:
        raise DegenerateCurveError("curve image is nearly a point")
    tol = 1e-6 * curve.diameter

    def images_ok(params):
        pts = [curve.evaluate(t) for t in params]
        return all(
            np.hypot(*(pts[i] - pts[j])) >= tol
            for i in range(3)
            for j in range(i + 1, 3)
        )

    shifts = np.concatenate([[0.0], np.linspace(0.0, TWO_PI / 3, 193)[1:-1]])
    for s in shifts:
        params = (s, s + TWO_PI / 3, s + 2 * TWO_PI / 3)
        params = tuple(t % TWO_PI for t in params)
        if images_ok(params):
            return tuple((t, curve.evaluate(t)) for t in params)

    # coarse fallback: any triple with pairwise circular spread >= 2pi/6
    grid = TWO_PI * np.arange(60) / 60
    for i in range(60):
        for j in range(i + 1, 60):
            for k in range(j + 1, 60):
                triple = (grid[i], grid[j], grid[k])
                gaps = [
                    min((b - a) % TWO_PI, (a - b) % TWO_PI)
                    for a, b in ((triple[0], triple[1]),
                                 (triple[1], triple[2]),
                                 (triple[2], triple[0]))
                ]
                if min(gaps) >= TWO_PI / 6 and images_ok(triple):
                    return tuple((t, curve.evaluate(t)) for t in triple)
    raise DegenerateCurveError(
        "no three curve points are pairwise distinct enough to pin"
    )


@dataclass(frozen=True)
class BoundaryParam:
    """Weakly monotone boundary parametrization of a closed curve.

    values     : per-boundary-vertex curve parameters in [0, 2pi)
    wrap_index : first index whose real-line lift exceeds 2pi; len(values)
                 when the lift stays below 2pi and the wrap happens at the
                 closing edge back to vertex 0
    pins       : three (boundary index, curve parameter) pairs at the
                 boundary vertices with angles 2k*pi/3
    """

    values: np.ndarray
    wrap_index: int
    pins: tuple

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        m = len(vals)
        if m < 3 or m % 3 != 0:
            raise ConfigurationError("value count must be a positive multiple of 3")
        if vals.ndim != 1 or not np.isfinite(vals).all():
            raise ConfigurationError("parameter values must be a finite vector")
        if (vals < 0).any() or (vals >= TWO_PI).any():
            raise ConfigurationError("parameter values must lie in [0, 2pi)")
        if not (isinstance(self.wrap_index, int) and 1 <= self.wrap_index <= m):
            raise ConfigurationError("wrap_index must lie in [1, len(values)]")
        pins = tuple((int(i), float(t)) for i, t in self.pins)
        object.__setattr__(self, "pins", pins)
        if len(pins) != 3 or tuple(i for i, _ in pins) != (0, m // 3, 2 * m // 3):
            raise ConfigurationError("pins must sit at boundary indices 0, m/3, 2m/3")
        for i, t in pins:
            if not (0 <= t < TWO_PI):
                raise ConfigurationError("pin parameters must lie in [0, 2pi)")
            if vals[i] != t:
                raise ConfigurationError(
                    f"value at pinned index {i} is {vals[i]!r}, pin demands {t!r}"
                )
        lift = self.lift
        if (np.diff(lift) < 0).any():
            raise ConfigurationError("lifted parameter sequence must be nondecreasing")
        if lift[-1] > lift[0] + TWO_PI:
            raise ConfigurationError("parameters advance by more than one full turn")

    @cached_property
    def lift(self) -> np.ndarray:
        """Real-line representative: nondecreasing, final closure step back
        to values[0] + 2pi completes one exact turn."""
        out = self.values + TWO_PI * (np.arange(len(self.values)) >= self.wrap_index)
        out.setflags(write=False)
        return out

    @property
    def pin_params(self) -> tuple:
        return tuple(t for _, t in self.pins)

    @classmethod
    def from_lift(cls, lift: np.ndarray, pins) -> "BoundaryParam":
        lift = np.asarray(lift, dtype=float)
        values = np.remainder(lift, TWO_PI)
        wrapped = np.nonzero(lift >= TWO_PI)[0]
        wrap_index = int(wrapped[0]) if len(wrapped) else len(lift)
        pins = tuple((int(i), float(t)) for i, t in pins)
        values = values.copy()
        for i, t in pins:
            values[i] = t  # exact, kills mod-2pi roundoff at the pins
        return cls(values, wrap_index, pins)


def _pin_lift_targets(pin_params):
    """Pin parameters unrolled onto the real line in boundary order."""
    t0, t1, t2 = pin_params
    u1 = t1 if t1 > t0 else t1 + TWO_PI
    u2 = t2
    while u2 <= u1:
        u2 += TWO_PI
    if u2 >= t0 + TWO_PI:
        raise ConfigurationError("pin parameters do not wind once around the curve")
    return t0, u1, u2


def _initial_lift(m: int, pin_params) -> np.ndarray:
    """Linear interpolation between consecutive pins, one value per vertex."""
    t0, u1, u2 = _pin_lift_targets(pin_params)
    anchors_i = np.array([0, m // 3, 2 * m // 3, m])
    anchors_t = np.array([t0, u1, u2, t0 + TWO_PI])
    return np.interp(np.arange(m), anchors_i, anchors_t)


def _pava(y: np.ndarray) -> np.ndarray:
    """Nondecreasing least-squares fit by pooling adjacent violators."""
    vals: list[float] = []
    counts: list[int] = []
    for v in y:
        vals.append(float(v))
        counts.append(1)
        while len(vals) > 1 and vals[-2] > vals[-1]:
            c = counts[-1] + counts[-2]
            merged = (vals[-1] * counts[-1] + vals[-2] * counts[-2]) / c
            vals.pop()
            counts.pop()
            vals[-1] = merged
            counts[-1] = c
    return np.repeat(vals, counts)


def _cap_chain(y: np.ndarray, lo: float, hi: float, cap: float) -> np.ndarray:
    """Project onto {v: v steps up from lo to hi by at most cap at a time}.

    Shearing off i*cap turns the increment bound into an antitonic fit
    with fixed end values, which pooling solves exactly.
    """
    k = len(y)
    shear = cap * np.arange(1, k + 1)
    chi = y - shear
    fit = -_pava(-chi)
    return np.clip(fit, hi - cap * (k + 1), lo) + shear


def _project_block(y: np.ndarray, lo: float, hi: float, cap: float) -> np.ndarray:
    """Nearest point of {lo <= v_1 <= .. <= v_k <= hi, increments <= cap}
    (increments measured against the fixed lo/hi anchors as well).

    Dykstra's alternation between the two exact projections; the first
    projection usually already satisfies the caps and returns early.
    """
    monotone = np.clip(_pava(y), lo, hi)
    full = np.concatenate([[lo], monotone, [hi]])
    if np.diff(full).max() <= cap * (1 + 1e-12):
        return monotone
    x = np.asarray(y, dtype=float).copy()
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    a = x
    for _ in range(2000):
        a_prev = a
        a = np.clip(_pava(x + p), lo, hi)
        p = x + p - a
        x = _cap_chain(a + q, lo, hi, cap)
        q = a + q - x
        if np.abs(a - a_prev).max() < 1e-13:
            full = np.concatenate([[lo], a, [hi]])
            if np.diff(full).max() <= cap * (1 + 1e-12):
                break
    return a


def _project_lift(lift: np.ndarray, pin_params, cap: float | None = None) -> np.ndarray:
    """Nearest weakly monotone lift with the pins restored exactly.

    Within each inter-pin block the projection is isotonic regression
    clipped to the block's pin values; blocks chain monotonically because
    consecutive blocks share their pin endpoints.  A cap bounds adjacent
    increments, the discrete stand-in for continuity of the boundary
    reparametrization: without it the minimization can skip whole
    sub-arcs of the curve across a single boundary edge and land on a
    spurious low-energy state.
    """
    m = len(lift)
    t0, u1, u2 = _pin_lift_targets(pin_params)
    out = np.array(lift, dtype=float)
    anchors = (0, m // 3, 2 * m // 3, m)
    targets = (t0, u1, u2, t0 + TWO_PI)
    for k in range(3):
        out[anchors[k]] = targets[k]
        lo, hi = targets[k], targets[k + 1]
        inner = slice(anchors[k] + 1, anchors[k + 1])
        if inner.stop <= inner.start:
            if cap is not None and hi - lo > cap * (1 + 1e-12):
                raise ConfigurationError(
                    "jump cap smaller than the spacing between pins"
                )
            continue
        if cap is None:
            out[inner] = np.clip(_pava(out[inner]), lo, hi)
        else:
            width = inner.stop - inner.start + 1
            if hi - lo > cap * width * (1 + 1e-12):
                raise ConfigurationError(
                    "jump cap too small to reach the next pin"
                )
            out[inner] = _project_block(out[inner], lo, hi, cap)
    return out


@dataclass(frozen=True)
class DouglasResult:
    """One converged (or capped) Douglas solve.

    map lives in R^4; energy_history holds the accepted energies, first
    entry the initial harmonic extension.  cone_energy is the radial
    competitor's energy on the same mesh, an upper bound any reasonable
    result must beat.
    """

    map: DiskMap
    param: BoundaryParam
    energy: float
    area: float
    conformality: float
    iterations: int
    converged: bool
    energy_history: tuple
    cone_energy: float


def cone_competitor(lifted: LiftedCurve, mesh: DiskMesh) -> DiskMap:
    """Radial surface r * gamma(angle), vertex by vertex."""
    x = mesh.vertices[:, 0]
    y = mesh.vertices[:, 1]
    r = np.hypot(x, y)
    alpha = np.remainder(np.arctan2(y, x), TWO_PI)
    values = r[:, None] * lifted.evaluate(alpha)
    return DiskMap(mesh, values)


def _boundary_state(lifted: LiftedCurve, mesh: DiskMesh, lift_vals: np.ndarray):
    """Harmonic extension of the parametrized boundary plus its energy and
    the stiffness image needed for the parameter gradient."""
    g = lifted.evaluate(np.remainder(lift_vals, TWO_PI))
    dmap = harmonic_extend(mesh, g)
    kw = mesh.stiffness @ dmap.values
    energy = 0.5 * float(np.sum(dmap.values * kw))
    return dmap, kw, energy


def _phi_gradient(
    lifted: LiftedCurve, mesh: DiskMesh, lift_vals: np.ndarray, kw: np.ndarray
) -> np.ndarray:
    # chain rule: dE/dphi_i = (K u)_bi . gamma'(phi_i); interior rows of
    # K u vanish for harmonic u, so only boundary rows are read
    vel = lifted.velocity(np.remainder(lift_vals, TWO_PI))
    return np.sum(kw[mesh.boundary_loop] * vel, axis=1)


def douglas_minimize(
    lifted: LiftedCurve,
    mesh: DiskMesh,
    settings: SolverSettings | None = None,
    initial: BoundaryParam | None = None,
    allow_flat: bool = False,
) -> DouglasResult:
    """Alternate harmonic extension and monotone boundary descent.

    initial warm-starts the boundary parametrization (pins are taken from
    it unchanged); otherwise pins come from select_pins on the base curve
    and the parametrization starts proportional to boundary angle.

    A flat input (epsilon = 0) is refused unless allow_flat is set, since
    the flat curve may self-intersect and the minimizer is then only a
    diagnostic quantity.
    """
    cfg = settings or SolverSettings()
    if lifted.epsilon == 0.0 and not allow_flat:
        raise ConfigurationError(
            "epsilon = 0 lift needs allow_flat=True; the flat curve may "
            "not bound a disk in the embedded sense"
        )
    m = mesh.boundary_count
    if m % 3 != 0:
        raise ConfigurationError("mesh boundary count must be divisible by 3")

    cap = JUMP_CAP_SPACINGS * TWO_PI / m
    if initial is not None:
        if len(initial.values) != m:
            raise ConfigurationError(
                f"warm start has {len(initial.values)} values, mesh boundary has {m}"
            )
        pin_params = initial.pin_params
        lift_vals = _project_lift(initial.lift, pin_params, cap=cap)
    else:
        pin_params = tuple(t for t, _ in select_pins(lifted.base))
        lift_vals = _initial_lift(m, pin_params)

    cone_energy = dirichlet_energy(cone_competitor(lifted, mesh))
    tol = cfg.energy_tol * max(cone_energy, np.finfo(float).tiny)

    dmap, kw, energy = _boundary_state(lifted, mesh, lift_vals)
    history = [energy]
    step = cfg.step0
    converged = False
    iterations = 0

    for _ in range(cfg.max_outer):
        iterations += 1
        grad = _phi_gradient(lifted, mesh, lift_vals, kw)
        if not np.isfinite(grad).all():
            raise DescentFailureError("boundary gradient is not finite")

        s = min(2.0 * step, cfg.step0)
        accepted = False
        while True:
            candidate = _project_lift(lift_vals - s * grad, pin_params, cap=cap)
            c_dmap, c_kw, c_energy = _boundary_state(lifted, mesh, candidate)
            if not np.isfinite(c_energy):
                raise DescentFailureError("candidate energy is not finite")
            if c_energy < energy:
                accepted = True
                break
            if s <= cfg.step_min:
                break
            s = max(0.5 * s, cfg.step_min)

        if not accepted:
            # no decrease even at the step floor: stationary under the
            # monotone projection, which is this scheme's convergence
            converged = True
            break

        decrease = energy - c_energy
        lift_vals, dmap, kw, energy = candidate, c_dmap, c_kw, c_energy
        history.append(energy)
        step = s
        if decrease < tol:
            converged = True
            break

    param = BoundaryParam.from_lift(lift_vals, ((0, pin_params[0]),
                                                (m // 3, pin_params[1]),
                                                (2 * m // 3, pin_params[2])))
    area = map_area(dmap)
    return DouglasResult(
        map=dmap,
        param=param,
        energy=energy,
        area=area,
        conformality=energy - area,
        iterations=iterations,
        converged=converged,
        energy_history=tuple(history),
        cone_energy=cone_energy,
    )


def descent_step(
    current: DouglasResult, lifted: LiftedCurve, step: float
) -> BoundaryParam:
    """One explicit gradient step on the boundary parametrization."""
    if not (np.isfinite(step) and step > 0):
        raise ValueError("step must be a positive number")
    mesh = current.map.mesh
    lift_vals = current.param.lift
    kw = mesh.stiffness @ current.map.values
    grad = _phi_gradient(lifted, mesh, lift_vals, kw)
    cap = JUMP_CAP_SPACINGS * TWO_PI / mesh.boundary_count
    moved = _project_lift(lift_vals - step * grad, current.param.pin_params, cap=cap)
    return BoundaryParam.from_lift(moved, current.param.pins)


def courant_lebesgue_modulus(energy: float, delta: float) -> float:
    """Oscillation bound sqrt(8 pi E / log(1/delta)) for maps of energy E."""
    if not (np.isfinite(delta) and 0 < delta < 1):
        raise ValueError("delta must lie in (0, 1)")
    if not (np.isfinite(energy) and energy >= 0):
        raise ValueError("energy must be nonnegative")
    return float(np.sqrt(8.0 * np.pi * energy / np.log(1.0 / delta)))


def boundary_arc_oscillation(dmap: DiskMap, delta: float) -> float:
    """Largest image diameter over boundary arcs of angular length delta.

    The trace is piecewise linear between boundary vertices, so an arc's
    image is spanned by the interpolated arc endpoints plus any vertices
    inside; arcs anchored at each vertex (as either end) realize the
    maximum up to the anchor discretization.
    """
    if not (np.isfinite(delta) and 0 < delta < TWO_PI):
        raise ValueError("delta must lie in (0, 2pi)")
    theta = dmap.mesh.boundary_angles
    vals = dmap.boundary_values
    ext_t = np.concatenate([theta, [theta[0] + TWO_PI]])
    ext_v = np.vstack([vals, vals[:1]])

    def trace(t):
        t = np.remainder(t, TWO_PI)
        if t < ext_t[0]:
            t += TWO_PI
        return np.array([np.interp(t, ext_t, ext_v[:, c])
                         for c in range(ext_v.shape[1])])

    worst = 0.0
    anchors = np.concatenate([theta, theta - delta])
    for a in anchors:
        inside = np.nonzero(np.remainder(theta - a, TWO_PI) < delta)[0]
        pts = np.vstack([trace(a), trace(a + delta), vals[inside]])
        d = pts[:, None, :] - pts[None, :, :]
        worst = max(worst, float(np.sqrt((d * d).sum(axis=2)).max()))
    return worst


@dataclass(frozen=True)
class CLRecord:
    delta: float
    oscillation: float
    bound: float
    slack: float

    @property
    def ok(self) -> bool:
        return self.oscillation <= self.slack * self.bound


def courant_lebesgue_check(
    dmap: DiskMap, slack: float = 3.0, deltas=CL_DELTAS
) -> tuple:
    """Compare measured boundary oscillation against the modulus bound for
    each requested arc length.  A failing record flags a boundary trace
    rougher than an energy-E harmonic map can be."""
    energy = dirichlet_energy(dmap)
    records = []
    for delta in deltas:
        bound = courant_lebesgue_modulus(energy, delta)
        osc = boundary_arc_oscillation(dmap, delta)
        records.append(CLRecord(delta, osc, bound, float(slack)))
    return tuple(records)
