"""Drive the lift radius to zero and extract the planar limit disk.

Each radius epsilon gets its own Douglas solve, warm-started from the
previous radius so the boundary parametrizations track each other.  The
sweep records the contraction monitors that justify calling the final
iterate a limit: sup-distances between consecutive maps and boundary
traces, the change in the boundary parametrization, and how far each map
sticks out of the plane.  The planar area at epsilon = 0 is estimated by
extrapolating the measured areas against epsilon^2, the exact dependence
for circle lifts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve import ClosedCurve, lift
from .diskmesh import DiskMap, DiskMesh, map_area
from .errors import (
    ConfigurationError,
    NonConvergenceError,
    SolverError,
    SweepAbortError,
)
from .plateau import BoundaryParam, DouglasResult, SolverSettings, douglas_minimize

TWO_PI = 2.0 * np.pi

LIMIT_TOL_FACTOR = 1e-3  # of curve diameter
PLANARITY_SLACK = 0.5


def epsilon_schedule(eps0: float, factor: float, count: int) -> tuple:
    """Geometric schedule eps0 * factor^k, k = 0..count-1."""
    if not (np.isfinite(eps0) and 0 < eps0 <= 1):
        raise ConfigurationError("eps0 must lie in (0, 1]")
    if not (np.isfinite(factor) and 0 < factor < 1):
        raise ConfigurationError("factor must lie in (0, 1)")
    if not (isinstance(count, int) and count >= 2):
        raise ConfigurationError("count must be an integer >= 2")
    return tuple(float(eps0 * factor**k) for k in range(count))


@dataclass(frozen=True)
class ContinuationRecord:
    """Per-epsilon solves plus the contraction monitors between them.

    All monitor tuples are aligned with consecutive pairs of entries;
    planarity has one value per entry.  projected_sup tracks only the
    first two coordinates, the quantity that must become Cauchy for the
    planar limit to exist; map_sup keeps all four (it is dominated by the
    shrinking lift circle itself).
    """

    epsilons: tuple
    results: tuple
    map_sup: tuple
    trace_sup: tuple
    projected_sup: tuple
    phi_sup: tuple
    planarity: tuple
    mode: str

    def __post_init__(self):
        eps = self.epsilons
        if len(eps) < 1 or any(not (0 < e <= 1) for e in eps):
            raise ConfigurationError("epsilons must lie in (0, 1]")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ConfigurationError("epsilons must be strictly decreasing")
        if len(self.results) != len(eps):
            raise ConfigurationError("one solve per epsilon required")
        pair_counts = {len(self.map_sup), len(self.trace_sup),
                       len(self.projected_sup), len(self.phi_sup)}
        if pair_counts != {len(eps) - 1} or len(self.planarity) != len(eps):
            raise ConfigurationError("monitor lengths do not match the schedule")
        if any(s < 0 for tup in (self.map_sup, self.trace_sup,
                                 self.projected_sup, self.phi_sup)
               for s in tup):
            raise ConfigurationError("sup-distances must be nonnegative")
        if self.mode not in ("warm", "cold"):
            raise ConfigurationError("mode must be 'warm' or 'cold'")

    @property
    def final(self) -> DouglasResult:
        return self.results[-1]

    def monitor_dict(self) -> dict:
        return {
            "epsilons": list(self.epsilons),
            "map_sup": list(self.map_sup),
            "trace_sup": list(self.trace_sup),
            "projected_sup": list(self.projected_sup),
            "phi_sup": list(self.phi_sup),
            "planarity": list(self.planarity),
            "converged": [r.converged for r in self.results],
        }


def _sup_rows(a: np.ndarray, b: np.ndarray) -> float:
    d = a - b
    return float(np.sqrt((d * d).sum(axis=1)).max())


def run_sweep(
    curve: ClosedCurve,
    mesh: DiskMesh,
    schedule,
    settings: SolverSettings | None = None,
    warm: bool = True,
) -> ContinuationRecord:
    """Solve the Plateau problem along a decreasing schedule of radii.

    Warm mode feeds each solve the previous boundary parametrization;
    cold mode restarts every radius from the angle-proportional initial
    guess.  Either way all entries share the same three pins.
    """
    schedule = tuple(float(e) for e in schedule)
    if len(schedule) == 0:
        raise ConfigurationError("schedule must contain at least one epsilon")
    if any(not (0 < e <= 1) for e in schedule):
        raise ConfigurationError("schedule radii must lie in (0, 1]")
    if any(b >= a for a, b in zip(schedule, schedule[1:])):
        raise ConfigurationError("schedule must be strictly decreasing")

    results = []
    carried: BoundaryParam | None = None
    for eps in schedule:
        try:
            res = douglas_minimize(
                lift(curve, eps), mesh, settings=settings, initial=carried
            )
        except (SolverError, ValueError) as exc:
            raise SweepAbortError(
                f"solve failed at epsilon={eps}: {exc}", epsilon=eps
            ) from exc
        results.append(res)
        if warm:
            carried = res.param

    map_sup, trace_sup, projected_sup, phi_sup = [], [], [], []
    for prev, cur in zip(results, results[1:]):
        a, b = prev.map.values, cur.map.values
        map_sup.append(_sup_rows(a, b))
        trace_sup.append(_sup_rows(prev.map.boundary_values, cur.map.boundary_values))
        projected_sup.append(_sup_rows(a[:, :2], b[:, :2]))
        phi_sup.append(float(np.abs(prev.param.lift - cur.param.lift).max()))
    planarity = [float(np.abs(r.map.values[:, 2:]).max()) for r in results]

    return ContinuationRecord(
        epsilons=schedule,
        results=tuple(results),
        map_sup=tuple(map_sup),
        trace_sup=tuple(trace_sup),
        projected_sup=tuple(projected_sup),
        phi_sup=tuple(phi_sup),
        planarity=tuple(planarity),
        mode="warm" if warm else "cold",
    )


def project(dmap: DiskMap) -> DiskMap:
    """Forget the lift coordinates: (r1, r2, r3, r4) -> (r1, r2)."""
    if dmap.dim != 4:
        raise ValueError(f"projection expects a 4-coordinate map, got {dmap.dim}")
    return DiskMap(dmap.mesh, dmap.values[:, :2].copy())


@dataclass(frozen=True)
class LimitResult:
    """The epsilon -> 0 endpoint of a converged sweep.

    area0 is the extrapolated planar area; area_final the last measured
    one.  extrapolation_flag marks sweeps whose last two extrapolation
    estimates disagree by more than three times the quadratic model's
    predicted decrement, i.e. sweeps where the epsilon^2 model looks
    wrong and area0 deserves suspicion.
    """

    u0: DiskMap
    phi0: BoundaryParam
    area0: float
    planarity_defect: float
    area_final: float
    extrapolation_flag: bool
    model_coefficients: tuple


def _extrapolate(epsilons, areas) -> tuple:
    """Least-squares fit area ~ a0 + c eps^2 over the last three entries."""
    eps = np.asarray(epsilons, dtype=float)[-3:]
    ar = np.asarray(areas, dtype=float)[-3:]
    design = np.column_stack([np.ones(len(eps)), eps**2])
    coef, *_ = np.linalg.lstsq(design, ar, rcond=None)
    return float(coef[0]), float(coef[1])


def extract_limit(
    record: ContinuationRecord,
    curve: ClosedCurve,
    limit_tol: float | None = None,
) -> LimitResult:
    """Declare the final sweep iterate the limit and extrapolate its area.

    Requires every per-epsilon solve to have converged and the planar
    parts of the last two maps to agree within limit_tol (default 1e-3 of
    the curve diameter).  The four-coordinate sup-distance is not gated:
    it is bounded below by the change of the lift radius itself and
    belongs to the monitors, not the convergence test.
    """
    if len(record.results) < 2:
        raise ValueError("limit extraction needs at least two sweep entries")
    if limit_tol is None:
        limit_tol = LIMIT_TOL_FACTOR * curve.diameter

    unconverged = [
        eps for eps, res in zip(record.epsilons, record.results) if not res.converged
    ]
    if unconverged:
        raise NonConvergenceError(
            f"solves at epsilon {unconverged} hit the iteration cap while "
            "still descending",
            monitors=record.monitor_dict(),
        )
    final_sup = record.projected_sup[-1]
    if final_sup > limit_tol:
        raise NonConvergenceError(
            f"planar sup-distance {final_sup:.3e} between the last two maps "
            f"exceeds the limit tolerance {limit_tol:.3e}",
            monitors=record.monitor_dict(),
        )

    areas = [r.area for r in record.results]
    u0 = project(record.final.map)
    area_final = map_area(u0)
    if len(areas) >= 3:
        area0, slope = _extrapolate(record.epsilons, areas)
    else:
        area0, slope = area_final, 0.0

    flag = False
    if len(areas) >= 4:
        prev0, _ = _extrapolate(record.epsilons[:-1], areas[:-1])
        predicted = abs(slope) * record.epsilons[-1] ** 2
        flag = abs(area0 - prev0) > 3.0 * max(predicted, 1e-300)

    return LimitResult(
        u0=u0,
        phi0=record.final.param,
        area0=float(area0),
        planarity_defect=record.planarity[-1],
        area_final=area_final,
        extrapolation_flag=flag,
        model_coefficients=(float(area0), float(slope)),
    )


def energy_upper_bound(curve: ClosedCurve) -> float:
    """A priori energy cap pi (m1^2 + m2^2) for every lift radius in (0, 1]:
    m1 bounds the lifted curve's sup norm, m2 its Lipschitz constant, and
    the cone over the lifted curve has at most this energy."""
    m1 = float(np.sqrt((curve.points**2).sum(axis=1)).max()) + 1.0
    m2 = float(np.sqrt(curve.lipschitz**2 + 2.0))
    return float(np.pi * (m1**2 + m2**2))


def render_sweep_report(
    record: ContinuationRecord, limit: LimitResult | None = None
) -> dict:
    """JSON-ready summary: one entry per radius plus monitors and the
    extrapolation block when a limit was extracted."""
    entries = []
    for eps, res in zip(record.epsilons, record.results):
        entries.append(
            {
                "epsilon": eps,
                "energy": res.energy,
                "area": res.area,
                "conformality": res.conformality,
                "cone_energy": res.cone_energy,
                "iterations": res.iterations,
                "converged": res.converged,
            }
        )
    report = {
        "mode": record.mode,
        "entries": entries,
        "monitors": record.monitor_dict(),
    }
    if limit is not None:
        report["extrapolation"] = {
            "area0": limit.area0,
            "area_final": limit.area_final,
            "model": "area(eps) = area0 + c*eps^2 over the last three entries",
            "coefficients": list(limit.model_coefficients),
            "disagreement_flag": limit.extrapolation_flag,
            "planarity_defect": limit.planarity_defect,
        }
    return report


def sweep_table(record: ContinuationRecord) -> str:
    """The same per-radius numbers as comma-separated rows for plotting."""
    lines = [
        "epsilon,energy,area,conformality,map_sup,trace_sup,projected_sup,"
        "phi_sup,planarity,iterations,converged"
    ]
    for i, (eps, res) in enumerate(zip(record.epsilons, record.results)):
        pair = (
            ("", "", "", "")
            if i == 0
            else tuple(
                f"{v:.12g}"
                for v in (
                    record.map_sup[i - 1],
                    record.trace_sup[i - 1],
                    record.projected_sup[i - 1],
                    record.phi_sup[i - 1],
                )
            )
        )
        lines.append(
            f"{eps:.12g},{res.energy:.12g},{res.area:.12g},"
            f"{res.conformality:.12g},{pair[0]},{pair[1]},{pair[2]},{pair[3]},"
            f"{record.planarity[i]:.12g},{res.iterations},{int(res.converged)}"
        )
    return "\n".join(lines) + "\n"
