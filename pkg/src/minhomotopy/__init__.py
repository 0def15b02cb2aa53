"""Minimum-area null homotopies of closed planar curves.

Pipeline: lift the curve off the plane, minimize disk energy for a
shrinking family of lifts, extrapolate the limit, project back, and
assemble the explicit homotopy together with oracle cross-checks.
"""

from . import errors
from .continuation import (
    ContinuationRecord,
    LimitResult,
    epsilon_schedule,
    extract_limit,
    run_sweep,
)
from .curve import (
    ClosedCurve,
    Crossing,
    IntersectionReport,
    LiftedCurve,
    lift,
    load_curve,
    min_lift_separation,
    parse_curve,
    resample_arclength,
    save_curve,
    self_intersections,
    winding_number,
)
from .diskmesh import (
    DiskMap,
    DiskMesh,
    build_disk_mesh,
    dirichlet_energy,
    harmonic_extend,
    map_area,
)
from .homotopy import (
    Homotopy,
    build_null_homotopy,
    export_frames,
    homotopy_swept_area,
    sample_frame,
)
from .oracle import (
    CatalogEntry,
    catalog,
    circle,
    coincident_eight,
    current_mass,
    doubled_circle,
    figure_eight,
    match_catalog,
    winding_area,
)
from .plateau import (
    BoundaryParam,
    DouglasResult,
    SolverSettings,
    douglas_minimize,
    select_pins,
)

__version__ = "0.1.0"
