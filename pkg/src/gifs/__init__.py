"""Images of attractors of generalized iterated function systems (GIFS).

Deterministic and grid algorithms on the cube [0, D]^M, optimal grid
schedules with a priori error bounds, cost models, and exact
Hausdorff-Pompeiu distances for checking the results.
"""

from .algorithms import (DEFAULT_BUDGET, GapCertificate, RunStats, SnapMode, StepRecord,
                         TupleBudgetExceeded, VerificationFailure, deterministic_run,
                         fractal_step, g_step, grid_run, grid_step, memory_p_bound,
                         memory_p_run, snap, snap_indices)
from .complexity import (CostParams, cost_deterministic, cost_grid, cost_ifs, ratio_table,
                         xk_bound)
from .core import (AffineMap, ContractionViolation, DimensionMismatch, GifsError, GifsSystem,
                   PointSet, RangeViolation, apply_map, build_system, lip_bound)
from .metrics import DistanceReport, directed_distance, hausdorff
from .render import Raster, rasterize, write_ppm
from .schedule import (GridSchedule, OptimalPlan, error_bound, optimal_plan, optimal_schedule,
                       quadratic_schedule, schedule_from_plan)
from .sysio import builtin, load_system, parse_system, serialize_system

__version__ = "0.1.0"
