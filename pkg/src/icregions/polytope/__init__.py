from .geometry import Region2D, geometry2d, region_svg, svg_overlay
from .lp import LPResult, LPSolver, maximize
from .system import (
    NUMERIC,
    SYMBOLIC,
    AxiomSet,
    IneqSystem,
    InclusionResult,
    LinIneq,
    SymExpr,
    SystemError_,
    UnboundedRegionError,
    eliminate,
    equal,
    implied_by,
    includes,
    parse_linear,
    parse_row,
    project_rates,
    provably_le,
    prune,
    reduce,
    system_from_rows,
)
