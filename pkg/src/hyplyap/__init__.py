"""Hypergeometric flat bundles over the thrice-punctured sphere:
monodromy construction, geodesic-flow Lyapunov exponents, and the
Hodge-theoretic degrees that bound them."""

from .errors import (
    ChamberWall,
    FrameOverflow,
    HyplyapError,
    InsufficientData,
    IntegerGamma,
    InvalidParams,
    NonUnimodular,
    NoRealization,
    SingularMatrix,
    SingularSystem,
    TableInconsistent,
)
from .geodesic import DigitEvent, GaussState, digit_stream, gauss_step
from .hodge import (
    DegreeReport,
    Diagram,
    LocalInvariants,
    analyze,
    ds_recursion_oracle,
    local_invariants,
    parabolic_degrees,
    signature_zeros,
)
from .lyapunov import (
    CocycleAccumulator,
    LyapunovEstimate,
    RunConfig,
    accumulate,
    estimate,
    finalize,
)
from .monodromy import (
    ConstructionTrace,
    MonodromySet,
    VerifyReport,
    build,
    det_diag_plus_rank_one,
    from_explicit,
    verify,
)
from .params import HGParams, parse_parameter
from .winding import (
    Representation,
    TriangleState,
    WindingEvent,
    build_step_table,
    representation,
    run_to_monodromy,
    step,
    triangle_step,
)

__version__ = "0.1.0"
