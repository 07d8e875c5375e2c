"""Quantum barrier traversal times from time-of-arrival operators.

The package computes how long a wave packet spends crossing a potential
barrier, splits that time into non-tunneling, partial-tunneling and
full-tunneling contributions, and cross-checks the closed-form results
against a direct operator-kernel evaluation.
"""

from .barriers import (
    AttoclockBarrier,
    BarrierStack,
    Segment,
    SmoothBarrier,
    TurningPoints,
    attoclock_geometry,
    attoclock_to_smooth,
    cos2_bump_barrier,
    discretize,
    gaussian_bump_barrier,
    kappa,
    sampled_barrier,
)
from .kernel_oracle import (
    CalibrationReport,
    DeltaTauBreakdown,
    KernelParams,
    KernelPiece,
    Region,
    contiguous_tkf,
    delta_tau_zeta,
    free_toa_expectation,
    region_map_calibration,
    weyl_tkf_numeric,
)
from .quadrature import (
    QuadResult,
    QuadSpec,
    integrate_2d_xk,
    integrate_oscillatory_damped,
    integrate_sqrt_singular,
)
from .traversal import (
    ScanEntry,
    ScanResult,
    TraversalReport,
    attoclock_scan,
    classical_traversal,
    dwell_time,
    tau_non_classical_form,
    traversal_time,
    traversal_time_smooth,
)
from .wavepackets import (
    GaussianPacket,
    MomentumDensity,
    Regime,
    TruncatedMomentumDensity,
    UnitSystem,
    autocorrelation,
    classify_regime,
    density_of,
    momentum_density,
    signed_density_pair,
    truncate,
)

__version__ = "0.1.0"
