"""Exact desk-scale simulation of ensemble factoring by multiple-quantum zero-point search."""

import logging

from .errors import (
    BadFactorization,
    ComputationError,
    DimensionMismatch,
    Exhausted,
    GridTooCoarse,
    MQFactorError,
    NoZeroFound,
    NotCoprime,
    PreconditionError,
    RetryNewY,
    TooLarge,
    UnsupportedNi,
)
from .factordrive import (
    FactorPolicy,
    FactorResult,
    ScanResult,
    classical_postprocess,
    factor,
    find_zero_points,
    scan_intensity,
)
from .hamiltonian import (
    approx_diagonalizer,
    eigensystem,
    hamiltonian_from_orbits,
    interaction_frame_series,
    split_hamiltonian,
)
from .modarith import (
    Modulus,
    OrbitTable,
    mod_inverse,
    mod_pow,
    multiplicative_order,
    orbit_decompose,
    parker_plenio_check,
)
from .mqspec import (
    CoherenceSpectrum,
    closed_form_I,
    closed_form_Iy,
    coherence_order,
    coherent_intensity,
    decompose_orders,
    lomso_expand,
    order_intensities,
    synthesize_signal,
    total_intensity,
    transition_census,
)
from .spinops import (
    SpinGeometry,
    StructuredState,
    antisymmetric_part,
    assemble,
    build_propagator,
    evolve,
    initial_state_general,
    initial_state_uniform,
)

__version__ = "0.1.0"

logging.getLogger(__name__).addHandler(logging.NullHandler())
