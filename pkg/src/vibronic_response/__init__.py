"""Vibrational and vibronic response functions of displaced-oscillator models."""

__version__ = "0.1.0"

from .model import (
    BRA,
    KET,
    Interaction,
    ManifoldRequiredError,
    Mode,
    ModelError,
    Pathway,
    PathwayError,
    VibronicModel,
    electronic_prefactor,
    enumerate_third_order,
    generic_electronic_prefactor,
    third_order_pathway,
)
from .coherent import LabeledCoherentState, evolve, kinematic_response, run_pathway, response_from_states
from .third_order import coefficients, full_response3, h_of_z, r_v3
from .general import (
    DSLError,
    ExponentForm,
    ExponentTerm,
    build_exponent,
    evaluate,
    multimode_response,
    parse_pathway,
    preset_pathway,
    term_table,
)
from .spectral import Axis, coefficient, peak_amplitude, reconstruct, spectrum_2d
from .thermal import (
    LevelCoupledBath,
    OhmicDensity,
    TabulatedDensity,
    delta_phase,
    lineshape_g,
    thermal_response,
)
from .relaxation import decay_product, f_factor, relaxed_r_v3
from .fock import TruncationError, brute_force_response, propagator
from .config import ConfigError, load_config
