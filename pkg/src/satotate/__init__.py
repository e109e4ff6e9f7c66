"""Frobenius-angle statistics of elliptic curves over Q and effective Sato-Tate checks."""

from .curves import (CurveQ, TraceRecord, TraceTable, build_trace_table, cm_check,
                     frobenius_angle, minimal_model, quadratic_twist, reduction_type,
                     trace_of_frobenius)
from .distinguish import find_mod_l, find_opposite_sign, find_unequal, isogeny_screen
from .equidist import (bound_shape_fit, character_prime_sum, discrepancy_report,
                       distinguish_params, joint_discrepancy_report, joint_params, li,
                       single_params, window_prime_sum)
from .harmonics import (CharacterExpansion, fourier_to_character, st_measure_character,
                        st_measure_interval, su2_character)
from .io import parse_curve, read_trace_table, write_trace_table
from .kernel import (KernelParams, evaluate_D, even_window_coefficients, fourier_coefficient,
                     truncation_tail_bound, validate_params)

__version__ = "0.1.0"
