"""Monotone and convex restrictions of sampled functions, and their box dimensions."""
from ._backend import BACKEND
from .dimension import BoxCountProfile, DimensionEstimate, box_counts, estimate_dimension, min_cover_count
from .divided_diff import DividedDifferenceTable, Sign, build_table, is_n_convex, largest_homogeneous_subset
from .experiments import ExperimentConfig, ExperimentReport, run_experiment
from .generators import (FbmParams, SawtoothMode, SawtoothParams, cantor_prefix, fbm_path, integrated_fbm,
                         perturb_within, quadratic, sawtooth)
from .grid import (FunctionMeta, GridSubset, SampledFunction, antiderivative, finite_diff_derivative,
                   holder_seminorm, restrict_values)
from .restrictions import (ConvexMode, Direction, HullMode, MinorantResult, convex_minorant, convex_to_monotone,
                           longest_convex_subset, longest_monotone_subset, record_set,
                           three_point_concavity_witness)

__version__ = "0.1.0"
