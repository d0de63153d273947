"""Numerical verification of Lp Brunn-Minkowski type inequalities on grids."""

__version__ = "0.1.0"

from .densities import Density, body_measure, classify_concavity, measure_of_set
from .functionals import EpsSchedule, FSpec, mixed_volume_VpF, residual_MpF, surface_area
from .geometry import SampledSet, SupportBody, firey_combine, hausdorff_distance, lyz_combine
from .grid import Grid, GridFunction
from .harness import CheckParams, CheckReport, Fixture, TheoremId, check_inequality, estimate_gz_constant, sweep
from .means import MeanParams, combination_weights, generalized_mean
from .revolution import ball_body, level_body, multiple_volume, revolution_volume
from .supconv import ConvolutionParams, oplus_ps, sup_convolution

__all__ = [
    "CheckParams", "CheckReport", "ConvolutionParams", "Density", "EpsSchedule", "FSpec", "Fixture",
    "Grid", "GridFunction", "MeanParams", "SampledSet", "SupportBody", "TheoremId", "ball_body",
    "body_measure", "check_inequality", "classify_concavity", "combination_weights",
    "estimate_gz_constant", "firey_combine", "generalized_mean", "hausdorff_distance", "level_body",
    "lyz_combine", "measure_of_set", "mixed_volume_VpF", "multiple_volume", "oplus_ps",
    "residual_MpF", "revolution_volume", "sup_convolution", "surface_area", "sweep",
]
