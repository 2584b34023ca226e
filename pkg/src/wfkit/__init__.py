"""Numerical wavefront sets.

Fourier-side and Radon-side estimators for sampled fields, a catalog of
distributions with closed-form wavefront sets, conic-set calculus (unions,
fiber sums, product condition, pull-backs) and bounds from phase functions.
"""

from .catalog import CATALOG_IDS, exact_wf, from_id, sample
from .conic import (ExactSet, SampledSet, Tolerance, Verdict, hormander_check,
                    product_wf_bound, pullback_wf)
from .core import Grid, SampledField, Window, centered_grid, make_grid
from .errors import MalformedInput, ParameterError, WindowClipped
from .kernels import BACKEND
from .radon import estimate_wf_pm, fourier_slice
from .spectral import EstimatorParams, dft, estimate_wf, localized_spectrum

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CATALOG_IDS", "EstimatorParams", "ExactSet", "Grid", "MalformedInput",
    "ParameterError", "SampledField", "SampledSet", "Tolerance", "Verdict", "Window",
    "WindowClipped", "centered_grid", "dft", "estimate_wf", "estimate_wf_pm", "exact_wf",
    "fourier_slice", "from_id", "hormander_check", "localized_spectrum", "make_grid",
    "product_wf_bound", "pullback_wf", "sample",
]
