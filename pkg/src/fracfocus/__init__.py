"""Depth-from-focus reconstruction with a fractional-order focus measure.

The pipeline: render or load a focal stack, compute the modified-Laplacian
focus measure per slide (locally, or smeared by a fractional-order
nonlocalization kernel), then recover per-pixel depth from the focus peak
with sub-slice parabolic refinement.  One-dimensional regularized
fractional operators, the 2D kernel construction, synthetic scene
generation and error evaluation are exposed as separate modules and
re-exported here.
"""

from .depth import PeakFit, parabolic_peak, recover_depth
from .evaluate import (ComparisonTable, EmptyMaskError, ErrorReport,
                       axis_profile, comparison_table, rms_error_percent)
from .focus import (local_focus_volume, local_modified_laplacian,
                    nonlocal_focus_volume, nonlocalize_volume, nyquist_hint)
from .frac1d import (Function1D, QuadratureError, QuadratureSpec,
                     regularized_derivative, regularized_integral,
                     riesz_second_derivative)
from .grids import DepthMap, FocalStack, FocusVolume, ScalarField
from .io import (StackFormatError, read_depth_csv, read_field_csv, read_pgm,
                 read_stack_dir, write_depth_csv, write_field_csv, write_pgm,
                 write_stack_dir)
from .kernel2d import Kernel, apply_kernel, build_kernel, kernel_frequency_response
from .synth import BlurSpec, SceneSpec, ground_truth, render_stack

__version__ = "0.1.0"

__all__ = [
    "BlurSpec",
    "ComparisonTable",
    "DepthMap",
    "EmptyMaskError",
    "ErrorReport",
    "FocalStack",
    "FocusVolume",
    "Function1D",
    "Kernel",
    "PeakFit",
    "QuadratureError",
    "QuadratureSpec",
    "ScalarField",
    "SceneSpec",
    "StackFormatError",
    "apply_kernel",
    "axis_profile",
    "build_kernel",
    "comparison_table",
    "ground_truth",
    "kernel_frequency_response",
    "local_focus_volume",
    "local_modified_laplacian",
    "nonlocal_focus_volume",
    "nonlocalize_volume",
    "nyquist_hint",
    "parabolic_peak",
    "read_depth_csv",
    "read_field_csv",
    "read_pgm",
    "read_stack_dir",
    "recover_depth",
    "regularized_derivative",
    "regularized_integral",
    "render_stack",
    "riesz_second_derivative",
    "rms_error_percent",
    "write_depth_csv",
    "write_field_csv",
    "write_pgm",
    "write_stack_dir",
    "__version__",
]
