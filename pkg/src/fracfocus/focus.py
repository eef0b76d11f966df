"""Focus measures: the local modified Laplacian and its nonlocal extension.

The local measure at step q is the sum of absolute second differences at
stride q in x and y, scaled by 1/(q h)^2, zero on a border frame of width
q.  The nonlocal measure applies the 2D nonlocalization kernel to every
layer of the local measure and re-imposes the zero frame, so local and
nonlocal volumes share the same support and order 0 reduces bit-exactly to
the local measure.
"""

from __future__ import annotations

import math

import numpy as np

from .grids import FocalStack, FocusVolume, ScalarField
from .kernel2d import Kernel, apply_kernel, build_kernel

__all__ = [
    "local_focus_volume",
    "local_modified_laplacian",
    "nonlocal_focus_volume",
    "nonlocalize_volume",
    "nyquist_hint",
]


def local_modified_laplacian(slide: ScalarField, q: int) -> ScalarField:
    """Modified Laplacian |d2x| + |d2y| at stride q, zero on the q-frame.

    Interior pixels get |f[j, i+q] - 2 f[j, i] + f[j, i-q]| / (q h)^2 plus
    the same expression along rows; the frame of width q where the stencil
    would leave the grid is exactly zero.
    """
    if q < 1:
        raise ValueError(f"step q must be >= 1, got {q}")
    height, width = slide.values.shape
    if width <= 2 * q or height <= 2 * q:
        raise ValueError(
            f"slide of shape {slide.values.shape} too small for step q={q}"
        )
    f = slide.values
    scale = 1.0 / (q * slide.h) ** 2
    d2x = f[q:-q, 2 * q:] - 2.0 * f[q:-q, q:-q] + f[q:-q, :-2 * q]
    d2y = f[2 * q:, q:-q] - 2.0 * f[q:-q, q:-q] + f[:-2 * q, q:-q]
    out = np.zeros((height, width))
    out[q:-q, q:-q] = (np.abs(d2x) + np.abs(d2y)) * scale
    return ScalarField(out, slide.h)


def _zero_frame(values: np.ndarray, q: int) -> None:
    values[:q, :] = 0.0
    values[-q:, :] = 0.0
    values[:, :q] = 0.0
    values[:, -q:] = 0.0


def local_focus_volume(stack: FocalStack, q: int) -> FocusVolume:
    """Local modified-Laplacian focus measure for every slide of a stack."""
    layers = [local_modified_laplacian(stack.slide(k), q).values
              for k in range(stack.n_slides)]
    return FocusVolume(np.stack(layers), q=q, z_min=stack.z_min,
                       z_max=stack.z_max, h=stack.h)


def nonlocalize_volume(volume: FocusVolume, kernel: Kernel) -> FocusVolume:
    """Apply a nonlocalization kernel to every layer of a local focus volume.

    The zero frame of width q is re-imposed after the kernel pass so the
    nonlocal volume has exactly the support of the local one (mirror
    padding would otherwise smear measure into the masked frame).
    """
    if volume.alpha is not None:
        raise ValueError("volume has already been nonlocalized")
    layers = []
    for k in range(volume.n_slides):
        smeared = apply_kernel(kernel, volume.layer(k)).values
        _zero_frame(smeared, volume.q)
        layers.append(smeared)
    return FocusVolume(np.stack(layers), q=volume.q, z_min=volume.z_min,
                       z_max=volume.z_max, h=volume.h, alpha=kernel.alpha,
                       zeta=kernel.zeta)


def nonlocal_focus_volume(stack: FocalStack, q: int, alpha: float,
                          zeta: int) -> FocusVolume:
    """Nonlocal focus measure: local modified Laplacian, then kernel pass.

    Equivalent to ``nonlocalize_volume(local_focus_volume(stack, q),
    build_kernel(alpha, zeta))``; alpha = 0 reproduces the local volume bit
    for bit.
    """
    kernel = build_kernel(alpha, zeta)
    return nonlocalize_volume(local_focus_volume(stack, q), kernel)


def nyquist_hint(texture_wavelength: float, h: float) -> int:
    """Suggested stride q for a texture of the given dominant wavelength.

    Evaluates q = round(2 / (omega * h)) with omega = 1 / texture_wavelength
    (half-up rounding), clamped to at least 1.  Advisory only; no operation
    overrides a caller-supplied q with this value.
    """
    if texture_wavelength <= 0:
        raise ValueError(f"wavelength must be positive, got {texture_wavelength}")
    if h <= 0:
        raise ValueError(f"grid spacing must be positive, got {h}")
    omega = 1.0 / texture_wavelength
    return max(1, int(math.floor(2.0 / (omega * h) + 0.5)))
