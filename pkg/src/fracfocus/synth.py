"""Synthetic focal stacks with exact ground-truth depth maps.

Scenes are height fields Z(x, y) over a centered grid: a sphere cap
(radius r, apex at z = r), a constant-height plane, or a ramp linear in y.
A textured version of the scene is imaged at each focal distance z_k by a
per-pixel gather with a normalized Gaussian point-spread function whose
width grows linearly with the defocus |z_k - Z(x, y)|.  Everything is
deterministic given the scene seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grids import DepthMap, FocalStack

__all__ = ["BlurSpec", "SceneSpec", "ground_truth", "render_stack"]

_SCENE_KINDS = ("sphere", "plane", "ramp")
_TEXTURE_KINDS = ("checker", "value-noise")


@dataclass(frozen=True)
class SceneSpec:
    """Geometry and texture of a synthetic scene on a centered x, y grid.

    ``radius`` applies to the sphere, ``height`` to the plane and
    ``ramp_lo``/``ramp_hi`` to the ramp (heights at the low and high y
    edge).  ``texture_wavelength`` is the dominant texture period in world
    units; it must stay resolvable (at least two grid spacings) when
    rendered.
    """

    kind: str = "sphere"
    radius: float = 1.0
    height: float = 0.5
    ramp_lo: float = 0.2
    ramp_hi: float = 0.8
    texture_wavelength: float = 0.075
    texture_kind: str = "value-noise"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in _SCENE_KINDS:
            raise ValueError(f"unknown scene kind {self.kind!r}, "
                             f"expected one of {_SCENE_KINDS}")
        if self.texture_kind not in _TEXTURE_KINDS:
            raise ValueError(f"unknown texture kind {self.texture_kind!r}, "
                             f"expected one of {_TEXTURE_KINDS}")
        if self.kind == "sphere" and not self.radius > 0:
            raise ValueError(f"sphere radius must be positive, got {self.radius}")
        if not self.texture_wavelength > 0:
            raise ValueError("texture wavelength must be positive, "
                             f"got {self.texture_wavelength}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")


@dataclass(frozen=True)
class BlurSpec:
    """Defocus model: Gaussian PSF with sigma = sigma0 * |z - Z| pixels.

    The PSF support is a square truncated at ceil(4 sigma) pixels, bounded
    by ``max_radius``, and renormalized; sigma = 0 copies the texture
    through exactly.
    """

    sigma0: float = 3.0
    psf: str = "gaussian"
    max_radius: int = 16

    def __post_init__(self) -> None:
        if not (math.isfinite(self.sigma0) and self.sigma0 >= 0):
            raise ValueError(f"sigma0 must be finite and >= 0, got {self.sigma0}")
        if self.psf != "gaussian":
            raise ValueError(f"unsupported PSF {self.psf!r}, only 'gaussian'")
        if self.max_radius < 1:
            raise ValueError(f"max_radius must be >= 1, got {self.max_radius}")


def _grid_axes(width: int, height: int, h: float,
               margin: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """World coordinates of a centered grid, optionally with a margin ring."""
    x = (np.arange(-margin, width + margin) - (width - 1) / 2.0) * h
    y = (np.arange(-margin, height + margin) - (height - 1) / 2.0) * h
    return x, y


def ground_truth(scene: SceneSpec, width: int, height: int,
                 h: float) -> DepthMap:
    """Exact height field of a scene sampled on the centered pixel grid.

    Sphere: Z = sqrt(max(0, r^2 - x^2 - y^2)), valid inside the silhouette
    (the clamped zero height outside is kept as the surface seen by the
    defocus model).  Plane and ramp are valid everywhere.
    """
    if width < 1 or height < 1 or h <= 0:
        raise ValueError("grid must have positive dimensions and spacing")
    x, y = _grid_axes(width, height, h)
    xx, yy = np.meshgrid(x, y)
    if scene.kind == "sphere":
        r2 = scene.radius ** 2 - xx ** 2 - yy ** 2
        values = np.sqrt(np.maximum(r2, 0.0))
        valid = r2 >= 0.0
    elif scene.kind == "plane":
        values = np.full((height, width), float(scene.height))
        valid = np.ones((height, width), dtype=bool)
    else:  # ramp
        span = y[-1] - y[0] if height > 1 else 1.0
        t = (yy - y[0]) / span
        values = scene.ramp_lo + (scene.ramp_hi - scene.ramp_lo) * t
        valid = np.ones((height, width), dtype=bool)
    return DepthMap(values=values, valid=valid, h=h)


# Number of plane waves in the value-noise superposition.  Two dozen
# random directions give a speckle pattern that is statistically isotropic
# without being expensive to evaluate.
_NOISE_WAVES = 24


def _texture(scene: SceneSpec, width: int, height: int, h: float,
             margin: int) -> np.ndarray:
    """Texture in [0, 1] on the padded grid (margin ring included).

    Checker: squares of side wavelength/2.  Value noise: a seeded sum of
    plane waves of the single spatial wavelength ``texture_wavelength``
    with random directions, phases and amplitudes.  Concentrating the
    spectrum on one wavelength ring keeps the texture band-limited and
    gives it a speckle-like amplitude that touches zero in isolated
    spots, so focus measures see strong texture almost everywhere plus a
    sparse set of genuinely weak pixels.  The value at a pixel depends
    only on its world coordinates and the seed, never on the grid or
    margin it is rendered into.
    """
    x, y = _grid_axes(width, height, h, margin)
    xx, yy = np.meshgrid(x, y)
    lam = scene.texture_wavelength
    if scene.texture_kind == "checker":
        cells = np.floor(2.0 * xx / lam) + np.floor(2.0 * yy / lam)
        return np.where(cells % 2 == 0, 1.0, 0.0)

    rng = np.random.default_rng(scene.seed)
    theta = rng.uniform(0.0, 2.0 * np.pi, _NOISE_WAVES)
    phase = rng.uniform(0.0, 2.0 * np.pi, _NOISE_WAVES)
    amp = rng.uniform(0.5, 1.0, _NOISE_WAVES)
    wavenumber = 2.0 * np.pi / lam
    carrier = np.zeros_like(xx)
    for j in range(_NOISE_WAVES):
        carrier += amp[j] * np.cos(
            wavenumber * (np.cos(theta[j]) * xx + np.sin(theta[j]) * yy)
            + phase[j])
    return 0.5 + 0.5 * carrier / amp.sum()


def _blur_uniform(tex: np.ndarray, margin: int, sigma: float,
                  radius: int) -> np.ndarray:
    """Gather with one Gaussian PSF shared by every output pixel."""
    height = tex.shape[0] - 2 * margin
    width = tex.shape[1] - 2 * margin
    num = np.zeros((height, width))
    den = 0.0
    inv = 1.0 / (2.0 * sigma * sigma)
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            w = math.exp(-(dx * dx + dy * dy) * inv)
            num += w * tex[margin + dy:margin + dy + height,
                           margin + dx:margin + dx + width]
            den += w
    return num / den


def _blur_varying(tex: np.ndarray, margin: int, sigma: np.ndarray,
                  radius: np.ndarray) -> np.ndarray:
    """Gather with a per-pixel Gaussian PSF of width sigma(x, y).

    Each output pixel sums the padded texture over the square of offsets
    max(|dx|, |dy|) <= radius(x, y) with weights exp(-(dx^2+dy^2)/(2 sigma^2)),
    then divides by its own weight sum.  Pixels with sigma = 0 keep only
    the center tap and copy the texture through exactly.
    """
    height, width = sigma.shape
    r_max = int(radius.max())
    safe = np.where(sigma > 0.0, sigma, 1.0)
    inv = np.where(sigma > 0.0, 1.0 / (2.0 * safe * safe), 0.0)
    reach = [radius >= m for m in range(r_max + 1)]
    gauss = {}  # exp(-s * inv) per squared offset s; many taps share one s
    num = np.zeros((height, width))
    den = np.zeros((height, width))
    for dy in range(-r_max, r_max + 1):
        for dx in range(-r_max, r_max + 1):
            s = dx * dx + dy * dy
            if s not in gauss:
                gauss[s] = np.exp(-s * inv)
            w = gauss[s] * reach[max(abs(dx), abs(dy))]
            num += w * tex[margin + dy:margin + dy + height,
                           margin + dx:margin + dx + width]
            den += w
    return num / den


def render_stack(scene: SceneSpec, blur: BlurSpec, width: int, height: int,
                 n_slides: int, z_min: float, z_max: float,
                 h: float) -> FocalStack:
    """Render a defocused slide sequence of a textured scene.

    Slide k focuses at z_k = z_min + k * (z_max - z_min)/(n_slides - 1);
    every pixel gathers the texture under a Gaussian PSF of width
    sigma0 * |z_k - Z(x, y)| pixels.  The texture is generated on a grid
    padded by the maximum PSF radius, so border pixels blur into real
    texture rather than into an extrapolation artifact.  Bit-identical for
    identical scene, blur and grid parameters.
    """
    if n_slides < 3:
        raise ValueError(f"need at least 3 slides, got {n_slides}")
    if not z_max > z_min:
        raise ValueError(f"need z_max > z_min, got [{z_min}, {z_max}]")
    if h <= 0 or width < 1 or height < 1:
        raise ValueError("grid must have positive dimensions and spacing")
    if scene.texture_wavelength < 2.0 * h:
        raise ValueError(
            f"texture wavelength {scene.texture_wavelength} not resolvable "
            f"at spacing {h} (needs >= 2 h)"
        )
    if scene.kind == "plane" and not z_min <= scene.height <= z_max:
        raise ValueError(
            f"plane height {scene.height} outside stack range [{z_min}, {z_max}]"
        )

    truth = ground_truth(scene, width, height, h).values
    max_defocus = float(np.max(np.maximum(np.abs(z_min - truth),
                                          np.abs(z_max - truth))))
    sigma_cap = blur.sigma0 * max_defocus
    margin = min(blur.max_radius, int(math.ceil(4.0 * sigma_cap)))
    tex = _texture(scene, width, height, h, margin)

    delta_z = (z_max - z_min) / (n_slides - 1)
    core = tex[margin:margin + height, margin:margin + width]
    slides = []
    for k in range(n_slides):
        z_k = z_min + k * delta_z
        sigma = blur.sigma0 * np.abs(z_k - truth)
        radius = np.minimum(np.ceil(4.0 * sigma), blur.max_radius).astype(int)
        if radius.max() == 0:
            slides.append(core.copy())
        elif sigma.min() == sigma.max():
            slides.append(_blur_uniform(tex, margin, float(sigma.flat[0]),
                                        int(radius.flat[0])))
        else:
            slides.append(_blur_varying(tex, margin, sigma, radius))
    return FocalStack(np.stack(slides), z_min=z_min, z_max=z_max, h=h)
