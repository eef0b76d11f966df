"""Shared fixtures: rendered stacks at the standard evaluation geometry.

The full-size plane and sphere stacks are expensive enough (a few seconds
each) to render once per session. Render wall time is recorded so the
acceptance tests can count it against their runtime budgets.
"""

import time
from dataclasses import dataclass

import pytest

from fracfocus.grids import DepthMap, FocalStack
from fracfocus.synth import BlurSpec, SceneSpec, ground_truth, render_stack

FULL_SIZE = 256
FULL_SLIDES = 32
FULL_EXTENT = 1.2
FULL_H = 2.0 * FULL_EXTENT / (FULL_SIZE - 1)
FULL_WAVELENGTH = 0.075
FULL_SIGMA0 = 3.0


@dataclass(frozen=True)
class RenderedScene:
    """A stack plus its ground truth, the scene and blur settings that
    made it, and the seconds spent rendering (counted against acceptance
    runtime budgets)."""

    stack: FocalStack
    truth: DepthMap
    scene: SceneSpec
    blur: BlurSpec
    render_seconds: float


def _render(scene: SceneSpec, blur: BlurSpec, size: int, n_slides: int,
            h: float) -> RenderedScene:
    start = time.monotonic()
    stack = render_stack(
        scene,
        blur,
        width=size,
        height=size,
        n_slides=n_slides,
        z_min=0.0,
        z_max=1.0,
        h=h,
    )
    elapsed = time.monotonic() - start
    truth = ground_truth(scene, width=size, height=size, h=h)
    return RenderedScene(stack=stack, truth=truth, scene=scene, blur=blur,
                         render_seconds=elapsed)


@pytest.fixture(scope="session")
def plane_scene() -> RenderedScene:
    spec = SceneSpec(
        kind="plane",
        height=0.5,
        texture_wavelength=FULL_WAVELENGTH,
        texture_kind="value-noise",
        seed=0,
    )
    return _render(spec, BlurSpec(sigma0=FULL_SIGMA0), FULL_SIZE, FULL_SLIDES,
                   FULL_H)


@pytest.fixture(scope="session")
def sphere_scene() -> RenderedScene:
    spec = SceneSpec(
        kind="sphere",
        radius=1.0,
        texture_wavelength=FULL_WAVELENGTH,
        texture_kind="value-noise",
        seed=0,
    )
    return _render(spec, BlurSpec(sigma0=FULL_SIGMA0), FULL_SIZE, FULL_SLIDES,
                   FULL_H)


SMALL_SIZE = 48
SMALL_SLIDES = 9
SMALL_H = 2.0 * FULL_EXTENT / (SMALL_SIZE - 1)


@pytest.fixture(scope="session")
def small_plane() -> RenderedScene:
    """A quick plane scene for unit tests that only need plausible data."""
    spec = SceneSpec(
        kind="plane",
        height=0.5,
        texture_wavelength=0.3,
        texture_kind="value-noise",
        seed=11,
    )
    return _render(spec, BlurSpec(sigma0=2.0, max_radius=8), SMALL_SIZE,
                   SMALL_SLIDES, SMALL_H)
