"""Deterministic field families for tests, benchmarks, and the CLI.

Smooth fields are finite trigonometric sums whose coefficients depend only on
the seed, never on the grid, so the same field can be sampled at several
resolutions for refinement studies.  Random fields are plain seeded normals.
"""

from __future__ import annotations

import numpy as np

from .fields import tangency_project
from .geometry import Grid, TargetManifold

__all__ = [
    "smooth_scalar_field",
    "smooth_map_field",
    "smooth_vector_spinor",
    "smooth_gravitino",
    "equator_map",
    "perturbed_equator_map",
    "random_vector_spinor",
    "random_gravitino",
]


def smooth_scalar_field(grid: Grid, seed: int, amplitude: float = 1.0,
                        modes: int = 2) -> np.ndarray:
    """Low-frequency trigonometric field with unit-normalized random coefficients."""
    rng = np.random.default_rng(seed)
    x, y = grid.coords()
    out = np.zeros(grid.shape)
    total = 0.0
    for k in range(-modes, modes + 1):
        for l in range(-modes, modes + 1):
            if k == 0 and l == 0:
                continue
            c = rng.standard_normal()
            theta = rng.uniform(0.0, 2.0 * np.pi)
            out += c * np.cos(2.0 * np.pi * (k * x + l * y) + theta)
            total += c * c
    return amplitude * out / np.sqrt(total)


def _smooth_stack(grid, seed, count, amplitude, modes):
    return np.stack(
        [smooth_scalar_field(grid, seed + 101 * i, amplitude, modes) for i in range(count)],
        axis=-1,
    )


def smooth_map_field(grid: Grid, target: TargetManifold, seed: int,
                     amplitude: float = 0.4, modes: int = 2) -> np.ndarray:
    """Projection of a smooth ambient field anchored away from the origin."""
    K = target.ambient_dim
    base = np.zeros(grid.shape + (K,))
    base[..., 0] = 1.0
    bump = _smooth_stack(grid, seed, K, amplitude, modes)
    return target.project(base + bump)


def smooth_vector_spinor(grid: Grid, phi: np.ndarray, target: TargetManifold,
                         seed: int, amplitude: float = 0.5, modes: int = 2) -> np.ndarray:
    """Smooth tangent vector-spinor along phi."""
    K = target.ambient_dim
    raw = _smooth_stack(grid, seed, 4 * K, amplitude, modes).reshape(grid.shape + (K, 4))
    return tangency_project(raw, phi, target)


def smooth_gravitino(grid: Grid, seed: int, amplitude: float = 0.5,
                     modes: int = 2) -> np.ndarray:
    """Smooth unconstrained gravitino field."""
    return _smooth_stack(grid, seed, 8, amplitude, modes).reshape(grid.shape + (2, 4))


def equator_map(grid: Grid, ambient_dim: int = 3) -> np.ndarray:
    """The closed geodesic (cos 2 pi x, sin 2 pi x, 0, ...) into the unit sphere.

    An exact critical point of the discrete Dirichlet term: the wide Laplacian
    acts on it with eigenvalue -(sin(2 pi h1)/h1)^2, which equals minus its
    discrete energy density.
    """
    x, _ = grid.coords()
    out = np.zeros(grid.shape + (ambient_dim,))
    out[..., 0] = np.cos(2.0 * np.pi * x)
    out[..., 1] = np.sin(2.0 * np.pi * x)
    return out


def perturbed_equator_map(grid: Grid, amplitude: float = 0.05, seed: int = 0,
                          ambient_dim: int = 3) -> np.ndarray:
    """Equator map with an in-plane smooth phase perturbation.

    The perturbation stays inside the equatorial circle, so the projected flow
    reduces to the winding-one heat flow and converges back to a rotated
    equator (transverse perturbations would instead slide off toward a point
    map, great circles being unstable harmonic maps).
    """
    x, _ = grid.coords()
    phase = 2.0 * np.pi * x + smooth_scalar_field(grid, seed, amplitude)
    out = np.zeros(grid.shape + (ambient_dim,))
    out[..., 0] = np.cos(phase)
    out[..., 1] = np.sin(phase)
    return out


def random_vector_spinor(grid: Grid, phi: np.ndarray, target: TargetManifold,
                         rng: np.random.Generator, amplitude: float = 1.0) -> np.ndarray:
    raw = amplitude * rng.standard_normal(grid.shape + (target.ambient_dim, 4))
    return tangency_project(raw, phi, target)


def random_gravitino(grid: Grid, rng: np.random.Generator,
                     amplitude: float = 1.0) -> np.ndarray:
    return amplitude * rng.standard_normal(grid.shape + (2, 4))
