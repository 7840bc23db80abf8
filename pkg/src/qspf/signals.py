"""Synthetic diffusion signals for validating the transform pipeline.

Multi-tensor mixtures give ground-truth attenuations with known analytic
form; random coefficient draws give signals exactly inside the transform's
model space; Rician noise approximates magnitude MR data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .multishell import SpfCoefficients, staircase_index
from .radial import BConvention

__all__ = [
    "TensorComponent",
    "two_tensor_crossing",
    "multi_tensor_eval",
    "random_staircase_signal",
    "add_rician_noise",
]


@dataclass(frozen=True)
class TensorComponent:
    """One Gaussian compartment: a diffusion tensor and its volume fraction.

    tensor is 3x3 symmetric positive-definite in mm^2/s.
    """

    tensor: np.ndarray
    fraction: float

    def __post_init__(self):
        tensor = np.asarray(self.tensor, dtype=float)
        if tensor.shape != (3, 3):
            raise ValueError(f"diffusion tensor must be 3x3, got shape {tensor.shape}")
        if not np.allclose(tensor, tensor.T, rtol=0, atol=1e-12 * max(1.0, np.abs(tensor).max())):
            raise ValueError("diffusion tensor must be symmetric")
        if np.linalg.eigvalsh(tensor).min() <= 0:
            raise ValueError("diffusion tensor must be positive-definite")
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError(f"volume fraction must lie in [0, 1], got {self.fraction}")
        object.__setattr__(self, "tensor", tensor)


def _axis_aligned_tensor(eigenvalues, axis) -> np.ndarray:
    """Tensor with the given eigenvalues, largest along the given axis."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    helper = np.array([1.0, 0.0, 0.0]) if abs(axis[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e2 = np.cross(axis, helper)
    e2 /= np.linalg.norm(e2)
    e3 = np.cross(axis, e2)
    frame = np.stack([axis, e2, e3], axis=1)
    return frame @ np.diag(np.asarray(eigenvalues, dtype=float)) @ frame.T


def two_tensor_crossing(
    angle_deg: float = 90.0,
    eigenvalues=(1.7e-3, 3e-4, 3e-4),
    fractions=(0.5, 0.5),
) -> list:
    """Two equal-shape fibers crossing in the x-y plane.

    The first fiber runs along x; the second is rotated by angle_deg about
    z. Default eigenvalues are typical white-matter values in mm^2/s.
    """
    angle = np.deg2rad(angle_deg)
    first = _axis_aligned_tensor(eigenvalues, [1.0, 0.0, 0.0])
    second = _axis_aligned_tensor(eigenvalues, [np.cos(angle), np.sin(angle), 0.0])
    return [
        TensorComponent(first, fractions[0]),
        TensorComponent(second, fractions[1]),
    ]


def multi_tensor_eval(mixture, b, directions):
    """Normalized attenuation of a Gaussian mixture, E = sum_j f_j e^{-b u'D_j u}.

    b is in s/mm^2 and must be non-negative; directions must be unit
    vectors. Scalars and arrays broadcast the same way everywhere else in
    the package: one b with many directions, matched arrays, or scalars.
    """
    mixture = list(mixture)
    if not mixture:
        raise ValueError("mixture must contain at least one component")
    total = sum(c.fraction for c in mixture)
    if abs(total - 1.0) > 1e-8:
        raise ValueError(f"volume fractions must sum to 1, got {total}")
    b = np.asarray(b, dtype=float)
    if np.any(b < 0):
        raise ValueError("b-values must be non-negative")
    directions = np.asarray(directions, dtype=float)
    scalar = directions.ndim == 1 and b.ndim == 0
    dirs = np.atleast_2d(directions)
    if dirs.ndim != 2 or dirs.shape[1] != 3:
        raise ValueError(f"directions must have 3 components, got shape {directions.shape}")
    if np.any(np.abs(np.linalg.norm(dirs, axis=1) - 1.0) > 1e-6):
        raise ValueError("directions must be unit vectors")
    out = np.zeros(len(dirs))
    for comp in mixture:
        exponent = np.einsum("pi,ij,pj->p", dirs, comp.tensor, dirs)
        out += comp.fraction * np.exp(-b * exponent)
    return float(out[0]) if scalar else out


def random_staircase_signal(
    seed: int,
    bandlimits,
    n_shells: int,
    zeta: float,
    decay: float = 0.0,
    convention: BConvention = BConvention(),
) -> SpfCoefficients:
    """Reproducible random coefficients inside the transform model space.

    Coefficient magnitudes are damped by exp(-decay * l) and obey the
    conjugation constraint of real-valued signals, c_{n,l,-m} =
    (-1)^m conj(c_{n,l,m}), so the synthesized samples are real.
    """
    if decay < 0:
        raise ValueError(f"decay must be non-negative, got {decay}")
    bandlimits = tuple(int(L) for L in bandlimits)
    if len(bandlimits) != n_shells:
        raise ValueError(f"{n_shells} shells need {n_shells} band limits")
    index = staircase_index(bandlimits)
    rng = np.random.default_rng(seed)
    coeffs = SpfCoefficients.zeros(index, zeta, convention)
    for n, l, m in index.entries:
        if m < 0:
            continue
        damp = np.exp(-decay * l)
        if m == 0:
            coeffs.set(n, l, 0, damp * rng.standard_normal())
        else:
            value = damp * (rng.standard_normal() + 1j * rng.standard_normal())
            coeffs.set(n, l, m, value)
            coeffs.set(n, l, -m, (-1.0) ** m * np.conj(value))
    return coeffs


def add_rician_noise(values, sigma: float, seed: int):
    """Magnitude of the signal after complex Gaussian noise.

    Returns |v + eta_1 + i eta_2| with independent eta ~ N(0, sigma^2).
    sigma = 0 reduces to |v|.
    """
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    values = np.asarray(values, dtype=float)
    rng = np.random.default_rng(seed)
    real = values + sigma * rng.standard_normal(values.shape)
    imag = sigma * rng.standard_normal(values.shape)
    return np.hypot(real, imag)
