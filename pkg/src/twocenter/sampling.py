"""Reproducible phase-space sampling.

All random sweeps in the package draw from a counter-based Philox
generator keyed by a 64-bit seed, so fixture values are bit-reproducible
across platforms and process counts.
"""

from __future__ import annotations

import numpy as np

from .dynamics import Problem, center_distances
from .errors import InvalidInputError


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator (Philox) for a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=np.uint64(seed)))


def sample_phase_points(
    prob: Problem,
    n: int,
    rng: np.random.Generator,
    q_radius: float = 5.0,
    p_radius: float = 3.0,
    min_center_distance: float = 0.2,
) -> tuple[np.ndarray, np.ndarray]:
    """Draw n valid phase points, uniform in position/velocity balls.

    Positions are rejection-sampled from the cube into the ball of radius
    ``q_radius`` and kept only when farther than ``min_center_distance``
    from both centers; velocities fill the ball of radius ``p_radius``.
    Returns arrays of shape (n, 3).
    """
    if n < 1:
        raise InvalidInputError(f"sample count must be >= 1, got {n}")
    qs = np.empty((0, 3))
    while qs.shape[0] < n:
        batch = rng.uniform(-q_radius, q_radius, size=(2 * n + 16, 3))
        inside = np.sum(batch * batch, axis=-1) <= q_radius * q_radius
        batch = batch[inside]
        d_minus, d_plus = center_distances(batch, prob)
        keep = (d_minus > min_center_distance) & (d_plus > min_center_distance)
        qs = np.concatenate([qs, batch[keep]], axis=0)
    qs = qs[:n]

    ps = np.empty((0, 3))
    while ps.shape[0] < n:
        batch = rng.uniform(-p_radius, p_radius, size=(2 * n + 16, 3))
        inside = np.sum(batch * batch, axis=-1) <= p_radius * p_radius
        ps = np.concatenate([ps, batch[inside]], axis=0)
    return qs, ps[:n]
