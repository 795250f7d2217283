from __future__ import annotations

import numpy as np

from ..core.errors import InputError
from ..interp import ErrorBound, delta_batch


def delta_growth_ratio(b: ErrorBound, radii, num_directions: int = 16, seed: int = 0) -> list[tuple[float, float]]:
    """Largest sampled delta(x) / |x| on the sphere of each radius.

    A ratio that keeps growing with the radius signals that delta(x)/|x| does
    not vanish at infinity for this kernel.
    """
    radii = [float(r) for r in radii]
    if any(r <= 0 for r in radii):
        raise InputError(f"radii must be > 0, got {radii}")
    n = b.model.n
    if n == 2:
        angles = np.linspace(0.0, 2.0 * np.pi, num_directions, endpoint=False)
        directions = np.vstack([np.cos(angles), np.sin(angles)])
    else:
        directions = np.random.default_rng(seed).standard_normal((n, num_directions))
        directions /= np.linalg.norm(directions, axis=0)
    return [(r, float(np.max(delta_batch(b, r * directions)) / r)) for r in radii]
