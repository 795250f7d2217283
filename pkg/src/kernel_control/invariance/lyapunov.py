from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from ..core.errors import InputError


@dataclass(frozen=True, eq=False)
class LyapunovCert:
    """V(x) = x^T P^-1 x with sublevel set R_gamma = {V <= gamma}."""

    P: np.ndarray
    Q: np.ndarray
    gamma: float
    Pinv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        P = np.atleast_2d(np.asarray(self.P, dtype=float))
        Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        if P.shape != Q.shape or P.shape[0] != P.shape[1]:
            raise InputError(f"P {P.shape} and Q {Q.shape} must be square and of equal size")
        if not np.isfinite(self.gamma) or self.gamma <= 0:
            raise InputError(f"gamma must be > 0, got {self.gamma}")
        P = 0.5 * (P + P.T)
        try:
            factor = cho_factor(P, lower=True)
        except LinAlgError as exc:
            raise InputError("P must be symmetric positive definite") from exc
        Pinv = cho_solve(factor, np.eye(P.shape[0]))
        Pinv = 0.5 * (Pinv + Pinv.T)
        for name, value in (("P", P), ("Q", Q), ("Pinv", Pinv)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        object.__setattr__(self, "gamma", float(self.gamma))

    @property
    def n(self) -> int:
        return self.P.shape[0]

    def with_gamma(self, gamma: float) -> "LyapunovCert":
        return LyapunovCert(P=self.P, Q=self.Q, gamma=gamma)

    def bounding_box(self) -> tuple[tuple[float, float], ...]:
        """Smallest axis-aligned box around R_gamma: |x_i| <= sqrt(gamma P_ii)."""
        half = np.sqrt(self.gamma * np.diag(self.P))
        return tuple((-float(h), float(h)) for h in half)


def sample_sublevel_set(c: LyapunovCert, num_samples: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform samples from R_gamma = {x^T P^-1 x <= gamma}, column-stacked."""
    u = rng.standard_normal((c.n, num_samples))
    u /= np.linalg.norm(u, axis=0)
    u *= rng.random(num_samples) ** (1.0 / c.n)
    return np.sqrt(c.gamma) * (np.linalg.cholesky(c.P) @ u)


def lyapunov_values(c: LyapunovCert, points: np.ndarray) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] != c.n:
        raise InputError(f"points have dimension {pts.shape[0]}, expected {c.n}")
    return np.maximum(np.sum(pts * (c.Pinv @ pts), axis=0), 0.0)


def lyapunov_value(c: LyapunovCert, x) -> float:
    x = np.asarray(x, dtype=float).ravel()
    return float(lyapunov_values(c, x[:, None])[0])
