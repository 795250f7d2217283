from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..core.enums import KernelFamily
from ..core.errors import InputError
from .centers import CenterSet, GramMatrix
from .kernel_spec import KernelSpec

logger = logging.getLogger(__name__)


def _as_vector(x, name: str = "x") -> np.ndarray:
    vec = np.asarray(x, dtype=float)
    if vec.ndim == 2 and 1 in vec.shape:
        vec = vec.ravel()
    if vec.ndim != 1:
        raise InputError(f"{name} must be a vector, got shape {vec.shape}")
    return vec


def eval_kernel(k: KernelSpec, x, y) -> float:
    x, y = _as_vector(x), _as_vector(y, "y")
    if x.shape != y.shape:
        raise InputError(f"Kernel arguments differ in dimension: {x.size} vs {y.size}")
    return float(k.matrix(x[:, None], y[:, None])[0, 0])


def kernel_vector(k: KernelSpec, x, centers: CenterSet) -> np.ndarray:
    """k(x) with component i equal to K(x, x(i))."""
    x = _as_vector(x)
    if x.size != centers.n:
        raise InputError(f"x has dimension {x.size}, centers have dimension {centers.n}")
    return k.matrix(centers.centers, x[:, None])[:, 0]


def kernel_vectors(k: KernelSpec, points: np.ndarray, centers: CenterSet) -> np.ndarray:
    """Column-stacked k(x) for every column x of points; T x N."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[0] != centers.n:
        raise InputError(
            f"points have dimension {points.shape[0]}, centers have dimension {centers.n}"
        )
    return k.matrix(centers.centers, points)


def gram_matrix(k: KernelSpec, centers: CenterSet) -> GramMatrix:
    duplicates = centers.near_duplicates()
    if duplicates:
        logger.warning(
            "%d center pairs closer than 1e-10; the Gram matrix is (near) singular", duplicates
        )
    return GramMatrix(k.matrix(centers.centers, centers.centers))


def rkhs_norm_sq(alpha, G: GramMatrix) -> float:
    alpha = _as_vector(alpha, "alpha")
    if alpha.size != G.size:
        raise InputError(f"alpha has length {alpha.size}, Gram matrix is {G.size}x{G.size}")
    value = float(alpha @ G.entries @ alpha)
    floor = -1e-9 * float(alpha @ alpha) * max(abs(G.max_eig), abs(G.min_eig))
    if value < floor:
        logger.warning("RKHS quadratic form %.3e below rounding floor %.3e", value, floor)
    return max(value, 0.0)


@dataclass(frozen=True, eq=False)
class NonlinearMap:
    """k̂(x): the kernel vector with the linear term (d = 1) removed."""

    kernel: KernelSpec
    centers: CenterSet

    @property
    def size(self) -> int:
        return self.centers.size

    @property
    def drops_linear_term(self) -> bool:
        return self.kernel.family is KernelFamily.POLYNOMIAL_SUM and self.kernel.linear_coeff > 0

    def batch(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[0] != self.centers.n:
            raise InputError(
                f"points have dimension {points.shape[0]}, centers have dimension {self.centers.n}"
            )
        min_degree = 2 if self.drops_linear_term else 1
        return self.kernel.matrix(self.centers.centers, points, min_degree=min_degree)

    def __call__(self, x) -> np.ndarray:
        return self.batch(_as_vector(x)[:, None])[:, 0]


def linear_part(k: KernelSpec, A: np.ndarray, centers: CenterSet) -> tuple[np.ndarray, NonlinearMap]:
    """Split A k(x) = Ā x + Â k̂(x) with Â = A.

    Only the polynomial-sum family has a linear term to extract:
    Ā = c1 A X0^T. Otherwise Ā = 0 and k̂ = k.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape[1] != centers.size:
        raise InputError(f"A has {A.shape[1]} columns, expected {centers.size}")
    nonlinear = NonlinearMap(kernel=k, centers=centers)
    if nonlinear.drops_linear_term:
        Abar = k.linear_coeff * (A @ centers.centers.T)
    else:
        Abar = np.zeros((A.shape[0], centers.n))
    return Abar, nonlinear
