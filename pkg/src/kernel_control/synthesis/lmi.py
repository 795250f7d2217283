from __future__ import annotations

from dataclasses import dataclass, field

import cvxpy as cp
import numpy as np

from ..core.errors import InputError
from .problem import SynthesisProblem


@dataclass(frozen=True, eq=False)
class LmiBlock:
    """3x3 block matrix of the robust LMI with block sizes (n, n, Tbar)."""

    M: np.ndarray
    dims: tuple[int, int, int]
    min_eig: float = field(init=False)

    def __post_init__(self) -> None:
        M = np.asarray(self.M, dtype=float)
        if M.shape != (sum(self.dims),) * 2:
            raise InputError(f"LMI matrix has shape {M.shape}, block dims {self.dims}")
        M.setflags(write=False)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "min_eig", float(np.linalg.eigvalsh(M)[0]))

    def is_psd(self, margin: float = 0.0) -> bool:
        return self.min_eig >= margin

    def block(self, i: int, j: int) -> np.ndarray:
        offsets = np.cumsum((0,) + self.dims)
        return self.M[offsets[i] : offsets[i + 1], offsets[j] : offsets[j + 1]]


def _decision(p: SynthesisProblem, P, Y, eps) -> tuple[np.ndarray, np.ndarray, float]:
    P = np.atleast_2d(np.asarray(P, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if P.shape != (p.n, p.n) or Y.shape != (p.m, p.n):
        raise InputError(f"P {P.shape} and Y {Y.shape} must be ({p.n}, {p.n}) and ({p.m}, {p.n})")
    if not np.isscalar(eps) and np.size(eps) != 1:
        raise InputError(f"eps must be a scalar, got shape {np.shape(eps)}")
    return P, Y, float(np.asarray(eps).ravel()[0])


def assemble_lmi(p: SynthesisProblem, P, Y, eps) -> LmiBlock:
    """[[P - Q, G^T, H^T], [G, P - eps Delta^2, 0], [H, 0, eps I]] with G = Abar P + Xhat1 U0dag Y, H = U0dag Y."""
    P, Y, eps = _decision(p, P, Y, eps)
    G = p.Abar @ P + p.input_gain @ Y
    H = p.U0dag @ Y
    M = np.block(
        [
            [P - p.Q, G.T, H.T],
            [G, P - eps * (p.Delta @ p.Delta), np.zeros((p.n, p.Tbar))],
            [H, np.zeros((p.Tbar, p.n)), eps * np.eye(p.Tbar)],
        ]
    )
    return LmiBlock(M=0.5 * (M + M.T), dims=(p.n, p.n, p.Tbar))


def lmi_expression(p: SynthesisProblem, P: cp.Expression, Y: cp.Expression, eps: cp.Expression) -> cp.Expression:
    G = p.Abar @ P + p.input_gain @ Y
    H = p.U0dag @ Y
    M = cp.bmat(
        [
            [P - p.Q, G.T, H.T],
            [G, P - eps * (p.Delta @ p.Delta), np.zeros((p.n, p.Tbar))],
            [H, np.zeros((p.Tbar, p.n)), eps * np.eye(p.Tbar)],
        ]
    )
    return 0.5 * (M + M.T)


def schur_reduced_lmi(p: SynthesisProblem, P, Y, eps) -> np.ndarray:
    """The LMI with the third block row and column eliminated (eps > 0).

    [[P - Q - eps^-1 H^T H, G^T], [G, P - eps Delta^2]]
    """
    P, Y, eps = _decision(p, P, Y, eps)
    if eps <= 0:
        raise InputError(f"eps must be > 0 to eliminate the third block, got {eps}")
    G = p.Abar @ P + p.input_gain @ Y
    H = p.U0dag @ Y
    M = np.block(
        [
            [P - p.Q - (H.T @ H) / eps, G.T],
            [G, P - eps * (p.Delta @ p.Delta)],
        ]
    )
    return 0.5 * (M + M.T)


def spectral_epigraph(M: cp.Expression, t: cp.Expression) -> cp.Expression:
    """[[t I, M], [M^T, t I]] >= 0 iff |M|_2 <= t."""
    rows, cols = M.shape
    E = cp.bmat([[t * np.eye(rows), M], [M.T, t * np.eye(cols)]])
    return 0.5 * (E + E.T)
