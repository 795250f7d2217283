from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core.errors import InputError
from ..interp import ErrorBound, delta_batch
from ..kernels import NonlinearMap
from ..synthesis import SynthesisProblem, SynthesisResult, closed_loop_matrices
from .lyapunov import LyapunovCert


@dataclass(frozen=True, eq=False)
class ResidualEvaluator:
    """Terms of the decrease bound V(x+) - V(x) <= l(x) + g(x, delta(x)).

    With v = 2 Psi0 x + Xi0 k̂, p = 2 U0dag Kbar x + U0dag Khat k̂, q = U0dag Khat k̂,
    a = Psi0 x + Xi0 k̂ and w = U0dag (Kbar x + Khat k̂):

        l  = -x^T P^-1 Q P^-1 x + l1 + l2 + l3 + l4
        l1 = v^T P^-1 Xi0 k̂
        l2 = |Delta| |P^-1 v| |q|
        l3 = |Delta| |p| |P^-1 Xi0 k̂|
        l4 = |Delta|^2 |P^-1| |p| |q|
        g  = (r1 + r2) delta + r3 delta^2
        r1 = 2 |P^-1 a|,  r2 = 2 |Delta| |P^-1| |w|,  r3 = |P^-1|
    """

    Psi0: np.ndarray
    Xi0: np.ndarray
    U0dag: np.ndarray
    Kbar: np.ndarray
    Khat: np.ndarray
    delta_norm: float
    Pinv: np.ndarray
    Q: np.ndarray
    bound: ErrorBound | None
    nonlinear: NonlinearMap

    @property
    def n(self) -> int:
        return self.Psi0.shape[0]

    @property
    def Pinv_norm(self) -> float:
        return float(np.linalg.norm(self.Pinv, 2))

    def _points(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[0] != self.n:
            raise InputError(f"points have dimension {pts.shape[0]}, expected {self.n}")
        return pts

    def delta_values(self, points) -> np.ndarray:
        pts = self._points(points)
        if self.bound is None:
            return np.zeros(pts.shape[1])
        return delta_batch(self.bound, pts)

    def l_terms(self, points) -> dict[str, np.ndarray]:
        X = self._points(points)
        kh = self.nonlinear.batch(X)
        xi_k = self.Xi0 @ kh
        Pinv_x = self.Pinv @ X
        v = 2.0 * self.Psi0 @ X + xi_k
        q = self.U0dag @ (self.Khat @ kh)
        p = 2.0 * self.U0dag @ (self.Kbar @ X) + q
        q_norm = np.linalg.norm(q, axis=0)
        p_norm = np.linalg.norm(p, axis=0)
        Pinv_xi_k = self.Pinv @ xi_k
        return {
            "quadratic": -np.sum(Pinv_x * (self.Q @ Pinv_x), axis=0),
            "l1": np.sum(v * Pinv_xi_k, axis=0),
            "l2": self.delta_norm * np.linalg.norm(self.Pinv @ v, axis=0) * q_norm,
            "l3": self.delta_norm * p_norm * np.linalg.norm(Pinv_xi_k, axis=0),
            "l4": self.delta_norm**2 * self.Pinv_norm * p_norm * q_norm,
        }

    def r_terms(self, points) -> dict[str, np.ndarray]:
        X = self._points(points)
        kh = self.nonlinear.batch(X)
        a = self.Psi0 @ X + self.Xi0 @ kh
        w = self.U0dag @ (self.Kbar @ X + self.Khat @ kh)
        return {
            "r1": 2.0 * np.linalg.norm(self.Pinv @ a, axis=0),
            "r2": 2.0 * self.delta_norm * self.Pinv_norm * np.linalg.norm(w, axis=0),
            "r3": np.full(X.shape[1], self.Pinv_norm),
        }


def residual_evaluator(
    p: SynthesisProblem, r: SynthesisResult, c: LyapunovCert, bound: ErrorBound | None
) -> ResidualEvaluator:
    if p.nonlinear is None:
        raise InputError("The synthesis problem carries no nonlinear feature map")
    if c.n != p.n:
        raise InputError(f"Lyapunov certificate has dimension {c.n}, the problem {p.n}")
    Psi0, Xi0 = closed_loop_matrices(r, p)
    return ResidualEvaluator(
        Psi0=Psi0,
        Xi0=Xi0,
        U0dag=p.U0dag,
        Kbar=r.Kbar,
        Khat=r.Khat,
        delta_norm=p.delta_norm,
        Pinv=c.Pinv,
        Q=c.Q,
        bound=bound,
        nonlinear=p.nonlinear,
    )


def residual_l_batch(e: ResidualEvaluator, points) -> np.ndarray:
    return sum(e.l_terms(points).values())


def residual_g_batch(e: ResidualEvaluator, points, delta_x) -> np.ndarray:
    delta_x = np.asarray(delta_x, dtype=float)
    if np.any(delta_x < 0):
        raise InputError("delta values must be >= 0")
    r = e.r_terms(points)
    return (r["r1"] + r["r2"]) * delta_x + r["r3"] * delta_x**2


def decrease_bound_batch(e: ResidualEvaluator, points) -> np.ndarray:
    pts = e._points(points)
    return residual_l_batch(e, pts) + residual_g_batch(e, pts, e.delta_values(pts))


def _column(x) -> np.ndarray:
    return np.asarray(x, dtype=float).ravel()[:, None]


def residual_l(e: ResidualEvaluator, x) -> float:
    return float(residual_l_batch(e, _column(x))[0])


def residual_g(e: ResidualEvaluator, x, delta_x: float) -> float:
    return float(residual_g_batch(e, _column(x), np.array([delta_x]))[0])


def decrease_bound(e: ResidualEvaluator, x) -> float:
    return float(decrease_bound_batch(e, _column(x))[0])


def membership_X(e: ResidualEvaluator, x) -> bool:
    return decrease_bound(e, x) <= 0.0
