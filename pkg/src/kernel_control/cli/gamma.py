from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np
from scipy.linalg import lstsq

from ..core.errors import InputError
from ..interp import InterpModel
from ..kernels import monomial_exponents, monomial_matrix, monomial_norm_sq, rkhs_norm_sq
from ..kernels.monomials import kernel_degrees

logger = logging.getLogger(__name__)

DEFAULT_OVERAPPROXIMATION = 1.3


@dataclass(frozen=True, eq=False)
class GammaDerivation:
    """Per-component alpha_i K alpha_i^T, its square root, and a suggested Gamma.

    The quadratic form is the squared RKHS norm; both readings are kept.
    """

    alphas: np.ndarray
    norm_sq: np.ndarray
    norm: np.ndarray
    closed_form_norm_sq: np.ndarray
    suggested: np.ndarray
    factor: float
    rank: int
    num_monomials: int

    def covers(self, gamma) -> dict[str, bool]:
        """Whether gamma over-approximates by the factor under each reading."""
        gamma = np.asarray(gamma, dtype=float)
        return {
            "norm": bool(np.all(gamma >= self.factor * self.norm - 1e-12)),
            "norm_sq": bool(np.all(gamma >= self.factor * self.norm_sq - 1e-12)),
        }

    def payload(self) -> dict[str, Any]:
        return {
            "norm_sq": self.norm_sq.tolist(),
            "norm": self.norm.tolist(),
            "closed_form_norm_sq": self.closed_form_norm_sq.tolist(),
            "suggested": self.suggested.tolist(),
            "factor": self.factor,
            "rank": self.rank,
            "num_monomials": self.num_monomials,
        }


def derive_gamma_from_monomials(
    f_coeffs: Sequence[Mapping[tuple[int, ...], float]],
    m: InterpModel,
    factor: float = DEFAULT_OVERAPPROXIMATION,
) -> GammaDerivation:
    """Write each drift component c_i in the monomial basis, solve c_i = alpha_i M_k and
    return alpha_i K alpha_i^T with Gamma_i = factor * sqrt(alpha_i K alpha_i^T).
    """
    if len(f_coeffs) != m.n:
        raise InputError(f"Got {len(f_coeffs)} components for an n={m.n} model")
    exponents = monomial_exponents(m.centers.n, kernel_degrees(m.kernel))
    index = {beta: i for i, beta in enumerate(exponents)}
    Mk = monomial_matrix(m.kernel, m.centers, exponents)
    rank = int(np.linalg.matrix_rank(Mk))
    if rank < len(exponents):
        raise InputError(
            f"Monomial-to-kernel matrix has rank {rank} < {len(exponents)} monomials; "
            "collect more samples or spread them over the state box"
        )

    C = np.zeros((m.n, len(exponents)))
    for i, coeffs in enumerate(f_coeffs):
        for beta, coef in coeffs.items():
            beta = tuple(int(b) for b in beta)
            if beta not in index:
                raise InputError(f"Monomial {beta} is not spanned by {m.kernel.kernel_id}")
            C[i, index[beta]] = float(coef)

    alphas = lstsq(Mk.T, C.T)[0].T
    misfit = float(np.max(np.abs(alphas @ Mk - C))) if C.size else 0.0
    if misfit > 1e-8 * max(1.0, float(np.max(np.abs(C)))):
        logger.warning("Monomial coefficients reproduced only to %.3e", misfit)
    norm_sq = np.array([rkhs_norm_sq(a, m.gram) for a in alphas])
    closed = np.array([monomial_norm_sq(m.kernel, dict(c)) for c in f_coeffs])
    norm = np.sqrt(norm_sq)
    return GammaDerivation(
        alphas=alphas,
        norm_sq=norm_sq,
        norm=norm,
        closed_form_norm_sq=closed,
        suggested=factor * norm,
        factor=float(factor),
        rank=rank,
        num_monomials=len(exponents),
    )
