from __future__ import annotations

import itertools
from math import factorial, prod

import numpy as np

from ..core.enums import KernelFamily
from ..core.errors import InputError
from .centers import CenterSet
from .kernel_spec import KernelSpec

Exponent = tuple[int, ...]


def monomial_exponents(n: int, degrees) -> list[Exponent]:
    """Exponent tuples of total degree in `degrees`, degree by degree."""
    out: list[Exponent] = []
    for d in degrees:
        combos = [
            tuple(c)
            for c in itertools.product(range(d + 1), repeat=n)
            if sum(c) == d
        ]
        out.extend(sorted(combos, reverse=True))
    return out


def multinomial(beta: Exponent) -> int:
    return factorial(sum(beta)) // prod(factorial(b) for b in beta)


def kernel_degrees(k: KernelSpec) -> list[int]:
    if k.family is not KernelFamily.POLYNOMIAL_SUM:
        raise InputError("Monomial expansions exist only for polynomial-sum kernels")
    return [d for d, c in enumerate(k.coeffs, start=1) if c > 0]


def monomial_matrix(k: KernelSpec, centers: CenterSet, exponents: list[Exponent]) -> np.ndarray:
    """M_k with k(x) = M_k M(x); row i holds c_d * multinomial(beta) * x_i^beta."""
    X = centers.centers
    cols = []
    for beta in exponents:
        d = sum(beta)
        c = k.coeffs[d - 1] if 1 <= d <= k.degree else 0.0
        powers = np.prod(X ** np.asarray(beta, dtype=float)[:, None], axis=0)
        cols.append(c * multinomial(beta) * powers)
    return np.column_stack(cols)


def monomial_norm_sq(k: KernelSpec, coeffs: dict[Exponent, float]) -> float:
    """Closed-form RKHS squared norm of sum_beta coef_beta x^beta.

    In the feature space of a polynomial-sum kernel the monomial x^beta has
    weight c_|beta| * multinomial(beta), so its coefficient costs
    coef^2 / (c_|beta| * multinomial(beta)).
    """
    total = 0.0
    for beta, coef in coeffs.items():
        if coef == 0.0:
            continue
        d = sum(beta)
        c = k.coeffs[d - 1] if 1 <= d <= k.degree else 0.0
        if c <= 0.0:
            raise InputError(f"Monomial {beta} is not in the RKHS of {k.kernel_id}")
        total += coef * coef / (c * multinomial(beta))
    return total
