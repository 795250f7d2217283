from .centers import Box, CenterSet, GramMatrix, as_box, box_contains, box_within
from .kernel_spec import KernelSpec
from .monomials import monomial_exponents, monomial_matrix, monomial_norm_sq
from .operations import (
    NonlinearMap,
    eval_kernel,
    gram_matrix,
    kernel_vector,
    kernel_vectors,
    linear_part,
    rkhs_norm_sq,
)

__all__ = [
    "Box",
    "CenterSet",
    "GramMatrix",
    "KernelSpec",
    "NonlinearMap",
    "as_box",
    "box_contains",
    "box_within",
    "eval_kernel",
    "gram_matrix",
    "kernel_vector",
    "kernel_vectors",
    "linear_part",
    "monomial_exponents",
    "monomial_matrix",
    "monomial_norm_sq",
    "rkhs_norm_sq",
]
