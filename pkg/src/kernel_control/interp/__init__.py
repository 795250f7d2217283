from .model import (
    DriftDataset,
    ErrorBound,
    InterpModel,
    cost_with_coefficients,
    delta,
    delta_batch,
    fit,
    power_function,
    power_function_batch,
    power_radicand_batch,
    predict,
    predict_batch,
    regularized_cost,
)

__all__ = [
    "DriftDataset",
    "ErrorBound",
    "InterpModel",
    "cost_with_coefficients",
    "delta",
    "delta_batch",
    "fit",
    "power_function",
    "power_function_batch",
    "power_radicand_batch",
    "predict",
    "predict_batch",
    "regularized_cost",
]
