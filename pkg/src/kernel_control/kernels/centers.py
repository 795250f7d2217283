from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist

from ..core.errors import InputError

logger = logging.getLogger(__name__)

DUPLICATE_CENTER_DISTANCE = 1e-10

Box = tuple[tuple[float, float], ...]


def as_box(bounds) -> Box:
    box = tuple((float(lo), float(hi)) for lo, hi in bounds)
    for lo, hi in box:
        if not lo <= hi:
            raise InputError(f"Empty interval [{lo}, {hi}] in box {box}")
    return box


def box_contains(box: Box, points: np.ndarray, atol: float = 0.0) -> np.ndarray:
    """Column-wise membership of points (n x N) in an axis-aligned box."""
    points = np.atleast_2d(points)
    lo = np.array([b[0] for b in box])[:, None]
    hi = np.array([b[1] for b in box])[:, None]
    return np.all((points >= lo - atol) & (points <= hi + atol), axis=0)


def box_within(inner: Box, outer: Box) -> bool:
    return all(o[0] <= i[0] and i[1] <= o[1] for i, o in zip(inner, outer))


@dataclass(frozen=True, eq=False)
class CenterSet:
    centers: np.ndarray
    domain_box: Box | None = None

    def __post_init__(self) -> None:
        centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        if centers.ndim != 2 or centers.shape[1] < 1:
            raise InputError(f"CenterSet needs an n x T matrix with T >= 1, got {centers.shape}")
        centers.setflags(write=False)
        object.__setattr__(self, "centers", centers)
        if self.domain_box is not None:
            box = as_box(self.domain_box)
            if len(box) != centers.shape[0]:
                raise InputError(
                    f"domain_box has {len(box)} intervals for {centers.shape[0]}-dimensional centers"
                )
            object.__setattr__(self, "domain_box", box)
            outside = np.flatnonzero(~box_contains(box, centers, atol=1e-12))
            if outside.size:
                raise InputError(f"Centers {outside.tolist()} lie outside the domain box {box}")

    @property
    def n(self) -> int:
        return self.centers.shape[0]

    @property
    def size(self) -> int:
        return self.centers.shape[1]

    def near_duplicates(self, tol: float = DUPLICATE_CENTER_DISTANCE) -> int:
        if self.size < 2:
            return 0
        return int(np.count_nonzero(pdist(self.centers.T) < tol))


@dataclass(frozen=True, eq=False)
class GramMatrix:
    entries: np.ndarray
    min_eig: float = field(init=False)
    max_eig: float = field(init=False)

    def __post_init__(self) -> None:
        entries = np.atleast_2d(np.asarray(self.entries, dtype=float))
        if entries.shape[0] != entries.shape[1]:
            raise InputError(f"Gram matrix must be square, got {entries.shape}")
        scale = max(1.0, float(np.max(np.abs(entries))) if entries.size else 1.0)
        asym = float(np.max(np.abs(entries - entries.T))) if entries.size else 0.0
        if asym > 1e-12 * scale:
            logger.warning("Gram matrix asymmetry %.3e exceeds tolerance, symmetrizing", asym)
        entries = 0.5 * (entries + entries.T)
        entries.setflags(write=False)
        eigs = np.linalg.eigvalsh(entries)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "min_eig", float(eigs[0]))
        object.__setattr__(self, "max_eig", float(eigs[-1]))
        if self.min_eig < -1e-9 * max(self.max_eig, 0.0):
            logger.warning(
                "Gram matrix min eigenvalue %.3e below -1e-9 * max eigenvalue %.3e",
                self.min_eig,
                self.max_eig,
            )

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @property
    def is_positive_definite(self) -> bool:
        return self.min_eig > 1e-12 * max(self.max_eig, 1.0)
