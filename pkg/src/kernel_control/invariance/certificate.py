from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..core.enums import Verdict
from ..core.errors import InputError
from ..kernels import Box, as_box, box_within
from .lyapunov import LyapunovCert, lyapunov_values, sample_sublevel_set
from .residuals import ResidualEvaluator, decrease_bound_batch

logger = logging.getLogger(__name__)

DEFAULT_RESOLUTION = 201
ORIGIN_ATOL = 1e-12
GRID_BLOWUP_DIM = 4
REFINE_RESOLUTION = 5
REFINE_DEPTH = 3
REFINE_MAX_CELLS = 4096


@dataclass(frozen=True)
class GridSpec:
    box: Box
    resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self) -> None:
        object.__setattr__(self, "box", as_box(self.box))
        if int(self.resolution) < 2:
            raise InputError(f"Grid resolution must be >= 2, got {self.resolution}")
        if any(hi <= lo for lo, hi in self.box):
            raise InputError(f"Grid box {self.box} has an empty axis")

    @classmethod
    def covering(cls, c: LyapunovCert, resolution: int = DEFAULT_RESOLUTION) -> "GridSpec":
        return cls(box=c.bounding_box(), resolution=resolution)

    @property
    def n(self) -> int:
        return len(self.box)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.resolution,) * self.n

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple((hi - lo) / (self.resolution - 1) for lo, hi in self.box)

    def points(self) -> np.ndarray:
        axes = [np.linspace(lo, hi, self.resolution) for lo, hi in self.box]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.vstack([m.ravel() for m in mesh])


@dataclass(frozen=True, eq=False)
class GridEvaluation:
    grid: GridSpec | None
    points: np.ndarray
    V: np.ndarray
    decrease: np.ndarray
    gamma: float

    @property
    def in_R(self) -> np.ndarray:
        return self.V <= self.gamma

    @property
    def in_X(self) -> np.ndarray:
        return self.decrease <= 0.0

    @property
    def invariance_margin(self) -> np.ndarray:
        """V + l + g - gamma."""
        return self.V + self.decrease - self.gamma


@dataclass(frozen=True, eq=False)
class PiCertificate:
    cert: LyapunovCert
    verdict: Verdict
    Z_empty: bool
    worst_margin: float
    grid: GridSpec | None
    points_in_R: int = 0
    points_in_Z: int = 0
    marginal_points: int = 0
    refined_cells: int = 0
    covers_R: bool = True
    within_domain: bool = True
    probabilistic: bool = False
    evaluation: GridEvaluation | None = field(default=None, repr=False)

    def payload(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "gamma": self.cert.gamma,
            "Z_empty": self.Z_empty,
            "worst_margin": self.worst_margin,
            "points_in_R": self.points_in_R,
            "points_in_Z": self.points_in_Z,
            "marginal_points": self.marginal_points,
            "refined_cells": self.refined_cells,
            "covers_R": self.covers_R,
            "within_domain": self.within_domain,
            "probabilistic": self.probabilistic,
            "grid": None
            if self.grid is None
            else {"box": [list(b) for b in self.grid.box], "resolution": self.grid.resolution},
        }


def _evaluate(e: ResidualEvaluator, c: LyapunovCert, points: np.ndarray, grid: GridSpec | None) -> GridEvaluation:
    return GridEvaluation(
        grid=grid,
        points=points,
        V=lyapunov_values(c, points),
        decrease=decrease_bound_batch(e, points),
        gamma=c.gamma,
    )


def evaluate_grid(e: ResidualEvaluator, c: LyapunovCert, g: GridSpec) -> GridEvaluation:
    if g.n != c.n:
        raise InputError(f"Grid dimension {g.n} differs from the state dimension {c.n}")
    if g.n >= GRID_BLOWUP_DIM:
        logger.warning(
            "Grid over %d dimensions has %d points; consider sample_pi instead",
            g.n,
            g.resolution**g.n,
        )
    return _evaluate(e, c, g.points(), g)


def _neighbor_variation(values: np.ndarray, shape: tuple[int, ...], batch: bool = False) -> np.ndarray:
    """Largest absolute difference between each grid value and its axis neighbours.

    With batch=True the leading axis of shape indexes independent grids.
    """
    arr = values.reshape(shape)
    out = np.zeros(shape)
    for axis in range(1 if batch else 0, len(shape)):
        step = np.abs(np.diff(arr, axis=axis))
        head = [slice(None)] * len(shape)
        tail = [slice(None)] * len(shape)
        head[axis] = slice(0, -1)
        tail[axis] = slice(1, None)
        out[tuple(head)] = np.maximum(out[tuple(head)], step)
        out[tuple(tail)] = np.maximum(out[tuple(tail)], step)
    return out.ravel()


def _at_origin(points: np.ndarray) -> np.ndarray:
    return np.max(np.abs(points), axis=0) <= ORIGIN_ATOL


def _invariance_slack(ev: GridEvaluation) -> np.ndarray:
    # a point of R_gamma is fine if it lies in X or satisfies V + l + g <= gamma
    return np.minimum(ev.decrease, ev.invariance_margin)


def _classify(ev: GridEvaluation, shape: tuple[int, ...], batch: bool = False) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(in_Z, violated, marginal) masks for the samples of one or more regular grids.

    A sample stands for the half cell around it; the variation over that half
    cell is estimated as half the largest jump to a neighbouring sample.
    """
    origin = _at_origin(ev.points)
    in_Z = ev.in_R & ~ev.in_X & ~origin
    violated = in_Z & (ev.invariance_margin > 0.0)
    half_phi = 0.5 * _neighbor_variation(ev.decrease, shape, batch)
    half_h = 0.5 * _neighbor_variation(ev.V + ev.decrease, shape, batch)
    half_V = 0.5 * _neighbor_variation(ev.V, shape, batch)
    marginal = (
        (ev.V - half_V <= ev.gamma)
        & (ev.decrease + half_phi > 0.0)
        & (ev.invariance_margin + half_h > 0.0)
        & ~origin
        & ~violated
    )
    return in_Z, violated, marginal


@dataclass(frozen=True)
class Refinement:
    violated: bool
    unresolved: int
    refined_cells: int


def refine_marginal(
    e: ResidualEvaluator, c: LyapunovCert, centers: np.ndarray, spacing: tuple[float, ...]
) -> Refinement:
    """Re-sample the half cell around each marginal point on a finer grid.

    Repeats on the points that stay marginal, up to REFINE_DEPTH levels or
    REFINE_MAX_CELLS cells per level.
    """
    n = centers.shape[0]
    refined = 0
    for _ in range(REFINE_DEPTH):
        count = centers.shape[1]
        if count == 0 or count > REFINE_MAX_CELLS:
            break
        axes = [np.linspace(-0.5 * h, 0.5 * h, REFINE_RESOLUTION) for h in spacing]
        offsets = np.vstack([m.ravel() for m in np.meshgrid(*axes, indexing="ij")])
        points = (centers[:, :, None] + offsets[:, None, :]).reshape(n, -1)
        ev = _evaluate(e, c, points, None)
        _, violated, marginal = _classify(ev, (count,) + (REFINE_RESOLUTION,) * n, batch=True)
        refined += count
        if np.any(violated):
            return Refinement(True, 0, refined)
        centers = points[:, marginal]
        spacing = tuple(h / (REFINE_RESOLUTION - 1) for h in spacing)
    return Refinement(False, centers.shape[1], refined)


def certify_pi(
    e: ResidualEvaluator, c: LyapunovCert, g: GridSpec, *, domain_box: Box | None = None
) -> PiCertificate:
    """Grid check that R_gamma is positively invariant.

    certified: no point of R_gamma violates the condition, the grid covers
    R_gamma, and no grid cell stays close enough to the condition's boundary
    after local refinement that a violation could hide between samples.
    """
    ev = evaluate_grid(e, c, g)
    in_R = ev.in_R
    in_Z, violated_mask, marginal = _classify(ev, g.shape)
    violated = bool(np.any(violated_mask))
    refinement = Refinement(False, 0, 0)
    if not violated and np.any(marginal):
        refinement = refine_marginal(e, c, ev.points[:, marginal], g.spacing)
        violated = refinement.violated

    covers = box_within(c.bounding_box(), g.box)
    within = domain_box is None or box_within(g.box, as_box(domain_box))
    slack = _invariance_slack(ev)
    worst = float(np.max(slack[in_R])) if np.any(in_R) else float("nan")

    if violated:
        verdict = Verdict.VIOLATED
    elif refinement.unresolved or not covers or not within or not np.any(in_R):
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.CERTIFIED

    if not covers:
        logger.warning("Grid box %s does not cover R_gamma (bounding box %s)", g.box, c.bounding_box())
    if not within:
        logger.warning("Grid box %s leaves the domain %s", g.box, domain_box)
    logger.debug(
        "certify_pi gamma=%g: %d points in R, %d in Z, %d marginal (%d refined cells, %d unresolved), "
        "worst margin %.3e -> %s",
        c.gamma,
        int(np.sum(in_R)),
        int(np.sum(in_Z)),
        int(np.sum(marginal)),
        refinement.refined_cells,
        refinement.unresolved,
        worst,
        verdict.value,
    )
    return PiCertificate(
        cert=c,
        verdict=verdict,
        Z_empty=not bool(np.any(in_Z)),
        worst_margin=worst,
        grid=g,
        points_in_R=int(np.sum(in_R)),
        points_in_Z=int(np.sum(in_Z)),
        marginal_points=refinement.unresolved,
        refined_cells=refinement.refined_cells,
        covers_R=covers,
        within_domain=within,
        evaluation=ev,
    )


def sample_pi(e: ResidualEvaluator, c: LyapunovCert, num_samples: int, seed: int = 0) -> PiCertificate:
    """Monte-Carlo check inside R_gamma. Never certifies."""
    if num_samples < 1:
        raise InputError(f"num_samples must be >= 1, got {num_samples}")
    points = sample_sublevel_set(c, num_samples, np.random.default_rng(seed))
    ev = _evaluate(e, c, points, None)
    in_Z = ~ev.in_X & ~_at_origin(points)
    slack = _invariance_slack(ev)
    violated = bool(np.any(in_Z & (ev.invariance_margin > 0.0)))
    return PiCertificate(
        cert=c,
        verdict=Verdict.VIOLATED if violated else Verdict.INCONCLUSIVE,
        Z_empty=not bool(np.any(in_Z)),
        worst_margin=float(np.max(slack)),
        grid=None,
        points_in_R=num_samples,
        points_in_Z=int(np.sum(in_Z)),
        probabilistic=True,
        evaluation=ev,
    )


@dataclass(frozen=True)
class GammaSearch:
    gamma: float | None
    certificate: PiCertificate | None
    tried: tuple[tuple[float, Verdict], ...]


def find_largest_gamma(
    e: ResidualEvaluator,
    c: LyapunovCert,
    gamma_range: tuple[float, float],
    *,
    resolution: int = DEFAULT_RESOLUTION,
    domain_box: Box | None = None,
    iterations: int = 20,
    rel_tol: float = 1e-3,
) -> GammaSearch:
    """Bisection for the largest gamma in gamma_range that certify_pi accepts."""
    lo, hi = (float(v) for v in gamma_range)
    if not 0 < lo < hi:
        raise InputError(f"gamma range must satisfy 0 < lo < hi, got {gamma_range}")
    tried: list[tuple[float, Verdict]] = []

    def attempt(gamma: float) -> PiCertificate:
        cert = c.with_gamma(gamma)
        result = certify_pi(e, cert, GridSpec.covering(cert, resolution), domain_box=domain_box)
        tried.append((gamma, result.verdict))
        return result

    top = attempt(hi)
    if top.verdict is Verdict.CERTIFIED:
        return GammaSearch(hi, top, tuple(tried))
    best = attempt(lo)
    if best.verdict is not Verdict.CERTIFIED:
        return GammaSearch(None, None, tuple(tried))
    for _ in range(iterations):
        if hi - lo <= rel_tol * lo:
            break
        mid = 0.5 * (lo + hi)
        result = attempt(mid)
        if result.verdict is Verdict.CERTIFIED:
            lo, best = mid, result
        else:
            hi = mid
    return GammaSearch(lo, best, tuple(tried))


def grid_csv(ev: GridEvaluation) -> str:
    n = ev.points.shape[0]
    header = [f"x{i + 1}" for i in range(n)] + ["V", "l_plus_g", "in_X", "in_Rgamma"]
    lines = [",".join(header)]
    in_X, in_R = ev.in_X, ev.in_R
    for k in range(ev.points.shape[1]):
        coords = [f"{v:.10g}" for v in ev.points[:, k]]
        lines.append(
            ",".join(coords + [f"{ev.V[k]:.10g}", f"{ev.decrease[k]:.10g}", str(int(in_X[k])), str(int(in_R[k]))])
        )
    return "\n".join(lines) + "\n"
