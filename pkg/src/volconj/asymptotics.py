"""Growth-rate experiments, the E threshold angle, the equal-angle B bound and the B region."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import BracketError, DomainError, FitError
from .geometry import E_LIMIT, ConeAngles, is_hyperbolic, vol_cone, vol_cone_B_array, vol_cone_E_array
from .invariant import colored_jones, dominance_ratio, weights_for_angles
from .specfun import delta_fn, lobachevsky


@dataclass(frozen=True)
class GrowthRecord:
    r: int
    weights: tuple
    branch: str
    growth: float
    target: float
    error: float  # growth - target
    dominance: float  # |sum over I1| / |sum over the last set|


def growth_rate(r: int, angles: ConeAngles, branch: str = "minus") -> GrowthRecord:
    if r < 5:
        raise DomainError(f"r must be >= 5, got {r}")
    if not is_hyperbolic(angles):
        raise DomainError(f"angles {angles.values} outside the hyperbolic domain of {angles.knot}")
    wc = weights_for_angles(r, angles, branch)
    inv = colored_jones(r, wc.weights)
    target = vol_cone(angles).volume
    g = inv.growth
    return GrowthRecord(r, wc.weights.js, branch, g, target, g - target, dominance_ratio(inv))


@dataclass(frozen=True)
class ConvergenceStudy:
    records: tuple
    coefficients: tuple  # (limit, a, b) in growth ~ limit + a log r / r + b / r
    extrapolated: float
    target: float
    distance: float  # |extrapolated - target|
    residuals: tuple
    residual_norm: float


def fit_log_model(rs: Sequence[int], values: Sequence[float]):
    """Least-squares fit of values ~ c0 + c1 log r / r + c2 / r."""
    rs = [int(r) for r in rs]
    if len(set(rs)) != len(rs):
        raise FitError(f"duplicate r values in {rs}")
    if len(rs) < 3:
        raise FitError(f"need at least 3 distinct r values, got {len(rs)}")
    r = np.asarray(rs, dtype=float)
    design = np.column_stack([np.ones_like(r), np.log(r) / r, 1.0 / r])
    coef, _, rank, _ = np.linalg.lstsq(design, np.asarray(values, dtype=float), rcond=None)
    if rank < 3:
        raise FitError("singular design matrix")
    res = np.asarray(values) - design @ coef
    return coef, res


def convergence_study(r_list: Sequence[int], angles: ConeAngles, branch: str = "minus") -> ConvergenceStudy:
    rs = sorted(int(r) for r in r_list)
    if len(set(rs)) != len(rs) or len(rs) < 3:
        raise FitError(f"need at least 3 distinct odd r values, got {list(r_list)}")
    recs = tuple(growth_rate(r, angles, branch) for r in rs)
    coef, res = fit_log_model(rs, [g.growth for g in recs])
    target = recs[0].target
    lim = float(coef[0])
    return ConvergenceStudy(
        recs, tuple(float(c) for c in coef), lim, target, abs(lim - target),
        tuple(float(x) for x in res), float(np.linalg.norm(res)),
    )


# ---------------------------------------------------------------------------
# thresholds


@dataclass(frozen=True)
class ThresholdResult:
    value: float
    bracket: tuple
    bracket_width: float
    scan_points: int


def _bisect_first_crossing(g: Callable, lo: float, hi: float, scan: int, tol: float) -> ThresholdResult:
    xs = np.linspace(lo, hi, scan)
    vals = np.asarray(g(xs))
    if not vals[0] > 0:
        raise BracketError(f"function not positive at the left end {lo}")
    neg = np.nonzero(vals < 0)[0]
    if len(neg) == 0:
        raise BracketError(f"no sign change on [{lo}, {hi}] with {scan} points")
    i = int(neg[0])
    if np.any(vals[i:] >= 0):
        raise BracketError("more than one sign change on the scan grid")
    a, b = float(xs[i - 1]), float(xs[i])
    while b - a > tol:
        m = 0.5 * (a + b)
        if float(g(m)) > 0:
            a = m
        else:
            b = m
    return ThresholdResult(0.5 * (a + b), (a, b), b - a, scan)


def alpha0_gap(alpha):
    """Vol(E; a) - 2 Im Phi_E(a/2): positive below the threshold."""
    a = np.asarray(alpha, dtype=float)
    # Im Phi_E(a/2) = -L(a) - L(0) = -L(a)
    out = vol_cone_E_array(a) + 2.0 * np.asarray(lobachevsky(a))
    return out.item() if out.ndim == 0 else out


def threshold_alpha0(scan: int = 64, tol: float = 2.5e-10) -> ThresholdResult:
    """Largest E angle with 2 Im Phi_E(a/2) < Vol(M_a(E))."""
    return _bisect_first_crossing(alpha0_gap, 0.0, E_LIMIT * (1 - 1e-9), scan, tol)


def im_phi_B_array(alphas, x) -> np.ndarray:
    """Im Phi_B on the real axis for an (N, 3) stack of angle triples."""
    a = np.asarray(alphas, dtype=float)
    x = np.asarray(x, dtype=float)
    out = 2.0 * delta_fn(math.pi / 2, x) + delta_fn(0.0, x)
    return out - np.sum(delta_fn(a / 2.0, x[..., None]), axis=-1)


def region_condition(alphas) -> np.ndarray:
    """2 Im Phi_B(a_1 / 2) - Vol for an (N, 3) stack; negative inside the region."""
    a = np.sort(np.asarray(alphas, dtype=float), axis=-1)
    return 2.0 * im_phi_B_array(a, a[..., 0] / 2.0) - vol_cone_B_array(a)


def bbound_gap(t):
    t = np.asarray(t, dtype=float)
    trip = np.stack([t, t, t], axis=-1)
    out = -region_condition(trip)
    return out.item() if out.ndim == 0 else out


def equal_angle_bound_B(scan: int = 64, tol: float = 2.5e-10) -> ThresholdResult:
    """Largest t with (t, t, t) in the B region."""
    return _bisect_first_crossing(bbound_gap, 0.0, math.pi * (1 - 1e-9), scan, tol)


# ---------------------------------------------------------------------------
# region of B angles


@dataclass(frozen=True)
class RegionSample:
    angles: tuple
    condition: float
    in_omega0: bool


@dataclass(frozen=True)
class RegionGrid:
    axis: np.ndarray  # cell-centred sample points, shared by all three axes
    condition: np.ndarray  # shape (n, n, n)

    @property
    def flags(self) -> np.ndarray:
        return self.condition < 0

    def samples(self):
        n = len(self.axis)
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    c = float(self.condition[i, j, k])
                    yield RegionSample(
                        (float(self.axis[i]), float(self.axis[j]), float(self.axis[k])), c, c < 0
                    )

    def boundary(self):
        """Vertices and faces of the zero level of the condition (marching cubes)."""
        from skimage.measure import marching_cubes

        c = self.condition
        if not (np.nanmin(c) < 0 < np.nanmax(c)):
            return np.empty((0, 3)), np.empty((0, 3), dtype=int)
        step = float(self.axis[1] - self.axis[0]) if len(self.axis) > 1 else 1.0
        verts, faces, _, _ = marching_cubes(c, level=0.0, spacing=(step, step, step))
        return verts + self.axis[0], faces


def omega0_grid(lo: float, hi: float, steps: int) -> RegionGrid:
    """Condition values on a cell-centred steps^3 grid over [lo, hi]^3."""
    if not (0.0 <= lo < hi <= math.pi) or steps < 1:
        raise DomainError(f"grid [{lo}, {hi}] with {steps} steps not inside [0, pi]")
    h = (hi - lo) / steps
    axis = lo + (np.arange(steps) + 0.5) * h
    g1, g2, g3 = np.meshgrid(axis, axis, axis, indexing="ij")
    trip = np.stack([g1.ravel(), g2.ravel(), g3.ravel()], axis=-1)
    cond = region_condition(trip).reshape(steps, steps, steps)
    return RegionGrid(axis, cond)


def omega0_classify(lo: float, hi: float, steps: int) -> list:
    return list(omega0_grid(lo, hi, steps).samples())


def classify_point(a1: float, a2: float, a3: float) -> RegionSample:
    ang = ConeAngles.B(a1, a2, a3)
    if not is_hyperbolic(ang):
        raise DomainError(f"angles {ang.values} outside [0, pi)")
    c = float(region_condition(np.array([ang.values]))[0])
    return RegionSample(ang.values, c, c < 0)
