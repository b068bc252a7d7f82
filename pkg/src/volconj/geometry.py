"""Volumes of hyperbolic cone manifolds along E and B, and their domains."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .specfun import delta_fn, lobachevsky

E_LIMIT = 2.0 * math.pi / 3.0
B_LIMIT = math.pi


@dataclass(frozen=True)
class ConeAngles:
    """Cone angle(s): one for the figure-eight knot, a sorted triple for B.

    ``permutation[i]`` is the input position of the i-th sorted angle.
    """

    knot: str
    values: tuple
    permutation: tuple = ()

    @classmethod
    def of(cls, knot: str, *alphas: float) -> "ConeAngles":
        knot = knot.upper()
        if knot not in ("E", "B"):
            raise DomainError(f"knot must be 'E' or 'B', got {knot!r}")
        vals = [float(a) for a in alphas]
        if knot == "E" and len(vals) != 1:
            raise DomainError(f"E takes one cone angle, got {len(vals)}")
        if knot == "B" and len(vals) != 3:
            raise DomainError(f"B takes three cone angles, got {len(vals)}")
        if not all(math.isfinite(a) for a in vals):
            raise DomainError(f"non-finite cone angle in {vals}")
        order = tuple(sorted(range(len(vals)), key=lambda i: vals[i]))
        return cls(knot, tuple(vals[i] for i in order), order)

    @classmethod
    def E(cls, alpha: float) -> "ConeAngles":
        return cls.of("E", alpha)

    @classmethod
    def B(cls, a1: float, a2: float, a3: float) -> "ConeAngles":
        return cls.of("B", a1, a2, a3)

    @property
    def smallest(self) -> float:
        return self.values[0]

    @property
    def hyperbolic(self) -> bool:
        return is_hyperbolic(self)


def is_hyperbolic(angles: ConeAngles) -> bool:
    if angles.knot == "E":
        return 0.0 <= angles.values[0] < E_LIMIT
    return all(0.0 <= a < B_LIMIT for a in angles.values)


@dataclass(frozen=True)
class VolumeResult:
    volume: float
    theta: float  # principal parameter
    terms: dict = field(default_factory=dict)


def theta_E(alpha):
    """1/2 arccos(cos alpha - 1/2)."""
    return 0.5 * np.arccos(np.cos(alpha) - 0.5)


def tangent_root_A(alphas) -> np.ndarray:
    """Positive root T of T^4 - (S + 1) T^2 - P = 0 with N_i = tan(alpha_i / 2).

    S is the sum and P the product of the N_i^2.  Broadcasts over a leading
    axis: ``alphas`` has shape (..., 3).
    """
    a = np.asarray(alphas, dtype=float)
    n2 = np.tan(a / 2.0) ** 2
    s1 = np.sum(n2, axis=-1) + 1.0
    p = np.prod(n2, axis=-1)
    # larger root of U^2 - s1 U - p = 0, both terms nonnegative so no cancellation
    u = 0.5 * (s1 + np.sqrt(s1 * s1 + 4.0 * p))
    return np.sqrt(u)


def theta_B(alphas):
    return np.arctan(tangent_root_A(alphas))


def _check_E(alpha):
    a = np.asarray(alpha, dtype=float)
    if np.any(~np.isfinite(a)) or np.any(a < 0) or np.any(a >= E_LIMIT):
        raise DomainError(f"E cone angle must lie in [0, 2pi/3), got {alpha!r}")
    return a


def _check_B(alphas):
    a = np.asarray(alphas, dtype=float)
    if a.shape[-1] != 3:
        raise DomainError("B needs three cone angles")
    if np.any(~np.isfinite(a)) or np.any(a < 0) or np.any(a >= B_LIMIT):
        raise DomainError(f"B cone angles must lie in [0, pi), got {alphas!r}")
    return a


def vol_cone_E_array(alpha) -> np.ndarray:
    a = _check_E(alpha)
    th = theta_E(a)
    return 2.0 * (lobachevsky(th + a / 2) + lobachevsky(th - a / 2))


def vol_cone_B_array(alphas) -> np.ndarray:
    a = _check_B(alphas)
    th = theta_B(a)
    tot = np.sum(delta_fn(a / 2.0, th[..., None]), axis=-1)
    return 2.0 * (tot - 2.0 * delta_fn(math.pi / 2, th) - delta_fn(0.0, th))


def vol_cone_E(alpha: float) -> VolumeResult:
    if isinstance(alpha, ConeAngles):
        alpha = alpha.values[0]
    a = float(_check_E(alpha))
    th = float(theta_E(a))
    t1 = 2.0 * lobachevsky(th + a / 2)
    t2 = 2.0 * lobachevsky(th - a / 2)
    return VolumeResult(t1 + t2, th, {"2L(theta+a/2)": t1, "2L(theta-a/2)": t2})


def vol_cone_B(*alphas) -> VolumeResult:
    if len(alphas) == 1 and isinstance(alphas[0], ConeAngles):
        alphas = alphas[0].values
    elif len(alphas) == 1:
        alphas = tuple(alphas[0])
    a = _check_B([float(x) for x in alphas])
    a = np.sort(a)
    th = float(theta_B(a))
    terms = {f"2D(a{i + 1}/2,theta)": 2.0 * delta_fn(a[i] / 2, th) for i in range(3)}
    terms["-4D(pi/2,theta)"] = -4.0 * delta_fn(math.pi / 2, th)
    terms["-2D(0,theta)"] = -2.0 * delta_fn(0.0, th)
    return VolumeResult(math.fsum(terms.values()), th, terms)


def vol_cone(angles: ConeAngles) -> VolumeResult:
    if angles.knot == "E":
        return vol_cone_E(angles.values[0])
    return vol_cone_B(*angles.values)
