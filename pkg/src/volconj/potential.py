"""Potential functions of E and B, their finite-r versions, cuts and critical points.

Both potentials are sums of terms c * Li2(exp(i (p + q z))) plus a polynomial
in z.  Keeping them in that form lets the same code produce the value, the
derivative, the cut geometry and the finite-r counterpart.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import BranchCutError, DomainError, RootNotFoundError
from .geometry import ConeAngles, is_hyperbolic, tangent_root_A, theta_E
from .specfun import DEFAULT_QUAD, delta_fn, dilog, lobachevsky, quantum_dilog, quantum_dilog_continued

CUT_TOL = 1e-12


@dataclass(frozen=True)
class DilogTerm:
    """coef * Li2(exp(i (p + q z)))."""

    coef: float
    p: float
    q: float


@dataclass(frozen=True)
class PotentialSpec:
    angles: ConeAngles

    @classmethod
    def E(cls, alpha: float) -> "PotentialSpec":
        return cls(ConeAngles.E(alpha))

    @classmethod
    def B(cls, a1: float, a2: float, a3: float) -> "PotentialSpec":
        return cls(ConeAngles.B(a1, a2, a3))

    @property
    def knot(self) -> str:
        return self.angles.knot

    @property
    def alphas(self) -> tuple:
        return self.angles.values

    def terms(self) -> tuple:
        out = []
        for a in self.alphas:
            out.append(DilogTerm(-0.5, a, 2.0))
            out.append(DilogTerm(0.5, a, -2.0))
        if self.knot == "B":
            out.append(DilogTerm(-1.0, 0.0, 2.0))
            out.append(DilogTerm(1.0, 0.0, 4.0))
        return tuple(out)

    def poly(self) -> tuple:
        """(linear, quadratic) coefficients of the polynomial part."""
        if self.knot == "E":
            return self.alphas[0], 0.0
        return sum(self.alphas) + 5.0 * math.pi, -3.0


def _spec(spec) -> PotentialSpec:
    if isinstance(spec, PotentialSpec):
        return spec
    if isinstance(spec, ConeAngles):
        return PotentialSpec(spec)
    raise TypeError(f"expected PotentialSpec or ConeAngles, got {type(spec).__name__}")


# ---------------------------------------------------------------------------
# branch cuts


@dataclass(frozen=True)
class BranchCut:
    """Vertical half-line {u = anchor, v < 0} (down) or {v > 0} (up)."""

    anchor: float
    direction: str

    def contains(self, z: complex, tol: float = CUT_TOL) -> bool:
        if abs(z.real - self.anchor) > tol:
            return False
        return z.imag < 0 if self.direction == "down" else z.imag > 0


def branch_cuts(spec, u_lo: float = -math.pi, u_hi: float = 2 * math.pi) -> list:
    """All cuts of the potential with anchor in [u_lo, u_hi], sorted by anchor.

    Li2(exp(i (p + q z))) is cut where p + q u is a multiple of 2 pi and the
    argument leaves the unit disk, i.e. q v < 0.  A term with q < 0 therefore
    has cuts pointing up.
    """
    sp = _spec(spec)
    seen = {}
    for t in sp.terms():
        step = 2 * math.pi / abs(t.q)
        direction = "down" if t.q > 0 else "up"
        # anchors u = (2 pi n - p) / q
        base = -t.p / t.q
        n_lo = math.ceil((u_lo - base) / step - 1e-12)
        n_hi = math.floor((u_hi - base) / step + 1e-12)
        for n in range(n_lo, n_hi + 1):
            u = base + n * step
            key = (round(u, 12), direction)
            seen.setdefault(key, BranchCut(u, direction))
    return sorted(seen.values(), key=lambda c: (c.anchor, c.direction))


def _check_cuts(sp: PotentialSpec, z: complex):
    for t in sp.terms():
        if t.q * z.imag >= 0:
            continue
        x = (t.p + t.q * z.real) / (2 * math.pi)
        if abs(x - round(x)) * 2 * math.pi / abs(t.q) <= CUT_TOL:
            raise BranchCutError(f"z={z} lies on a branch cut of the potential")


# ---------------------------------------------------------------------------
# evaluation


def phi(spec, z: complex) -> complex:
    """Potential function, principal branches throughout."""
    sp = _spec(spec)
    z = complex(z)
    _check_cuts(sp, z)
    acc = 0j
    for t in sp.terms():
        acc += t.coef * dilog(cmath.exp(1j * (t.p + t.q * z)))
    c1, c2 = sp.poly()
    return acc + c1 * z + c2 * z * z


def phi_array(spec, z) -> np.ndarray:
    """Vectorised phi without the cut check (callers mask cuts themselves)."""
    sp = _spec(spec)
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z)
    for t in sp.terms():
        acc = acc + t.coef * np.asarray(dilog(np.exp(1j * (t.p + t.q * z))))
    c1, c2 = sp.poly()
    return acc + c1 * z + c2 * z * z


def dphi(spec, z) -> np.ndarray:
    """Derivative of the potential: sum of -i q c log(1 - w) plus the polynomial part."""
    sp = _spec(spec)
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z)
    for t in sp.terms():
        w = np.exp(1j * (t.p + t.q * z))
        acc = acc - 1j * t.q * t.coef * np.log(1.0 - w)
    c1, c2 = sp.poly()
    return acc + c1 + 2.0 * c2 * z


def im_phi_real(spec, x):
    """Imaginary part of the potential on the real axis, via Lambda.

    E: -(L(x + a/2) + L(x - a/2)).
    B: -sum D(a_i/2, x) + 2 D(pi/2, x) + D(0, x).
    """
    sp = _spec(spec)
    x = np.asarray(x, dtype=float)
    if sp.knot == "E":
        a = sp.alphas[0]
        out = -(np.asarray(lobachevsky(x + a / 2)) + np.asarray(lobachevsky(x - a / 2)))
    else:
        out = 2.0 * np.asarray(delta_fn(math.pi / 2, x)) + np.asarray(delta_fn(0.0, x))
        for a in sp.alphas:
            out = out - np.asarray(delta_fn(a / 2, x))
    return out.item() if out.ndim == 0 else out


def phi_finite_r(spec, r: int, z: complex, extend: bool = True, cfg=DEFAULT_QUAD) -> complex:
    """Finite-r potential built from the quantum dilogarithm.

    Each c Li2(exp(i (p + q z))) becomes 2 c (2 pi i / r) phi_r((p + q z) / 2).
    With ``extend`` the quantum dilogarithm is continued past its strip by
    its shift relation; otherwise arguments outside the strip raise
    DomainError.
    """
    sp = _spec(spec)
    z = complex(z)
    qd = quantum_dilog_continued if extend else quantum_dilog
    scale = 2j * math.pi / r
    acc = 0j
    for t in sp.terms():
        acc += 2.0 * t.coef * scale * qd(r, (t.p + t.q * z) / 2.0, cfg)
    c1, c2 = sp.poly()
    return acc + c1 * z + c2 * z * z


# ---------------------------------------------------------------------------
# critical points


@dataclass(frozen=True)
class PolynomialRoots:
    coefficients: tuple  # highest degree first, in T
    real_roots: tuple
    selected: float
    residual: float
    scale: float


@dataclass(frozen=True)
class CriticalPointSet:
    knot: str
    points: dict  # name -> abscissa
    x0: float  # location of the maximum that governs the volume
    polynomials: dict = field(default_factory=dict)


def _poly_scale(coefs, t):
    return float(sum(abs(c) * abs(t) ** i for i, c in enumerate(reversed(coefs))))


def real_cubic_roots(a: float, b: float, c: float, d: float) -> list:
    """Real roots of a x^3 + b x^2 + c x + d by the trigonometric / Cardano formulas,
    each polished by a few Newton steps."""
    if a == 0:
        raise DomainError("leading coefficient is zero")
    b, c, d = b / a, c / a, d / a
    shift = b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if disc > 0:
        sq = math.sqrt(disc)
        roots = [float(np.cbrt(-q / 2.0 + sq) + np.cbrt(-q / 2.0 - sq)) - shift]
    elif p == 0:
        roots = [-shift] * 3
    else:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = max(-1.0, min(1.0, 3.0 * q / (p * m)))
        th = math.acos(arg) / 3.0
        roots = [m * math.cos(th - 2.0 * math.pi * i / 3.0) - shift for i in range(3)]

    def f(x):
        return ((x + b) * x + c) * x + d

    def fp(x):
        return (3.0 * x + 2.0 * b) * x + c

    out = []
    for x in roots:
        for _ in range(4):
            g = fp(x)
            if g == 0:
                break
            step = f(x) / g
            x -= step
            if abs(step) <= 1e-16 * max(1.0, abs(x)):
                break
        out.append(x)
    return sorted(out)


def quartic_B(alphas) -> PolynomialRoots:
    """T^4 - (S + 1) T^2 - P = 0, S and P the sum and product of tan^2(a_i / 2)."""
    n2 = [math.tan(a / 2) ** 2 for a in alphas]
    s, p = sum(n2), n2[0] * n2[1] * n2[2]
    coefs = (1.0, 0.0, -(s + 1.0), 0.0, -p)
    t = float(tangent_root_A(alphas))
    res = abs(np.polyval(coefs, t))
    return PolynomialRoots(coefs, (-t, t), t, res, _poly_scale(coefs, t))


def sextic_B(alphas) -> PolynomialRoots:
    """The sextic whose root in (0, tan(a_1 / 2)) locates the low maximum.

    In U = T^2 it is the cubic U^3 - S U^2 + (P + 2Q + S + 1) U - P, Q the sum
    of pairwise products of the tan^2(a_i / 2).
    """
    n2 = sorted(math.tan(a / 2) ** 2 for a in alphas)
    s = sum(n2)
    p = n2[0] * n2[1] * n2[2]
    qq = n2[0] * n2[1] + n2[1] * n2[2] + n2[0] * n2[2]
    cub = (1.0, -s, p + 2.0 * qq + s + 1.0, -p)
    coefs = (1.0, 0.0, -s, 0.0, p + 2.0 * qq + s + 1.0, 0.0, -p)
    us = real_cubic_roots(*cub)
    upper = n2[0]
    if p > 0.0 and np.polyval(cub, upper) > 0.0:
        # the closed form loses the small root to cancellation when p is tiny;
        # bracket it instead in y = U / upper, where f(upper y) / upper is
        # upper^2 y^3 - s upper y^2 + c y - p / upper
        c, rest = cub[2], n2[1] * n2[2]

        def g(y):
            return ((upper * y - s) * upper * y + c) * y - rest

        u_in = upper * brentq(g, 0.0, 1.0, xtol=1e-300, rtol=1e-15)
        i = int(np.argmin([abs(u - u_in) for u in us]))
        us[i] = u_in
    reals = sorted([-math.sqrt(u) for u in us if u >= 0] + [math.sqrt(u) for u in us if u >= 0])
    inside = [u for u in us if 0.0 < u < upper]
    if p == 0.0:
        # a zero angle makes U = 0 a root and the bracket collapses
        sel = 0.0
    elif len(inside) != 1:
        raise RootNotFoundError(
            f"expected one cubic root in (0, {upper:.6g}), found {len(inside)} among {us}"
        )
    else:
        sel = math.sqrt(inside[0])
    res = abs(np.polyval(coefs, sel))
    return PolynomialRoots(coefs, tuple(reals), sel, res, _poly_scale(coefs, sel))


def critical_points(spec) -> CriticalPointSet:
    """Extremal abscissae of Im(phi) on the real axis."""
    sp = _spec(spec)
    if not is_hyperbolic(sp.angles):
        raise DomainError(f"angles {sp.alphas} outside the hyperbolic domain of {sp.knot}")
    if sp.knot == "E":
        a = sp.alphas[0]
        th = float(theta_E(a))
        pts = {"theta_min": th, "x0": math.pi - th}
        if a > math.pi / 3:
            pts["theta_max_low"] = 0.5 * math.acos(math.cos(a) + 0.5)
        return CriticalPointSet("E", pts, math.pi - th)
    quart = quartic_B(sp.alphas)
    sext = sextic_B(sp.alphas)
    t_a = math.atan(quart.selected)
    t_b = math.atan(sext.selected)
    pts = {"t_B": t_b, "t_A": t_a, "x0": math.pi - t_a}
    a1, _, a3 = sp.alphas
    if sext.selected > 0:  # zero when an angle is 0 or its tan^2 underflows
        chain = [0.0, t_b, a1 / 2, a3 / 2, t_a, math.pi / 2, math.pi - t_a, math.pi - a3 / 2]
        strict = [0, 1, 3, 4, 5, 6]  # positions i with chain[i] < chain[i + 1] strictly
        for i in range(len(chain) - 1):
            ok = chain[i] < chain[i + 1] if i in strict else chain[i] <= chain[i + 1]
            if not ok:
                raise RootNotFoundError(f"ordering chain violated at position {i}: {chain}")
    return CriticalPointSet("B", pts, math.pi - t_a, {"quartic": quart, "sextic": sext})


def stationary_residual(spec, x: float, h: float = 1e-6) -> float:
    """Central difference of im_phi_real at x."""
    sp = _spec(spec)
    return (im_phi_real(sp, x + h) - im_phi_real(sp, x - h)) / (2.0 * h)
