"""Scalar special functions: Lobachevsky, dilogarithm, quantum dilogarithm.

Everything here accepts numpy arrays as well as Python scalars; scalar input
gives a scalar back.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import CutPointError, DomainError, QuadratureError

PI = math.pi
TWO_PI = 2.0 * math.pi
PI2_6 = math.pi**2 / 6.0

_NTERMS = 40
# zeta(2k) / (k (2k+1)) / (2 pi)^(2k): Clausen series coefficients
_k = np.arange(1, _NTERMS + 1, dtype=float)
_CL2_COEF = special.zeta(2.0 * _k) / (_k * (2.0 * _k + 1.0)) / TWO_PI ** (2.0 * _k)
# B_{2k} / (2k+1)!: Bernoulli series coefficients for Li2 in u = -log(1-w)
_LI2_COEF = (
    (-1.0) ** (_k + 1)
    * 2.0
    * special.zeta(2.0 * _k)
    / TWO_PI ** (2.0 * _k)
    / (2.0 * _k + 1.0)
)
del _k


def _scalar_out(x, like):
    if np.ndim(like) == 0:
        return np.asarray(x).item()
    return x


def clausen2(x):
    """Clausen function Cl2(x) = sum sin(n x) / n^2, for any real x."""
    xa = np.asarray(x, dtype=float)
    # reduce to (-pi, pi]
    y = np.remainder(xa + PI, TWO_PI) - PI
    ay = np.abs(y)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(ay > 0.0, y - y * np.log(np.where(ay > 0.0, ay, 1.0)), 0.0)
    y2 = y * y
    acc = np.zeros_like(y)
    for c in _CL2_COEF[::-1]:
        acc = acc * y2 + c
    out = out + y * y2 * acc
    return _scalar_out(out, x)


def lobachevsky(theta):
    """Lobachevsky function, odd and pi-periodic, via Lambda(t) = Cl2(2t)/2."""
    return _scalar_out(0.5 * np.asarray(clausen2(2.0 * np.asarray(theta, dtype=float))), theta)


def delta_fn(a, b):
    """Lambda(a + b) - Lambda(a - b)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.asarray(lobachevsky(a + b)) - np.asarray(lobachevsky(a - b))
    return _scalar_out(out, a + b)


def im_dilog_unit_circle(x):
    """Im Li2(exp(2 i x)), which equals 2 Lambda(x)."""
    return _scalar_out(2.0 * np.asarray(lobachevsky(x)), x)


def _li2_core(w):
    # |w| <= 1 on entry
    w = np.asarray(w, dtype=complex)
    refl = w.real > 0.5
    wr = np.where(refl, 1.0 - w, w)
    u = -np.log1p(-wr)
    u2 = u * u
    acc = np.zeros_like(u)
    for c in _LI2_COEF[::-1]:
        acc = acc * u2 + c
    val = u - 0.25 * u2 + u * u2 * acc
    with np.errstate(divide="ignore", invalid="ignore"):
        # log(w) log(1-w) -> 0 as w -> 1
        safe_w = np.where(refl, w, 1.0)
        lw = np.log(safe_w)
        l1w = np.log(np.where(refl & (w != 1.0), 1.0 - w, 1.0))
        corr = np.where(refl & (w != 1.0), lw * l1w, 0.0)
    return np.where(refl, PI2_6 - corr - val, val)


def dilog(w):
    """Principal branch of Li2, cut along [1, inf).

    Points exactly on the open cut raise CutPointError; w = 1 gives pi^2/6.
    Implemented by inversion (|w| > 1) and reflection (Re w > 1/2) onto a
    region where the Bernoulli series in -log(1-w) converges quickly.
    """
    wa = np.asarray(w, dtype=complex)
    on_cut = (wa.imag == 0.0) & (wa.real > 1.0)
    if np.any(on_cut):
        raise CutPointError(f"dilog argument on the branch cut (1, inf): {w!r}")
    big = np.abs(wa) > 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(big, 1.0 / np.where(big, wa, 1.0), wa)
    core = _li2_core(inv)
    with np.errstate(divide="ignore", invalid="ignore"):
        lm = np.log(-np.where(big, wa, -1.0))
    out = np.where(big, -PI2_6 - 0.5 * lm * lm - core, core)
    out = np.where(wa == 0.0, 0.0, out)
    return _scalar_out(out, w)


# ---------------------------------------------------------------------------
# quantum dilogarithm


@dataclass(frozen=True)
class QuadratureConfig:
    radius: float = 0.5
    epsabs: float = 1e-11
    epsrel: float = 1e-13
    tail_cutoff: float = 1e-18
    limit: int = 400


DEFAULT_QUAD = QuadratureConfig()


def _check_level(r):
    if int(r) != r or r < 3 or r % 2 == 0:
        raise DomainError(f"level r must be an odd integer >= 3, got {r!r}")


def _quad_complex(f, a, b, cfg):
    val, err, info = integrate.quad(
        f, a, b, complex_func=True, epsabs=cfg.epsabs, epsrel=cfg.epsrel,
        limit=cfg.limit, full_output=True,
    )
    tol = max(cfg.epsabs, cfg.epsrel * abs(val))
    e = abs(err[0] + 1j * err[1]) if isinstance(err, tuple) else abs(err)
    # quad reports per-part error estimates; allow a small factor of slack
    if not np.isfinite(val) or e > 50.0 * tol:
        raise QuadratureError(f"quadrature error estimate {e:.3g} above tolerance {tol:.3g}")
    return val


def quantum_dilog(r: int, z: complex, cfg: QuadratureConfig = DEFAULT_QUAD) -> complex:
    """Level-r quantum dilogarithm on the strip -pi/r < Re z < pi + pi/r.

    Contour integral of exp((2z - pi) x) / (4 x sinh(pi x) sinh(2 pi x / r))
    along (-inf, -c], the upper half circle |x| = c, and [c, inf).
    """
    _check_level(r)
    z = complex(z)
    if not (-PI / r < z.real < PI + PI / r):
        raise DomainError(f"Re z = {z.real} outside the strip (-pi/r, pi + pi/r) for r={r}")
    c = cfg.radius
    a = 2.0 * z - PI
    b = PI + TWO_PI / r
    rho = b - abs(a.real)  # decay rate of the folded integrand

    def folded(x):
        # g(x) + g(-x) for x > 0, written without overflow
        num = cmath.exp((a - b) * x) - cmath.exp((-a - b) * x)
        return num / (x * -math.expm1(-TWO_PI * x) * -math.expm1(-2.0 * TWO_PI * x / r))

    dc = -math.expm1(-TWO_PI * c) * -math.expm1(-2.0 * TWO_PI * c / r)
    upper = max(2.0 * c, math.log(2.0 / (cfg.tail_cutoff * c * dc)) / rho)
    # split the tail so the adaptive scheme sees the near-pole region separately
    mid = min(upper, c + 4.0)
    tail = _quad_complex(folded, c, mid, cfg)
    if upper > mid:
        tail += _quad_complex(folded, mid, upper, cfg)

    def arc(t):
        x = c * cmath.exp(1j * t)
        g = cmath.exp(a * x) / (4.0 * x * cmath.sinh(PI * x) * cmath.sinh(TWO_PI * x / r))
        return g * 1j * x

    # the arc runs from -c to c over the top, i.e. t from pi down to 0
    semi = -_quad_complex(arc, 0.0, PI, cfg)
    return tail + semi


def quantum_dilog_continued(r: int, z: complex, cfg: QuadratureConfig = DEFAULT_QUAD) -> complex:
    """Quantum dilogarithm continued beyond the strip by the shift relation.

    Uses phi(w + pi/r) = phi(w - pi/r) - log(1 - exp(2 i w)) with the
    principal logarithm; this is the analytic continuation for Im z >= 0 and
    agrees with it modulo 2 pi i elsewhere.
    """
    _check_level(r)
    z = complex(z)
    step = TWO_PI / r
    if z.real > PI:
        n = math.ceil((z.real - PI) / step)
        w = z - n * step
        corr = -sum(cmath.log(1.0 - cmath.exp(2j * (z - PI / r - l * step))) for l in range(n))
    elif z.real < 0.0:
        n = math.ceil(-z.real / step)
        w = z + n * step
        corr = sum(cmath.log(1.0 - cmath.exp(2j * (z + PI / r + l * step))) for l in range(n))
    else:
        return quantum_dilog(r, z, cfg)
    return quantum_dilog(r, w, cfg) + corr
