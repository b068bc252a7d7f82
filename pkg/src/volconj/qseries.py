"""Root-of-unity q-arithmetic and the summands of the two colored Jones sums.

Summands grow like exp(r Vol / 4 pi), far beyond double range for large r, so
everything is carried as (sign, log magnitude).  Phases are tracked exactly in
quarter turns: every q-integer {n} = 2i sin(2 pi n / r) is purely imaginary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, RangeError, RealnessError

NEG_INF = -math.inf


# ---------------------------------------------------------------------------
# value types


@dataclass(frozen=True)
class SignedLogValue:
    """Real number stored as sign * exp(log_mag)."""

    sign: int
    log_mag: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign}")
        if (self.sign == 0) != (self.log_mag == NEG_INF):
            raise ValueError("zero must be encoded as sign 0 with log_mag -inf")
        if math.isnan(self.log_mag) or self.log_mag == math.inf:
            raise ValueError(f"log_mag must be finite, got {self.log_mag}")

    @classmethod
    def zero(cls) -> "SignedLogValue":
        return cls(0, NEG_INF)

    @classmethod
    def from_float(cls, x: float) -> "SignedLogValue":
        if x == 0:
            return cls.zero()
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_mag)

    def __neg__(self):
        return SignedLogValue(-self.sign, self.log_mag)

    def __abs__(self):
        return SignedLogValue(abs(self.sign), self.log_mag)

    def __mul__(self, other: "SignedLogValue") -> "SignedLogValue":
        if self.sign == 0 or other.sign == 0:
            return SignedLogValue.zero()
        return SignedLogValue(self.sign * other.sign, self.log_mag + other.log_mag)

    def __truediv__(self, other: "SignedLogValue") -> "SignedLogValue":
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero SignedLogValue")
        if self.sign == 0:
            return SignedLogValue.zero()
        return SignedLogValue(self.sign * other.sign, self.log_mag - other.log_mag)

    def __add__(self, other: "SignedLogValue") -> "SignedLogValue":
        return signed_log_sum([self.sign, other.sign], [self.log_mag, other.log_mag])

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self) -> bool:
        return self.sign == 0


def signed_log_sum(signs, logs) -> SignedLogValue:
    """Sum of sign_k * exp(log_k), scaled by the largest magnitude.

    The scaled terms are accumulated with math.fsum, so the only error is in
    the terms themselves, not in the accumulation order.
    """
    signs = np.asarray(signs, dtype=float)
    logs = np.asarray(logs, dtype=float)
    live = signs != 0
    if not np.any(live):
        return SignedLogValue.zero()
    m = float(np.max(logs[live]))
    scaled = signs[live] * np.exp(logs[live] - m)
    acc = math.fsum(scaled.tolist())
    if acc == 0.0:
        return SignedLogValue.zero()
    return SignedLogValue(1 if acc > 0 else -1, m + math.log(abs(acc)))


@dataclass(frozen=True)
class LogPolarValue:
    """Complex number as exp(log_mag + i phase), phase in (-pi, pi]."""

    log_mag: float
    phase: float

    @classmethod
    def from_quarters(cls, log_mag: float, quarters: int) -> "LogPolarValue":
        q = int(quarters) % 4
        phase = (0.0, math.pi / 2, math.pi, -math.pi / 2)[q]
        return cls(log_mag, phase)

    def __complex__(self):
        if self.log_mag == NEG_INF:
            return 0j
        return complex(math.exp(self.log_mag) * math.cos(self.phase),
                       math.exp(self.log_mag) * math.sin(self.phase))

    def __mul__(self, other):
        return LogPolarValue(self.log_mag + other.log_mag, _wrap(self.phase + other.phase))

    def __truediv__(self, other):
        return LogPolarValue(self.log_mag - other.log_mag, _wrap(self.phase - other.phase))

    def to_signed_log(self, tol: float = 1e-9) -> SignedLogValue:
        """Convert to a real value, raising RealnessError for a non-real phase."""
        if self.log_mag == NEG_INF:
            return SignedLogValue.zero()
        defect = math.remainder(self.phase, math.pi)
        if abs(defect) > tol:
            raise RealnessError(f"phase {self.phase} is {defect:.3g} away from a multiple of pi")
        sign = 1 if abs(math.remainder(self.phase, 2 * math.pi)) < math.pi / 2 else -1
        return SignedLogValue(sign, self.log_mag)


def _wrap(phase: float) -> float:
    p = math.remainder(phase, 2 * math.pi)
    return math.pi if p == -math.pi else p


# ---------------------------------------------------------------------------
# root of unity context


class RootContext:
    """Odd level r with s = exp(2 pi i / r), q = s^2, and cached sine tables.

    ``logfact[n]`` is log|{n}!| and ``quarters[n]`` the phase of {n}! in
    quarter turns (mod 4), both for 0 <= n < r.
    """

    def __init__(self, r: int):
        if int(r) != r or r < 3 or r % 2 == 0:
            raise DomainError(f"r must be an odd integer >= 3, got {r!r}")
        self.r = r = int(r)
        self.s = complex(math.cos(2 * math.pi / r), math.sin(2 * math.pi / r))
        self.q = self.s * self.s
        n = np.arange(r)
        # fold into [0, r/2] and then onto [0, pi/2] before calling sin
        m = np.minimum(n, r - n)
        sgn = np.where(n <= r // 2, 1.0, -1.0)
        # extended precision for the angle keeps the rounded sine within an ulp
        pi_ext = np.arccos(np.longdouble(-1))
        num = np.where(4 * m <= r, 2 * m, r - 2 * m).astype(np.longdouble)
        quarter = np.sin(pi_ext * num / r).astype(float)
        table = sgn * quarter
        table[0] = 0.0
        self.sin_table = table
        self.sin_table.setflags(write=False)
        logs = np.zeros(r)
        logs[1:] = np.log(2.0 * np.abs(table[1:]))
        self.logfact = np.concatenate(([0.0], np.cumsum(logs[1:])))
        self.logfact.setflags(write=False)
        qt = np.where(table > 0, 1, 3)
        qt[0] = 0
        self.quarters = np.cumsum(qt) % 4
        self.quarters.setflags(write=False)

    def __repr__(self):
        return f"RootContext(r={self.r})"

    @property
    def log_q1(self) -> float:
        """log|{1}|."""
        return float(self.logfact[1])


@lru_cache(maxsize=64)
def root_context(r: int) -> RootContext:
    return RootContext(r)


def _ctx(ctx) -> RootContext:
    return ctx if isinstance(ctx, RootContext) else root_context(int(ctx))


# ---------------------------------------------------------------------------
# weights


def doubled(j: float) -> int:
    """2j as an int, insisting that j is a half-integer."""
    d = round(2 * float(j))
    if abs(2 * float(j) - d) > 1e-9:
        raise DomainError(f"weight {j!r} is not a half-integer")
    return d


@dataclass(frozen=True)
class Weights:
    """Half-integer colors: one for E, a sorted triple for B.

    ``twice`` holds 2j per component; ``permutation[i]`` is the input position
    of sorted component i.
    """

    twice: tuple
    permutation: tuple = ()

    @classmethod
    def of(cls, r: int, *js: float) -> "Weights":
        if len(js) not in (1, 3):
            raise DomainError(f"expected 1 (E) or 3 (B) weights, got {len(js)}")
        tw = [doubled(j) for j in js]
        for d in tw:
            if not 0 <= d <= r - 2:
                raise RangeError(f"weight {d / 2} outside {{0, 1/2, ..., {(r - 2) / 2}}} for r={r}")
        order = tuple(sorted(range(len(tw)), key=lambda i: tw[i]))
        return cls(tuple(tw[i] for i in order), order)

    @property
    def knot(self) -> str:
        return "E" if len(self.twice) == 1 else "B"

    @property
    def js(self) -> tuple:
        return tuple(d / 2 for d in self.twice)


def _as_weights(r: int, weights) -> Weights:
    if isinstance(weights, Weights):
        return weights
    if np.ndim(weights) == 0:
        return Weights.of(r, weights)
    return Weights.of(r, *weights)


def k_max(r: int, weights) -> int:
    w = _as_weights(r, weights)
    return min(min(d, r - (d + 1) - 1) for d in w.twice)


# ---------------------------------------------------------------------------
# q-integers, factorials, ratios


def q_integer(ctx, n: int) -> complex:
    """{n} = s^n - s^-n = 2i sin(2 pi n / r)."""
    c = _ctx(ctx)
    n = int(n)
    m = n % c.r
    return 2j * float(c.sin_table[m])


def q_factorial(ctx, n: int) -> LogPolarValue:
    """{n}! = {n}{n-1}...{1} in log-polar form, for 0 <= n < r."""
    c = _ctx(ctx)
    if not 0 <= n < c.r:
        raise RangeError(f"{{n}}! needs 0 <= n < r={c.r} (zero factor {{r}}); got n={n}")
    return LogPolarValue.from_quarters(float(c.logfact[n]), int(c.quarters[n]))


def _check_k(r, weights, k, lo=1):
    km = k_max(r, weights)
    if not lo <= k <= km:
        raise RangeError(f"k={k} outside [{lo}, {km}]")


def term_ratio_E(ctx, j, k: int) -> float:
    """A_k / A_(k-1) for E: 2 (cos(4 pi (2j+1) / r) - cos(4 pi k / r))."""
    c = _ctx(ctx)
    w = _as_weights(c.r, j)
    _check_k(c.r, w, k)
    big_j = w.twice[0] + 1
    return 2.0 * (math.cos(4 * math.pi * big_j / c.r) - math.cos(4 * math.pi * k / c.r))


def term_ratio_B(ctx, js: Sequence[float], k: int) -> float:
    """A_k / A_(k-1) for the Borromean rings."""
    c = _ctx(ctx)
    w = _as_weights(c.r, js)
    _check_k(c.r, w, k)
    r = c.r
    pref = 2.0 * math.sin(2 * math.pi * k / r) ** 2 / (
        math.sin(2 * math.pi * (2 * k + 1) / r) ** 2 * math.sin(4 * math.pi * k / r) ** 2
    )
    prod = 1.0
    for d in w.twice:
        prod *= math.cos(4 * math.pi * (d + 1) / r) - math.cos(4 * math.pi * k / r)
    return pref * prod


def ratio_signs(ctx, weights) -> np.ndarray:
    """Signs of R_k for k = 1..k_max, from the cosine brackets."""
    c = _ctx(ctx)
    w = _as_weights(c.r, weights)
    km = k_max(c.r, w)
    k = np.arange(1, km + 1)
    s = np.ones(km)
    for d in w.twice:
        s *= np.sign(np.cos(4 * np.pi * (d + 1) / c.r) - np.cos(4 * np.pi * k / c.r))
    return s


def term_batch(ctx, twice: Sequence, k) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised normalized summands A_k / {1}.

    ``twice`` holds 2j per component (one entry for E, three for B); each
    entry and ``k`` may be broadcastable integer arrays.  Returns
    (sign, log_magnitude) arrays.  Raises RealnessError if any phase is not
    a multiple of pi.
    """
    c = _ctx(ctx)
    k = np.asarray(k)
    lf, qt = c.logfact, c.quarters
    logm = -c.log_q1
    quarters = -1
    for d in twice:
        big_j = np.asarray(d) + 1
        logm = logm + lf[big_j + k] - lf[big_j - 1 - k]
        quarters = quarters + qt[big_j + k] - qt[big_j - 1 - k]
    if len(twice) == 3:
        logm = logm + 2.0 * (lf[k] - lf[2 * k + 1])
        quarters = quarters + 2 * (qt[k] - qt[2 * k + 1]) + 2 * k
    quarters = np.mod(quarters, 4)
    if np.any(quarters % 2):
        raise RealnessError("normalized summand with an imaginary phase")
    sign = np.where(quarters == 0, 1, -1)
    return sign, logm


def term(ctx, weights, k: int) -> SignedLogValue:
    """Normalized summand A_k / {1} for E (one weight) or B (three weights)."""
    c = _ctx(ctx)
    w = _as_weights(c.r, weights)
    _check_k(c.r, w, k, lo=0)
    num = LogPolarValue(0.0, 0.0)
    for d in w.twice:
        num = num * q_factorial(c, d + 1 + k) / q_factorial(c, d - k)
    if w.knot == "B":
        frac = q_factorial(c, k) / q_factorial(c, 2 * k + 1)
        num = num * frac * frac * LogPolarValue(0.0, math.pi * (k % 2))
    num = num / q_factorial(c, 1)
    return num.to_signed_log()


def term_E(ctx, j, k):
    return term(ctx, j, k)


def term_B(ctx, js, k):
    return term(ctx, js, k)


# ---------------------------------------------------------------------------
# sign partition


@dataclass(frozen=True)
class IndexPartition:
    """Contiguous index ranges (I1, I2[, I3, I4]) covering 0..k_max.

    Odd-numbered sets are where consecutive summands alternate in sign,
    even-numbered ones where the sign is constant.
    """

    k_max: int
    ranges: tuple  # of (label, range)
    diagnostics: tuple = field(default=())

    @property
    def labels(self) -> tuple:
        return tuple(lab for lab, _ in self.ranges)

    def __getitem__(self, label: str) -> range:
        for lab, rg in self.ranges:
            if lab == label:
                return rg
        raise KeyError(label)

    def alternating(self, label: str) -> bool:
        return int(label[1:]) % 2 == 1

    def predicted_flips(self) -> np.ndarray:
        """Boolean per k = 1..k_max: True where sign(A_k) != sign(A_(k-1))."""
        out = np.zeros(self.k_max, dtype=bool)
        for lab, rg in self.ranges:
            if self.alternating(lab):
                for k in rg:
                    if k >= 1:
                        out[k - 1] = True
        return out


def _ranges_from_bounds(bounds: Sequence[int], km: int) -> tuple:
    edges = [-1] + [min(b, km) for b in bounds] + [km]
    return tuple(
        (f"I{i + 1}", range(edges[i] + 1, edges[i + 1] + 1)) for i in range(len(edges) - 1)
    )


def sign_boundaries(r: int, twice: Iterable[int]) -> list[int]:
    """floor|r/2 - (2j+1)| for each component, ascending."""
    return sorted(abs(r - 2 * (d + 1)) // 2 for d in twice)


def index_partition(ctx, weights) -> IndexPartition:
    """Split 0..k_max into alternating / constant-sign ranges.

    Component i flips the sign of R_k exactly for k <= floor|r/2 - (2j_i+1)|,
    so with those boundaries sorted the ranges alternate between an odd and
    an even number of negative factors.  This covers every ordering of r/2
    against the 2j_i+1, not only the one where all 2j_i+1 < r/2.
    """
    c = _ctx(ctx)
    w = _as_weights(c.r, weights)
    km = k_max(c.r, w)
    bounds = sign_boundaries(c.r, w.twice)
    return IndexPartition(km, _ranges_from_bounds(bounds, km))


def scan_partition(ctx, weights) -> IndexPartition:
    """Partition read off from the signs of the ratios R_k directly."""
    c = _ctx(ctx)
    w = _as_weights(c.r, weights)
    km = k_max(c.r, w)
    neg = ratio_signs(c, w) < 0
    # boundaries: last k of each run, starting with an alternating run
    bounds = []
    want_alt = True
    k = 1
    while len(bounds) < len(w.twice) and k <= km + 1:
        while k <= km and bool(neg[k - 1]) == want_alt:
            k += 1
        bounds.append(k - 1)
        want_alt = not want_alt
    while len(bounds) < len(w.twice):
        bounds.append(km)
    return IndexPartition(km, _ranges_from_bounds(bounds, km))


def empirical_flips(ctx, weights) -> np.ndarray:
    """True where sign(A_k) differs from sign(A_(k-1)), computed from the terms."""
    c = _ctx(ctx)
    w = _as_weights(c.r, weights)
    k = np.arange(k_max(c.r, w) + 1)
    sign, _ = term_batch(c, w.twice, k)
    return sign[1:] != sign[:-1]


# ---------------------------------------------------------------------------
# unimodality


@dataclass(frozen=True)
class UnimodalityProfile:
    breakpoints: tuple
    pattern: tuple  # e.g. ("down", "up", "down")
    ties: tuple = ()


def unimodality_profile(magnitudes, tie_tol: float = 1e-14) -> UnimodalityProfile:
    """Indices where |A_k| switches between increasing and decreasing.

    Accepts SignedLogValues or plain log-magnitudes.  A step whose log change
    is within ``tie_tol`` keeps the current direction and is reported in
    ``ties``.
    """
    logs = [m.log_mag if isinstance(m, SignedLogValue) else float(m) for m in magnitudes]
    if not logs:
        raise ValueError("empty magnitude list")
    d = np.diff(np.asarray(logs))
    pattern: list[str] = []
    breaks: list[int] = []
    ties: list[int] = []
    for i, step in enumerate(d):
        if abs(step) <= tie_tol:
            ties.append(i + 1)
            continue
        direction = "up" if step > 0 else "down"
        if not pattern:
            pattern.append(direction)
        elif direction != pattern[-1]:
            pattern.append(direction)
            breaks.append(i)
    return UnimodalityProfile(tuple(breaks), tuple(pattern), tuple(ties))
