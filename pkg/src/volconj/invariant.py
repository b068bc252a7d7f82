"""Colored Jones invariants of E and B at odd roots of unity."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError, RangeError
from .geometry import ConeAngles
from .qseries import (
    IndexPartition,
    SignedLogValue,
    Weights,
    index_partition,
    k_max,
    root_context,
    signed_log_sum,
    term_batch,
)


@dataclass(frozen=True)
class WeightChoice:
    branch: str
    weights: Weights
    defects: tuple  # |8 pi j / r - 2 pi| - alpha per component


def weights_for_angles(r: int, angles: ConeAngles, branch: str = "minus") -> WeightChoice:
    """Nearest half-integer weights with |8 pi j / r - 2 pi| close to each angle.

    2j = floor(r (2 pi -+ alpha) / (4 pi) + 1/2), i.e. ties round up.
    """
    if branch not in ("minus", "plus"):
        raise DomainError(f"branch must be 'minus' or 'plus', got {branch!r}")
    if int(r) != r or r < 3 or r % 2 == 0:
        raise DomainError(f"r must be an odd integer >= 3, got {r!r}")
    sgn = -1.0 if branch == "minus" else 1.0
    twice = []
    for a in angles.values:
        if not 0.0 <= a < math.pi:
            raise DomainError(f"cone angle {a} outside [0, pi)")
        d = math.floor(r * (2 * math.pi + sgn * a) / (4 * math.pi) + 0.5)
        if not 0 <= d <= r - 2:
            raise RangeError(f"rounded weight {d / 2} outside the weight set for r={r}")
        twice.append(d)
    w = Weights.of(r, *(d / 2 for d in twice))
    defects = tuple(
        abs(4 * math.pi * d / r - 2 * math.pi) - a for d, a in zip(w.twice, angles.values)
    )
    return WeightChoice(branch, w, defects)


@dataclass(frozen=True)
class InvariantValue:
    total: SignedLogValue
    partials: dict  # label -> SignedLogValue
    r: int
    weights: Weights
    partition: IndexPartition
    max_log: dict  # label -> largest log|A_k| in the set (-inf if empty)

    @property
    def growth(self) -> float:
        """(4 pi / r) log|V|."""
        return 4 * math.pi / self.r * self.total.log_mag


def _weights(r, weights) -> Weights:
    if isinstance(weights, Weights):
        return weights
    if np.ndim(weights) == 0:
        return Weights.of(r, weights)
    return Weights.of(r, *weights)


def colored_jones(r: int, weights) -> InvariantValue:
    """Sum of the normalized summands over 0..k_max, split by the sign partition.

    Each partial is a scaled sum (shift by the largest log, fsum of the
    rescaled terms); the total is the same scaled sum over all partials.
    """
    ctx = root_context(r)
    w = _weights(r, weights)
    part = index_partition(ctx, w)
    k = np.arange(part.k_max + 1)
    sign, logm = term_batch(ctx, w.twice, k)
    partials = {}
    max_log = {}
    for label, rg in part.ranges:
        sl = slice(rg.start, rg.stop)
        val = signed_log_sum(sign[sl], logm[sl])
        mx = float(np.max(logm[sl])) if len(rg) else -math.inf
        if len(rg) and not part.alternating(label):
            # constant sign: max|A| <= |sum| <= #set * max|A|
            slack = 1e-12 * max(1.0, abs(mx))
            if not (mx - slack <= val.log_mag <= mx + math.log(len(rg)) + slack):
                raise NumericalError(f"squeeze bound violated on {label}")
        partials[label] = val
        max_log[label] = mx
    labels = list(partials)
    total = signed_log_sum(
        [partials[l].sign for l in labels], [partials[l].log_mag for l in labels]
    )
    return InvariantValue(total, partials, r, w, part, max_log)


def colored_jones_E(r: int, j: float) -> InvariantValue:
    return colored_jones(r, Weights.of(r, j))


def colored_jones_B(r: int, j1: float, j2: float, j3: float) -> InvariantValue:
    return colored_jones(r, Weights.of(r, j1, j2, j3))


def partial_sum(r: int, weights, label: str) -> SignedLogValue:
    inv = colored_jones(r, weights)
    if label not in inv.partials:
        raise KeyError(f"no index set {label!r}; have {list(inv.partials)}")
    return inv.partials[label]


def dominance_ratio(inv: InvariantValue) -> float:
    """|sum over I1| / |sum over the last set|."""
    first = inv.partials["I1"]
    last = inv.partials[inv.partition.labels[-1]]
    if last.is_zero():
        return math.inf
    if first.is_zero():
        return 0.0
    return math.exp(first.log_mag - last.log_mag)


__all__ = [
    "WeightChoice",
    "InvariantValue",
    "weights_for_angles",
    "colored_jones",
    "colored_jones_E",
    "colored_jones_B",
    "partial_sum",
    "dominance_ratio",
    "k_max",
]
