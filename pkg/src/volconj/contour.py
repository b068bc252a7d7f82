"""Level sets of Im(Phi + 2 pi m z) and the deformed integration paths built from them."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.optimize import brentq
from skimage.measure import find_contours

from .errors import DomainError, ResolutionError, SingularityError
from .geometry import ConeAngles
from .potential import PotentialSpec, branch_cuts, critical_points, im_phi_real, phi_array

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class GridSpec:
    u_lo: float
    u_hi: float
    v_lo: float
    v_hi: float
    nu: int = 1200
    nv: int = 800

    def __post_init__(self):
        if not (self.u_lo < self.u_hi and self.v_lo < self.v_hi):
            raise DomainError(f"empty grid box {self}")
        if self.nu < 2 or self.nv < 2:
            raise DomainError("a grid needs at least 2 nodes per axis")

    @property
    def du(self) -> float:
        return (self.u_hi - self.u_lo) / (self.nu - 1)

    @property
    def dv(self) -> float:
        return (self.v_hi - self.v_lo) / (self.nv - 1)

    def axes(self):
        return np.linspace(self.u_lo, self.u_hi, self.nu), np.linspace(self.v_lo, self.v_hi, self.nv)


def default_grid(angles: ConeAngles) -> GridSpec:
    end = angles.smallest / 2
    return GridSpec(-0.1, end + 0.1, -1.5, 1.5, 1200, 800)


@dataclass
class FieldGrid:
    """Im(f) on a node grid: ``values[i, j]`` sits at (u[j], v[i]); NaN where masked."""

    u: np.ndarray
    v: np.ndarray
    values: np.ndarray
    mask: np.ndarray
    meta: dict = dc_field(default_factory=dict)

    @property
    def shape(self):
        return self.values.shape


def _as_spec(angles) -> PotentialSpec:
    if isinstance(angles, PotentialSpec):
        return angles
    if isinstance(angles, ConeAngles):
        return PotentialSpec(angles)
    raise TypeError(f"expected ConeAngles, got {type(angles).__name__}")


def cut_mask(spec: PotentialSpec, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Nodes next to a cut (within one cell horizontally, on the cut's side)."""
    du = abs(u[1] - u[0]) if len(u) > 1 else 1.0
    dv = abs(v[1] - v[0]) if len(v) > 1 else 1.0
    uu, vv = np.meshgrid(u, v)
    mask = np.zeros(uu.shape, dtype=bool)
    for c in branch_cuts(spec, float(u.min()) - du, float(u.max()) + du):
        near = np.abs(uu - c.anchor) <= du * (1 + 1e-9)
        side = vv < 0 if c.direction == "down" else vv > 0
        mask |= near & side
    if spec.knot == "B":
        # the derivative blows up at the origin
        mask |= (np.abs(uu) <= du * (1 + 1e-9)) & (np.abs(vv) <= dv * (1 + 1e-9))
    return mask


def field(angles, m: int, grid: GridSpec | None = None) -> FieldGrid:
    """Im(Phi(z) + 2 pi m z) on the grid, masked next to branch cuts."""
    sp = _as_spec(angles)
    grid = grid or default_grid(sp.angles)
    u, v = grid.axes()
    z = u[None, :] + 1j * v[:, None]
    mask = cut_mask(sp, u, v)
    vals = np.full(z.shape, np.nan)
    # masked nodes may sit exactly on a cut, where Li2 refuses to evaluate
    with np.errstate(all="ignore"):
        vals[~mask] = np.imag(phi_array(sp, z[~mask])) + 2 * math.pi * m * z[~mask].imag
    mask |= ~np.isfinite(vals)
    vals[mask] = np.nan
    meta = {"knot": sp.knot, "angles": list(sp.alphas), "m": int(m)}
    return FieldGrid(u, v, vals, mask, meta)


# ---------------------------------------------------------------------------
# closed-form partial derivatives


def _check_modulus(x, what):
    if np.any(np.abs(x) < 1e-12):
        raise SingularityError(f"{what} vanishes: the partial derivatives are singular here")


def partials(angles, m: int, z: complex):
    """(d/du, d/dv) of Im(Phi + 2 pi m z) at z = u + i v, in log-modulus / argument form."""
    sp = _as_spec(angles)
    z = complex(z)
    u, v = z.real, z.imag
    cos2z = complex(math.cos(2 * u) * math.cosh(2 * v), -math.sin(2 * u) * math.sinh(2 * v))
    du = 0.0
    dv = 2 * math.pi * m
    for a in sp.alphas:
        # |(1 - e^{i(a+2z)})(1 - e^{i(a-2z)})| = |2 cos a - 2 cos 2z|
        mod = 2 * math.cos(a) - 2 * cos2z
        _check_modulus(mod, "2 cos(a) - 2 cos(2z)")
        du += math.log(abs(mod))
        w1 = 1 - np.exp(1j * (a + 2 * z))
        w2 = 1 - np.exp(1j * (a - 2 * z))
        dv += -np.angle(w1) - np.angle(w2) + a
    if sp.knot == "B":
        w1 = 1 - np.exp(2j * z)
        w2 = 1 - np.exp(4j * z)
        _check_modulus(w1, "1 - exp(2iz)")
        _check_modulus(w2, "1 - exp(4iz)")
        du += 2 * math.log(abs(w1)) - 4 * math.log(abs(w2)) - 6 * v
        dv += -2 * np.angle(w1) + 4 * np.angle(w2) + 5 * math.pi - 6 * u
    return float(du), float(dv)


def finite_difference_partials(angles, m: int, z: complex, h: float = 1e-5):
    sp = _as_spec(angles)
    z = complex(z)
    pts = np.array([z + h, z - h, z + 1j * h, z - 1j * h])
    f = np.imag(phi_array(sp, pts)) + 2 * math.pi * m * pts.imag
    return (f[0] - f[1]) / (2 * h), (f[2] - f[3]) / (2 * h)


# ---------------------------------------------------------------------------
# level paths


@dataclass(frozen=True)
class LevelChoice:
    level: float
    regime: str  # "standard" if Im Phi(a1/2) < Im Phi(x0), else "fallback"
    lower: float
    upper: float


def default_level(angles) -> LevelChoice:
    """Midpoint of (Im Phi(a1/2), Im Phi(x0)).

    When that interval is empty (angles beyond the threshold) the upper end is
    replaced by the largest value of Im Phi on [0, a1/2], so the level still
    sits strictly between the endpoint value and the hump it must pass over.
    """
    sp = _as_spec(angles)
    end = sp.alphas[0] / 2
    lo = float(im_phi_real(sp, end))
    x0 = critical_points(sp).x0
    hi = float(im_phi_real(sp, x0))
    if lo < hi:
        return LevelChoice(0.5 * (lo + hi), "standard", lo, hi)
    xs = np.linspace(0.0, end, 4001)
    hump = float(np.max(im_phi_real(sp, xs)))
    return LevelChoice(0.5 * (lo + hump), "fallback", lo, hump)


def default_quadrant(knot: str, m: int) -> int:
    # d/dv Im f at the real axis is negative for these m, so level lines bend upwards
    first = -1 if knot == "E" else -4
    return 1 if m <= first else 4


@dataclass(frozen=True)
class LevelPath:
    points: np.ndarray  # (N, 2) array of (u, v)
    level: float
    quadrant: int
    m: int
    segments: tuple  # ("axis" | "level", start index, stop index)
    humps: tuple  # (x_a, x_b) real-axis crossings bridged by level curves
    max_level_error: float  # max |Im f - level| over level-curve vertices
    tolerance: float

    def level_points(self) -> np.ndarray:
        parts = [self.points[a:b] for kind, a, b in self.segments if kind == "level"]
        return np.concatenate(parts) if parts else np.empty((0, 2))


def _humps(sp: PotentialSpec, a: float, b: float, level: float, n: int = 4001):
    xs = np.linspace(a, b, n)
    ys = np.asarray(im_phi_real(sp, xs)) - level
    above = ys > 0
    out = []
    i = 0
    while i < n:
        if not above[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and above[j + 1]:
            j += 1
        if i == 0 or j == n - 1:
            return None  # an endpoint is above the level
        g = lambda x: float(im_phi_real(sp, x)) - level  # noqa: E731
        xa = brentq(g, xs[i - 1], xs[i], xtol=1e-14)
        xb = brentq(g, xs[j], xs[j + 1], xtol=1e-14)
        out.append((xa, xb))
        i = j + 1
    return out


def _quadrant_grid(base: GridSpec, quadrant: int, vmax: float) -> GridSpec:
    nv = max(2, base.nv // 2)
    if quadrant == 1:
        return GridSpec(base.u_lo, base.u_hi, 0.0, vmax, base.nu, nv)
    return GridSpec(base.u_lo, base.u_hi, -vmax, 0.0, base.nu, nv)


def _to_uv(contour: np.ndarray, fg: FieldGrid) -> np.ndarray:
    rows, cols = contour[:, 0], contour[:, 1]
    u = np.interp(cols, np.arange(len(fg.u)), fg.u)
    v = np.interp(rows, np.arange(len(fg.v)), fg.v)
    return np.column_stack([u, v])


def _bridge(fg: FieldGrid, level: float, xa: float, xb: float):
    """Level curve joining (xa, 0) and (xb, 0), or a reason why there is none."""
    du = fg.u[1] - fg.u[0]
    dv = abs(fg.v[1] - fg.v[0])
    reach = math.hypot(du, dv) * 1.01
    data = np.where(fg.mask, np.nan, fg.values)
    curves = find_contours(data, level, mask=~fg.mask)
    touched_edge = touched_mask = False
    for c in curves:
        pts = _to_uv(c, fg)
        ends = (pts[0], pts[-1])
        at_a = [math.hypot(p[0] - xa, p[1]) <= reach for p in ends]
        at_b = [math.hypot(p[0] - xb, p[1]) <= reach for p in ends]
        if at_a[0] and at_b[1]:
            return pts, None
        if at_a[1] and at_b[0]:
            return pts[::-1].copy(), None
        if any(at_a) or any(at_b):
            other = ends[1] if (at_a[0] or at_b[0]) else ends[0]
            vmax = np.max(np.abs(fg.v))
            on_box = (
                abs(abs(other[1]) - vmax) <= dv
                or other[0] <= fg.u[0] + du
                or other[0] >= fg.u[-1] - du
            )
            if on_box:
                touched_edge = True
            else:
                touched_mask = True
    if touched_edge:
        return None, "edge"
    if touched_mask:
        return None, "mask"
    return None, "none"


def level_path(
    angles,
    m: int,
    level: float | None = None,
    quadrant: int | None = None,
    grid: GridSpec | None = None,
    max_enlarge: int = 2,
) -> LevelPath | None:
    """Deformed path from 0 to a1/2 lying in one closed quadrant.

    Runs along the real axis where Im Phi <= level and bridges each stretch
    where Im Phi exceeds the level by a component of {Im(Phi + 2 pi m z) =
    level} inside the quadrant.  Returns None when no such component exists
    at this resolution; the box height is doubled up to ``max_enlarge`` times
    when a curve leaves through the top or side of the box.
    """
    sp = _as_spec(angles)
    if quadrant is None:
        quadrant = default_quadrant(sp.knot, m)
    if quadrant not in (1, 4):
        raise DomainError(f"quadrant must be 1 or 4, got {quadrant}")
    if level is None:
        level = default_level(sp).level
    base = grid or default_grid(sp.angles)
    start, end = 0.0, sp.alphas[0] / 2
    humps = _humps(sp, start, end, level)
    if humps is None:
        return None
    vmax = max(abs(base.v_lo), abs(base.v_hi))
    mask_hits = 0
    for _attempt in range(max_enlarge + 1):
        qg = _quadrant_grid(base, quadrant, vmax)
        fg = field(sp, m, qg)
        bridges = []
        retry = False
        for xa, xb in humps:
            pts, why = _bridge(fg, level, xa, xb)
            if pts is None:
                if why == "mask":
                    mask_hits += 1
                    if mask_hits > 1:
                        raise ResolutionError("level curve runs into masked cells repeatedly")
                if why in ("edge", "mask"):
                    retry = True
                    break
                return None
            bridges.append(pts)
        if not retry:
            return _assemble(sp, fg, level, quadrant, m, start, end, humps, bridges)
        vmax *= 2.0
    return None


def _assemble(sp, fg, level, quadrant, m, start, end, humps, bridges) -> LevelPath:
    du = fg.u[1] - fg.u[0]

    def axis(a, b):
        n = max(2, int(math.ceil((b - a) / du)) + 1)
        xs = np.linspace(a, b, n)
        return np.column_stack([xs, np.zeros_like(xs)])

    pieces = []
    segs = []
    pos = start
    for (xa, xb), br in zip(humps, bridges):
        pieces.append(axis(pos, xa))
        br = br.copy()
        # stay in the closed quadrant exactly
        br[:, 1] = np.maximum(br[:, 1], 0.0) if quadrant == 1 else np.minimum(br[:, 1], 0.0)
        pieces.append(br)
        pos = xb
    pieces.append(axis(pos, end))
    idx = 0
    for i, p in enumerate(pieces):
        segs.append(("axis" if i % 2 == 0 else "level", idx, idx + len(p)))
        idx += len(p)
    pts = np.concatenate(pieces)
    lv = [pts[a:b] for kind, a, b in segs if kind == "level"]
    if lv:
        lp = np.concatenate(lv)
        exact = np.imag(phi_array(sp, lp[:, 0] + 1j * lp[:, 1])) + 2 * math.pi * m * lp[:, 1]
        err = float(np.max(np.abs(exact - level)))
    else:
        err = 0.0
    with np.errstate(invalid="ignore"):
        step = np.nanmax(
            [np.nanmax(np.abs(np.diff(fg.values, axis=0))), np.nanmax(np.abs(np.diff(fg.values, axis=1)))]
        )
    return LevelPath(pts, float(level), quadrant, int(m), tuple(segs), tuple(humps), err, float(step))


# ---------------------------------------------------------------------------
# export


def export_grid(fg: FieldGrid, fmt: str = "csv") -> bytes:
    """CSV rows ``u,v,value,masked`` (row-major in v) or a JSON document."""
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["u", "v", "value", "masked"])
        for i, v in enumerate(fg.v):
            for j, u in enumerate(fg.u):
                if fg.mask[i, j]:
                    w.writerow([repr(float(u)), repr(float(v)), "", 1])
                else:
                    w.writerow([repr(float(u)), repr(float(v)), repr(float(fg.values[i, j])), 0])
        return buf.getvalue().encode()
    if fmt == "json":
        vals = [[None if fg.mask[i, j] else float(fg.values[i, j]) for j in range(len(fg.u))]
                for i in range(len(fg.v))]
        doc = {
            "schema_version": SCHEMA_VERSION,
            "meta": fg.meta,
            "u": [float(x) for x in fg.u],
            "v": [float(x) for x in fg.v],
            "values": vals,
        }
        return json.dumps(doc, allow_nan=False).encode()
    raise DomainError(f"unknown grid format {fmt!r}")


def read_grid(data: bytes, fmt: str = "csv") -> FieldGrid:
    text = data.decode()
    if fmt == "csv":
        rows = list(csv.DictReader(io.StringIO(text)))
        us = sorted({float(r["u"]) for r in rows})
        vs = sorted({float(r["v"]) for r in rows})
        ui = {u: j for j, u in enumerate(us)}
        vi = {v: i for i, v in enumerate(vs)}
        vals = np.full((len(vs), len(us)), np.nan)
        mask = np.zeros((len(vs), len(us)), dtype=bool)
        for r in rows:
            i, j = vi[float(r["v"])], ui[float(r["u"])]
            if r["masked"] == "1":
                mask[i, j] = True
            else:
                vals[i, j] = float(r["value"])
        return FieldGrid(np.array(us), np.array(vs), vals, mask)
    if fmt == "json":
        doc = json.loads(text)
        raw = doc["values"]
        mask = np.array([[x is None for x in row] for row in raw], dtype=bool)
        vals = np.array([[np.nan if x is None else x for x in row] for row in raw], dtype=float)
        return FieldGrid(np.array(doc["u"]), np.array(doc["v"]), vals, mask, doc.get("meta", {}))
    raise DomainError(f"unknown grid format {fmt!r}")
