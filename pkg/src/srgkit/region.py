"""Conjugate-symmetric regions of the extended complex plane and their calculus.

Two carriers are used throughout the toolbox:

* `DiskAlgebraRegion` -- an exact form: intersection of closed disks with
  real centers, minus a union of open disks with real centers.  This is the
  natural shape of the LTI operator bounds and of sector disks, and it is
  closed under real scaling, real shifts and modulus inversion.

* `CoverRegion` -- a finite cloud of complex samples together with a cover
  radius ``epsilon``.  Semantic contract: the true set is contained in the
  union of closed epsilon-balls around the samples.  Every calculus
  operation below preserves this over-approximation property, so radii
  computed from covers round up and separations round down -- the safe
  directions for certification.

Unbounded intermediate sets (inverses of regions containing 0) are carried
by an ``exterior_radius`` marker: the represented set additionally contains
every point of modulus >= that radius.

All regions are symmetric about the real axis by construction, all
operations are pure, and values are immutable; everything here is safe to
share across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import ndimage
from scipy.signal import fftconvolve

from .errors import InputError

__all__ = [
    "DiskAlgebraRegion",
    "CoverRegion",
    "disk",
    "disk_between",
    "to_cover",
    "scale_real",
    "shift_real",
    "mobius_inverse",
    "minkowski_sum",
    "minkowski_product",
    "chord_completion",
    "arc_completion",
    "improved_sum",
    "improved_product",
    "intersect_covers",
    "rmin",
    "dist",
    "dist_to_disk_algebra",
    "has_chord_property",
    "has_arc_property",
    "thin_cover",
    "region_to_json",
    "region_from_json",
]

_EPS_CELL = math.sqrt(2.0) / 2.0  # cover radius of a grid cell, in cells
# Above this many point pairs the literal pairwise algorithms switch to the
# rasterized (dense-grid) implementations of the same set operations.
_PAIRWISE_LIMIT = 4_000_000


# ---------------------------------------------------------------------------
# Exact disk-algebra carrier
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DiskAlgebraRegion:
    """Intersection of closed real-centered disks minus a union of open ones.

    Parameters
    ----------
    upper : sequence of (center, radius)
        Disks whose intersection contains the set.  An empty sequence means
        "no upper constraint" (the whole plane), which makes the region
        unbounded.
    lower : sequence of (center, radius)
        Open disks removed from the set.
    contains_infinity : bool
        Whether the point at infinity belongs to the region.
    """

    upper: tuple = ()
    lower: tuple = ()
    contains_infinity: bool = False

    def __post_init__(self):
        up = tuple((float(c), float(r)) for c, r in self.upper)
        lo = tuple((float(c), float(r)) for c, r in self.lower)
        for c, r in up + lo:
            if not math.isfinite(c) or not math.isfinite(r):
                raise InputError("disk centers and radii must be finite")
            if r < 0:
                raise InputError("disk radii must be nonnegative")
        object.__setattr__(self, "upper", up)
        object.__setattr__(self, "lower", tuple((c, r) for c, r in lo if r > 0.0))

    # -- basic queries ------------------------------------------------------

    @classmethod
    def empty(cls) -> "DiskAlgebraRegion":
        """The canonical empty region."""
        return cls(upper=((0.0, 0.0),), lower=((0.0, 1.0),))

    @classmethod
    def whole_plane(cls) -> "DiskAlgebraRegion":
        return cls(upper=(), lower=(), contains_infinity=True)

    @property
    def is_bounded(self) -> bool:
        return len(self.upper) > 0

    def bounding_radius(self):
        """Radius of a disk at 0 containing the finite part, or None."""
        if not self.upper:
            return None
        return min(abs(c) + r for c, r in self.upper)

    def diameter_bound(self):
        """Upper bound on the diameter of the finite part, or None."""
        if not self.upper:
            return None
        return 2.0 * min(r for c, r in self.upper)

    def contains(self, z, tol: float = 0.0):
        """Membership test, vectorized over `z`; `tol` inflates toward inclusion."""
        z = np.asarray(z, dtype=complex)
        ok = np.ones(z.shape, dtype=bool)
        for c, r in self.upper:
            ok &= np.abs(z - c) <= r + tol
        for c, r in self.lower:
            ok &= np.abs(z - c) >= r - tol
        return ok if ok.shape else bool(ok)

    def is_empty(self, samples: int = 400) -> bool:
        """Sampling-based emptiness check of the finite part."""
        if not self.upper:
            return False
        cov = self.to_cover(resolution=max(self.diameter_bound(), 1e-12) / samples * 4)
        return cov.points.size == 0 and not cov.contains_infinity

    # -- exact transformations ---------------------------------------------

    def scaled(self, alpha: float) -> "DiskAlgebraRegion":
        """Pointwise multiplication by a nonzero real number (exact)."""
        alpha = float(alpha)
        if alpha == 0.0:
            raise InputError("scaling a region by zero collapses it; build the zero region explicitly")
        up = tuple((alpha * c, abs(alpha) * r) for c, r in self.upper)
        lo = tuple((alpha * c, abs(alpha) * r) for c, r in self.lower)
        return DiskAlgebraRegion(up, lo, self.contains_infinity)

    def shifted(self, c: float) -> "DiskAlgebraRegion":
        """Pointwise addition of a real number (exact)."""
        c = float(c)
        up = tuple((cc + c, r) for cc, r in self.upper)
        lo = tuple((cc + c, r) for cc, r in self.lower)
        return DiskAlgebraRegion(up, lo, self.contains_infinity)

    def inverted(self, big_radius_factor: float = 1e6) -> "DiskAlgebraRegion":
        """Exact image under modulus inversion ``r e^{j phi} -> (1/r) e^{j phi}``.

        For sets symmetric about the real axis this coincides with the image
        under ``z -> 1/z``, which maps real-centered circles to real-centered
        circles.  A disk with 0 on its boundary maps to a half-plane, which is
        soundly over-approximated by a huge-disk complement (controlled by
        `big_radius_factor` times the region scale).
        """
        scale = max([abs(c) + r for c, r in self.upper + self.lower] + [1.0])
        big = big_radius_factor * max(scale, 1.0 / scale)
        new_upper = []
        new_lower = []
        out_inf = self.contains(0.0)
        out_zero = self.contains_infinity

        for c, r in self.upper:
            d = c * c - r * r
            if d > 0:  # 0 strictly outside: disk maps to a disk
                new_upper.append((c / d, r / d))
            elif d < 0:  # 0 strictly inside: maps to a disk complement
                new_lower.append((-c / (-d), r / (-d)))
            else:  # 0 on the boundary: half-plane
                if r == 0.0:  # the single point {0}: finite image empty
                    return DiskAlgebraRegion.empty() if not out_zero else DiskAlgebraRegion(
                        ((0.0, 0.0),), (), contains_infinity=False)
                a = 1.0 / (2.0 * c)  # half-plane {sign(c)*Re >= |a|}
                # contained in the closed complement of a huge open disk
                new_lower.append((a - math.copysign(big, c), big))

        for c, r in self.lower:
            d = c * c - r * r
            if d > 0:  # excluded disk away from 0 maps to an excluded disk
                new_lower.append((c / d, r / d))
            elif d < 0:  # excluded disk around 0: image confined to a disk
                new_upper.append((-c / (-d), r / (-d)))
            else:
                # excluded open half-plane; soundly exclude a smaller disk
                a = 1.0 / (2.0 * c)
                new_lower.append((a + math.copysign(big, c), big))

        if out_zero:
            # 0 must be a member; loosen constraints that would exclude it
            new_upper = [(c, r) for c, r in new_upper if abs(c) <= r]
            new_lower = [(c, r) for c, r in new_lower if abs(c) >= r]
        return DiskAlgebraRegion(tuple(new_upper), tuple(new_lower), bool(out_inf))

    # -- conversion ----------------------------------------------------------

    def to_cover(self, resolution=None, exterior_factor: float = 4.0) -> "CoverRegion":
        """Sound cover of the region on a square grid of the given pitch.

        Every point of the region lies within ``epsilon = resolution*sqrt(2)/2``
        of a returned sample.  Unbounded regions return a cover of the part
        inside a truncation circle plus an ``exterior_radius`` marker.
        """
        # degenerate point region
        if self.upper and all(r == 0.0 for _, r in self.upper):
            cs = {c for c, _ in self.upper}
            if len(cs) == 1:
                c = cs.pop()
                if self.contains(c):
                    return CoverRegion(np.array([c + 0.0j]), 0.0, self.contains_infinity)
            return CoverRegion.empty()

        if self.upper:
            x_lo = max(c - r for c, r in self.upper)
            x_hi = min(c + r for c, r in self.upper)
            y_hi = min(r for c, r in self.upper)
            if x_lo > x_hi:
                return CoverRegion.empty()
            ext = None
        else:
            reach = max([abs(c) + r for c, r in self.lower] + [1.0])
            ext = exterior_factor * reach
            x_lo, x_hi, y_hi = -ext, ext, ext

        if resolution is None:
            resolution = 0.01 * max(x_hi - x_lo, 2 * y_hi, 1e-9)
        resolution = float(resolution)
        if resolution <= 0:
            raise InputError("resolution must be positive")

        eps = resolution * _EPS_CELL
        xs = _grid_coords(x_lo - eps, x_hi + eps, resolution)
        ys = _grid_coords(0.0, y_hi + eps, resolution)
        ys = np.concatenate([-ys[:0:-1], ys])  # symmetric about the real axis
        zz = xs[None, :] + 1j * ys[:, None]
        mask = self.contains(zz, tol=eps)
        if ext is not None:
            mask &= np.abs(zz) <= ext + eps
        pts = zz[mask]
        if pts.size == 0 and ext is None:
            return CoverRegion.empty()
        return CoverRegion(pts, eps, self.contains_infinity or ext is not None,
                           exterior_radius=ext)

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "kind": "disk_algebra",
            "upper": [[c, r] for c, r in self.upper],
            "lower": [[c, r] for c, r in self.lower],
            "infinity": self.contains_infinity,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DiskAlgebraRegion":
        try:
            return cls(tuple((float(c), float(r)) for c, r in obj["upper"]),
                       tuple((float(c), float(r)) for c, r in obj["lower"]),
                       bool(obj.get("infinity", False)))
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed disk_algebra region: {exc}") from exc


def disk(center: float, radius: float) -> DiskAlgebraRegion:
    """Single closed disk with real center."""
    return DiskAlgebraRegion(((float(center), float(radius)),), ())


def disk_between(lo: float, hi: float) -> DiskAlgebraRegion:
    """The disk centered on the real axis meeting it in the interval [lo, hi]."""
    if lo > hi:
        raise InputError("disk interval requires lo <= hi")
    return disk((lo + hi) / 2.0, (hi - lo) / 2.0)


def disk_sum(a: DiskAlgebraRegion, b: DiskAlgebraRegion) -> DiskAlgebraRegion:
    """Exact Minkowski sum of two pure single-disk regions."""
    if len(a.upper) != 1 or len(b.upper) != 1 or a.lower or b.lower:
        raise InputError("disk_sum is exact only for single-disk regions")
    (c1, r1), (c2, r2) = a.upper[0], b.upper[0]
    return disk(c1 + c2, r1 + r2)


# ---------------------------------------------------------------------------
# Cover carrier
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CoverRegion:
    """Finite sample cloud with cover radius; true set <= union of eps-balls.

    Attributes
    ----------
    points : ndarray of complex
        Sample cloud, canonically sorted, closed under conjugation.
    epsilon : float
        Cover radius (same units as the points).
    contains_infinity : bool
        Whether the point at infinity belongs to the set.
    exterior_radius : float or None
        If set, the region additionally contains every z with
        ``|z| >= exterior_radius`` (which implies ``contains_infinity``).
    """

    points: np.ndarray
    epsilon: float = 0.0
    contains_infinity: bool = False
    exterior_radius: float = None

    def __post_init__(self):
        pts = np.atleast_1d(np.asarray(self.points, dtype=complex)).ravel()
        order = np.lexsort((pts.imag, pts.real))
        pts = pts[order]
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        eps = float(self.epsilon)
        if eps < 0 or not math.isfinite(eps):
            raise InputError("cover radius must be finite and nonnegative")
        object.__setattr__(self, "epsilon", eps)
        inf = bool(self.contains_infinity) or self.exterior_radius is not None
        object.__setattr__(self, "contains_infinity", inf)

    # -- constructors --------------------------------------------------------

    @classmethod
    def empty(cls) -> "CoverRegion":
        return cls(np.empty(0, dtype=complex), 0.0)

    @classmethod
    def single(cls, z: complex, epsilon: float = 0.0) -> "CoverRegion":
        pts = np.array([complex(z)])
        if pts[0].imag != 0.0:
            pts = np.array([complex(z), np.conj(complex(z))])
        return cls(pts, epsilon)

    @classmethod
    def zero(cls) -> "CoverRegion":
        """The singleton {0} (explicit constructor; scaling by 0 is an error)."""
        return cls.single(0.0)

    @classmethod
    def from_points(cls, points, epsilon: float = 0.0, contains_infinity: bool = False,
                    symmetrize: bool = True) -> "CoverRegion":
        pts = np.atleast_1d(np.asarray(points, dtype=complex)).ravel()
        if symmetrize and pts.size:
            pts = np.unique(np.concatenate([pts, np.conj(pts)]))
        return cls(pts, epsilon, contains_infinity)

    # -- queries --------------------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return self.points.size == 0 and not self.contains_infinity

    @property
    def maxmod(self) -> float:
        """Largest sample modulus of the finite part (0 for an empty cloud)."""
        return float(np.abs(self.points).max()) if self.points.size else 0.0

    @property
    def minmod(self) -> float:
        return float(np.abs(self.points).min()) if self.points.size else math.inf

    def covers(self, z, slack: float = 0.0):
        """Whether z lies within epsilon (+slack) of the cloud or marker zone."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        ok = np.zeros(z.shape, dtype=bool)
        if self.exterior_radius is not None:
            ok |= np.abs(z) >= self.exterior_radius - slack
        if self.points.size:
            from scipy.spatial import cKDTree

            tree = cKDTree(np.column_stack([self.points.real, self.points.imag]))
            d, _ = tree.query(np.column_stack([z.real, z.imag]), k=1)
            ok |= d <= self.epsilon + slack
        return ok if ok.size > 1 else bool(ok[0])

    def is_conjugate_symmetric(self, tol=None) -> bool:
        if self.points.size == 0:
            return True
        tol = self.epsilon if tol is None else tol
        from scipy.spatial import cKDTree

        xy = np.column_stack([self.points.real, self.points.imag])
        tree = cKDTree(xy)
        d, _ = tree.query(np.column_stack([self.points.real, -self.points.imag]), k=1)
        return bool(np.all(d <= tol + 1e-12))

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        obj = {
            "kind": "cover",
            "points": [[float(p.real), float(p.imag)] for p in self.points],
            "epsilon": self.epsilon,
            "infinity": self.contains_infinity,
        }
        if self.exterior_radius is not None:
            obj["exterior_radius"] = float(self.exterior_radius)
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "CoverRegion":
        try:
            pts = np.array([complex(re, im) for re, im in obj["points"]], dtype=complex)
            return cls(pts, float(obj["epsilon"]), bool(obj.get("infinity", False)),
                       exterior_radius=obj.get("exterior_radius"))
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed cover region: {exc}") from exc

    def to_csv(self) -> str:
        lines = ["re,im"]
        lines += [f"{p.real!r},{p.imag!r}" for p in self.points]
        return "\n".join(lines) + "\n"


def _as_cover(r, resolution=None) -> CoverRegion:
    if isinstance(r, CoverRegion):
        return r
    if isinstance(r, DiskAlgebraRegion):
        return r.to_cover(resolution)
    raise InputError(f"not a region: {type(r).__name__}")


def to_cover(r: DiskAlgebraRegion, resolution: float) -> CoverRegion:
    """Cover of a disk-algebra region; see `DiskAlgebraRegion.to_cover`."""
    if resolution is not None and resolution <= 0:
        raise InputError("resolution must be positive")
    return r.to_cover(resolution)


# ---------------------------------------------------------------------------
# Grid (raster) engine
#
# A raster is a boolean occupancy grid on the integer lattice pitch*Z^2; the
# occupied cell centers form a cover with epsilon = pitch*sqrt(2)/2.  The
# lattice alignment makes Minkowski sums of cell centers exact under index
# convolution, and intersections a dilated logical AND.
# ---------------------------------------------------------------------------


@dataclass
class _Raster:
    ix0: int
    iy0: int
    pitch: float
    cells: np.ndarray  # bool, shape (ny, nx)
    exterior_radius: float = None

    @property
    def eps(self) -> float:
        return self.pitch * _EPS_CELL

    def centers(self) -> np.ndarray:
        iy, ix = np.nonzero(self.cells)
        return (self.ix0 + ix) * self.pitch + 1j * ((self.iy0 + iy) * self.pitch)

    def to_cover(self, contains_infinity: bool = False) -> CoverRegion:
        return CoverRegion(self.centers(), self.eps,
                           contains_infinity or self.exterior_radius is not None,
                           exterior_radius=self.exterior_radius)


def _grid_coords(lo: float, hi: float, pitch: float) -> np.ndarray:
    i0 = math.floor(lo / pitch)
    i1 = math.ceil(hi / pitch)
    return np.arange(i0, i1 + 1) * pitch


def _dilate(cells: np.ndarray, radius_cells: float) -> np.ndarray:
    """Euclidean dilation of a boolean mask by `radius_cells`."""
    if radius_cells <= 0 or not cells.any():
        return cells
    dt = ndimage.distance_transform_edt(~cells)
    return dt <= radius_cells + 1e-9


def _raster_from_points(points: np.ndarray, eps: float, pitch: float,
                        exterior_radius=None, pad_cells: int = 2) -> _Raster:
    """Sound raster cover of a point cloud with cover radius eps."""
    pts = np.asarray(points, dtype=complex).ravel()
    rad = eps / pitch + 1.5  # covers eps plus two half-cell quantization offsets
    pad = pad_cells + int(math.ceil(rad))
    if pts.size == 0:
        return _Raster(0, 0, pitch, np.zeros((1, 1), dtype=bool), exterior_radius)
    ix = np.round(pts.real / pitch).astype(np.int64)
    iy = np.round(pts.imag / pitch).astype(np.int64)
    iy_amp = int(max(abs(iy.min()), abs(iy.max()))) + pad
    ix0 = int(ix.min()) - pad
    nx = int(ix.max()) - ix0 + 1 + pad
    ny = 2 * iy_amp + 1
    cells = np.zeros((ny, nx), dtype=bool)
    cells[iy + iy_amp, ix - ix0] = True
    cells = _dilate(cells, rad)
    return _Raster(ix0, -iy_amp, pitch, cells, exterior_radius)


def _raster_of(cov: CoverRegion, pitch: float) -> _Raster:
    return _raster_from_points(cov.points, cov.epsilon, pitch,
                               exterior_radius=cov.exterior_radius)


def _raster_sum(a: _Raster, b: _Raster) -> _Raster:
    """Minkowski sum; exact on cell centers via index convolution."""
    if abs(a.pitch - b.pitch) > 1e-15 * a.pitch:
        b = _raster_from_points(b.centers(), b.eps, a.pitch, b.exterior_radius)
    conv = fftconvolve(a.cells.astype(np.float32), b.cells.astype(np.float32))
    cells = conv > 0.5
    cells = _dilate(cells, 2.0)  # covers eps_a + eps_b = pitch*sqrt(2)
    ext = None
    for r1, r2 in ((a, b), (b, a)):
        if r1.exterior_radius is not None:
            reach = _raster_maxmod(r2) + r2.eps
            cand = max(r1.exterior_radius - reach, 0.0)
            ext = cand if ext is None else min(ext, cand)
    return _Raster(a.ix0 + b.ix0, a.iy0 + b.iy0, a.pitch, cells, ext)


def _raster_maxmod(r: _Raster) -> float:
    pts = r.centers()
    return float(np.abs(pts).max()) if pts.size else 0.0


def _raster_union_frame(rs):
    ix0 = min(r.ix0 for r in rs)
    iy0 = min(r.iy0 for r in rs)
    ix1 = max(r.ix0 + r.cells.shape[1] for r in rs)
    iy1 = max(r.iy0 + r.cells.shape[0] for r in rs)
    return ix0, iy0, ix1 - ix0, iy1 - iy0


def _raster_embed(r: _Raster, ix0, iy0, nx, ny) -> np.ndarray:
    out = np.zeros((ny, nx), dtype=bool)
    oy, ox = r.iy0 - iy0, r.ix0 - ix0
    out[oy:oy + r.cells.shape[0], ox:ox + r.cells.shape[1]] = r.cells
    if r.exterior_radius is not None:
        xs = (ix0 + np.arange(nx)) * r.pitch
        ys = (iy0 + np.arange(ny)) * r.pitch
        rr = np.hypot(xs[None, :], ys[:, None])
        out |= rr >= r.exterior_radius - r.pitch
    return out


def _raster_and(rs, slack_cells: float = 2.0) -> _Raster:
    """Sound intersection of rasters on a shared lattice."""
    pitch = rs[0].pitch
    for r in rs[1:]:
        if abs(r.pitch - pitch) > 1e-15 * pitch:
            raise InputError("raster intersection requires a common pitch")
    ix0, iy0, nx, ny = _raster_union_frame(rs)
    acc = None
    for r in rs:
        eff = _dilate(_raster_embed(r, ix0, iy0, nx, ny), slack_cells)
        acc = eff if acc is None else (acc & eff)
    ext = None
    if all(r.exterior_radius is not None for r in rs):
        ext = max(r.exterior_radius for r in rs)
    return _Raster(ix0, iy0, pitch, acc, ext)


def _raster_chord(r: _Raster) -> _Raster:
    """Vertical-segment completion: fill each column between +-max|y|."""
    if r.exterior_radius is not None:
        # chords of a full exterior zone sweep out the whole plane
        return _Raster(0, 0, r.pitch, np.ones((1, 1), dtype=bool), exterior_radius=0.0)
    cells = _dilate(r.cells, 1.0)
    ny, nx = cells.shape
    iy_amp = max(-r.iy0, r.iy0 + ny - 1)
    out = np.zeros((2 * iy_amp + 1, nx), dtype=bool)
    out[r.iy0 + iy_amp:r.iy0 + iy_amp + ny, :] = cells
    iy = np.abs(np.arange(-iy_amp, iy_amp + 1))
    occupied = out.any(axis=0)
    col_amp = np.where(occupied, (out * iy[:, None]).max(axis=0), -1)
    filled = iy[:, None] <= col_amp[None, :]
    return _Raster(r.ix0, -iy_amp, r.pitch, filled, None)


def _arc_samples(points: np.ndarray, eps: float, side: str, spacing: float,
                 max_per_point: int = 4096) -> np.ndarray:
    """Sample cloud covering the origin-centered arcs of everything within
    eps of the given points; output points pair with `eps_out` = eps + spacing."""
    out = [points]
    rho = np.abs(points)
    phi = np.abs(np.angle(points))
    for p, r0, f0 in zip(points, rho, phi):
        if r0 <= eps + spacing:
            # arcs of near-origin points stay within a small disk at 0
            out.append(np.array([0.0 + 0.0j]))
            continue
        dphi = 2.0 * math.asin(min(1.0, eps / r0)) if eps > 0 else 0.0
        if side == "right":
            t0, t1 = 0.0, min(f0 + dphi, math.pi)
        else:
            t0, t1 = max(f0 - dphi, 0.0), math.pi
        if t1 < t0:
            continue
        n = min(max_per_point, max(2, int(math.ceil((t1 - t0) * r0 / spacing)) + 1))
        th = np.linspace(t0, t1, n)
        arc = r0 * np.exp(1j * th)
        out.append(arc)
        out.append(np.conj(arc))
    return np.concatenate(out)


def _raster_arc(r: _Raster, side: str) -> _Raster:
    pts = r.centers()
    samples = _arc_samples(pts, r.eps, side, spacing=r.pitch)
    return _raster_from_points(samples, r.eps + r.pitch, r.pitch,
                               exterior_radius=r.exterior_radius)


def _raster_scale(r: _Raster, alpha: float) -> _Raster:
    if alpha == 0.0:
        raise InputError("scaling a region by zero collapses it; build the zero region explicitly")
    cells, ix0, iy0 = r.cells, r.ix0, r.iy0
    if alpha < 0:
        cells = cells[::-1, ::-1]
        ny, nx = cells.shape
        ix0 = -(r.ix0 + nx - 1)
        iy0 = -(r.iy0 + ny - 1)
    ext = None if r.exterior_radius is None else abs(alpha) * r.exterior_radius
    return _Raster(ix0, iy0, abs(alpha) * r.pitch, cells.copy(), ext)


def _scatter_pairwise(f, pts_a, pts_b, pitch, inflate, chunk: int = 2_000_000):
    """Rasterize {f(a,b)} over all pairs without materializing the pairs.

    `inflate` is the distance by which the scattered cells are dilated to
    account for the input cover radii; returns a raster with the cell eps.
    """
    prods_min_x = prods_max_x = prods_max_y = None
    # first pass: bounding box
    na, nb = len(pts_a), len(pts_b)
    step = max(1, chunk // max(nb, 1))
    boxes = []
    for s in range(0, na, step):
        vals = f(pts_a[s:s + step, None], pts_b[None, :]).ravel()
        boxes.append((vals.real.min(), vals.real.max(), np.abs(vals.imag).max()))
    prods_min_x = min(b[0] for b in boxes)
    prods_max_x = max(b[1] for b in boxes)
    prods_max_y = max(b[2] for b in boxes)
    pad = int(math.ceil(inflate / pitch)) + 3
    ix0 = math.floor(prods_min_x / pitch) - pad
    nx = math.ceil(prods_max_x / pitch) - ix0 + 1 + pad
    iy_amp = int(math.ceil(prods_max_y / pitch)) + pad
    ny = 2 * iy_amp + 1
    cells = np.zeros((ny, nx), dtype=bool)
    for s in range(0, na, step):
        vals = f(pts_a[s:s + step, None], pts_b[None, :]).ravel()
        ix = np.round(vals.real / pitch).astype(np.int64) - ix0
        iy = np.round(vals.imag / pitch).astype(np.int64) + iy_amp
        cells[iy, ix] = True
    cells = _dilate(cells, inflate / pitch + 1.5)
    return _Raster(ix0, -iy_amp, pitch, cells)


# ---------------------------------------------------------------------------
# Public calculus on covers
# ---------------------------------------------------------------------------


def scale_real(r: CoverRegion, alpha: float) -> CoverRegion:
    """Pointwise multiplication by a nonzero real scalar."""
    alpha = float(alpha)
    if alpha == 0.0:
        raise InputError("scaling a region by zero collapses it; build the zero region explicitly")
    ext = None if r.exterior_radius is None else abs(alpha) * r.exterior_radius
    return CoverRegion(r.points * alpha, abs(alpha) * r.epsilon, r.contains_infinity,
                       exterior_radius=ext)


def shift_real(r: CoverRegion, c: float) -> CoverRegion:
    """Pointwise addition of a real constant; the cover radius is unchanged."""
    c = float(c)
    ext = None
    if r.exterior_radius is not None:
        ext = max(r.exterior_radius - abs(c), 0.0) or 1e-300
    return CoverRegion(r.points + c, r.epsilon, r.contains_infinity, exterior_radius=ext)


def mobius_inverse(r: CoverRegion, warn=None) -> CoverRegion:
    """Image under ``rho e^{j phi} -> (1/rho) e^{j phi}`` with sound cover radius.

    Points within epsilon of the origin contribute the point at infinity.
    The output radius is ``eps / (delta (delta - eps))`` with delta the
    smallest modulus among points of modulus > eps, a uniform Lipschitz bound
    for the inversion away from the origin.
    """
    if r.is_empty:
        return CoverRegion.empty()
    mods = np.abs(r.points)
    far = mods > r.epsilon
    out_inf = bool(np.any(~far)) if r.points.size else False
    pts = []
    ext = None
    if r.contains_infinity:
        pts.append(np.array([0.0 + 0.0j]))
    if not np.any(far):
        if warn is not None:
            warn("modulus inversion degenerates: every sample is within epsilon of 0")
        return CoverRegion(np.concatenate(pts) if pts else np.empty(0, dtype=complex),
                           0.0, contains_infinity=True, exterior_radius=None)
    delta = float(mods[far].min())
    eps_out = r.epsilon / (delta * (delta - r.epsilon)) if r.epsilon > 0 else 0.0
    if eps_out < 0:
        eps_out = math.inf
    p = r.points[far]
    pts.append(p / (np.abs(p) ** 2))
    if r.exterior_radius is not None and r.exterior_radius > 0:
        # the exterior zone inverts into a small disk at the origin
        hole = 1.0 / r.exterior_radius
        if hole > eps_out:
            step = max(eps_out, hole / 64)
            radii = np.arange(0.0, hole + step, step)
            for rho in radii:
                n_ang = max(1, int(math.ceil(2 * math.pi * rho / step)))
                ang = np.linspace(0, 2 * math.pi, n_ang, endpoint=False)
                pts.append(rho * np.exp(1j * ang))
    return CoverRegion(np.concatenate(pts), eps_out, out_inf)


def minkowski_sum(a: CoverRegion, b: CoverRegion) -> CoverRegion:
    """All pairwise sums; cover radii add; infinity joins if present either side."""
    if a.is_empty or b.is_empty:
        return CoverRegion.empty()
    inf = a.contains_infinity or b.contains_infinity
    eps = a.epsilon + b.epsilon
    if a.points.size * b.points.size > _PAIRWISE_LIMIT or \
            a.exterior_radius is not None or b.exterior_radius is not None:
        pitch = _auto_pitch([a, b], eps)
        ra, rb = _raster_of(a, pitch), _raster_of(b, pitch)
        out = _raster_sum(ra, rb).to_cover(inf)
        return CoverRegion(out.points, max(out.epsilon, eps), inf,
                           exterior_radius=out.exterior_radius)
    pts = (a.points[:, None] + b.points[None, :]).ravel()
    return CoverRegion(_dedupe(pts), eps, inf)


def minkowski_product(a: CoverRegion, b: CoverRegion) -> CoverRegion:
    """All pairwise products; the cover radius follows the product rule
    ``Ma*eps_b + Mb*eps_a + eps_a*eps_b``; 0*inf = inf and inf*inf = inf."""
    if a.is_empty or b.is_empty:
        return CoverRegion.empty()
    if a.exterior_radius is not None or b.exterior_radius is not None:
        raise InputError("products of unbounded regions are not supported")
    inf = a.contains_infinity or b.contains_infinity
    eps = a.maxmod * b.epsilon + b.maxmod * a.epsilon + a.epsilon * b.epsilon
    if a.points.size * b.points.size > _PAIRWISE_LIMIT:
        pitch = _auto_pitch_product(a, b)
        rast = _scatter_pairwise(lambda x, y: x * y, a.points, b.points, pitch, eps)
        out = rast.to_cover(inf)
        return CoverRegion(out.points, max(out.epsilon, eps), inf)
    pts = (a.points[:, None] * b.points[None, :]).ravel()
    return CoverRegion(_dedupe(pts), eps, inf)


def chord_completion(r: CoverRegion, spacing=None) -> CoverRegion:
    """Add, for every point x+jy, the vertical segment {x+jy': |y'| <= |y|}."""
    if r.is_empty:
        return r
    if r.exterior_radius is not None:
        # chords of the exterior zone sweep out the whole plane
        return CoverRegion(r.points, r.epsilon, True, exterior_radius=0.0)
    if spacing is None:
        spacing = max(r.epsilon, 1e-3 * max(r.maxmod, 1e-12))
    ymax = np.abs(r.points.imag) + r.epsilon
    counts = np.maximum(2, np.ceil(2 * ymax / spacing).astype(int) + 1)
    if counts.sum() > _PAIRWISE_LIMIT // 2:
        rast = _raster_chord(_raster_of(r, spacing))
        return rast.to_cover(r.contains_infinity)
    segs = [r.points]
    for p, ym, n in zip(r.points, ymax, counts):
        segs.append(p.real + 1j * np.linspace(-ym, ym, n))
    eps_out = math.hypot(r.epsilon, spacing / 2.0)
    return CoverRegion(_dedupe(np.concatenate(segs)), eps_out, r.contains_infinity)


def arc_completion(r: CoverRegion, side: str, spacing=None) -> CoverRegion:
    """Add origin-centered arcs through each point and its conjugate.

    ``side="right"`` adds {rho e^{j t}: |t| <= |phi|}; ``side="left"`` adds
    the complementary arcs through the negative real axis.
    """
    if side not in ("left", "right"):
        raise InputError("arc side must be 'left' or 'right'")
    if r.is_empty:
        return r
    if r.exterior_radius is not None:
        raise InputError("arc completion of an unbounded region is not supported")
    if spacing is None:
        spacing = max(r.epsilon, 1e-3 * max(r.maxmod, 1e-12))
    samples = _arc_samples(r.points, r.epsilon, side, spacing)
    return CoverRegion(_dedupe(samples), r.epsilon + spacing, r.contains_infinity)


def intersect_covers(a: CoverRegion, b: CoverRegion) -> CoverRegion:
    """Sound cover of the intersection by mutual ball-overlap filtering.

    Keeps the points of each cloud whose ball meets some ball of the other
    cloud; the union of both kept sides covers the true intersection.
    """
    if a.is_empty or b.is_empty:
        return CoverRegion.empty()
    from scipy.spatial import cKDTree

    rad = a.epsilon + b.epsilon
    keep = []
    for s, t in ((a, b), (b, a)):
        if not s.points.size:
            continue
        if t.points.size:
            tree = cKDTree(np.column_stack([t.points.real, t.points.imag]))
            d, _ = tree.query(np.column_stack([s.points.real, s.points.imag]), k=1)
            mask = d <= rad
        else:
            mask = np.zeros(s.points.size, dtype=bool)
        if t.exterior_radius is not None:
            mask |= np.abs(s.points) >= t.exterior_radius - rad
        keep.append(s.points[mask])
    inf = a.contains_infinity and b.contains_infinity
    ext = None
    if a.exterior_radius is not None and b.exterior_radius is not None:
        ext = max(a.exterior_radius, b.exterior_radius)
    return CoverRegion(_dedupe(np.concatenate(keep)) if keep else np.empty(0, complex),
                       max(a.epsilon, b.epsilon), inf, exterior_radius=ext)


def improved_sum(a: CoverRegion, b: CoverRegion, pitch=None) -> CoverRegion:
    """Sum bound with the least chord completion:
    cover of ``(chord(a) + b) & (a + chord(b))``."""
    if a.is_empty or b.is_empty:
        return CoverRegion.empty()
    inf = a.contains_infinity or b.contains_infinity
    big = (a.points.size * b.points.size > _PAIRWISE_LIMIT
           or a.exterior_radius is not None or b.exterior_radius is not None)
    if not big and pitch is None:
        s1 = minkowski_sum(chord_completion(a), b)
        s2 = minkowski_sum(a, chord_completion(b))
        out = intersect_covers(s1, s2)
        return CoverRegion(out.points, out.epsilon, inf, exterior_radius=out.exterior_radius)
    if pitch is None:
        pitch = _auto_pitch([a, b], a.epsilon + b.epsilon)
    ra, rb = _raster_of(a, pitch), _raster_of(b, pitch)
    sides = []
    if a.exterior_radius is None:
        sides.append(_raster_sum(_raster_chord(ra), rb))
    if b.exterior_radius is None:
        sides.append(_raster_sum(ra, _raster_chord(rb)))
    if not sides:  # chords of either side fill the plane
        sides = [_raster_sum(ra, rb)]
    out = sides[0] if len(sides) == 1 else _raster_and(sides)
    return out.to_cover(inf)


def improved_product(a: CoverRegion, b: CoverRegion, pitch=None) -> CoverRegion:
    """Product bound with the least arc completion: four-way intersection of
    the left/right arc-completed pairwise products."""
    if a.is_empty or b.is_empty:
        return CoverRegion.empty()
    if a.exterior_radius is not None or b.exterior_radius is not None:
        raise InputError("products of unbounded regions are not supported")
    inf = a.contains_infinity or b.contains_infinity
    small = a.points.size * b.points.size <= _PAIRWISE_LIMIT // 4 and pitch is None
    if small:
        factors = [
            minkowski_product(arc_completion(a, "right"), b),
            minkowski_product(a, arc_completion(b, "right")),
            minkowski_product(arc_completion(a, "left"), b),
            minkowski_product(a, arc_completion(b, "left")),
        ]
        out = factors[0]
        for f in factors[1:]:
            out = intersect_covers(out, f)
        return CoverRegion(out.points, out.epsilon, inf)
    if pitch is None:
        pitch = _auto_pitch_product(a, b)
    rasters = []
    for ca, cb in (("right", None), (None, "right"), ("left", None), (None, "left")):
        aa = arc_completion(a, ca, spacing=pitch) if ca else a
        bb = arc_completion(b, cb, spacing=pitch) if cb else b
        eta = aa.maxmod * bb.epsilon + bb.maxmod * aa.epsilon + aa.epsilon * bb.epsilon
        rasters.append(_scatter_pairwise(lambda x, y: x * y, aa.points, bb.points,
                                         pitch, eta))
    return _raster_and(rasters).to_cover(inf)


def rmin(r) -> float:
    """Smallest radius of an origin-centered disk containing the region,
    rounded up (infinite if the region reaches infinity)."""
    if isinstance(r, DiskAlgebraRegion):
        if r.contains_infinity:
            return math.inf
        br = r.bounding_radius()
        return math.inf if br is None else br
    if r.contains_infinity or r.exterior_radius is not None:
        return math.inf
    if r.points.size == 0:
        return 0.0
    return r.maxmod + r.epsilon


def dist(a: CoverRegion, b: CoverRegion) -> float:
    """Lower bound on the set distance inf |z1 - z2| (|inf - inf| := 0)."""
    if a.contains_infinity and b.contains_infinity:
        return 0.0
    if a.is_empty or b.is_empty:
        return math.inf
    cands = []
    if a.points.size and b.points.size:
        from scipy.spatial import cKDTree

        tree = cKDTree(np.column_stack([b.points.real, b.points.imag]))
        d, _ = tree.query(np.column_stack([a.points.real, a.points.imag]), k=1)
        cands.append(float(d.min()))
    for s, t in ((a, b), (b, a)):
        if s.exterior_radius is not None and t.points.size:
            cands.append(max(0.0, s.exterior_radius - t.maxmod))
    if not cands:
        return math.inf
    return max(0.0, min(cands) - a.epsilon - b.epsilon)


def dist_to_disk_algebra(points, reg: DiskAlgebraRegion):
    """Vectorized lower bound on the distance from each point to the region.

    Each violated constraint yields a valid lower bound; points inside the
    region get 0.  Rounding down keeps separation certificates sound.
    """
    z = np.atleast_1d(np.asarray(points, dtype=complex))
    lb = np.zeros(z.shape)
    for c, r in reg.upper:
        lb = np.maximum(lb, np.abs(z - c) - r)
    for c, r in reg.lower:
        lb = np.maximum(lb, r - np.abs(z - c))
    return lb


def has_chord_property(r: CoverRegion, tol: float) -> bool:
    """Whether sampled vertical chords of every point stay within tol of the cover."""
    if tol < r.epsilon:
        raise InputError("chord tolerance must be at least the cover radius")
    if r.is_empty or r.points.size == 0:
        return True
    samples = []
    for p in r.points:
        n = max(2, int(math.ceil(2 * abs(p.imag) / max(tol, 1e-12))) + 1)
        samples.append(p.real + 1j * np.linspace(-p.imag, p.imag, n))
    return bool(np.all(r.covers(np.concatenate(samples), slack=tol - r.epsilon)))


def has_arc_property(r: CoverRegion, side: str, tol: float) -> bool:
    """Whether sampled left/right arcs of every point stay within tol of the cover."""
    if tol < r.epsilon:
        raise InputError("arc tolerance must be at least the cover radius")
    if r.is_empty or r.points.size == 0:
        return True
    samples = _arc_samples(r.points, 0.0, side, spacing=max(tol, 1e-12))
    return bool(np.all(r.covers(samples, slack=tol - r.epsilon)))


def thin_cover(r: CoverRegion, pitch: float) -> CoverRegion:
    """Snap the cloud to a grid of the given pitch, folding the snap distance
    into the cover radius.  Used to bound cloud sizes between operations."""
    if r.points.size == 0:
        return r
    ix = np.round(r.points.real / pitch).astype(np.int64)
    iy = np.round(r.points.imag / pitch).astype(np.int64)
    key = np.unique(np.stack([ix, iy], axis=1), axis=0)
    pts = key[:, 0] * pitch + 1j * key[:, 1] * pitch
    return CoverRegion(pts, r.epsilon + pitch * _EPS_CELL, r.contains_infinity,
                       exterior_radius=r.exterior_radius)


def _dedupe(pts: np.ndarray) -> np.ndarray:
    return np.unique(pts)


def _auto_pitch(regions, eps: float) -> float:
    scale = max([r.maxmod for r in regions] + [1e-9])
    base = max(eps / 2.0, 1e-4 * scale)
    return base


def _auto_pitch_product(a: CoverRegion, b: CoverRegion) -> float:
    scale = max(a.maxmod * b.maxmod, 1e-9)
    return max(2e-3 * scale, (a.epsilon + b.epsilon) / 2.0, 1e-12)


# ---------------------------------------------------------------------------
# Serialization helpers shared by both carriers
# ---------------------------------------------------------------------------


def region_to_json(r) -> dict:
    return r.to_json()


def region_from_json(obj: dict):
    kind = obj.get("kind")
    if kind == "disk_algebra":
        return DiskAlgebraRegion.from_json(obj)
    if kind == "cover":
        return CoverRegion.from_json(obj)
    raise InputError(f"unknown region kind: {kind!r}")


def load_region(path: str):
    with open(path) as fh:
        return region_from_json(json.load(fh))


def save_region(r, path: str):
    with open(path, "w") as fh:
        json.dump(region_to_json(r), fh, sort_keys=True, indent=1)
        fh.write("\n")
