"""Added-mass tensors of immersed rigid bodies by surface quadrature.

For a body with surface impedance z_f(r) the interface force linearization
produces four 3x3 tensors built from the outward normal n and the moment
arm factor Yn = y x n (y = r - center):

    A^vv = | z_f n n^T ds          A^vw = | z_f n (Yn)^T ds
    A^wv = | z_f (Yn) n^T ds       A^ww = | z_f (Yn)(Yn)^T ds

assembled into a 6x6 composite that is symmetric positive semi-definite.
Planar shapes embed in 3D with n3 = y3 = 0, so a single assembly path
serves both; closed forms exist for axis-aligned boxes, circles and
spheres.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss


class DegenerateGeometry(ValueError):
    """Surface sampling produced a non-positive metric factor."""


class UnsupportedShape(ValueError):
    """No closed-form tensors exist for this shape."""


# -- shapes -------------------------------------------------------------------


def _require_positive(**dims):
    for name, val in dims.items():
        if not val > 0.0:
            raise ValueError(f"{name} must be > 0, got {val}")


@dataclass(frozen=True)
class Ellipse:
    """x = (a cos 2 pi s, b sin 2 pi s); a = b is a circle."""

    a: float
    b: float

    def __post_init__(self):
        _require_positive(a=self.a, b=self.b)


@dataclass(frozen=True)
class Ellipsoid:
    """Semi-axes (a, b, c); a = b = c is a sphere."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        _require_positive(a=self.a, b=self.b, c=self.c)


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned rectangle with full side lengths (lx, ly)."""

    lx: float
    ly: float

    def __post_init__(self):
        _require_positive(lx=self.lx, ly=self.ly)


@dataclass(frozen=True)
class Prism:
    """Axis-aligned box with full side lengths (lx, ly, lz)."""

    lx: float
    ly: float
    lz: float

    def __post_init__(self):
        _require_positive(lx=self.lx, ly=self.ly, lz=self.lz)


@dataclass(frozen=True)
class ParametricCurve2D:
    """Closed curve s in [0,1) -> (x, y); fn must satisfy fn(0) = fn(1).

    Derivatives are taken spectrally from equispaced samples, so fn should
    be smooth and periodic.
    """

    fn: object  # callable s-array -> (n, 2) positions


@dataclass(frozen=True)
class ParametricSurface3D:
    """Surface (theta, u) in [0, 2pi) x (-1, 1) -> (x, y, z), periodic in
    theta, oriented so d_theta x d_u points outward.  Partials are taken by
    central differences."""

    fn: object  # callable (theta-array, u-array) -> (n, 3) positions


@dataclass(frozen=True)
class Starfish:
    """Pinwheel star curve

        x(s) = R(s) (cos th(s), sin th(s)),   s in [0, 1)
        R = ra + rb r,  th = 2 pi s + alpha r^2,  r = q^2,
        q = (1 + sin(2 pi na s))/2

    with na arms and sweep angle alpha."""

    na: int
    ra: float
    rb: float
    alpha: float

    def __post_init__(self):
        if not (isinstance(self.na, (int, np.integer)) and self.na >= 1):
            raise ValueError(f"na must be an integer >= 1, got {self.na}")
        _require_positive(ra=self.ra, rb=self.rb)

    @classmethod
    def default(cls) -> "Starfish":
        return cls(na=5, ra=0.4, rb=0.6, alpha=np.pi / 5)


@dataclass(frozen=True)
class SurfaceSample:
    """One quadrature node: position, outward unit normal, local impedance
    and arclength/area weight."""

    position: np.ndarray  # (3,)
    normal: np.ndarray  # (3,), |n| = 1
    z_f: float
    weight: float


# -- sampling -----------------------------------------------------------------


def _impedance_values(impedance_fn, positions: np.ndarray) -> np.ndarray:
    if impedance_fn is None:
        return np.ones(len(positions))
    if np.isscalar(impedance_fn):
        return np.full(len(positions), float(impedance_fn))
    z = np.asarray(impedance_fn(positions), dtype=float)
    return np.broadcast_to(z, (len(positions),)).copy()


def _pack(positions, normals, z, weights):
    if np.any(weights <= 0.0):
        raise DegenerateGeometry("non-positive quadrature weight")
    norms = np.linalg.norm(normals, axis=1)
    assert np.all(np.abs(norms - 1.0) < 1e-10), "normals not unit length"
    return [
        SurfaceSample(positions[i], normals[i], z[i], weights[i])
        for i in range(len(weights))
    ]


def _curve_samples(positions2, tangents2, n):
    """Finish a closed-curve sampling from positions and ds/ds tangents."""
    metric = np.hypot(tangents2[:, 0], tangents2[:, 1])
    if np.any(metric <= 0.0) or not np.all(np.isfinite(metric)):
        raise DegenerateGeometry("curve metric factor <= 0")
    t_hat = tangents2 / metric[:, None]
    normals2 = np.column_stack([t_hat[:, 1], -t_hat[:, 0]])
    # flip for clockwise parameterizations (signed area by the shoelace rule)
    area2 = np.sum(positions2[:, 0] * tangents2[:, 1] - positions2[:, 1] * tangents2[:, 0])
    if area2 < 0.0:
        normals2 = -normals2
    weights = metric / n  # periodic trapezoid in s
    pos3 = np.column_stack([positions2, np.zeros(n)])
    nrm3 = np.column_stack([normals2, np.zeros(n)])
    return pos3, nrm3, weights


def _sample_ellipse(shape: Ellipse, n: int):
    th = 2.0 * np.pi * np.arange(n) / n
    pos = np.column_stack([shape.a * np.cos(th), shape.b * np.sin(th)])
    tan = 2.0 * np.pi * np.column_stack([-shape.a * np.sin(th), shape.b * np.cos(th)])
    return _curve_samples(pos, tan, n)


def _sample_starfish(shape: Starfish, n: int):
    s = np.arange(n) / n
    w = 2.0 * np.pi * shape.na
    q = 0.5 * (1.0 + np.sin(w * s))
    dq = 0.5 * w * np.cos(w * s)
    r = q * q
    dr = 2.0 * q * dq
    radius = shape.ra + shape.rb * r
    dradius = shape.rb * dr
    th = 2.0 * np.pi * s + shape.alpha * r * r
    dth = 2.0 * np.pi + 2.0 * shape.alpha * r * dr
    ct, st = np.cos(th), np.sin(th)
    pos = np.column_stack([radius * ct, radius * st])
    tan = np.column_stack(
        [dradius * ct - radius * dth * st, dradius * st + radius * dth * ct]
    )
    return _curve_samples(pos, tan, n)


def _sample_parametric_curve(shape: ParametricCurve2D, n: int):
    ends = np.asarray(shape.fn(np.array([0.0, 1.0])), dtype=float)
    scale = 1.0 + np.max(np.abs(ends))
    if np.max(np.abs(ends[0] - ends[1])) > 1e-12 * scale:
        raise ValueError("parametric curve is not closed: fn(0) != fn(1)")
    s = np.arange(n) / n
    pos = np.asarray(shape.fn(s), dtype=float)
    assert pos.shape == (n, 2), f"curve fn returned shape {pos.shape}"
    k = np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0:
        k[n // 2] = 0.0  # drop the unmatched Nyquist mode
    tan = np.real(np.fft.ifft(np.fft.fft(pos, axis=0) * (2j * np.pi * k)[:, None], axis=0))
    return _curve_samples(pos, tan, n)


def _sample_ellipsoid(shape: Ellipsoid, n: int):
    a, b, c = shape.a, shape.b, shape.c
    th = 2.0 * np.pi * np.arange(n) / n
    u, gw = leggauss(n)
    TH, U = np.meshgrid(th, u, indexing="ij")
    TH, U = TH.ravel(), U.ravel()
    W = np.outer(np.full(n, 2.0 * np.pi / n), gw).ravel()
    rt = np.sqrt(1.0 - U * U)
    pos = np.column_stack([a * rt * np.cos(TH), b * rt * np.sin(TH), c * U])
    # cross(d_theta, d_u) = (b c rt cos, a c rt sin, a b u): outward
    vec = np.column_stack([b * c * rt * np.cos(TH), a * c * rt * np.sin(TH), a * b * U])
    metric = np.linalg.norm(vec, axis=1)
    if np.any(metric <= 0.0):
        raise DegenerateGeometry("ellipsoid metric factor <= 0")
    return pos, vec / metric[:, None], W * metric


def _sample_parametric_surface(shape: ParametricSurface3D, n: int):
    th = 2.0 * np.pi * np.arange(n) / n
    u, gw = leggauss(n)
    TH, U = np.meshgrid(th, u, indexing="ij")
    TH, U = TH.ravel(), U.ravel()
    W = np.outer(np.full(n, 2.0 * np.pi / n), gw).ravel()
    h = 1e-6
    pos = np.asarray(shape.fn(TH, U), dtype=float)
    d_th = (np.asarray(shape.fn(TH + h, U)) - np.asarray(shape.fn(TH - h, U))) / (2 * h)
    d_u = (np.asarray(shape.fn(TH, U + h)) - np.asarray(shape.fn(TH, U - h))) / (2 * h)
    vec = np.cross(d_th, d_u)
    metric = np.linalg.norm(vec, axis=1)
    if np.any(metric <= 1e-14):
        raise DegenerateGeometry("surface metric factor <= 0")
    return pos, vec / metric[:, None], W * metric


def _sample_rectangle(shape: Rectangle, n: int):
    hx, hy = 0.5 * shape.lx, 0.5 * shape.ly
    xi, gw = leggauss(n)
    pos, nrm, wts = [], [], []
    for sign in (+1.0, -1.0):
        pos.append(np.column_stack([np.full(n, sign * hx), hy * xi, np.zeros(n)]))
        nrm.append(np.tile([sign, 0.0, 0.0], (n, 1)))
        wts.append(hy * gw)
        pos.append(np.column_stack([hx * xi, np.full(n, sign * hy), np.zeros(n)]))
        nrm.append(np.tile([0.0, sign, 0.0], (n, 1)))
        wts.append(hx * gw)
    return np.vstack(pos), np.vstack(nrm), np.concatenate(wts)


def _sample_prism(shape: Prism, n: int):
    half = 0.5 * np.array([shape.lx, shape.ly, shape.lz])
    xi, gw = leggauss(n)
    A, B = np.meshgrid(xi, xi, indexing="ij")
    A, B = A.ravel(), B.ravel()
    GW = np.outer(gw, gw).ravel()
    pos, nrm, wts = [], [], []
    for axis in range(3):
        i, j = (axis + 1) % 3, (axis + 2) % 3
        for sign in (+1.0, -1.0):
            p = np.zeros((n * n, 3))
            p[:, axis] = sign * half[axis]
            p[:, i] = half[i] * A
            p[:, j] = half[j] * B
            normal = np.zeros((n * n, 3))
            normal[:, axis] = sign
            pos.append(p)
            nrm.append(normal)
            wts.append(half[i] * half[j] * GW)
    return np.vstack(pos), np.vstack(nrm), np.concatenate(wts)


def sample_surface(shape, impedance_fn=None, resolution: int = 64) -> list:
    """Quadrature nodes covering the body surface.

    resolution means: samples along a closed curve; Gauss points per edge
    (rectangle) or per face dimension (prism); theta x u points per
    dimension for ellipsoids and parametric surfaces (resolution^2 total).
    impedance_fn is a constant or a callable mapping (n, 3) positions to
    per-sample z_f >= 0; default 1.
    """
    if resolution < 8:
        raise ValueError(f"resolution must be >= 8, got {resolution}")
    if isinstance(shape, Ellipse):
        pos, nrm, wts = _sample_ellipse(shape, resolution)
    elif isinstance(shape, Starfish):
        pos, nrm, wts = _sample_starfish(shape, resolution)
    elif isinstance(shape, ParametricCurve2D):
        pos, nrm, wts = _sample_parametric_curve(shape, resolution)
    elif isinstance(shape, Ellipsoid):
        pos, nrm, wts = _sample_ellipsoid(shape, resolution)
    elif isinstance(shape, ParametricSurface3D):
        pos, nrm, wts = _sample_parametric_surface(shape, resolution)
    elif isinstance(shape, Rectangle):
        pos, nrm, wts = _sample_rectangle(shape, resolution)
    elif isinstance(shape, Prism):
        pos, nrm, wts = _sample_prism(shape, resolution)
    else:
        raise UnsupportedShape(f"cannot sample {type(shape).__name__}")
    z = _impedance_values(impedance_fn, pos)
    if np.any(z < 0.0):
        raise ValueError("impedance must be >= 0")
    return _pack(pos, nrm, z, wts)


# -- tensor assembly ----------------------------------------------------------


@dataclass(frozen=True)
class AddedMassTensors:
    """The four 3x3 blocks and their 6x6 composite."""

    avv: np.ndarray
    avw: np.ndarray
    awv: np.ndarray
    aww: np.ndarray
    composite: np.ndarray

    def __post_init__(self):
        scale = max(np.max(np.abs(self.composite)), 1e-300)
        for m in (self.avv, self.aww):
            assert np.max(np.abs(m - m.T)) <= 1e-10 * scale
        assert np.max(np.abs(self.awv - self.avw.T)) <= 1e-10 * scale

    @classmethod
    def from_blocks(cls, avv, avw, awv, aww) -> "AddedMassTensors":
        comp = np.block([[avv, avw], [awv, aww]])
        return cls(avv, avw, awv, aww, comp)


def added_mass_tensors(samples: list, origin=None) -> AddedMassTensors:
    """Assemble the tensors from surface samples (pairwise summation, so
    the result is reproducible to ~1e-10 independent of sample order).
    Moment arms are measured from origin (default: the coordinate origin);
    pass the body center when the samples live in world coordinates."""
    if len(samples) == 0:
        raise ValueError("no surface samples")
    pos = np.array([s.position for s in samples])
    nrm = np.array([s.normal for s in samples])
    zw = np.array([s.z_f * s.weight for s in samples])
    if origin is not None:
        pos = pos - np.asarray(origin, dtype=float)
    yn = np.cross(pos, nrm)
    avv = np.sum(zw[:, None, None] * nrm[:, :, None] * nrm[:, None, :], axis=0)
    avw = np.sum(zw[:, None, None] * nrm[:, :, None] * yn[:, None, :], axis=0)
    awv = np.sum(zw[:, None, None] * yn[:, :, None] * nrm[:, None, :], axis=0)
    aww = np.sum(zw[:, None, None] * yn[:, :, None] * yn[:, None, :], axis=0)
    return AddedMassTensors.from_blocks(avv, avw, awv, aww)


def added_mass_analytic(shape, z_f: float = 1.0) -> AddedMassTensors:
    """Closed-form tensors for boxes, circles and spheres (constant z_f)."""
    zero = np.zeros((3, 3))
    if isinstance(shape, Rectangle):
        lx, ly = shape.lx, shape.ly
        avv = z_f * np.diag([2.0 * ly, 2.0 * lx, 0.0])
        aww = np.diag([0.0, 0.0, z_f * (lx**3 + ly**3) / 6.0])
        return AddedMassTensors.from_blocks(avv, zero, zero, aww)
    if isinstance(shape, Prism):
        lx, ly, lz = shape.lx, shape.ly, shape.lz
        avv = z_f * np.diag([2.0 * ly * lz, 2.0 * lx * lz, 2.0 * lx * ly])
        aww = (z_f / 6.0) * np.diag(
            [
                lx * (ly**3 + lz**3),
                ly * (lx**3 + lz**3),
                lz * (lx**3 + ly**3),
            ]
        )
        return AddedMassTensors.from_blocks(avv, zero, zero, aww)
    if isinstance(shape, Ellipse) and shape.a == shape.b:
        avv = z_f * np.pi * shape.a * np.diag([1.0, 1.0, 0.0])
        return AddedMassTensors.from_blocks(avv, zero, zero, zero.copy())
    if isinstance(shape, Ellipsoid) and shape.a == shape.b == shape.c:
        avv = (4.0 * np.pi / 3.0) * z_f * shape.a**2 * np.eye(3)
        return AddedMassTensors.from_blocks(avv, zero, zero, zero.copy())
    raise UnsupportedShape(f"no closed form for {shape!r}")
