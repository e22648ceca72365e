"""Polynomial disk maps, Mobius transforms, Green functions, conformal radius.

Domains are images of the closed unit disk under univalent polynomial maps
f(w) = z0 + sum c_k w^k (c_1 != 0). Every Green-function quantity on such a
domain pulls back to the disk, where it has a closed form, so no boundary
value problem is ever solved: green_domain composes a Newton inversion of
the map with the disk automorphism that moves the pole to the origin.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi
CERT_SAMPLES = 4096


class MapInversionError(RuntimeError):
    """Newton inversion failed: point outside the domain or near-critical map."""


class UnivalenceError(ValueError):
    """Sampling certificate rejected the map (critical point or boundary overlap)."""


@dataclass(frozen=True)
class MapCertificate:
    certified: bool
    min_deriv: float
    min_boundary_gap: float
    winding: int
    reason: str = ""


@dataclass(frozen=True)
class ConformalRadiusResult:
    radius: float
    robin_mass: float


class AnalyticMap:
    """f(w) = offset + sum_{k>=1} coeffs[k-1] w^k on the closed unit disk."""

    def __init__(self, coeffs, offset: complex = 0.0):
        coeffs = tuple(complex(c) for c in coeffs)
        if not coeffs or coeffs[0] == 0:
            raise ValueError("leading coefficient c_1 must be nonzero")
        self.coeffs = coeffs
        self.offset = complex(offset)
        self._certificate = None

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    def __repr__(self):
        return f"AnalyticMap(coeffs={self.coeffs!r}, offset={self.offset!r})"

    def eval(self, w):
        w = np.asarray(w, dtype=complex)
        acc = np.zeros_like(w)
        for c in reversed(self.coeffs):
            acc = (acc + c) * w
        return acc + self.offset

    def deriv(self, w):
        w = np.asarray(w, dtype=complex)
        acc = np.zeros_like(w)
        for k in range(self.degree, 0, -1):
            acc = acc * w + k * self.coeffs[k - 1]
        return acc

    def certificate(self) -> MapCertificate:
        """Sampling univalence certificate on a 4096-point grid.

        Checks a nonvanishing derivative on boundary+interior samples, a
        positive minimum gap between boundary images, and winding number 1
        of the boundary curve about the image of 0.
        """
        if self._certificate is not None:
            return self._certificate
        theta = np.arange(CERT_SAMPLES) * (TWO_PI / CERT_SAMPLES)
        ring = np.exp(1j * theta)
        radii = np.array([0.0, 0.25, 0.5, 0.75, 0.9, 0.975, 1.0])
        grid = (radii[:, None] * ring[None, :]).ravel()
        min_deriv = float(np.min(np.abs(self.deriv(grid))))
        boundary = self.eval(ring)
        gap = _min_pairwise_gap(boundary)
        winding = _winding_number(boundary, self.eval(np.array([0.0]))[0])
        reason = ""
        if min_deriv <= 0.0:
            reason = "derivative vanishes on the sampling grid"
        elif gap <= 0.0:
            reason = "boundary samples collide"
        elif winding != 1:
            reason = f"boundary winding about f(0) is {winding}, expected 1"
        cert = MapCertificate(reason == "", min_deriv, gap, winding, reason)
        self._certificate = cert
        return cert

    def require_certified(self) -> None:
        cert = self.certificate()
        if not cert.certified:
            raise UnivalenceError(cert.reason)


def _min_pairwise_gap(points: np.ndarray) -> float:
    """Minimum pairwise distance, chunked to bound the memory footprint."""
    n = points.size
    best = math.inf
    step = 512
    for i in range(0, n, step):
        block = points[i:i + step]
        d = np.abs(block[:, None] - points[None, i:])
        m = d + np.where(np.eye(block.size, points.size - i, dtype=bool), np.inf, 0.0)
        best = min(best, float(np.min(m)))
    return best


def _winding_number(curve: np.ndarray, about: complex) -> int:
    rel = curve - about
    ang = np.angle(rel)
    dphi = np.diff(np.concatenate([ang, ang[:1]]))
    dphi = (dphi + math.pi) % TWO_PI - math.pi
    return int(round(float(np.sum(dphi)) / TWO_PI))


def identity_map() -> AnalyticMap:
    return AnalyticMap([1.0])


def mobius(w, z):
    """Disk automorphism phi_w(z) = (w - z) / (1 - conj(w) z); sends w to 0."""
    w = complex(w) if np.isscalar(w) else w
    if np.isscalar(w) and abs(w) >= 1.0:
        raise ValueError(f"mobius center must be interior, |w| = {abs(w)}")
    return (w - z) / (1.0 - np.conjugate(w) * z)


def mobius_deriv(w, z):
    """d/dz of phi_w: (|w|^2 - 1) / (1 - conj(w) z)^2."""
    wc = np.conjugate(w)
    return (np.abs(w) ** 2 - 1.0) / (1.0 - wc * z) ** 2


def map_eval(f: AnalyticMap, w):
    return f.eval(w)


def map_deriv(f: AnalyticMap, w):
    return f.deriv(w)


_SEED_GRID = None


def _seed_grid() -> np.ndarray:
    global _SEED_GRID
    if _SEED_GRID is None:
        r = np.linspace(0.0, 1.0, 64)
        th = np.arange(64) * (TWO_PI / 64)
        _SEED_GRID = (r[:, None] * np.exp(1j * th)[None, :]).ravel()
    return _SEED_GRID


def map_invert(f: AnalyticMap, z: complex, tol: float = 1e-12,
               max_iter: int = 60) -> complex:
    """Preimage of z in the closed disk by seeded, damped Newton iteration.

    Seeds from the best of a 64x64 polar grid (ties to smallest |w|, since
    polynomial maps can have exterior preimages), then iterates
    w <- w - (f(w) - z)/f'(w) with step halving whenever the residual
    grows. Succeeds when |f(w) - z| <= tol * (1 + |z|) and |w| <= 1 + 1e-9.
    """
    z = complex(z)
    scale = 1.0 + abs(z)
    seeds = _seed_grid()
    dist = np.abs(f.eval(seeds) - z)
    order = np.lexsort((np.abs(seeds), dist))
    w = complex(seeds[order[0]])
    res = abs(f.eval(np.array([w]))[0] - z)
    for _ in range(max_iter):
        if res <= tol * scale:
            break
        fw = f.eval(np.array([w]))[0]
        dfw = f.deriv(np.array([w]))[0]
        if dfw == 0:
            raise MapInversionError(f"critical point encountered at w = {w}")
        step = (fw - z) / dfw
        lam = 1.0
        for _ in range(40):
            cand = w - lam * step
            cres = abs(f.eval(np.array([cand]))[0] - z)
            if cres < res:
                w, res = cand, cres
                break
            lam *= 0.5
        else:
            break
    if res > tol * scale or abs(w) > 1.0 + 1e-9:
        raise MapInversionError(
            f"no preimage of {z} within the closed disk (residual {res:.3e}, |w| = {abs(w):.6f})")
    return w


def green_disk(z1: complex, z2: complex, b: complex = 0.0, R: float = 1.0) -> float:
    """Green function of the disk D(b, R) at the pair (z1, z2)."""
    z1, z2, b = complex(z1), complex(z2), complex(b)
    if abs(z1 - b) >= R or abs(z2 - b) >= R:
        raise ValueError("both points must lie inside D(b, R)")
    if z1 == z2:
        raise ValueError("Green function pole: coincident points")
    num = R * R - (z1 - b).conjugate() * (z2 - b)
    return math.log(abs(num / (R * (z1 - z2)))) / TWO_PI


def green_domain(f: AnalyticMap, z: complex, a: complex, tol: float = 1e-12) -> float:
    """Green function of f(disk) via pullback: -(2 pi)^-1 ln|phi_b(f^-1(z))|."""
    b = map_invert(f, a, tol)
    wz = map_invert(f, z, tol)
    psi = mobius(b, wz)
    if psi == 0:
        raise ValueError("Green function pole: z coincides with a")
    return -math.log(abs(psi)) / TWO_PI


def green_normal_boundary(f: AnalyticMap, theta: float, a: complex,
                          tol: float = 1e-12) -> float:
    """Inner normal derivative of the Green function at z = f(e^{i theta}).

    Equals (2 pi)^-1 |psi'(z)| for psi = phi_b o f^-1, evaluated by the
    chain rule as |phi_b'(w)| / |f'(w)| at w = e^{i theta}.
    """
    b = map_invert(f, a, tol)
    w = cmath.exp(1j * theta)
    dfw = complex(f.deriv(np.array([w]))[0])
    if dfw == 0:
        raise ValueError("boundary derivative vanishes at the sample point")
    val = abs(complex(mobius_deriv(b, w))) / abs(dfw) / TWO_PI
    if val <= 0.0:
        raise ValueError("normal derivative underflow")
    return val


def conformal_radius(f: AnalyticMap, a: complex, tol: float = 1e-12) -> ConformalRadiusResult:
    """Conformal radius R(a) = (1 - |b|^2) |f'(b)| at b = f^-1(a)."""
    b = map_invert(f, a, tol)
    radius = (1.0 - abs(b) ** 2) * abs(complex(f.deriv(np.array([b]))[0]))
    return ConformalRadiusResult(radius=radius, robin_mass=-math.log(radius))
