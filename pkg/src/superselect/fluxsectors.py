"""Asymptotic electric flux distributions of moving charges and their multipoles.

Units: 4 pi eps0 = 1 and c = 1; the boundary sphere radius is absorbed, so
flux values are per unit solid angle on the unit sphere.  The monopole
coefficient recovers the total charge, f_00 = Q / sqrt(4 pi), independent of
the momentum; the higher coefficients fingerprint the kinematics, so two
charges with different momenta (or charges) land in different flux classes.
Distances between flux classes are measured with the Euclidean norm on the
multipole coefficients up to the chosen band limit.

Real orthonormal spherical harmonics, no Condon-Shortley phase.  Explicitly,
with n = (x, y, z) on the unit sphere:

    Y_00 = sqrt(1 / 4pi)
    Y_1,-1 = sqrt(3 / 4pi) y      Y_10 = sqrt(3 / 4pi) z     Y_11 = sqrt(3 / 4pi) x
    Y_2,-2 = sqrt(15 / 4pi) x y           Y_2,-1 = sqrt(15 / 4pi) y z
    Y_20 = sqrt(5 / 16pi) (3 z^2 - 1)     Y_21 = sqrt(15 / 4pi) x z
    Y_22 = sqrt(15 / 16pi) (x^2 - y^2)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import lpmv

from .errors import QuadratureTooCoarse

__all__ = [
    "ChargeKinematics",
    "SphereQuadrature",
    "FluxMultipoles",
    "flux_instantaneous",
    "flux_retarded",
    "real_sph_harm",
    "multipole_moments",
    "total_charge",
    "sector_signature",
    "lm_index",
]


@dataclass(frozen=True)
class ChargeKinematics:
    """A point charge with constant momentum: charge e, mass m > 0, momentum p."""

    e: float
    m: float
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float).reshape(3))
        if not (self.m > 0):
            raise ValueError("mass must be positive")
        if not (np.isfinite(self.e) and np.all(np.isfinite(self.p))):
            raise ValueError("kinematics must be finite")

    @property
    def energy(self) -> float:
        return float(np.sqrt(self.p @ self.p + self.m * self.m))


def _check_unit(n: np.ndarray) -> np.ndarray:
    arr = np.asarray(n, dtype=float)
    norms = np.linalg.norm(arr, axis=-1)
    if np.max(np.abs(norms - 1.0)) > 1e-12:
        raise ValueError("directions must be unit vectors to 1e-12")
    return arr


def flux_instantaneous(k: ChargeKinematics, n) -> np.ndarray | float:
    """Flux per solid angle on a sphere centered at the instantaneous position.

    (e m^2 / 4 pi) sqrt(p^2 + m^2) / ((p . n)^2 + m^2)^(3/2); reduces to the
    isotropic e / 4 pi at rest and is even in n.
    """
    arr = _check_unit(n)
    pn = arr @ k.p
    val = (k.e * k.m ** 2 / (4.0 * np.pi)) * k.energy / (pn * pn + k.m ** 2) ** 1.5
    return val if arr.ndim > 1 else float(val)


def flux_retarded(k: ChargeKinematics, n_prime) -> np.ndarray | float:
    """Flux per solid angle on a sphere centered at the retarded position.

    (e m^2 / 4 pi) / (E - p . n')^2 with E = sqrt(p^2 + m^2); peaks along
    the momentum direction.
    """
    arr = _check_unit(n_prime)
    pn = arr @ k.p
    val = (k.e * k.m ** 2 / (4.0 * np.pi)) / (k.energy - pn) ** 2
    return val if arr.ndim > 1 else float(val)


@dataclass(frozen=True)
class SphereQuadrature:
    """Product rule on the unit sphere: Gauss-Legendre in cos(theta), uniform in phi."""

    n_theta: int
    n_phi: int
    nodes: np.ndarray    # (N, 3) unit vectors
    weights: np.ndarray  # (N,), positive, summing to 4 pi
    cos_theta: np.ndarray
    phi: np.ndarray


def sphere_quadrature(n_theta: int, n_phi: int) -> SphereQuadrature:
    if n_theta < 1 or n_phi < 1:
        raise ValueError("node counts must be positive")
    u, wu = np.polynomial.legendre.leggauss(n_theta)
    phi = 2.0 * np.pi * (np.arange(n_phi) + 0.5) / n_phi
    uu, pp = np.meshgrid(u, phi, indexing="ij")
    s = np.sqrt(1.0 - uu ** 2)
    nodes = np.stack([s * np.cos(pp), s * np.sin(pp), uu], axis=-1).reshape(-1, 3)
    nodes /= np.linalg.norm(nodes, axis=1)[:, None]
    weights = np.repeat(wu, n_phi) * (2.0 * np.pi / n_phi)
    return SphereQuadrature(n_theta=n_theta, n_phi=n_phi, nodes=nodes,
                            weights=weights, cos_theta=uu.ravel(), phi=pp.ravel())


def lm_index(l: int, m: int) -> int:
    """Position of the (l, m) coefficient in the flattened multipole vector."""
    if abs(m) > l:
        raise ValueError(f"|m| must not exceed l, got (l, m) = ({l}, {m})")
    return l * l + l + m


def real_sph_harm(l: int, m: int, nodes) -> np.ndarray:
    """Real orthonormal spherical harmonic at unit vectors, Condon-Shortley-free."""
    arr = _check_unit(np.atleast_2d(np.asarray(nodes, dtype=float)))
    z = np.clip(arr[:, 2], -1.0, 1.0)
    phi = np.arctan2(arr[:, 1], arr[:, 0])
    am = abs(m)
    # scipy's lpmv carries the Condon-Shortley phase; (-1)^m removes it
    leg = ((-1.0) ** am) * lpmv(am, l, z)
    norm = math.sqrt((2 * l + 1) / (4.0 * math.pi)
                     * math.factorial(l - am) / math.factorial(l + am))
    if m == 0:
        out = norm * leg
    elif m > 0:
        out = math.sqrt(2.0) * norm * leg * np.cos(am * phi)
    else:
        out = math.sqrt(2.0) * norm * leg * np.sin(am * phi)
    return out


def _harmonic_matrix(lmax: int, nodes: np.ndarray) -> np.ndarray:
    rows = [real_sph_harm(l, m, nodes)
            for l in range(lmax + 1) for m in range(-l, l + 1)]
    return np.stack(rows)  # ((lmax+1)^2, N)


@dataclass(frozen=True)
class FluxMultipoles:
    """Real spherical-harmonic coefficients of a flux distribution."""

    lmax: int
    coefficients: np.ndarray  # ((lmax+1)^2,)

    def coeff(self, l: int, m: int) -> float:
        return float(self.coefficients[lm_index(l, m)])

    def block(self, l: int) -> np.ndarray:
        return self.coefficients[l * l:(l + 1) * (l + 1)]

    def norm_from(self, lmin: int) -> float:
        """Euclidean norm of all coefficients with l >= lmin."""
        return float(np.linalg.norm(self.coefficients[lmin * lmin:]))


def multipole_moments(flux, q: SphereQuadrature, lmax: int) -> FluxMultipoles:
    """Multipole coefficients f_lm = sum_nodes w Y_lm flux(node).

    ``flux`` is a callable on arrays of unit vectors (or a precomputed value
    array matching the nodes).  Requires lmax <= 16 and at least
    2 lmax + 2 nodes per sphere direction; the Parseval bound
    sum f_lm^2 <= quadrature of flux^2 is verified.
    """
    if lmax > 16 or lmax < 0:
        raise ValueError("lmax must lie in 0..16")
    if q.n_theta < 2 * lmax + 2 or q.n_phi < 2 * lmax + 2:
        raise QuadratureTooCoarse(
            f"need n_theta and n_phi >= 2*lmax + 2 = {2 * lmax + 2}, "
            f"got ({q.n_theta}, {q.n_phi})")
    values = np.asarray(flux(q.nodes) if callable(flux) else flux, dtype=float)
    if values.shape != q.weights.shape:
        raise ValueError("flux values must match the quadrature nodes")
    ymat = _harmonic_matrix(lmax, q.nodes)
    coeffs = ymat @ (q.weights * values)
    power = float(np.sum(q.weights * values * values))
    if float(coeffs @ coeffs) > power + 1e-8:
        raise QuadratureTooCoarse(
            "Parseval bound violated; the quadrature cannot resolve this flux")
    return FluxMultipoles(lmax=lmax, coefficients=coeffs)


def total_charge(fm: FluxMultipoles) -> float:
    """Total charge from the monopole coefficient: sqrt(4 pi) f_00."""
    return float(np.sqrt(4.0 * np.pi) * fm.coeff(0, 0))


def sector_signature(k1: ChargeKinematics, k2: ChargeKinematics, lmax: int,
                     q: SphereQuadrature, formula: str = "instantaneous") -> dict:
    """Multipole distance between two charge kinematics, split by l.

    The l = 0 part carries exactly the charge difference |e1 - e2| /
    sqrt(4 pi); a non-zero l >= 1 part for equal charges certifies that the
    two momenta produce distinct flux classes.  The l >= 1 coefficients
    fingerprint the particle kinematics and are not multipoles of the charge
    distribution itself.
    """
    if formula not in ("instantaneous", "retarded"):
        raise ValueError("formula must be 'instantaneous' or 'retarded'")
    fn = flux_instantaneous if formula == "instantaneous" else flux_retarded
    f1 = multipole_moments(lambda n: fn(k1, n), q, lmax)
    f2 = multipole_moments(lambda n: fn(k2, n), q, lmax)
    diff = f1.coefficients - f2.coefficients
    l0 = abs(float(diff[0]))
    l0_expected = abs(k1.e - k2.e) / np.sqrt(4.0 * np.pi)
    lrest = float(np.linalg.norm(diff[1:]))
    return {
        "formula": formula,
        "l0_difference": l0,
        "l0_expected": l0_expected,
        "l0_consistent": bool(abs(l0 - l0_expected) <= 1e-8),
        "l_ge1_norm": lrest,
        "total_norm": float(np.linalg.norm(diff)),
        "distinct": bool(l0 > 1e-8 or lrest > 1e-8),
        "note": ("higher multipoles fingerprint the kinematics, not the charge "
                 "distribution's own moments"),
    }
