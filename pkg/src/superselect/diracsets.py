"""Complete commuting sets in finite dimensions.

A Hermitian matrix with pairwise distinct eigenvalues generates a maximal
abelian algebra; anything commuting with it is a polynomial in it, found by
interpolation through the paired eigenvalues.  The Newton divided-difference
form replaces the raw Vandermonde solve (unstable past n of about 8); the
Vandermonde determinant is still computed as a conditioning diagnostic.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateSpectrum,
    NotCommuting,
    NotJointlyDiagonal,
    ZeroVector,
)
from .numkernel import DEFAULT_TOL, ToleranceConfig, cluster_eigenvalues, hermitian_eig
from .opalgebra import OperatorAlgebra

__all__ = [
    "Polynomial",
    "has_simple_spectrum",
    "interpolate_commuting",
    "cyclic_vector_for",
    "is_cyclic",
    "vandermonde_determinant",
]

log = logging.getLogger(__name__)

COMMUTE_RTOL = 1e-10
JOINT_DIAG_RTOL = 1e-8


@dataclass(frozen=True)
class Polynomial:
    """Complex polynomial with coefficients in ascending degree order."""

    coefficients: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.coefficients)

    def of_matrix(self, a: np.ndarray) -> np.ndarray:
        """Evaluate on a square matrix by Horner's rule."""
        n = a.shape[0]
        out = np.zeros_like(np.asarray(a, dtype=complex))
        for c in self.coefficients[::-1]:
            out = out @ a + c * np.eye(n)
        return out


def vandermonde_determinant(values) -> float:
    """prod_{a<b} (x_a - x_b); vanishes exactly when two nodes coincide."""
    x = np.asarray(values, dtype=float)
    diff = x[:, None] - x[None, :]
    return float(np.prod(diff[np.triu_indices(len(x), k=1)]))


def has_simple_spectrum(a, tol: ToleranceConfig = DEFAULT_TOL) -> tuple[bool, float]:
    """Whether a Hermitian matrix has pairwise distinct eigenvalues.

    Gaps are compared against ``cluster_tol`` times the spectral diameter;
    returns the verdict and the minimum gap.
    """
    w, _ = hermitian_eig(a)
    if w.size < 2:
        return True, float("inf")
    min_gap = float(np.min(np.diff(w)))
    # shares the clustering convention, incl. the roundoff-diameter guard
    n_clusters = len(cluster_eigenvalues(w, tol.cluster_tol))
    return n_clusters == w.size, min_gap


def _newton_coefficients(nodes: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Monomial coefficients of the interpolant through (nodes, values)."""
    n = len(nodes)
    dd = np.array(values, dtype=complex)
    table = [dd[0]]
    for order in range(1, n):
        dd = (dd[1:] - dd[:-1]) / (nodes[order:] - nodes[:-order])
        table.append(dd[0])
    # expand c0 + c1 (x-x0) + c2 (x-x0)(x-x1) + ... into monomials
    poly = np.zeros(1, dtype=complex)
    factor = np.ones(1, dtype=complex)
    for k, c in enumerate(table):
        poly = np.polynomial.polynomial.polyadd(poly, c * factor)
        factor = np.polynomial.polynomial.polymul(factor, [-nodes[k], 1.0])
    return poly


def interpolate_commuting(a, b, tol: ToleranceConfig = DEFAULT_TOL) -> Polynomial:
    """Polynomial p of degree < n with p(A) = B, for commuting Hermitian A, B.

    Requires a simple spectrum of A; B is rotated into A's eigenbasis and
    must be diagonal there within 1e-8 relative residual (larger residue
    raises :class:`NotJointlyDiagonal` instead of silently projecting).
    """
    wa, va = hermitian_eig(a)
    wb_norm = float(np.linalg.norm(np.asarray(b, dtype=complex)))
    a_norm = float(np.linalg.norm(np.asarray(a, dtype=complex)))
    comm = np.asarray(a, dtype=complex) @ b - np.asarray(b, dtype=complex) @ a
    if np.linalg.norm(comm) > COMMUTE_RTOL * max(a_norm * wb_norm, 1e-300):
        raise NotCommuting(
            f"commutator norm {np.linalg.norm(comm):.3e} above {COMMUTE_RTOL:.0e} * |A||B|")
    simple, min_gap = has_simple_spectrum(a, tol)
    det = vandermonde_determinant(wa)
    log.debug("Vandermonde determinant %.6e (min gap %.3e)", det, min_gap)
    if not simple or det == 0.0:
        raise DegenerateSpectrum(
            f"spectrum of A is not simple (min gap {min_gap:.3e}); "
            "interpolation system is singular")

    b_rot = va.conj().T @ np.asarray(b, dtype=complex) @ va
    off = b_rot - np.diag(np.diagonal(b_rot))
    if np.linalg.norm(off) > JOINT_DIAG_RTOL * max(wb_norm, 1e-300):
        raise NotJointlyDiagonal(
            f"off-diagonal residual {np.linalg.norm(off):.3e} after rotating into "
            "A's eigenbasis; inputs are too close to degeneracy")
    beta = np.real(np.diagonal(b_rot))
    coeffs = _newton_coefficients(wa, beta.astype(complex))
    # trim numerically-zero leading coefficients (keep at least the constant)
    scale = max(float(np.max(np.abs(coeffs))), 1e-300)
    keep = len(coeffs)
    while keep > 1 and abs(coeffs[keep - 1]) <= 1e-10 * scale:
        keep -= 1
    return Polynomial(coefficients=coeffs[:keep])


def cyclic_vector_for(a, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Normalized sum of the eigenvectors of a simple-spectrum Hermitian matrix.

    This vector generates the whole space under the algebra of polynomials
    in ``a``; with a degenerate spectrum no cyclic vector exists and
    :class:`DegenerateSpectrum` is raised.
    """
    simple, min_gap = has_simple_spectrum(a, tol)
    if not simple:
        raise DegenerateSpectrum(
            f"spectrum is degenerate (min gap {min_gap:.3e}); no cyclic vector exists")
    _, v = hermitian_eig(a)
    g = v.sum(axis=1)
    return g / np.linalg.norm(g)


def is_cyclic(g, a: OperatorAlgebra, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Whether the algebra orbit {B g} spans the full space (numerical rank n)."""
    v = np.asarray(g, dtype=complex).ravel()
    if np.linalg.norm(v) == 0.0:
        raise ZeroVector("cyclicity needs a non-zero vector")
    orbit = np.einsum("kij,j->ik", a.basis, v)  # columns B_k g
    s = np.linalg.svd(orbit, compute_uv=False)
    rank = int(np.sum(s > tol.rank_tol * s[0])) if s.size else 0
    return rank == a.dim
