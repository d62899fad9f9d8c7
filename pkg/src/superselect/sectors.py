"""Coherent-sector decomposition, disjointness of states, truncation.

The ambient space splits into blocks cut out by the minimal projectors of
the observable algebra's center.  On each block the algebra acts as
``1_d (x) M_ntilde`` and its commutant as ``M_d (x) 1_ntilde``; the pair
``(d, ntilde)`` is recovered from the dimensions of the restricted spans.
Truncation keeps a single multiplicity copy per block, which restores an
abelian commutant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    CriteriaDisagree,
    DegenerateGenericElement,
    NonIntegerStructure,
    PostconditionFailure,
    ZeroVector,
)
from .numkernel import (
    DEFAULT_TOL,
    ToleranceConfig,
    as_complex_matrix,
    cluster_eigenvalues,
    hermitian_part,
)
from .opalgebra import (
    OperatorAlgebra,
    OperatorSet,
    _generic_hermitian_combo,
    _orthonormalize_stack,
    algebra_from_span,
    commutant,
)

__all__ = [
    "Sector",
    "SectorDecomposition",
    "DensityState",
    "density_state",
    "vector_state",
    "central_decomposition",
    "are_disjoint",
    "extremal_decomposition",
    "expectation_functional",
    "truncate",
]

SUPPORT_RTOL = 1e-6      # relative cutoff for projector-support membership
MATRIX_ELEMENT_RTOL = 1e-9
EXTREMAL_CUTOFF = 1e-12
INTEGER_RESIDUAL = 0.1   # max distance of sqrt(restricted dim) from an integer


@dataclass(frozen=True)
class Sector:
    """One coherent block: projector, isometry onto it, and (d, ntilde) data."""

    projector: np.ndarray   # (n, n) Hermitian idempotent
    isometry: np.ndarray    # (n, block_dim), columns span the block
    block_dim: int
    d: int                  # commutant factor dimension on this block
    ntilde: int             # observable factor dimension on this block
    central_value: float    # eigenvalue of the generic central element (ordering key)


@dataclass(frozen=True)
class SectorDecomposition:
    dim: int
    sectors: tuple[Sector, ...]

    def __len__(self) -> int:
        return len(self.sectors)

    def multiset(self) -> tuple[tuple[int, int], ...]:
        """Sorted multiset of (d, ntilde) pairs, for oracle comparisons."""
        return tuple(sorted((s.d, s.ntilde) for s in self.sectors))


@dataclass(frozen=True)
class DensityState:
    rho: np.ndarray


def density_state(rho) -> DensityState:
    """Validated density matrix: Hermitian, positive, unit trace."""
    m = as_complex_matrix(rho, "density matrix")
    scale = max(float(np.linalg.norm(m)), 1e-300)
    if np.linalg.norm(m - m.conj().T) > 1e-12 * scale:
        raise ValueError("density matrix must be Hermitian within 1e-12")
    evals = np.linalg.eigvalsh(hermitian_part(m))
    if float(evals[0]) < -1e-10:
        raise ValueError(f"density matrix has negative eigenvalue {evals[0]:.3e}")
    if abs(float(np.trace(m).real) - 1.0) > 1e-10:
        raise ValueError("density matrix trace must equal 1 within 1e-10")
    return DensityState(rho=m)


def vector_state(phi) -> DensityState:
    """Rank-one density matrix of a (non-zero) vector."""
    v = np.asarray(phi, dtype=complex).ravel()
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        raise ZeroVector("cannot form a state from the zero vector")
    v = v / nrm
    return DensityState(rho=np.outer(v, v.conj()))


def _restricted_span_dim(basis: np.ndarray, w_iso: np.ndarray,
                         tol: ToleranceConfig) -> int:
    restricted = np.einsum("ia,kij,jb->kab", w_iso.conj(), basis, w_iso)
    return _orthonormalize_stack(restricted, tol).shape[0]


def _as_int(value: float, what: str) -> int:
    nearest = int(round(value))
    if abs(value - nearest) > INTEGER_RESIDUAL:
        raise NonIntegerStructure(
            f"{what} = {value:.6f} is not an integer within {INTEGER_RESIDUAL}; "
            "eigenvalue clustering likely failed -- retry with a different seed")
    return nearest


def central_decomposition(o: OperatorAlgebra, tol: ToleranceConfig = DEFAULT_TOL,
                          commutant_algebra: OperatorAlgebra | None = None) -> SectorDecomposition:
    """Minimal central projectors of an algebra plus per-block (d, ntilde) data.

    A seeded generic Hermitian element of the center is diagonalized and its
    eigenvalue clusters give the minimal central projectors.  On each block,
    ``d`` and ``ntilde`` are the integer square roots of the dimensions of
    the restricted commutant and algebra spans; blocks with ``d = 1`` are
    verified irreducible.  Sectors are ordered by ascending eigenvalue of
    the generic central element.
    """
    from .opalgebra import center as _center  # local alias keeps the import graph flat

    if not o.contains_identity:
        raise ValueError("central_decomposition requires an algebra with identity")
    n = o.dim
    cp = commutant_algebra
    if cp is None:
        cp = commutant(OperatorSet(dim=n, members=o.basis,
                                   names=tuple(f"b{i}" for i in range(o.algebra_dim)),
                                   self_adjoint_closed=True), tol)
    z = _center(o, tol, commutant_algebra=cp)

    n_sectors = z.algebra_dim
    groups = None
    w = v = None
    for attempt in range(16):
        c = _generic_hermitian_combo(z.basis, tol.rng(201, attempt))
        w, v = np.linalg.eigh(hermitian_part(c))
        cand = cluster_eigenvalues(w, tol.cluster_tol)
        if len(cand) == n_sectors:
            groups = cand
            break
    if groups is None:
        raise DegenerateGenericElement(
            f"generic central element produced {len(cand)} clusters, expected "
            f"{n_sectors}, after 16 reseeds")

    sectors = []
    for idx in groups:
        w_iso = v[:, idx]
        proj = w_iso @ w_iso.conj().T
        block_dim = int(idx.size)
        dim_o = _restricted_span_dim(o.basis, w_iso, tol)
        dim_cp = _restricted_span_dim(cp.basis, w_iso, tol)
        ntilde = _as_int(float(np.sqrt(dim_o)), "sqrt(dim of restricted algebra)")
        d = _as_int(float(np.sqrt(dim_cp)), "sqrt(dim of restricted commutant)")
        if d * ntilde != block_dim:
            raise NonIntegerStructure(
                f"block of dimension {block_dim} resolved to d={d}, ntilde={ntilde}; "
                "reseed the decomposition")
        if d == 1:
            # irreducibility on the block: commutant within the block is scalar
            restricted = _orthonormalize_stack(
                np.einsum("ia,kij,jb->kab", w_iso.conj(), o.basis, w_iso), tol)
            rset = OperatorSet(dim=block_dim, members=restricted,
                               names=tuple(f"r{i}" for i in range(restricted.shape[0])),
                               self_adjoint_closed=True)
            if commutant(rset, tol).algebra_dim != 1:
                raise PostconditionFailure(
                    "block with d = 1 is not irreducible; tolerance pathology")
        sectors.append(Sector(projector=proj, isometry=w_iso, block_dim=block_dim,
                              d=d, ntilde=ntilde,
                              central_value=float(np.mean(w[idx]))))
    sectors.sort(key=lambda s: (s.central_value, s.block_dim))
    if sum(s.block_dim for s in sectors) != n:
        raise PostconditionFailure("sector block dimensions do not sum to the ambient dim")
    return SectorDecomposition(dim=n, sectors=tuple(sectors))


def are_disjoint(phi1, phi2, o: OperatorAlgebra, dec: SectorDecomposition,
                 tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Whether two vector states are separated by the superselection structure.

    Primary criterion: every observable matrix element between the vectors
    vanishes.  Cross-checked against disjointness of the projector supports;
    a disagreement (possible for borderline vectors or multiplicity blocks)
    raises :class:`CriteriaDisagree` rather than guessing.
    """
    v1 = np.asarray(phi1, dtype=complex).ravel()
    v2 = np.asarray(phi2, dtype=complex).ravel()
    if v1.size != o.dim or v2.size != o.dim:
        raise ValueError("vectors must match the algebra dimension")
    n1, n2 = np.linalg.norm(v1), np.linalg.norm(v2)
    if n1 == 0.0 or n2 == 0.0:
        raise ZeroVector("disjointness needs non-zero vectors")

    elems = np.abs(np.einsum("i,kij,j->k", v1.conj(), o.basis, v2))
    by_elements = bool(np.max(elems) <= MATRIX_ELEMENT_RTOL * n1 * n2)

    sup1 = {i for i, s in enumerate(dec.sectors)
            if np.linalg.norm(s.isometry.conj().T @ v1) > SUPPORT_RTOL * n1}
    sup2 = {i for i, s in enumerate(dec.sectors)
            if np.linalg.norm(s.isometry.conj().T @ v2) > SUPPORT_RTOL * n2}
    by_support = not (sup1 & sup2)

    if by_elements != by_support:
        raise CriteriaDisagree(
            f"matrix-element criterion says {by_elements}, projector supports say "
            f"{by_support}; vectors sit too close to a tolerance boundary "
            "(or share a multiplicity block)")
    return by_elements


def extremal_decomposition(phi, dec: SectorDecomposition) -> list[tuple[float, np.ndarray]]:
    """Unique convex split of a vector state across sectors.

    Returns ``(lambda_i, phi_i)`` pairs with ``phi_i`` the normalized
    projection into sector ``i`` and ``lambda_i = |P_i phi|^2 / |phi|^2``,
    keeping sectors with relative weight above 1e-12.
    """
    v = np.asarray(phi, dtype=complex).ravel()
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        raise ZeroVector("extremal decomposition needs a non-zero vector")
    out = []
    for s in dec.sectors:
        comp = s.projector @ v
        cn = np.linalg.norm(comp)
        if cn > EXTREMAL_CUTOFF * nrm:
            out.append((float((cn / nrm) ** 2), comp / cn))
    return out


def expectation_functional(rho: DensityState, o: OperatorAlgebra) -> np.ndarray:
    """Values tr(rho B) over the algebra basis, as a complex vector."""
    if rho.rho.shape[0] != o.dim:
        raise ValueError("state and algebra dimensions differ")
    return np.einsum("kij,ji->k", o.basis, rho.rho)


def truncate(o: OperatorAlgebra, dec: SectorDecomposition,
             tol: ToleranceConfig = DEFAULT_TOL) -> tuple[np.ndarray, OperatorAlgebra]:
    """Keep one multiplicity copy per sector; returns (isometry V, restricted algebra).

    Per sector, a seeded generic Hermitian element of the commutant
    restricted to the block must show ``d`` spectral clusters of size
    ``ntilde`` each; the lowest cluster's eigenspace is the copy kept.  The
    stacked isometry satisfies ``V^* V = 1`` on the truncated space, and the
    restricted algebra passes the abelian-commutant check with commutant
    dimension equal to the number of sectors.
    """
    from .opalgebra import check_dirac

    n = o.dim
    cp = commutant(OperatorSet(dim=n, members=o.basis,
                               names=tuple(f"b{i}" for i in range(o.algebra_dim)),
                               self_adjoint_closed=True), tol)
    columns = []
    for sidx, sec in enumerate(dec.sectors):
        w_iso = sec.isometry
        restricted = _orthonormalize_stack(
            np.einsum("ia,kij,jb->kab", w_iso.conj(), cp.basis, w_iso), tol)
        picked = None
        for attempt in range(16):
            x = _generic_hermitian_combo(restricted, tol.rng(202, sidx, attempt))
            w, v = np.linalg.eigh(hermitian_part(x))
            groups = cluster_eigenvalues(w, tol.cluster_tol)
            if len(groups) == sec.d and all(g.size == sec.ntilde for g in groups):
                picked = v[:, groups[0]]  # lowest spectral cluster
                break
        if picked is None:
            raise DegenerateGenericElement(
                f"sector {sidx}: commutant element never showed {sec.d} clusters of "
                f"size {sec.ntilde} after 16 reseeds")
        columns.append(w_iso @ picked)
    v_full = np.hstack(columns)
    gram = v_full.conj().T @ v_full
    if np.max(np.abs(gram - np.eye(v_full.shape[1]))) > 1e-10:
        raise PostconditionFailure("stacked truncation isometry is not isometric")

    restricted_ops = np.einsum("ia,kij,jb->kab", v_full.conj(), o.basis, v_full)
    o_tilde = algebra_from_span(list(restricted_ops), tol)
    report = check_dirac(o_tilde, tol)
    if not report.v2_holds or report.commutant_dim != len(dec.sectors):
        raise PostconditionFailure(
            "truncated algebra failed the abelian-commutant check "
            f"(v2={report.v2_holds}, commutant dim {report.commutant_dim}, "
            f"expected {len(dec.sectors)})")
    return v_full, o_tilde
