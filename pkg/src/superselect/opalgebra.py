"""Commutant calculus on finite-dimensional *-algebras of complex matrices.

An algebra lives here as a Hilbert-Schmidt-orthonormal basis inside the
ambient ``n x n`` matrix algebra, so every structural question (commutant,
center, "is this maximal abelian") reduces to numerical rank and span
comparisons.

The commutant routine first restricts to the block pattern of one generic
Hermitian combination of the generators (everything commuting with the set
must commute with that combination), then runs the stacked commutator
nullspace solve inside that pattern and verifies the result against every
generator, augmenting the constraint set until verification passes.  The
reduction is exact -- the pattern can only over-approximate the commutant --
and keeps thousand-algebra sweeps fast.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ClosureMismatch,
    DimensionMismatch,
    PostconditionFailure,
    WitnessConstructionFailed,
)
from .numkernel import (
    DEFAULT_TOL,
    ToleranceConfig,
    as_complex_matrix,
    cluster_eigenvalues,
    hermitian_part,
    orthonormal_columns_extend,
    orthonormal_nullspace,
    random_unitary,
)

__all__ = [
    "OperatorSet",
    "OperatorAlgebra",
    "DiracReport",
    "operator_set",
    "star_completion",
    "algebra_from_span",
    "commutant",
    "generated_algebra",
    "center",
    "is_abelian",
    "check_dirac",
    "span_residual",
    "span_contains",
    "span_equal",
]

ABELIAN_TOL = 1e-8  # relative commutator norm below which a pair counts as commuting


@dataclass(frozen=True)
class OperatorSet:
    """A named collection of same-dimension complex matrices (raw observables).

    ``members`` is stacked with shape ``(k, n, n)``.  ``self_adjoint_closed``
    records whether the adjoint of every member already lies in the linear
    span of the members.
    """

    dim: int
    members: np.ndarray
    names: tuple[str, ...]
    self_adjoint_closed: bool

    def __len__(self) -> int:
        return self.members.shape[0]


@dataclass(frozen=True)
class OperatorAlgebra:
    """A *-algebra given by a Hilbert-Schmidt orthonormal basis.

    Invariants (testable via :meth:`validate`): the basis is orthonormal to
    1e-10, closed under adjoints and products within tolerance, and the
    identity lies in its span.
    """

    dim: int
    basis: np.ndarray  # (q, n, n), HS-orthonormal
    contains_identity: bool

    @property
    def algebra_dim(self) -> int:
        return self.basis.shape[0]

    def validate(self, tol: ToleranceConfig = DEFAULT_TOL) -> None:
        q, n = self.algebra_dim, self.dim
        vecs = self.basis.reshape(q, n * n)
        gram = vecs.conj() @ vecs.T
        if np.max(np.abs(gram - np.eye(q))) > 1e-10:
            raise PostconditionFailure("algebra basis is not HS-orthonormal")
        adj = self.basis.conj().transpose(0, 2, 1)
        if _max_span_residual(self.basis, adj) > 10 * tol.rank_tol:
            raise PostconditionFailure("algebra basis is not closed under adjoints")
        prods = np.einsum("aij,bjk->abik", self.basis, self.basis).reshape(q * q, n, n)
        if _max_span_residual(self.basis, prods) > 1e-8:
            raise PostconditionFailure("algebra basis is not closed under products")
        if span_residual(self.basis, np.eye(n, dtype=complex)) > 10 * tol.rank_tol:
            raise PostconditionFailure("identity not in algebra span")


def operator_set(mats, names=None, tol: ToleranceConfig = DEFAULT_TOL) -> OperatorSet:
    """Build a validated OperatorSet from an iterable of square matrices."""
    mats = [as_complex_matrix(m, f"operator {i}") for i, m in enumerate(mats)]
    if not mats:
        raise ValueError("operator set must contain at least one matrix")
    n = mats[0].shape[0]
    for m in mats[1:]:
        if m.shape[0] != n:
            raise DimensionMismatch("all operators must share one dimension")
    members = np.stack(mats)
    if names is None:
        names = tuple(f"op{i}" for i in range(len(mats)))
    else:
        names = tuple(names)
        if len(names) != len(mats):
            raise ValueError("number of names must match number of operators")
    adj = members.conj().transpose(0, 2, 1)
    closed = _max_span_residual(members, adj, orthonormal=False, tol=tol) <= \
        tol.rank_tol * max(1.0, float(np.max(np.linalg.norm(adj, axis=(1, 2)))))
    return OperatorSet(dim=n, members=members, names=names, self_adjoint_closed=closed)


def star_completion(s: OperatorSet) -> OperatorSet:
    """Append adjoints unless the span is already *-closed."""
    if s.self_adjoint_closed:
        return s
    adj = s.members.conj().transpose(0, 2, 1)
    members = np.concatenate([s.members, adj])
    names = s.names + tuple(f"{name}*" for name in s.names)
    return OperatorSet(dim=s.dim, members=members, names=names, self_adjoint_closed=True)


def algebra_from_span(mats, tol: ToleranceConfig = DEFAULT_TOL) -> OperatorAlgebra:
    """Orthonormalize a spanning set into an OperatorAlgebra (no closure applied)."""
    mats = [as_complex_matrix(m) for m in mats]
    n = mats[0].shape[0]
    basis = _orthonormalize_stack(np.stack(mats), tol)
    ident = span_residual(basis, np.eye(n, dtype=complex)) <= tol.rank_tol * 10
    return OperatorAlgebra(dim=n, basis=basis, contains_identity=bool(ident))


# ---------------------------------------------------------------------------
# span utilities

def _orthonormalize_stack(mats: np.ndarray, tol: ToleranceConfig) -> np.ndarray:
    k, n, _ = mats.shape
    norms = np.linalg.norm(mats.reshape(k, -1), axis=1)
    drop = tol.rank_tol * max(float(norms.max()), 1e-300)
    q = orthonormal_columns_extend(np.zeros((n * n, 0), dtype=complex),
                                   mats.reshape(k, n * n).T, drop)
    return q.T.reshape(-1, n, n)


def span_residual(basis: np.ndarray, mat: np.ndarray) -> float:
    """Frobenius distance from ``mat`` to the span of an orthonormal basis stack."""
    q = basis.reshape(basis.shape[0], -1)
    v = mat.ravel()
    return float(np.linalg.norm(v - q.T @ (q.conj() @ v)))


def _max_span_residual(basis: np.ndarray, mats: np.ndarray, orthonormal: bool = True,
                       tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Largest projection residual of ``mats`` onto span(basis)."""
    n = basis.shape[1]
    if orthonormal:
        q = basis.reshape(basis.shape[0], -1)
    else:
        q = _orthonormalize_stack(basis, tol).reshape(-1, n * n)
    v = mats.reshape(mats.shape[0], -1)
    resid = v - (v @ q.conj().T) @ q
    return float(np.max(np.linalg.norm(resid, axis=1))) if len(resid) else 0.0


def span_contains(basis: np.ndarray, mat: np.ndarray,
                  tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    m = as_complex_matrix(mat)
    return span_residual(basis, m) <= tol.rank_tol * max(1.0, float(np.linalg.norm(m)))


def span_equal(a: OperatorAlgebra, b: OperatorAlgebra,
               tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Span equality of two algebras: equal dimension and mutual containment."""
    if a.algebra_dim != b.algebra_dim or a.dim != b.dim:
        return False
    thresh = 10 * tol.rank_tol
    return (_max_span_residual(a.basis, b.basis) <= thresh
            and _max_span_residual(b.basis, a.basis) <= thresh)


# ---------------------------------------------------------------------------
# commutant

def _generic_hermitian_combo(members: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Seeded generic Hermitian element of the real span of members + adjoints."""
    k = members.shape[0]
    herm = 0.5 * (members + members.conj().transpose(0, 2, 1))
    anti = (0.5 / 1j) * (members - members.conj().transpose(0, 2, 1))
    c1, c2 = rng.standard_normal(k), rng.standard_normal(k)
    return np.einsum("k,kij->ij", c1, herm) + np.einsum("k,kij->ij", c2, anti)


def _pattern_from_element(x: np.ndarray, tol: ToleranceConfig):
    """Eigenbasis of a Hermitian element plus the index pairs of its block pattern."""
    w, v = np.linalg.eigh(hermitian_part(x))
    labels = np.empty(w.size, dtype=int)
    for lab, idx in enumerate(cluster_eigenvalues(w, tol.cluster_tol)):
        labels[idx] = lab
    rows, cols = np.nonzero(labels[:, None] == labels[None, :])
    return v, rows, cols


def _pattern_constraints(a_rot: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Matrix of the map (pattern coords) -> vec([A, B]) for one rotated generator.

    The pattern basis element for pair ``(a, b)`` is the matrix unit
    ``|a><b|``; its commutator with A has column ``b`` equal to ``A[:, a]``
    and row ``a`` equal to ``-A[b, :]``.
    """
    n = a_rot.shape[0]
    p = rows.size
    out = np.zeros((p, n, n), dtype=complex)
    out[np.arange(p)[:, None], np.arange(n)[None, :], cols[:, None]] += a_rot[:, rows].T
    out[np.arange(p)[:, None], rows[:, None], np.arange(n)[None, :]] -= a_rot[cols, :]
    return out.reshape(p, n * n).T  # (n^2, p)


def _verify_commutes(members: np.ndarray, cands: np.ndarray, tol: ToleranceConfig):
    """Max relative commutator residual of candidates against each member."""
    norms = np.linalg.norm(members.reshape(members.shape[0], -1), axis=1)
    worst_member, worst_ratio = -1, 0.0
    for m, (a, na) in enumerate(zip(members, norms)):
        comm = np.einsum("ij,qjk->qik", a, cands) - np.einsum("qij,jk->qik", cands, a)
        r = float(np.max(np.linalg.norm(comm.reshape(comm.shape[0], -1), axis=1)))
        ratio = r / max(2.0 * na, 1e-300)
        if ratio > worst_ratio:
            worst_member, worst_ratio = m, ratio
    return worst_member, worst_ratio


def commutant(s: OperatorSet, tol: ToleranceConfig = DEFAULT_TOL) -> OperatorAlgebra:
    """Commutant {B : BA = AB for every A in the set} as an OperatorAlgebra.

    Non-*-closed sets are star-completed first, so the result is always a
    *-algebra.  Computed as the nullspace of the stacked commutator maps on
    the vectorized matrix space, restricted to the block pattern of a
    generic Hermitian combination of the generators; the restriction is
    exact and the result is verified to commute with every generator.
    """
    s = star_completion(s)
    members = s.members
    n = s.dim
    x1 = _generic_hermitian_combo(members, tol.rng(101))
    v, rows, cols = _pattern_from_element(x1, tol)
    mem_rot = np.einsum("ij,kjl,lm->kim", v.conj().T, members, v)
    scale = 2.0 * float(np.max(np.linalg.norm(mem_rot.reshape(len(members), -1), axis=1)))

    x2 = v.conj().T @ _generic_hermitian_combo(members, tol.rng(102)) @ v
    active = [x2]
    used = np.zeros(len(members), dtype=bool)
    for _ in range(len(members) + 1):
        cmat = np.vstack([_pattern_constraints(a, rows, cols) for a in active])
        coeffs = orthonormal_nullspace(cmat, tol, scale=scale)
        cands = np.zeros((coeffs.shape[1], n, n), dtype=complex)
        cands[:, rows, cols] = coeffs.T
        worst, ratio = _verify_commutes(mem_rot, cands, tol)
        if ratio <= tol.rank_tol or bool(used.all()):
            if ratio > tol.rank_tol:
                raise PostconditionFailure(
                    f"commutant verification residual {ratio:.3e} above rank_tol")
            basis = np.einsum("ij,kjl,lm->kim", v, cands, v.conj().T)
            if span_residual(basis, np.eye(n, dtype=complex)) > 10 * tol.rank_tol:
                raise PostconditionFailure("identity missing from computed commutant")
            return OperatorAlgebra(dim=n, basis=basis, contains_identity=True)
        used[worst] = True
        active.append(mem_rot[worst])
    raise PostconditionFailure("commutant constraint loop failed to converge")


def _word_closure_dim(s: OperatorSet, tol: ToleranceConfig) -> int:
    """Dimension of the span closure of words in the (star-completed) members.

    Generators are normalized to unit operator norm (the span is scale
    invariant) and each round re-ranks the full stack ``[basis, g basis,
    basis g]`` by one SVD with a relative cutoff; extracting directions
    incrementally would let roundoff breed spurious dimensions near
    termination.
    """
    s = star_completion(s)
    n = s.dim
    norms = np.linalg.norm(s.members, ord=2, axis=(1, 2))
    gens = s.members / np.where(norms > 0, norms, 1.0)[:, None, None]
    basis = np.concatenate([np.eye(n, dtype=complex)[None] / np.sqrt(n), gens])
    rank = 0
    while True:
        left = np.einsum("kij,qjl->kqil", gens, basis).reshape(-1, n, n)
        right = np.einsum("qij,kjl->kqil", basis, gens).reshape(-1, n, n)
        stack = np.concatenate([basis, left, right]).reshape(-1, n * n)
        _, sv, vh = np.linalg.svd(stack, full_matrices=False)
        keep = sv > tol.rank_tol * sv[0]
        new_rank = int(np.sum(keep))
        if new_rank == rank:
            return rank
        rank = new_rank
        basis = vh[keep].reshape(-1, n, n)


def generated_algebra(s: OperatorSet, tol: ToleranceConfig = DEFAULT_TOL,
                      cross_validate: bool = True) -> OperatorAlgebra:
    """The *-algebra generated by a set: its double commutant.

    With ``cross_validate`` the dimension is checked against an independent
    word closure (repeatedly adjoining products of the star-completed
    members to ``span{1, members}``); a disagreement signals a tolerance
    failure and raises :class:`ClosureMismatch`.
    """
    first = commutant(s, tol)
    double = commutant(
        OperatorSet(dim=first.dim, members=first.basis,
                    names=tuple(f"c{i}" for i in range(first.algebra_dim)),
                    self_adjoint_closed=True),
        tol)
    if cross_validate:
        wdim = _word_closure_dim(s, tol)
        if wdim != double.algebra_dim:
            raise ClosureMismatch(
                f"double commutant dim {double.algebra_dim} != word closure dim {wdim}")
    return double


def center(a: OperatorAlgebra, tol: ToleranceConfig = DEFAULT_TOL,
           commutant_algebra: OperatorAlgebra | None = None) -> OperatorAlgebra:
    """Center of an algebra: the span intersection of the algebra and its commutant.

    Always contains the identity.  A precomputed commutant may be passed to
    avoid recomputation.
    """
    cp = commutant_algebra
    if cp is None:
        cp = commutant(OperatorSet(dim=a.dim, members=a.basis,
                                   names=tuple(f"b{i}" for i in range(a.algebra_dim)),
                                   self_adjoint_closed=True), tol)
    n = a.dim
    qa = a.basis.reshape(a.algebra_dim, n * n)
    vc = cp.basis.reshape(cp.algebra_dim, n * n).T  # columns = commutant elements
    resid = vc - qa.T @ (qa.conj() @ vc)
    coeffs = orthonormal_nullspace(resid, tol, scale=1.0)  # combos of cp lying in span(a)
    basis = np.einsum("qr,qij->rij", coeffs, cp.basis)
    if span_residual(basis, np.eye(n, dtype=complex)) > 10 * tol.rank_tol:
        raise PostconditionFailure("identity missing from computed center")
    return OperatorAlgebra(dim=n, basis=basis, contains_identity=True)


def is_abelian(a: OperatorAlgebra, tol: ToleranceConfig = DEFAULT_TOL) -> tuple[bool, float]:
    """Whether all basis pairs commute; also reports the worst relative residual."""
    basis = a.basis
    q = basis.shape[0]
    norms = np.linalg.norm(basis.reshape(q, -1), axis=1)
    worst = 0.0
    for i in range(q):  # row-chunked to keep memory flat for large algebras
        comm = np.einsum("ij,qjk->qik", basis[i], basis) \
            - np.einsum("qij,jk->qik", basis, basis[i])
        r = np.linalg.norm(comm.reshape(q, -1), axis=1) / (norms[i] * norms)
        worst = max(worst, float(np.max(r)))
    return worst <= ABELIAN_TOL, worst


@dataclass(frozen=True)
class DiracReport:
    """Outcome of the compatibility check on an observable algebra.

    ``v2_holds`` states whether the commutant of the observables is abelian.
    When it holds, ``witness`` is a maximal abelian subalgebra of the
    observables (equal to its own commutant) built from a generic
    simple-spectrum element per coherent sector.
    """

    v2_holds: bool
    witness: OperatorAlgebra | None
    commutant_dim: int
    max_commutator: float
    witness_is_maximal_abelian: bool | None = None
    witness_in_observables: bool | None = None


def check_dirac(o: OperatorAlgebra, tol: ToleranceConfig = DEFAULT_TOL) -> DiracReport:
    """Abelian-commutant verdict plus, when it holds, a maximal abelian witness.

    The witness is built per coherent sector: a seeded random Hermitian
    element of the observables restricted to the sector (random eigenbasis,
    Chebyshev-spaced eigenvalues so the closure stays well conditioned),
    retried until the assembled direct sum has globally simple spectrum,
    then closed into an algebra.  ``A = A'`` is verified by dimension and
    span comparison.
    """
    from .sectors import central_decomposition  # deferred: sectors builds on this module

    if not o.contains_identity:
        raise ValueError("check_dirac requires an algebra containing the identity")
    oset = OperatorSet(dim=o.dim, members=o.basis,
                       names=tuple(f"o{i}" for i in range(o.algebra_dim)),
                       self_adjoint_closed=True)
    cp = commutant(oset, tol)
    abelian, worst = is_abelian(cp, tol)
    if not abelian:
        return DiracReport(v2_holds=False, witness=None,
                           commutant_dim=cp.algebra_dim, max_commutator=worst)

    dec = central_decomposition(o, tol, commutant_algebra=cp)
    n = o.dim
    # Chebyshev-spaced target spectrum keeps the closure validator's Krylov
    # chain well conditioned; the random content is the per-sector eigenbasis.
    nodes = np.cos(np.pi * (2.0 * np.arange(n) + 1.0) / (2.0 * n))[::-1]
    generator = None
    for attempt in range(16):
        rng = tol.rng(103, attempt)
        full = np.zeros((n, n), dtype=complex)
        offset = 0
        for sec in dec.sectors:
            w_iso = sec.isometry
            b = w_iso.shape[1]
            u = random_unitary(rng, b)  # d = 1: the restricted algebra is the full block
            x = (u * nodes[offset:offset + b]) @ u.conj().T
            full += w_iso @ x @ w_iso.conj().T
            offset += b
        evals = np.linalg.eigvalsh(hermitian_part(full))
        diam = float(evals[-1] - evals[0])
        if evals.size < 2 or (
                diam > 0 and float(np.min(np.diff(evals))) > tol.cluster_tol * diam):
            generator = full
            break
    if generator is None:
        raise WitnessConstructionFailed(
            "no simple-spectrum generic element after 16 reseeds; "
            "tolerances look degenerate for this algebra")

    witness = generated_algebra(operator_set([generator], tol=tol), tol)
    wset = OperatorSet(dim=n, members=witness.basis,
                       names=tuple(f"w{i}" for i in range(witness.algebra_dim)),
                       self_adjoint_closed=True)
    wcomm = commutant(wset, tol)
    return DiracReport(
        v2_holds=True,
        witness=witness,
        commutant_dim=cp.algebra_dim,
        max_commutator=worst,
        witness_is_maximal_abelian=span_equal(witness, wcomm, tol),
        witness_in_observables=_max_span_residual(o.basis, witness.basis) <= 100 * tol.rank_tol,
    )
