"""Permutation symmetry on tensor powers: invariant algebra and truncation.

``n`` identical particles, each with a C^d internal space, carry the obvious
permutation action on (C^d)^(x n).  The observables are everything commuting
with that action; their commutant is the group-algebra image, non-abelian
for n >= 3, and the block structure is cross-checked against character
projectors built from hard-coded S_2..S_4 tables (partitions listed in
lexicographic order).  Truncating to one multiplicity copy per block
restores an abelian commutant.

Absent blocks (multiplicity zero, e.g. the alternating one for d = 2,
n = 3) are reported explicitly rather than dropped.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import NonIntegerRank, PostconditionFailure, SizeLimit
from .numkernel import DEFAULT_TOL, ToleranceConfig
from .opalgebra import OperatorAlgebra, check_dirac, commutant, is_abelian, operator_set
from .sectors import SectorDecomposition, central_decomposition, truncate

__all__ = [
    "Permutation",
    "TensorRep",
    "permutation_unitaries",
    "invariant_algebra",
    "character_oracle",
    "parastat_truncation",
    "CHARACTER_TABLES",
]


@dataclass(frozen=True)
class Permutation:
    """A permutation of {0, ..., n-1} given by its tuple of images."""

    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError(f"not a permutation: {self.images}")

    def __mul__(self, other: "Permutation") -> "Permutation":
        # (g * h)(x) = g(h(x))
        return Permutation(tuple(self.images[i] for i in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def cycle_type(self) -> tuple[int, ...]:
        seen = [False] * len(self.images)
        lengths = []
        for start in range(len(self.images)):
            if seen[start]:
                continue
            length, j = 0, start
            while not seen[j]:
                seen[j] = True
                j = self.images[j]
                length += 1
            lengths.append(length)
        return tuple(sorted(lengths, reverse=True))


def symmetric_group(n: int) -> list[Permutation]:
    """All permutations of n symbols, in lexicographic order of images."""
    return [Permutation(p) for p in itertools.permutations(range(n))]


# Character tables, keyed by particle count.  Rows: (partition, dimension,
# {cycle type: character}); partitions in lexicographic order.
CHARACTER_TABLES: dict[int, list[tuple[tuple[int, ...], int, dict[tuple[int, ...], int]]]] = {
    2: [
        ((1, 1), 1, {(1, 1): 1, (2,): -1}),
        ((2,), 1, {(1, 1): 1, (2,): 1}),
    ],
    3: [
        ((1, 1, 1), 1, {(1, 1, 1): 1, (2, 1): -1, (3,): 1}),
        ((2, 1), 2, {(1, 1, 1): 2, (2, 1): 0, (3,): -1}),
        ((3,), 1, {(1, 1, 1): 1, (2, 1): 1, (3,): 1}),
    ],
    4: [
        ((1, 1, 1, 1), 1, {(1, 1, 1, 1): 1, (2, 1, 1): -1, (2, 2): 1, (3, 1): 1, (4,): -1}),
        ((2, 1, 1), 3, {(1, 1, 1, 1): 3, (2, 1, 1): -1, (2, 2): -1, (3, 1): 0, (4,): 1}),
        ((2, 2), 2, {(1, 1, 1, 1): 2, (2, 1, 1): 0, (2, 2): 2, (3, 1): -1, (4,): 0}),
        ((3, 1), 3, {(1, 1, 1, 1): 3, (2, 1, 1): 1, (2, 2): -1, (3, 1): 0, (4,): -1}),
        ((4,), 1, {(1, 1, 1, 1): 1, (2, 1, 1): 1, (2, 2): 1, (3, 1): 1, (4,): 1}),
    ],
}


@dataclass(frozen=True)
class TensorRep:
    """Unitary permutation action on the n-fold tensor power of C^d."""

    n_particles: int
    d_single: int
    dim: int
    unitaries: dict[Permutation, np.ndarray]

    def group(self) -> list[Permutation]:
        return sorted(self.unitaries, key=lambda g: g.images)


def permutation_unitaries(n: int, d: int) -> TensorRep:
    """Tensor-factor permutation matrices for S_n on (C^d)^(x n).

    Each U(g) sends the basis vector with digits (i_1, ..., i_n) to the one
    with digits (i_{g^-1(1)}, ..., i_{g^-1(n)}); the result is a proper
    representation of 0/1 permutation matrices.
    """
    if not (2 <= n <= 4 and 2 <= d <= 3 and d ** n <= 64):
        raise SizeLimit(
            f"supported range is 2 <= n <= 4, 2 <= d <= 3, d^n <= 64; got n={n}, d={d}")
    dim = d ** n
    grid = np.arange(dim).reshape((d,) * n)
    unitaries = {}
    for g in symmetric_group(n):
        target = np.transpose(grid, axes=g.images).ravel()
        u = np.zeros((dim, dim), dtype=complex)
        u[target, np.arange(dim)] = 1.0
        unitaries[g] = u
    return TensorRep(n_particles=n, d_single=d, dim=dim, unitaries=unitaries)


def invariant_algebra(rep: TensorRep, tol: ToleranceConfig = DEFAULT_TOL) -> OperatorAlgebra:
    """Observables of identical particles: the commutant of all permutation unitaries."""
    group = rep.group()
    s = operator_set([rep.unitaries[g] for g in group],
                     names=[str(g.images) for g in group], tol=tol)
    return commutant(s, tol)


def character_oracle(rep: TensorRep) -> list[tuple[tuple[int, ...], int, int]]:
    """Isotypic data (partition, irrep dim d, multiplicity ntilde) for every irrep.

    Built from the character projectors (d/|G|) sum_g chi(g) U(g); the
    multiplicity is rank(projector)/d and must be an integer within 0.01.
    This is the independent oracle against which the spectral sector
    decomposition is validated.
    """
    table = CHARACTER_TABLES.get(rep.n_particles)
    if table is None:
        raise SizeLimit(f"character table not built in for n={rep.n_particles}")
    group = rep.group()
    order = len(group)
    out = []
    for partition, d, chars in table:
        proj = np.zeros((rep.dim, rep.dim), dtype=complex)
        for g in group:
            proj += chars[g.cycle_type()] * rep.unitaries[g]
        proj *= d / order
        rank = float(np.trace(proj).real)
        ntilde = rank / d
        if abs(ntilde - round(ntilde)) > 0.01:
            raise NonIntegerRank(
                f"projector for partition {partition} has rank {rank:.4f}, "
                f"not a multiple of d={d}")
        out.append((partition, d, int(round(ntilde))))
    return out


def parastat_truncation(rep: TensorRep, tol: ToleranceConfig = DEFAULT_TOL) -> dict:
    """Full case study for one (n, d): decomposition, truncation, compatibility.

    Returns a report with the sector table, the character-oracle table, the
    abelian verdicts on the commutant before and after truncation, and the
    truncated dimension (the sum of multiplicities over present blocks).
    """
    o = invariant_algebra(rep, tol)
    oset = operator_set(list(o.basis), tol=tol)
    cp = commutant(oset, tol)
    pre_abelian, pre_resid = is_abelian(cp, tol)

    dec = central_decomposition(o, tol, commutant_algebra=cp)
    v_iso, o_tilde = truncate(o, dec, tol)
    post = check_dirac(o_tilde, tol)

    oracle = character_oracle(rep)
    present = tuple(sorted((d, nt) for _, d, nt in oracle if nt > 0))
    expected_dim = sum(nt for _, _, nt in oracle if nt > 0)
    if v_iso.shape[1] != expected_dim:
        raise PostconditionFailure(
            f"truncated dimension {v_iso.shape[1]} != sum of multiplicities {expected_dim}")
    if post.commutant_dim != len(dec.sectors):
        raise PostconditionFailure(
            "truncated commutant dimension does not match the number of sectors")

    return {
        "n_particles": rep.n_particles,
        "d_single": rep.d_single,
        "dim": rep.dim,
        "algebra_dim": o.algebra_dim,
        "commutant_dim": cp.algebra_dim,
        "pre_truncation_abelian": bool(pre_abelian),
        "pre_truncation_max_commutator": float(pre_resid),
        "sector_table": list(dec.multiset()),
        "oracle_table": [
            {"partition": list(p), "d": d, "ntilde": nt} for p, d, nt in oracle
        ],
        "oracle_agrees": dec.multiset() == present,
        "dim_truncated": int(v_iso.shape[1]),
        "post_truncation_v2": bool(post.v2_holds),
        "post_truncation_commutant_dim": int(post.commutant_dim),
    }


def sector_oracle_multiset(rep: TensorRep) -> tuple[tuple[int, int], ...]:
    """Present-block (d, ntilde) multiset from the character oracle."""
    return tuple(sorted((d, nt) for _, d, nt in character_oracle(rep) if nt > 0))


def decomposition_for(rep: TensorRep, tol: ToleranceConfig = DEFAULT_TOL) -> SectorDecomposition:
    """Spectral sector decomposition of the invariant algebra."""
    return central_decomposition(invariant_algebra(rep, tol), tol)
