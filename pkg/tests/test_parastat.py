import numpy as np
import pytest

from superselect.errors import SizeLimit
from superselect.opalgebra import commutant, is_abelian, operator_set, span_residual
from superselect.parastat import (
    CHARACTER_TABLES,
    Permutation,
    character_oracle,
    decomposition_for,
    invariant_algebra,
    parastat_truncation,
    permutation_unitaries,
    sector_oracle_multiset,
    symmetric_group,
)

ALL_CASES = [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2)]


class TestPermutation:
    def test_composition_convention(self):
        g = Permutation((1, 0, 2))
        h = Permutation((0, 2, 1))
        assert (g * h).images == tuple(g.images[i] for i in h.images)

    def test_inverse(self):
        g = Permutation((2, 0, 1))
        assert (g * g.inverse()).images == (0, 1, 2)

    def test_cycle_type(self):
        assert Permutation((1, 0, 2)).cycle_type() == (2, 1)
        assert Permutation((1, 2, 0)).cycle_type() == (3,)
        assert Permutation((0, 1, 2)).cycle_type() == (1, 1, 1)

    def test_rejects_non_bijection(self):
        with pytest.raises(ValueError):
            Permutation((0, 0, 1))


class TestCharacterTables:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_orthogonality_relations(self, n):
        group = symmetric_group(n)
        table = CHARACTER_TABLES[n]
        for i, (_, di, chi_i) in enumerate(table):
            assert chi_i[tuple([1] * n)] == di  # dimension at the identity class
            for j, (_, dj, chi_j) in enumerate(table):
                inner = sum(chi_i[g.cycle_type()] * chi_j[g.cycle_type()]
                            for g in group) / len(group)
                assert inner == (1 if i == j else 0)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_partitions_lexicographic(self, n):
        parts = [p for p, _, _ in CHARACTER_TABLES[n]]
        assert parts == sorted(parts)
        assert all(sum(p) == n for p in parts)


class TestPermutationUnitaries:
    def test_swap_is_involution(self):
        rep = permutation_unitaries(2, 2)
        u = rep.unitaries[Permutation((1, 0))]
        assert np.allclose(u @ u, np.eye(4))

    def test_unitaries_are_permutation_matrices(self):
        rep = permutation_unitaries(3, 2)
        for u in rep.unitaries.values():
            assert np.array_equal(np.sort(np.abs(u), axis=0)[-1], np.ones(8))
            assert set(np.unique(u.real)) <= {0.0, 1.0}
            assert np.allclose(u.imag, 0.0)
            assert np.allclose(u @ u.conj().T, np.eye(8))

    def test_proper_representation_all_pairs(self):
        # brute-force composition over all 36 pairs
        rep = permutation_unitaries(3, 2)
        for g in rep.group():
            for h in rep.group():
                assert np.array_equal(rep.unitaries[g] @ rep.unitaries[h],
                                      rep.unitaries[g * h])

    @pytest.mark.parametrize("n,d", [(5, 2), (2, 4), (4, 3), (1, 2)])
    def test_size_limits(self, n, d):
        with pytest.raises(SizeLimit):
            permutation_unitaries(n, d)


class TestCharacterOracle:
    def test_three_qubits(self):
        rep = permutation_unitaries(3, 2)
        table = {p: (d, nt) for p, d, nt in character_oracle(rep)}
        assert table[(3,)] == (1, 4)       # symmetric block
        assert table[(2, 1)] == (2, 2)     # mixed block
        assert table[(1, 1, 1)] == (1, 0)  # alternating block absent for d=2
        assert sector_oracle_multiset(rep) == ((1, 4), (2, 2))

    def test_four_qubits(self):
        rep = permutation_unitaries(4, 2)
        table = {p: (d, nt) for p, d, nt in character_oracle(rep)}
        assert table[(4,)] == (1, 5)
        assert table[(3, 1)] == (3, 3)
        assert table[(2, 2)] == (2, 1)
        assert table[(2, 1, 1)] == (3, 0)
        assert table[(1, 1, 1, 1)] == (1, 0)

    def test_two_qubits(self):
        rep = permutation_unitaries(2, 2)
        assert sector_oracle_multiset(rep) == ((1, 1), (1, 3))

    @pytest.mark.parametrize("n,d", ALL_CASES)
    def test_dimension_sum(self, n, d):
        rep = permutation_unitaries(n, d)
        assert sum(dd * nt for _, dd, nt in character_oracle(rep)) == d ** n

    @pytest.mark.parametrize("n,d", [(2, 2), (3, 2), (4, 2)])
    def test_projectors_commute_with_observables(self, n, d, tol):
        rep = permutation_unitaries(n, d)
        o = invariant_algebra(rep, tol)
        group = rep.group()
        for partition, dim_i, chars in CHARACTER_TABLES[n]:
            proj = sum(chars[g.cycle_type()] * rep.unitaries[g] for g in group)
            proj = (dim_i / len(group)) * proj
            worst = max(np.linalg.norm(b @ proj - proj @ b) for b in o.basis)
            assert worst <= 1e-9, partition


class TestInvariantAlgebra:
    def test_two_qubit_dimensions(self, tol):
        rep = permutation_unitaries(2, 2)
        o = invariant_algebra(rep, tol)
        assert o.algebra_dim == 10  # 3^2 + 1^2
        cp = commutant(operator_set(list(o.basis), tol=tol), tol)
        abelian, _ = is_abelian(cp, tol)
        assert abelian  # S2 is abelian: compatibility holds untruncated

    def test_three_qubit_dimensions(self, tol):
        rep = permutation_unitaries(3, 2)
        o = invariant_algebra(rep, tol)
        assert o.algebra_dim == 20  # 4^2 + 2^2
        cp = commutant(operator_set(list(o.basis), tol=tol), tol)
        assert cp.algebra_dim == 5  # 1^2 + 2^2
        abelian, resid = is_abelian(cp, tol)
        assert not abelian and resid > 0.01
        # the group unitaries live inside the commutant
        for g in rep.group():
            assert span_residual(cp.basis, rep.unitaries[g]) <= 1e-9


class TestTruncation:
    @pytest.mark.parametrize("n,d,expect_dim,expect_sectors", [
        (2, 2, 4, 2), (3, 2, 6, 2), (4, 2, 9, 3), (3, 3, 19, 3),
    ])
    def test_case_study(self, n, d, expect_dim, expect_sectors, tol):
        rep = permutation_unitaries(n, d)
        result = parastat_truncation(rep, tol)
        assert result["dim_truncated"] == expect_dim
        assert result["post_truncation_v2"]
        assert result["post_truncation_commutant_dim"] == expect_sectors
        assert result["oracle_agrees"]
        assert result["pre_truncation_abelian"] == (n == 2)

    @pytest.mark.parametrize("n,d", [(2, 2), (3, 2), (4, 2), (2, 3)])
    def test_spectral_matches_oracle(self, n, d, tol):
        rep = permutation_unitaries(n, d)
        dec = decomposition_for(rep, tol)
        assert dec.multiset() == sector_oracle_multiset(rep)


class TestNonPureVectors:
    def test_entangled_multiplicity_vector_is_a_strict_mixture(self, tol):
        # in a block with d > 1, a vector entangled across the multiplicity
        # factor defines the same functional as the matching convex mixture
        rep = permutation_unitaries(3, 2)
        o = invariant_algebra(rep, tol)
        dec = decomposition_for(rep, tol)
        sec = next(s for s in dec.sectors if s.d > 1)
        cp = commutant(operator_set(list(o.basis), tol=tol), tol)
        w_iso = sec.isometry
        restricted = np.einsum("ia,kij,jb->kab", w_iso.conj(), cp.basis, w_iso)
        herm = sum(np.random.default_rng(7).standard_normal() * (r + r.conj().T)
                   for r in restricted)
        evals, evecs = np.linalg.eigh(herm)
        groups = [evecs[:, :sec.ntilde], evecs[:, sec.ntilde:]]  # the two copies
        rng = np.random.default_rng(11)
        c1 = w_iso @ (groups[0] @ rng.standard_normal(sec.ntilde))
        c2 = w_iso @ (groups[1] @ rng.standard_normal(sec.ntilde))
        c1, c2 = c1 / np.linalg.norm(c1), c2 / np.linalg.norm(c2)
        v = (c1 + c2) / np.sqrt(2)

        from superselect.sectors import expectation_functional, vector_state
        f_v = expectation_functional(vector_state(v), o)
        mix = 0.5 * expectation_functional(vector_state(c1), o) \
            + 0.5 * expectation_functional(vector_state(c2), o)
        assert np.max(np.abs(f_v - mix)) <= 1e-12
        # strictness: the two components are distinguishable on the observables
        f1 = expectation_functional(vector_state(c1), o)
        f2 = expectation_functional(vector_state(c2), o)
        assert np.max(np.abs(f1 - f2)) > 1e-3
