"""Shared test helpers: independent oracles and planted-structure generators.

The brute-force commutant below is the reference stacked-kron nullspace with
a full SVD, kept free of the library's pattern reduction so it can serve as
an independent oracle.
"""

from __future__ import annotations

import numpy as np
import pytest
from scipy.linalg import block_diag

from superselect.numkernel import ToleranceConfig, random_hermitian, random_unitary


@pytest.fixture
def tol():
    return ToleranceConfig()


def brute_force_commutant(mats, rank_tol=1e-10):
    """Orthonormal commutant basis from the raw stacked commutator nullspace."""
    mats = [np.asarray(m, dtype=complex) for m in mats]
    n = mats[0].shape[0]
    eye = np.eye(n)
    blocks = []
    for a in mats:
        for op in (a, a.conj().T):  # star-completion
            blocks.append(np.kron(op, eye) - np.kron(eye, op.T))
    stacked = np.vstack(blocks)
    _, s, vh = np.linalg.svd(stacked, full_matrices=True)
    scale = 2.0 * max(np.linalg.norm(a) for a in mats)
    null_mask = np.ones(n * n, dtype=bool)
    null_mask[: s.size] = s <= rank_tol * scale
    return vh.conj().T[:, null_mask].T.reshape(-1, n, n)


def sample_pattern(rng):
    """Random planted block pattern [(d_i, ntilde_i)] with total dim <= 16."""
    while True:
        n_sectors = rng.choice([1, 2, 3], p=[0.3, 0.45, 0.25])
        pattern = [(int(rng.choice([1, 1, 1, 2, 2, 3])), int(rng.choice([1, 2, 3])))
                   for _ in range(n_sectors)]
        if sum(d * t for d, t in pattern) <= 16:
            return pattern


def planted_block_algebra(rng, pattern, n_generators=2):
    """Hermitian generators of a hidden block algebra  (+) 1_d x M_ntilde.

    The pattern is conjugated by a random unitary; with two generic
    Hermitian elements per block the generated algebra is the full planted
    one (equal-size blocks are kept spectrally separated so no accidental
    intertwiner can merge them).
    """
    n = sum(d * t for d, t in pattern)
    u = random_unitary(rng, n)
    while True:
        block_draws = [[random_hermitian(rng, t) for t in (t,) * n_generators]
                       for _, t in pattern]
        # keep same-size blocks spectrally apart (first generator decides)
        ok = True
        for i in range(len(pattern)):
            for j in range(i + 1, len(pattern)):
                if pattern[i][1] != pattern[j][1]:
                    continue
                wi = np.linalg.eigvalsh(block_draws[i][0])
                wj = np.linalg.eigvalsh(block_draws[j][0])
                if np.max(np.abs(wi - wj)) < 1e-3:
                    ok = False
        if ok:
            break
    gens = []
    for k in range(n_generators):
        g = block_diag(*[np.kron(np.eye(d), block_draws[i][k])
                         for i, (d, _) in enumerate(pattern)])
        gens.append(u @ g @ u.conj().T)
    return gens, u
