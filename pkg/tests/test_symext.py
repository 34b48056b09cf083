import math
from itertools import permutations

import numpy as np
import pytest

from sepscan import states
from sepscan.onesided import ENTANGLED, SEPARABLE
from sepscan.symext import (
    DimensionGuardError,
    ExtensionProblem,
    copies_bound,
    extension_gap,
    find_extension,
    occupations,
    separability_scan,
    sym_dim,
    sym_subspace,
    verify_extension,
)


def permutation_matrix(perm, m):
    k = len(perm)
    p = np.zeros((m**k, m**k))
    for idx in range(m**k):
        digits = []
        rest = idx
        for _ in range(k):
            digits.append(rest % m)
            rest //= m
        digits = digits[::-1]
        out = [digits[perm[i]] for i in range(k)]
        jdx = 0
        for d in out:
            jdx = jdx * m + d
        p[jdx, idx] = 1.0
    return p


class TestCombinatorics:
    def test_sym_dim_matches_binomial(self):
        for m in range(1, 5):
            for k in range(1, 7):
                assert sym_dim(m, k) == math.comb(m + k - 1, k)

    def test_two_copies_of_qubit(self):
        assert sym_dim(2, 2) == 3

    def test_occupations_deterministic_and_complete(self):
        occ = occupations(3, 2)
        assert len(occ) == 6
        assert occ == occupations(3, 2)
        assert all(sum(n) == 2 for n in occ)

    def test_subspace_isometry(self):
        for m, k in [(2, 1), (2, 2), (3, 2), (2, 3)]:
            sub = sym_subspace(m, k)
            gram = sub.isometry.conj().T @ sub.isometry
            np.testing.assert_allclose(gram, np.eye(sub.dim_sk), atol=1e-9)

    def test_k_equals_one_is_identity(self):
        sub = sym_subspace(2, 1)
        assert sub.dim_sk == 2
        np.testing.assert_allclose(sub.isometry, np.eye(2))

    def test_embed_guard(self):
        with pytest.raises(DimensionGuardError):
            sym_subspace(2, 25)


class TestBounds:
    def test_copies_bound_values(self):
        assert copies_bound(2, 0.5) == 16
        assert copies_bound(2, 8.0) == 1
        assert copies_bound(3, 0.1) == 120

    def test_extension_gap_values(self):
        assert extension_gap(2, 16) == pytest.approx(0.5)
        assert extension_gap(2, 8) == pytest.approx(1.0)
        assert extension_gap(3, 120) == pytest.approx(0.1)

    def test_gap_at_bound_within_delta(self):
        for m in (2, 3, 4):
            for delta in (0.7, 0.25, 0.1, 0.03):
                assert extension_gap(m, copies_bound(m, delta)) <= delta + 1e-12


class TestProblemValidation:
    def test_k_must_be_at_least_two(self):
        with pytest.raises(ValueError):
            ExtensionProblem(states.bell(), 1)

    def test_dimension_guard(self):
        with pytest.raises(DimensionGuardError):
            ExtensionProblem(states.maximally_mixed(3, 3), 40, max_dim=512)


class TestFindExtension:
    def test_product_state_extends(self):
        prob = ExtensionProblem(states.random_pure_product(2, 2, 0), 3, ppt=True)
        res = find_extension(prob)
        assert res.found
        checks = verify_extension(res, prob)
        assert checks["trace_back"] < 1e-6
        assert checks["psd"] < 1e-6
        assert checks["ppt"] < 1e-6

    def test_bell_has_no_extension(self):
        res = find_extension(ExtensionProblem(states.bell(), 2, ppt=False))
        assert not res.found
        assert res.residual > 1e-3
        assert res.budget_exhausted

    def test_maximally_mixed_extends(self):
        prob = ExtensionProblem(states.maximally_mixed(2, 2), 4, ppt=True)
        res = find_extension(prob)
        assert res.found
        assert verify_extension(res, prob)["trace_back"] < 1e-6

    def test_monotone_in_k_for_bell(self):
        # infeasible at k stays infeasible at k+1 (the hierarchy nests)
        for ppt in (False, True):
            r2 = find_extension(ExtensionProblem(states.bell(), 2, ppt=ppt), max_iters=1500)
            r3 = find_extension(ExtensionProblem(states.bell(), 3, ppt=ppt), max_iters=1500)
            assert not r2.found and not r3.found

    def test_monotone_in_k_for_entangled_werner(self):
        for k in (2, 3):
            res = find_extension(ExtensionProblem(states.werner(0.95), k, ppt=True), max_iters=1500)
            assert not res.found

    def test_every_partial_trace_choice_returns_state(self):
        # in the embedded picture, tracing any k-1 of the A copies gives rho back;
        # 20 terms keep the natural extension strictly inside every cone
        rho = states.product_mixture(2, 2, 20, 0)
        k = 3
        prob = ExtensionProblem(rho, k, ppt=True)
        res = find_extension(prob)
        assert res.found
        sub = sym_subspace(2, k)
        v = np.kron(sub.isometry, np.eye(2))
        big = v @ res.operator @ v.conj().T
        dims = [2] * k + [2]
        for kept in range(k):
            t = big.reshape(dims + dims)
            for axis in reversed([i for i in range(k) if i != kept]):
                nd = t.ndim // 2
                t = np.trace(t, axis1=axis, axis2=nd + axis)
            got = t.reshape(4, 4)
            assert np.linalg.norm(got - rho.mat) < 1e-6

    def test_permutation_invariance_of_extension(self):
        rho = states.product_mixture(2, 2, 20, 6)
        k = 3
        res = find_extension(ExtensionProblem(rho, k, ppt=True))
        assert res.found
        sub = sym_subspace(2, k)
        v = np.kron(sub.isometry, np.eye(2))
        big = v @ res.operator @ v.conj().T
        for perm in permutations(range(k)):
            p = np.kron(permutation_matrix(perm, 2), np.eye(2))
            assert np.linalg.norm(p @ big @ p.T - big) < 1e-7


class TestScan:
    def test_maximally_mixed_at_coarse_delta(self):
        v = separability_scan(states.maximally_mixed(2, 2), 2.0)
        assert v.outcome == SEPARABLE
        assert v.reason == "symext_depth_k4"

    def test_bell_flagged_early(self):
        v = separability_scan(states.bell(), 0.5)
        assert v.outcome == ENTANGLED
        assert v.reason == "symext_infeasible_k2"
        assert not v.exact

    def test_werner_inside_separable_ball(self):
        v = separability_scan(states.werner(0.2), 1.0)
        assert v.outcome == SEPARABLE
        assert v.reason == "symext_depth_k8"

    def test_kmax_short_circuit_returns_unknown(self):
        v = separability_scan(states.werner(0.2), 0.5, kmax=3)
        assert v.outcome == "Unknown"

    def test_strict_mode_defers_to_confirmer(self):
        v = separability_scan(states.bell(), 0.5, strict_confirm=lambda rho: False)
        assert v.outcome == "Unknown"
        v = separability_scan(states.bell(), 0.5, strict_confirm=lambda rho: True)
        assert v.outcome == ENTANGLED
