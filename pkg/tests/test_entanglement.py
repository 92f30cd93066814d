import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from opagbs.entanglement import (
    PartialTransposeMap,
    contiguous_partitions,
    log_negativity,
    partial_transpose,
    partition_sweep,
)
from opagbs.exceptions import UnphysicalStateError
from opagbs.gaussian_core import (
    CovarianceState,
    SymplecticMatrix,
    apply_symplectic,
    symplectic_eigenvalues,
    vacuum_state,
)
from opagbs.loss_channels import apply_channel, loss_channel, output_state
from opagbs.opa_network import Bipartition, NetworkSpec, OpaSpec, opa_symplectic

from conftest import pt_eigs_oracle, tmsv_sigma

ONE_ONE = Bipartition.contiguous(1, 1)
# -log2(0.8 e^-1.6 + 0.2): lossy two-mode squeezed vacuum, frozen regression value
LOSSY_TMSV_EN = 1.4678637491437607


def squeezed_product(r1, r2):
    return CovarianceState(2, np.diag([np.exp(2 * r1), np.exp(2 * r2), np.exp(-2 * r1), np.exp(-2 * r2)]))


def embed_opa(n, modes, r, theta):
    """Two-mode squeezer on 1-based ``modes`` of an ``n``-mode system."""
    o = opa_symplectic(OpaSpec(r, theta)).m
    s = np.eye(2 * n)
    idx = [modes[0] - 1, modes[1] - 1, n + modes[0] - 1, n + modes[1] - 1]
    s[np.ix_(idx, idx)] = o
    return SymplecticMatrix(n, s)


class TestPartialTranspose:
    def test_map_diagonal(self):
        assert_array_equal(PartialTransposeMap(3, (2, 3)).diagonal(), [1, 1, 1, 1, -1, -1])

    def test_vacuum_invariant(self):
        out = partial_transpose(vacuum_state(4), Bipartition((1, 4), (2, 3)))
        assert_array_equal(out.sigma, np.eye(8))

    @given(st.floats(0, 2), st.floats(0, 2 * math.pi))
    def test_involution(self, r, theta):
        state = apply_symplectic(vacuum_state(4), embed_opa(4, (2, 3), r, theta))
        part = Bipartition((1, 2), (3, 4))
        twice = partial_transpose(partial_transpose(state, part), part)
        assert_array_equal(twice.sigma, state.sigma)

    @pytest.mark.parametrize("r", [0.2, 0.8, 1.5])
    def test_tmsv_spectrum(self, r):
        pt = partial_transpose(CovarianceState(2, tmsv_sigma(r)), ONE_ONE)
        assert_allclose(symplectic_eigenvalues(pt), [np.exp(-2 * r), np.exp(2 * r)], rtol=1e-10)
        assert_allclose(pt_eigs_oracle(tmsv_sigma(r), (2,)), [np.exp(-2 * r), np.exp(2 * r)], rtol=1e-10)

    def test_separable_product(self):
        pt = partial_transpose(squeezed_product(0.7, -0.4), ONE_ONE)
        assert np.all(symplectic_eigenvalues(pt) >= 1 - 1e-12)

    def test_partition_mismatch(self):
        with pytest.raises(ValueError):
            partial_transpose(vacuum_state(3), ONE_ONE)


class TestLogNegativity:
    def test_vacuum_zero(self):
        assert log_negativity(vacuum_state(8), Bipartition.contiguous(4, 4)).value == 0.0

    def test_tmsv(self):
        res = log_negativity(CovarianceState(2, tmsv_sigma(0.8)), ONE_ONE)
        assert res.value == pytest.approx(1.6 * math.log2(math.e), abs=1e-12)
        assert res.base == 2.0

    def test_natural_log(self):
        res = log_negativity(CovarianceState(2, tmsv_sigma(0.8)), ONE_ONE, base="e")
        assert res.value == pytest.approx(1.6, abs=1e-12)

    def test_bad_base(self):
        with pytest.raises(ValueError):
            log_negativity(vacuum_state(2), ONE_ONE, base=10)

    def test_lossy_tmsv(self):
        state = apply_channel(loss_channel(2, 0.8), CovarianceState(2, tmsv_sigma(0.8)))
        value = log_negativity(state, ONE_ONE).value
        oracle = -np.log2(pt_eigs_oracle(state.sigma, (2,))[0])
        assert value == pytest.approx(oracle, abs=1e-12)
        assert value == pytest.approx(LOSSY_TMSV_EN, abs=1e-12)
        assert 0 < value < 1.6 * math.log2(math.e)

    def test_separable_is_exactly_zero(self):
        assert log_negativity(squeezed_product(1.1, 0.3), ONE_ONE).value == 0.0

    def test_unphysical_rejected(self):
        with pytest.raises(UnphysicalStateError):
            log_negativity(CovarianceState(2, 0.5 * np.eye(4)), ONE_ONE)

    def test_check_can_be_skipped(self):
        res = log_negativity(CovarianceState(2, 0.5 * np.eye(4)), ONE_ONE, check=False)
        assert res.value == pytest.approx(2.0)

    @given(st.floats(0, 1.5), st.floats(0, 2 * math.pi), st.floats(0.5, 1.0))
    def test_swap_symmetry(self, r, theta, t):
        state = output_state(NetworkSpec.uniform(4, 3, r, theta, t))
        part = Bipartition((1, 3), (2, 4))
        a = log_negativity(state, part).value
        b = log_negativity(state, part.swapped()).value
        assert a == pytest.approx(b, abs=1e-12)

    @given(st.floats(0, 1.5), st.floats(0, 2 * math.pi), st.sampled_from([(1, 2), (3, 4)]))
    def test_local_unitary_invariance(self, r, theta, modes):
        state = output_state(NetworkSpec.uniform(4, 2, 0.7, 0.0, 0.9))
        part = Bipartition((1, 2), (3, 4))
        before = log_negativity(state, part).value
        after = log_negativity(apply_symplectic(state, embed_opa(4, modes, r, theta)), part).value
        assert after == pytest.approx(before, abs=1e-9)


class TestSweep:
    def test_contiguous_partitions(self):
        labels = [p.label for p in contiguous_partitions(8)]
        assert labels == ["(4,4)", "(5,3)", "(6,2)", "(7,1)"]

    def test_vacuum_all_zero(self):
        values = [r.value for r in partition_sweep(vacuum_state(8), contiguous_partitions(8))]
        assert values == [0.0, 0.0, 0.0, 0.0]

    def test_order_preserved(self):
        state = output_state(NetworkSpec.uniform(4, 4, 0.5))
        parts = [Bipartition.contiguous(3, 1), Bipartition.contiguous(2, 2)]
        assert [r.partition for r in partition_sweep(state, parts)] == parts

    def test_equal_partition_largest(self):
        state = output_state(NetworkSpec.uniform(8, 16, 0.8))
        values = [r.value for r in partition_sweep(state, contiguous_partitions(8))]
        assert values == sorted(values, reverse=True)
        assert values[-1] > 0

    def test_swapped_partitions(self):
        state = output_state(NetworkSpec.uniform(6, 6, 0.6, 0.0, 0.9))
        parts = contiguous_partitions(6)
        a = [r.value for r in partition_sweep(state, parts)]
        b = [r.value for r in partition_sweep(state, [p.swapped() for p in parts])]
        assert_allclose(a, b, atol=1e-12)

    def test_invalid_partition_fails_call(self):
        with pytest.raises(ValueError):
            partition_sweep(vacuum_state(4), [Bipartition.contiguous(2, 2), ONE_ONE])


def test_loss_monotonicity_grid():
    ts = [0.6, 0.7, 0.8, 0.9, 1.0]
    part = Bipartition.contiguous(4, 4)
    for d in (4, 8, 16):
        for r in (0.4, 0.8, 1.6):
            values = [log_negativity(output_state(NetworkSpec.uniform(8, d, r, 0.0, t)), part).value
                      for t in ts]
            assert all(a <= b + 1e-12 for a, b in zip(values, values[1:])), (d, r, values)
