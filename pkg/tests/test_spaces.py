"""Tests for symbolic subspaces, convolution, and windowed surrogate models."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpdim._util import rng_for
from lpdim.errors import CapabilityError, StructureError
from lpdim.groups import FiniteSubset, GroupSpec
from lpdim.spaces import (
    Annihilator,
    ConvImage,
    ConvKernel,
    ConvolutionKernel,
    CyclicTranslates,
    DirectSum,
    Full,
    Induced,
    KerPeriodization,
    PeriodicInfty,
    Reduced,
    SupportedMap,
    UnionPeriodic,
    Zero,
    adjoint_kernel,
    annihilator_spec,
    convolve,
    fourier_oracle_dim,
    induce_spec,
    inner_window_model,
    outer_window_model,
    pairing,
    reduce_spec,
)

Z = GroupSpec.integer_lattice(1)
C6 = GroupSpec.cyclic(6)


def interval(lo, hi):
    return FiniteSubset.of(Z, range(lo, hi))


def diff_kernel():
    """Scalar difference kernel: delta at 0 minus delta at 1."""
    return ConvolutionKernel.scalar(Z, {0: 1.0, 1: -1.0})


def block_kernel():
    """1x2 kernel pairing fiber slot 0 at shift 0 with slot 1 at shift 1."""
    return ConvolutionKernel.of(Z, {0: [[1.0, 0.0]], 1: [[0.0, 1.0]]})


def conv_oracle_z(h_entries, y_entries, dim_in, dim_out, eta):
    """Direct evaluation of (h*y)(eta) on the integers, no shared code."""
    total = np.zeros(dim_out)
    for gamma, vec in y_entries.items():
        blk = h_entries.get(eta - gamma)
        if blk is not None:
            total += np.atleast_2d(np.asarray(blk, dtype=float)) @ np.asarray(vec)
    return total


def span_contains(outer_matrix, inner_matrix, tol=1e-8):
    """Whether every inner column lies in the column span of the outer matrix."""
    if inner_matrix.shape[1] == 0:
        return True
    q, _ = np.linalg.qr(outer_matrix) if outer_matrix.shape[1] else (np.zeros_like(outer_matrix), None)
    if outer_matrix.shape[1] == 0:
        return float(np.max(np.abs(inner_matrix))) <= tol
    resid = inner_matrix - q @ (q.T @ inner_matrix)
    return float(np.max(np.abs(resid))) <= tol


# ----------------------------------------------------------- supported maps


def test_supported_map_accumulates_and_drops_zeros():
    y = SupportedMap(Z, 1, {0: [1.0], 1: [2.0], 2: [0.0]})
    assert y.support == ((0,), (1,))
    z = y.plus(SupportedMap(Z, 1, {1: [-2.0]}))
    assert z.support == ((0,),)
    wrapped = SupportedMap(C6, 1, {1: [1.0], 7: [1.0]})
    assert wrapped.value(1)[0] == 2.0


def test_supported_map_norms():
    y = SupportedMap(Z, 2, {0: [3.0, 0.0], 5: [0.0, -4.0]})
    assert y.norm(1) == pytest.approx(7.0)
    assert y.norm(2) == pytest.approx(5.0)
    assert y.norm(math.inf) == pytest.approx(4.0)
    assert SupportedMap(Z, 1).norm(2) == 0.0


def test_supported_map_translation_wraps_on_cyclic_groups():
    y = SupportedMap(C6, 1, {4: [1.0], 5: [2.0]})
    t = y.translated(3)
    assert t.value(1)[0] == 1.0
    assert t.value(2)[0] == 2.0


# ------------------------------------------------------------- convolution


def test_kernel_l1_norm_frozen_values():
    assert diff_kernel().l1_norm == pytest.approx(2.0)
    assert block_kernel().l1_norm == pytest.approx(2.0)
    h = ConvolutionKernel.of(Z, {0: [[1.0, 2.0], [3.0, 4.0]]})
    # column sums (4, 6), row sums (3, 7); the bound takes the max, 7
    assert h.l1_norm == pytest.approx(7.0)


def test_convolve_frozen_difference_example():
    out = convolve(diff_kernel(), SupportedMap.delta(Z, 3))
    assert out.value(3)[0] == 1.0
    assert out.value(4)[0] == -1.0
    assert out.support == ((3,), (4,))


def test_convolve_wraps_on_cyclic_group():
    h = ConvolutionKernel.scalar(GroupSpec.cyclic(4), {0: 1.0, 1: -1.0})
    out = convolve(h, SupportedMap.delta(GroupSpec.cyclic(4), 3))
    assert out.value(3)[0] == 1.0
    assert out.value(0)[0] == -1.0


def test_convolve_matches_direct_formula_on_random_instances():
    rng = rng_for(2203, "conv-oracle")
    h_entries = {0: [[1.0, -2.0]], 2: [[0.5, 0.25]], -1: [[3.0, 0.0]]}
    h = ConvolutionKernel.of(Z, {k: v for k, v in h_entries.items()})
    for _ in range(60):
        pts = rng.integers(-6, 7, size=4)
        y = SupportedMap(Z, 2, {int(k): rng.normal(size=2) for k in pts})
        out = convolve(h, y)
        for eta in range(-10, 12):
            want = conv_oracle_z(h_entries, {c[0]: v for c, v in y.data.items()}, 2, 1, eta)
            assert out.value((eta,))[0] == pytest.approx(want[0], abs=1e-12)


def test_convolve_rejects_mismatched_shapes():
    with pytest.raises(StructureError):
        convolve(block_kernel(), SupportedMap.delta(Z, 0, dim=1))
    with pytest.raises(StructureError):
        convolve(diff_kernel(), SupportedMap.delta(C6, 0))


def test_young_inequality_on_random_pairs():
    exponents = [1.0, 1.5, 2.0, 3.0, math.inf]
    groups = [Z, GroupSpec.integer_lattice(2), C6]
    rng = rng_for(417, "young")
    checked = 0
    for trial in range(100):
        grp = groups[trial % len(groups)]
        d_in, d_out = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        entries = {}
        for _ in range(int(rng.integers(1, 4))):
            c = tuple(int(v) for v in rng.integers(-3, 4, size=grp.rank))
            entries[c] = rng.normal(size=(d_out, d_in))
        h = ConvolutionKernel.of(grp, entries)
        y = SupportedMap(
            grp,
            d_in,
            {
                tuple(int(v) for v in rng.integers(-5, 6, size=grp.rank)): rng.normal(size=d_in)
                for _ in range(5)
            },
        )
        for p in exponents:
            lhs = convolve(h, y).norm(p)
            assert lhs <= h.l1_norm * y.norm(p) + 1e-9
            checked += 1
    assert checked == 500


@settings(max_examples=120, deadline=None)
@given(
    h_items=st.dictionaries(
        st.integers(-3, 3), st.integers(-3, 3).map(float), min_size=1, max_size=4
    ),
    y_items=st.dictionaries(
        st.integers(-4, 4), st.integers(-5, 5).map(float), min_size=1, max_size=5
    ),
    z_items=st.dictionaries(
        st.integers(-6, 6), st.integers(-5, 5).map(float), min_size=1, max_size=5
    ),
)
def test_adjoint_moves_across_the_pairing(h_items, y_items, z_items):
    h = ConvolutionKernel.scalar(Z, h_items)
    y = SupportedMap(Z, 1, {k: [v] for k, v in y_items.items()})
    z = SupportedMap(Z, 1, {k: [v] for k, v in z_items.items()})
    lhs = pairing(convolve(h, y), z)
    rhs = pairing(y, convolve(adjoint_kernel(h), z))
    assert lhs == pytest.approx(rhs, abs=1e-9)


def test_adjoint_is_an_involution():
    h = ConvolutionKernel.of(Z, {0: [[1.0, 2.0]], 3: [[-1.0, 0.5]]})
    hh = adjoint_kernel(adjoint_kernel(h))
    assert hh.dim_in == h.dim_in and hh.dim_out == h.dim_out
    for (c, blk), (cc, bb) in zip(h.blocks, hh.blocks):
        assert c == cc
        assert np.allclose(blk, bb)


# ------------------------------------------------------------- annihilators


def test_annihilator_closed_forms():
    assert annihilator_spec(Full(Z, 2)) == Zero(Z, 2)
    assert annihilator_spec(Zero(C6, 3)) == Full(C6, 3)
    dual = annihilator_spec(ConvImage(block_kernel()))
    assert isinstance(dual, ConvKernel)
    assert dual.kernel.dim_in == 1 and dual.kernel.dim_out == 2
    back = annihilator_spec(dual)
    assert isinstance(back, ConvImage)
    for (c, blk), (cc, bb) in zip(back.kernel.blocks, block_kernel().blocks):
        assert c == cc and np.allclose(blk, bb)
    both = annihilator_spec(DirectSum(Full(Z, 1), ConvKernel(diff_kernel())))
    assert isinstance(both, DirectSum)
    assert isinstance(both.left, Zero) and isinstance(both.right, ConvImage)


def test_annihilator_rejects_open_ended_variants():
    gen = SupportedMap.delta(Z, 0)
    spec = CyclicTranslates(gen, FiniteSubset.of(Z, [0]), 0.0)
    with pytest.raises(CapabilityError):
        annihilator_spec(spec)
    with pytest.raises(CapabilityError):
        Annihilator(spec)


def test_windowed_pairing_of_space_and_annihilator_vanishes():
    """Inner columns of Y and of its annihilator are exactly orthogonal on
    the window, because the kernel-side columns are supported inside it."""
    omega = interval(0, 12)
    for h in (diff_kernel(), block_kernel()):
        image = inner_window_model(ConvImage(h), omega, 2.0)
        dual = inner_window_model(annihilator_spec(ConvImage(h)), omega, 2.0)
        if image.num_columns and dual.num_columns:
            gram = image.matrix.T @ dual.matrix
            assert float(np.max(np.abs(gram))) <= 1e-10
        kernel = inner_window_model(ConvKernel(h), omega, 2.0)
        dual2 = inner_window_model(annihilator_spec(ConvKernel(h)), omega, 2.0)
        if kernel.num_columns and dual2.num_columns:
            gram = kernel.matrix.T @ dual2.matrix
            assert float(np.max(np.abs(gram))) <= 1e-10


# ------------------------------------------------------------ window models


def test_full_and_zero_models_are_exact_identities():
    omega = interval(0, 5)
    m = inner_window_model(Full(Z, 2), omega, 1.0)
    assert m.polarity == "exact"
    assert m.matrix.shape == (10, 10)
    assert np.array_equal(m.matrix, np.eye(10))
    assert outer_window_model(Full(Z, 2), omega, 1.0).polarity == "exact"
    z = inner_window_model(Zero(Z, 3), omega, 2.0)
    assert z.matrix.shape == (15, 0)
    assert z.rank() == 0


def test_conv_kernel_models_frozen_dimensions():
    omega = interval(0, 8)
    inner = inner_window_model(ConvKernel(diff_kernel()), omega, 2.0)
    assert inner.num_columns == 0
    outer = outer_window_model(ConvKernel(diff_kernel()), omega, 2.0)
    assert outer.polarity == "outer"
    assert outer.rank() == 1
    # the surviving outer direction is the windowed constant
    col = outer.matrix[:, 0]
    assert np.allclose(col, col[0])

    inner2 = inner_window_model(ConvKernel(block_kernel()), omega, 2.0)
    assert inner2.num_columns == 7
    assert inner2.polarity == "inner"
    assert all(n == pytest.approx(1.0) for n in inner2.column_norms)
    outer2 = outer_window_model(ConvKernel(block_kernel()), omega, 2.0)
    assert outer2.rank() == 9


def test_conv_kernel_inner_columns_really_lie_in_the_kernel():
    omega = interval(0, 8)
    h = block_kernel()
    model = inner_window_model(ConvKernel(h), omega, 2.0)
    pos = {c: i for i, c in enumerate(model.full_support)}
    for j in range(model.num_columns):
        data = {}
        for c, i in pos.items():
            data[c] = model.full_matrix[i * 2 : (i + 1) * 2, j]
        y = SupportedMap(Z, 2, data)
        assert convolve(h, y).norm(math.inf) <= 1e-10


def test_conv_image_models_frozen_dimensions():
    omega = interval(0, 8)
    inner = inner_window_model(ConvImage(diff_kernel()), omega, 2.0)
    assert inner.num_columns == 9
    assert inner.polarity == "inner"
    assert all(n == pytest.approx(1.0) for n in inner.column_norms)
    assert inner.rank() == 8
    outer = outer_window_model(ConvImage(diff_kernel()), omega, 2.0)
    assert outer.rank() == 8


def test_conv_image_inner_columns_are_normalized_translates():
    omega = interval(0, 6)
    inner = inner_window_model(ConvImage(diff_kernel()), omega, 2.0)
    pos = {c: i for i, c in enumerate(inner.full_support)}
    # the column sourced at 2 is (delta_2 - delta_3) / sqrt(2) in full space
    col = inner.full_matrix[:, [c for c in sorted(pos)].index((2,))]
    expected = np.zeros(len(pos))
    expected[pos[(2,)]] = 1.0 / math.sqrt(2.0)
    expected[pos[(3,)]] = -1.0 / math.sqrt(2.0)
    assert np.allclose(col, expected) or np.allclose(col, -expected)


def test_inner_spans_sit_inside_outer_spans():
    omega = interval(0, 10)
    gen = SupportedMap(Z, 1, {0: [0.6], 1: [0.8]})
    specs = [
        ConvKernel(block_kernel()),
        ConvImage(diff_kernel()),
        CyclicTranslates(gen, FiniteSubset.of(Z, [0, 1]), 0.0),
        KerPeriodization(3),
        DirectSum(ConvImage(diff_kernel()), ConvKernel(block_kernel())),
        Induced(ConvImage(diff_kernel()), 2),
        Reduced(ConvImage(diff_kernel()), 2),
    ]
    for spec in specs:
        for p in (1.0, 2.0):
            inner = inner_window_model(spec, omega, p)
            outer = outer_window_model(spec, omega, p)
            assert inner.matrix.shape[0] == outer.matrix.shape[0]
            assert span_contains(outer.matrix, inner.matrix), spec.describe()


def test_inner_models_respect_the_unit_ball():
    omega = interval(0, 9)
    gen = SupportedMap(Z, 1, {0: [0.6], 1: [0.8]})
    specs = [
        ConvImage(diff_kernel()),
        CyclicTranslates(gen, FiniteSubset.of(Z, [0, 1]), 0.0),
        KerPeriodization(2),
    ]
    for spec in specs:
        for p in (1.0, 1.5, 2.0, math.inf):
            m = inner_window_model(spec, omega, p)
            assert m.column_norms is not None
            assert all(n <= 1.0 + 1e-12 for n in m.column_norms)
            # window rows of the full matrix reproduce the restricted matrix
            pos = {c: i for i, c in enumerate(m.full_support)}
            rows = []
            for c in omega.elements:
                base = pos[c] * m.fiber_dim
                rows.extend(range(base, base + m.fiber_dim))
            assert np.array_equal(m.full_matrix[rows, :], m.matrix)


def test_ker_periodization_model_frozen_example():
    omega = interval(0, 4)
    m = inner_window_model(KerPeriodization(2), omega, 1.0)
    assert m.num_columns == 4
    assert m.rank() == 4
    assert m.column_norms == pytest.approx((1.0, 1.0, 1.0, 1.0))
    at2 = inner_window_model(KerPeriodization(2), omega, 2.0)
    assert at2.column_norms == pytest.approx((2 ** -0.5,) * 4)
    atinf = inner_window_model(KerPeriodization(2), omega, math.inf)
    assert atinf.column_norms == pytest.approx((0.5,) * 4)
    outer = outer_window_model(KerPeriodization(2), omega, 1.0)
    assert outer.polarity == "outer"
    assert outer.rank() == 4


def test_periodic_sup_models():
    omega = interval(0, 7)
    m = inner_window_model(PeriodicInfty(3), omega, math.inf)
    assert m.polarity == "exact"
    assert m.num_columns == 3
    assert m.rank() == 3
    assert np.array_equal(m.matrix[:, 0], np.array([1, 0, 0, 1, 0, 0, 1], dtype=float))
    finite_p = inner_window_model(PeriodicInfty(3), omega, 2.0)
    assert finite_p.num_columns == 0
    short = inner_window_model(PeriodicInfty(3), interval(0, 2), math.inf)
    assert short.num_columns == 2


def test_union_of_periods_fills_the_window_at_sup_norm():
    omega = interval(0, 5)
    m = inner_window_model(UnionPeriodic(), omega, math.inf)
    assert m.polarity == "exact"
    assert m.rank() == 5
    assert inner_window_model(UnionPeriodic(), omega, 1.5).num_columns == 0


def test_direct_sum_model_interleaves_fibers():
    omega = interval(0, 3)
    m = inner_window_model(DirectSum(Full(Z, 1), Full(Z, 1)), omega, 2.0)
    assert m.polarity == "exact"
    assert m.fiber_dim == 2
    assert m.rank() == 6
    mixed = inner_window_model(
        DirectSum(ConvImage(diff_kernel()), ConvKernel(block_kernel())), omega, 2.0
    )
    assert mixed.polarity == "inner"
    assert mixed.fiber_dim == 3
    left = inner_window_model(ConvImage(diff_kernel()), omega, 2.0)
    right = inner_window_model(ConvKernel(block_kernel()), omega, 2.0)
    assert mixed.num_columns == left.num_columns + right.num_columns
    assert mixed.column_norms == left.column_norms + right.column_norms
    # left columns live on fiber slot 0, right columns on slots 1 and 2
    m3 = mixed.matrix.reshape(3, 3, mixed.num_columns)
    assert np.all(m3[:, 1:, : left.num_columns] == 0.0)
    assert np.all(m3[:, :1, left.num_columns :] == 0.0)


def test_reduced_view_reuses_base_rows_exactly():
    base = ConvImage(diff_kernel())
    omega = interval(0, 4)
    for d in (2, 3):
        spec = Reduced(base, d)
        expanded = interval(0, 4 * d)
        for p in (1.0, 2.0):
            red = inner_window_model(spec, omega, p)
            raw = inner_window_model(base, expanded, p)
            assert red.fiber_dim == d
            assert np.array_equal(red.matrix, raw.matrix)
            assert red.column_norms == raw.column_norms
    gap = FiniteSubset.of(Z, [0, 2, 5])
    red = inner_window_model(Reduced(base, 2), gap, 2.0)
    raw = inner_window_model(base, FiniteSubset.of(Z, [0, 1, 4, 5, 10, 11]), 2.0)
    assert np.array_equal(red.matrix, raw.matrix)


def test_reduce_spec_closed_forms_and_identity():
    assert reduce_spec(Full(Z, 1), 3) == Full(Z, 3)
    assert reduce_spec(Zero(Z, 2), 2) == Zero(Z, 4)
    spec = ConvKernel(diff_kernel())
    assert reduce_spec(spec, 1) is spec
    wrapped = reduce_spec(spec, 2)
    assert isinstance(wrapped, Reduced) and wrapped.index == 2
    assert induce_spec(spec, 1) is spec
    assert induce_spec(Full(Z, 2), 4) == Full(Z, 2)
    assert isinstance(induce_spec(spec, 3), Induced)


def test_induced_view_splits_into_coset_slices():
    omega = interval(0, 8)
    spec = Induced(ConvImage(diff_kernel()), 2)
    m = inner_window_model(spec, omega, 2.0)
    slice_model = inner_window_model(ConvImage(diff_kernel()), interval(0, 4), 2.0)
    assert m.fiber_dim == 1
    assert m.num_columns == 2 * slice_model.num_columns
    # each column touches only one residue class inside the window
    for j in range(m.num_columns):
        hit = {c[0] % 2 for i, c in enumerate(omega.elements) if abs(m.matrix[i, j]) > 0}
        assert len(hit) <= 1
    outer = outer_window_model(spec, omega, 2.0)
    assert outer.rank() == 2 * outer_window_model(
        ConvImage(diff_kernel()), interval(0, 4), 2.0
    ).rank()


def test_cyclic_translates_models():
    gen = SupportedMap(Z, 1, {0: [0.6], 1: [0.8]})
    spec = CyclicTranslates(gen, FiniteSubset.of(Z, [0, 1]), 0.0)
    omega = interval(0, 8)
    inner = inner_window_model(spec, omega, 2.0)
    assert inner.polarity == "inner"
    # greedy packing of a two-point core in [0,8) lands on the even offsets
    assert inner.num_columns == 4
    assert inner.column_norms == pytest.approx((1.0,) * 4)
    outer = outer_window_model(spec, omega, 2.0)
    assert outer.polarity == "outer"
    assert inner.num_columns <= outer.matrix.shape[1]
    with pytest.raises(StructureError):
        inner_window_model(
            CyclicTranslates(SupportedMap(Z, 1), FiniteSubset.of(Z, [0]), 0.0),
            omega,
            2.0,
        )


def test_window_validation():
    with pytest.raises(ValueError):
        inner_window_model(Full(Z, 1), FiniteSubset.of(Z, []), 2.0)
    with pytest.raises(StructureError):
        inner_window_model(Full(Z, 1), FiniteSubset.of(C6, [0]), 2.0)
    with pytest.raises(ValueError):
        inner_window_model(Full(Z, 1), interval(0, 4), 0.5)


# ----------------------------------------------------------- Fourier oracle


def test_fourier_oracle_frozen_values():
    assert fourier_oracle_dim(diff_kernel(), "image") == pytest.approx(1.0)
    assert fourier_oracle_dim(diff_kernel(), "kernel") == pytest.approx(0.0)
    assert fourier_oracle_dim(block_kernel(), "kernel") == pytest.approx(1.0)
    assert fourier_oracle_dim(block_kernel(), "image") == pytest.approx(1.0)
    ident = ConvolutionKernel.scalar(Z, {0: 1.0})
    assert fourier_oracle_dim(ident, "kernel") == pytest.approx(0.0)
    assert fourier_oracle_dim(ident, "image") == pytest.approx(1.0)


def test_fourier_oracle_validation():
    with pytest.raises(ValueError):
        fourier_oracle_dim(diff_kernel(), "rank")
    with pytest.raises(CapabilityError):
        fourier_oracle_dim(ConvolutionKernel.scalar(C6, {0: 1.0}), "kernel")
