"""Lifted matrices, surrogates and Gram identities against dense oracles."""

import numpy as np
import pytest

from cslr.grids import ComplexGrid, IndexBox, circ_conv, zero_pad
from cslr.lifting import (
    BudgetError,
    LiftingSpec,
    WeightingOp,
    apply_lift,
    gram_surrogate,
    lift_adjoint,
    lift_normal_diagonal,
    materialize_exact,
    materialize_surrogate,
    singular_values_dense,
)
from oracles import grid_dict, random_grid


def brute_exact_lift(spec, x):
    """Entry-by-entry dense lifting from index dictionaries."""
    gamma = spec.valid_box
    blocks = []
    for w in spec.weightings:
        wd = ComplexGrid(spec.data_box, w.weights_on(spec.data_box) * x.values)
        yd = grid_dict(wd)
        block = np.zeros((gamma.size, spec.n_filter), dtype=complex)
        for r, k in enumerate(gamma.indices()):
            for c, l in enumerate(spec.filter_box.indices()):
                block[r, c] = yd[tuple(k - l)]
        blocks.append(block)
    return np.concatenate(blocks, axis=0)


def random_spec(rng, ndim, weightings=None, max_data=8, max_filt=3):
    fe = tuple(int(rng.integers(1, max_filt + 1)) for _ in range(ndim))
    fo = tuple(int(rng.integers(-(f - 1), 1)) if f > 1 else 0 for f in fe)
    de = tuple(f + int(rng.integers(2, max_data)) for f in fe)
    do = tuple(int(rng.integers(f + fext - dext, f + 1))
               for f, fext, dext in zip(fo, fe, de))
    w = weightings or (WeightingOp.identity(),)
    return LiftingSpec(IndexBox(do, de), IndexBox(fo, fe), w)


GRAD2D = (WeightingOp.fourier_derivative(0), WeightingOp.fourier_derivative(1))


def test_exact_lift_matches_dict_oracle():
    rng = np.random.default_rng(101)
    for _ in range(15):
        ndim = int(rng.integers(1, 3))
        w = GRAD2D if (ndim == 2 and rng.random() < 0.5) else None
        spec = random_spec(rng, ndim, weightings=w)
        x = random_grid(rng, spec.data_box)
        assert np.max(np.abs(materialize_exact(spec, x) - brute_exact_lift(spec, x))) < 1e-12


def test_exact_lift_toeplitz_rows():
    x = ComplexGrid(IndexBox((0,), (10,)),
                    (np.arange(10) + 1j * np.arange(10) ** 2).astype(complex))
    spec = LiftingSpec(x.box, IndexBox((0,), (3,)))
    T = materialize_exact(spec, x)
    assert T.shape == (8, 3)
    for r, k in enumerate(range(2, 10)):
        assert np.array_equal(T[r], x.values[[k, k - 1, k - 2]])


def test_apply_lift_equals_matrix_product():
    rng = np.random.default_rng(103)
    for _ in range(15):
        ndim = int(rng.integers(1, 3))
        w = GRAD2D if (ndim == 2 and rng.random() < 0.5) else None
        spec = random_spec(rng, ndim, weightings=w)
        x = random_grid(rng, spec.data_box)
        h = random_grid(rng, spec.filter_box)
        T = materialize_exact(spec, x)
        ref = (T @ h.values.ravel()).reshape(spec.n_blocks, -1)
        out = apply_lift(spec, x, h)
        got = np.stack([blk.values.ravel() for blk in out])
        assert np.max(np.abs(got - ref)) < 1e-12


def test_surrogate_columns_are_circular_convolutions():
    rng = np.random.default_rng(105)
    spec = random_spec(rng, 2)
    x = random_grid(rng, spec.data_box)
    S = materialize_surrogate(spec, x)
    for c, l in enumerate(spec.filter_box.indices()):
        delta = np.zeros(spec.filter_box.extent, dtype=complex)
        delta[tuple(np.asarray(l) - spec.filter_box.offset)] = 1.0
        col = circ_conv(x, ComplexGrid(spec.filter_box, delta)).values.ravel()
        assert np.max(np.abs(S[:, c] - col)) < 1e-12


def test_surrogate_contains_exact_rows_and_dominates():
    rng = np.random.default_rng(107)
    for _ in range(8):
        ndim = int(rng.integers(1, 3))
        w = GRAD2D if ndim == 2 else None
        spec = random_spec(rng, ndim, weightings=w)
        x = random_grid(rng, spec.data_box)
        T = materialize_exact(spec, x)
        S = materialize_surrogate(spec, x)
        srows = {S[r].tobytes() for r in range(S.shape[0])}
        assert all(T[r].tobytes() in srows for r in range(T.shape[0]))
        st = singular_values_dense(T)
        ss = singular_values_dense(S)
        assert np.all(st <= ss[: len(st)] + 1e-10)


def test_gram_matches_dense_surrogate():
    rng = np.random.default_rng(109)
    for _ in range(10):
        ndim = int(rng.integers(1, 3))
        w = GRAD2D if (ndim == 2 and rng.random() < 0.5) else None
        spec = random_spec(rng, ndim, weightings=w)
        x = random_grid(rng, spec.data_box)
        S = materialize_surrogate(spec, x)
        ref = S.conj().T @ S
        G = gram_surrogate(spec, x)
        assert np.linalg.norm(G - ref) / np.linalg.norm(ref) < 1e-12
        # hermitian PSD
        assert np.linalg.norm(G - G.conj().T) == 0
        assert np.linalg.eigvalsh(G)[0] > -1e-10 * max(1.0, np.linalg.eigvalsh(G)[-1])


def test_gram_1d_generator_example():
    rng = np.random.default_rng(111)
    x = random_grid(rng, IndexBox((0,), (8,)))
    spec = LiftingSpec(x.box, IndexBox((0,), (2,)))
    g = np.fft.ifft(np.abs(np.fft.fft(x.values)) ** 2)
    G = gram_surrogate(spec, x)
    ref = np.array([[g[0], g[-1 % 8]], [g[1], g[0]]])
    assert np.max(np.abs(G - ref)) < 1e-12


def test_adjoint_inner_product():
    rng = np.random.default_rng(113)
    for _ in range(6):
        ndim = int(rng.integers(1, 3))
        w = GRAD2D if ndim == 2 else None
        spec = random_spec(rng, ndim, weightings=w)
        x = random_grid(rng, spec.data_box)
        X = rng.standard_normal(spec.shape_exact) + 1j * rng.standard_normal(spec.shape_exact)
        lhs = np.vdot(X, materialize_exact(spec, x))
        rhs = np.vdot(lift_adjoint(spec, X).values, x.values)
        assert abs(lhs - rhs) / abs(lhs) < 1e-12


def test_normal_diagonal_matches_operator_columns():
    rng = np.random.default_rng(115)
    spec = random_spec(rng, 2, weightings=GRAD2D, max_data=5)
    diag = lift_normal_diagonal(spec)
    for m, idx in enumerate(spec.data_box.indices()):
        e = np.zeros(spec.data_box.extent, dtype=complex)
        e[tuple(np.asarray(idx) - spec.data_box.offset)] = 1.0
        col = materialize_exact(spec, ComplexGrid(spec.data_box, e))
        assert abs(np.vdot(col, col).real - diag.ravel()[m]) < 1e-10


def test_budget_guard():
    spec = LiftingSpec(IndexBox((-300, -300), (600, 600)), IndexBox((-4, -4), (9, 9)))
    x = ComplexGrid.zeros(spec.data_box)
    with pytest.raises(BudgetError):
        materialize_exact(spec, x)
    with pytest.raises(BudgetError):
        materialize_surrogate(spec, x)


def test_with_data_box_transplants_index_weights():
    spec = LiftingSpec(IndexBox((-4, -4), (9, 9)), IndexBox((-1, -1), (3, 3)), GRAD2D)
    big = spec.with_data_box(IndexBox((-6, -6), (13, 13)))
    w = big.weightings[0].weights_on(big.data_box)
    assert w[0, 0] == 2j * np.pi * (-6)
    grid = ComplexGrid.zeros(spec.data_box)
    ew = LiftingSpec(spec.data_box, spec.filter_box, (WeightingOp.elementwise(grid),))
    with pytest.raises(ValueError):
        ew.with_data_box(big.data_box)


def test_weighting_validation():
    with pytest.raises(ValueError):
        WeightingOp("nope")
    with pytest.raises(ValueError):
        WeightingOp("fourier_derivative")
    with pytest.raises(ValueError):
        LiftingSpec(IndexBox((0,), (4,)), IndexBox((0,), (6,)))
    # derivative axis out of range for a 1-D box
    with pytest.raises(ValueError):
        LiftingSpec(IndexBox((0,), (8,)), IndexBox((0,), (2,)),
                    (WeightingOp.fourier_derivative(1),))
