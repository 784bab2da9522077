import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qharmonic import (
    GridAlignmentError,
    GridMismatchError,
    InvalidParameterError,
    OperatorMatrix,
    PhaseGrid,
    WindowVector,
    gaussian_window,
    identity_operator,
    rank_one,
    schatten_norm,
    tf_shift,
    trace,
    translate_operator,
)
from qharmonic.operators import parity_conjugate, singular_values
from qharmonic.phase_space import rng_for
from qharmonic.qha import random_low_rank_operator, random_window

INF = math.inf
SMALL = PhaseGrid(64, 4.0)


def random_operator(seed, rank=3, grid=SMALL):
    return random_low_rank_operator(grid, rng_for(seed), rank)


def test_phi0_is_normalized(grid):
    assert gaussian_window(grid).norm() == pytest.approx(1.0, abs=1e-13)


@pytest.mark.parametrize(
    "z, expected",
    [
        # |<rho(z) phi0, phi0>| frozen from tests/oracles.gaussian_overlap
        ((0.0, 0.0), 1.0),
        ((0.5, 0.25), 0.6120912831470138),
        ((1.0, -0.75), 0.0859173698232417),
        ((-1.5, 1.0), 0.006065804724240951),
    ],
)
def test_gaussian_overlap(grid, phi0, z, expected):
    assert abs(tf_shift(phi0, z).inner(phi0)) == pytest.approx(expected, abs=1e-12)


def test_tf_shift_is_unitary_and_composes(grid, phi0):
    f = random_window(grid, rng_for(2))
    g = tf_shift(f, (0.5, 0.75))
    assert g.norm() == pytest.approx(f.norm(), rel=1e-13)
    back = tf_shift(g, (-0.5, -0.75))
    np.testing.assert_allclose(back.values, f.values, atol=1e-13)


def test_tf_shift_snapping(grid, phi0):
    with pytest.raises(GridAlignmentError):
        tf_shift(phi0, (0.03, 0.0))
    a = tf_shift(phi0, (0.5, 0.1), mode="snapped")
    b = tf_shift(phi0, (0.5, 0.1), mode="interpolated")
    np.testing.assert_allclose(a.values, b.values, atol=1e-12)


def test_tf_shift_interpolated_off_grid(grid, phi0):
    x0 = 0.03
    g = tf_shift(phi0, (x0, 0.0), mode="interpolated")
    np.testing.assert_allclose(g.values, gaussian_window(grid, center=(x0, 0.0)).values, atol=1e-12)


def test_tf_shift_rejects_mode(phi0):
    with pytest.raises(InvalidParameterError):
        tf_shift(phi0, (0, 0), mode="nearest")


def test_identity_operator(grid, phi0):
    I = identity_operator(grid)
    np.testing.assert_allclose(I.apply(phi0).values, phi0.values)
    assert trace(I) == pytest.approx(grid.N)


def test_rank_one_action_and_trace(grid, phi0):
    g = random_window(grid, rng_for(5))
    f = random_window(grid, rng_for(6))
    T = rank_one(g, phi0)
    np.testing.assert_allclose(T.apply(f).values, f.inner(phi0) * g.values, atol=1e-13)
    assert trace(T) == pytest.approx(g.inner(phi0), abs=1e-13)


def test_composition_matches_rank_one_algebra(grid, phi0):
    g, h = random_window(grid, rng_for(1)), random_window(grid, rng_for(2))
    P = rank_one(g, phi0) @ rank_one(phi0, h)
    np.testing.assert_allclose(P.kernel, rank_one(g, h).kernel, atol=1e-12)


def test_gaussian_projector_singular_values(grid, phi0):
    s = singular_values(rank_one(phi0, phi0))
    assert s[0] == pytest.approx(1.0, abs=1e-12)
    assert s[1] < 1e-10


@pytest.mark.parametrize("p", [1, 2, 4, INF])
def test_rank_one_schatten(grid, p):
    g, h = random_window(grid, rng_for(3)), random_window(grid, rng_for(4))
    v = schatten_norm(2.0 * rank_one(g, h), p)
    assert v.value == pytest.approx(2.0, rel=1e-10)
    assert v.rank == 1


def test_schatten_rejects_small_p():
    with pytest.raises(InvalidParameterError):
        schatten_norm(random_operator(0), 0.5)


def test_schatten_two_is_hilbert_schmidt():
    T = random_operator(1)
    hs = SMALL.dx * np.linalg.norm(T.kernel)
    assert schatten_norm(T, 2).value == pytest.approx(hs, rel=1e-12)


def test_schatten_one_of_psd_is_trace():
    T = random_low_rank_operator(SMALL, rng_for(9), 4, psd=True)
    assert schatten_norm(T, 1).value == pytest.approx(trace(T).real, rel=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([1, 1.5, 2, 3, 8]))
def test_schatten_monotone_in_p(seed, p):
    T = random_operator(seed)
    a, b, c = (schatten_norm(T, q).value for q in (p, 2 * p, INF))
    assert a >= b * (1 - 1e-12) and b >= c * (1 - 1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([1, 2, 3, INF]))
def test_schatten_adjoint_and_unitary_invariance(seed, p):
    T = random_operator(seed)
    n = schatten_norm(T, p).value
    assert schatten_norm(T.adjoint(), p).value == pytest.approx(n, rel=1e-10)
    z = (SMALL.x[40], SMALL.xi[20])
    assert schatten_norm(translate_operator(T, z), p).value == pytest.approx(n, rel=1e-10)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([(1, INF), (2, 2), (INF, 1), (3, 1.5)]))
def test_schatten_holder(seed, pq):
    p, q = pq
    S, T = random_operator(seed), random_operator(seed + 1)
    assert schatten_norm(S @ T, 1).value <= schatten_norm(S, p).value * schatten_norm(T, q).value * (1 + 1e-10)


def test_translate_operator_conjugates_by_shift(grid, phi0):
    z = (0.75, -0.5)
    T = translate_operator(rank_one(phi0, phi0), z)
    shifted = tf_shift(phi0, z)
    np.testing.assert_allclose(T.kernel, rank_one(shifted, shifted).kernel, atol=1e-12)


def test_translate_interpolated_matches_snapped():
    T = random_operator(7)
    z = (SMALL.x[36], 0.3)
    a = translate_operator(T, z, "snapped").kernel
    b = translate_operator(T, z, "interpolated").kernel
    assert np.abs(a - b).max() <= 1e-10 * np.abs(a).max()


def test_parity_conjugate_is_involution():
    T = random_operator(8)
    np.testing.assert_array_equal(parity_conjugate(parity_conjugate(T)).kernel, T.kernel)


def test_parity_reflects_window(grid):
    f = gaussian_window(grid, center=(1.0, 0.5))
    T = parity_conjugate(rank_one(f, f))
    g = gaussian_window(grid, center=(-1.0, -0.5))
    np.testing.assert_allclose(T.kernel, rank_one(g, g).kernel, atol=1e-12)


def test_operator_grid_checks(grid):
    with pytest.raises(InvalidParameterError):
        OperatorMatrix(grid, np.zeros((3, 3)))
    with pytest.raises(GridMismatchError):
        random_operator(0) @ identity_operator(grid)


def test_translate_operator_group_property():
    T = random_operator(12)
    z = (SMALL.x[41], SMALL.xi[25])
    back = translate_operator(translate_operator(T, z), (-z[0], -z[1]))
    np.testing.assert_allclose(back.kernel, T.kernel, atol=1e-12 * np.abs(T.kernel).max())


@pytest.mark.parametrize("p", [1, 2, 4, INF])
def test_rank_one_self_schatten_is_squared_norm(grid, p):
    g = random_window(grid, rng_for(13))
    g = WindowVector(grid, 1.7 * g.values)
    assert schatten_norm(rank_one(g, g), p).value == pytest.approx(g.norm() ** 2, rel=1e-10)


def test_rank_one_fixes_its_window(grid):
    g, h = random_window(grid, rng_for(14)), random_window(grid, rng_for(15))
    np.testing.assert_allclose(rank_one(g, h).apply(h).values, g.values, atol=1e-12)
