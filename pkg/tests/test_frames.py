import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blochpovm.bloch import direction_norm
from blochpovm.frames import (
    DirectionalFrame,
    FrameError,
    Orientation,
    canonical_frame,
    n_min,
    probability_simplex_vertices,
    random_frame,
    rotate_frame,
    simplex_vertices,
    validate_frame,
)


def expected_gram(d, n):
    return (d - 1) / (2 * d) * (n * np.eye(n) - 1) / (n - 1)


def test_antipodal_pair():
    f = canonical_frame(2, 2)
    np.testing.assert_allclose(f.vectors, [[0.5, 0, 0], [-0.5, 0, 0]])


def test_tetrahedron():
    f = canonical_frame(2, 4)
    u = f.vectors / np.linalg.norm(f.vectors, axis=1, keepdims=True)
    cos = u @ u.T
    np.testing.assert_allclose(cos[~np.eye(4, dtype=bool)], -1 / 3, atol=1e-15)


def test_qutrit_nine_vertices():
    f = canonical_frame(3, 9)
    assert f.vectors.shape == (9, 8)
    np.testing.assert_allclose(f.gram(), expected_gram(3, 9), atol=1e-15)
    assert np.linalg.norm(f.vectors.sum(axis=0)) < 1e-15


@pytest.mark.parametrize("n", range(2, 12))
def test_simplex_vertices_unit_regular(n):
    v = simplex_vertices(n)
    g = v @ v.T
    np.testing.assert_allclose(g, (n * np.eye(n) - 1) / (n - 1), atol=1e-14)


@pytest.mark.parametrize("d,n", [(2, 1), (2, 5), (3, 10)])
def test_out_of_range_counts(d, n):
    with pytest.raises(FrameError):
        canonical_frame(d, n)


def test_too_many_vectors_rejected_before_checks():
    with pytest.raises(FrameError):
        DirectionalFrame(2, np.zeros((5, 3)))


def test_zero_rotation_is_identity():
    f = canonical_frame(3, 5)
    g = rotate_frame(f, Orientation.identity(3))
    np.testing.assert_array_equal(g.vectors, f.vectors)


def test_rotation_preserves_gram(rng):
    f = canonical_frame(3, 6)
    for _ in range(5):
        g = rotate_frame(f, Orientation.random(3, rng))
        np.testing.assert_allclose(g.gram(), f.gram(), atol=1e-12)


def test_rotations_compose_by_matrix_product(rng):
    f = canonical_frame(2, 3)
    o1, o2 = Orientation.random(2, rng), Orientation.random(2, rng)
    twice = rotate_frame(rotate_frame(f, o1), o2)
    direct = f.vectors @ (o2.matrix() @ o1.matrix()).T
    np.testing.assert_allclose(twice.vectors, direct, atol=1e-13)
    summed = rotate_frame(f, Orientation(2, o1.generator_coefficients + o2.generator_coefficients))
    assert np.abs(summed.vectors - twice.vectors).max() > 1e-3


def test_orientation_matrix_orthogonal(rng):
    q = Orientation.random(4, rng).matrix()
    np.testing.assert_allclose(q @ q.T, np.eye(15), atol=1e-12)
    assert np.linalg.det(q) == pytest.approx(1.0)


def test_rotation_dimension_mismatch():
    with pytest.raises(ValueError):
        rotate_frame(canonical_frame(2, 3), Orientation.identity(3))


def test_validate_detects_scaled_vector():
    for d in (2, 3, 4):
        f = canonical_frame(d, 3)
        v = f.vectors.copy()
        v[1] *= 1.01
        report = validate_frame(DirectionalFrame(d, v), 1e-10)
        assert not report.passed
        assert report.norm_deviation == pytest.approx(0.01 * direction_norm(d), rel=1e-10)
        assert validate_frame(f, 1e-10).passed


@pytest.mark.parametrize("d", [2, 3, 4])
def test_rotation_invariance_property(d, rng):
    for n in range(2, d * d + 1):
        base = canonical_frame(d, n)
        for _ in range(100 if d < 4 else 20):
            f = rotate_frame(base, Orientation.random(d, rng))
            assert validate_frame(f, 1e-10).passed
            np.testing.assert_allclose(f.gram(), expected_gram(d, n), atol=1e-10)
            s = np.linalg.svd(f.vectors, compute_uv=False)
            assert int((s > 1e-9).sum()) == n - 1


def test_n_min_examples():
    for d in range(2, 11):
        assert n_min(1.0, d) == d
    assert n_min(0.4, 5) == 2
    assert n_min(0.9, 3) == 3
    for k in (0.0, -0.1, 1.01):
        with pytest.raises(ValueError):
            n_min(k, 3)


@settings(max_examples=100, deadline=None)
@given(d=st.integers(2, 12), k1=st.floats(1e-6, 1.0), k2=st.floats(1e-6, 1.0))
def test_n_min_monotone_and_bounded(d, k1, k2):
    lo, hi = sorted((k1, k2))
    assert n_min(lo, d) <= n_min(hi, d) <= d * d


def test_probability_simplex_vertices():
    f = canonical_frame(2, 4)
    t = probability_simplex_vertices(f)
    np.testing.assert_allclose(t, 3 * f.vectors)
    np.testing.assert_allclose(np.linalg.norm(t, axis=1), 1.5)
    f = canonical_frame(3, 9)
    np.testing.assert_allclose(probability_simplex_vertices(f), 4 * f.vectors)
    f = canonical_frame(3, 2)
    np.testing.assert_allclose(probability_simplex_vertices(f), f.vectors / 2)


def test_random_frame_valid(rng):
    assert validate_frame(random_frame(4, 7, rng)).passed
