import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from layouttransfer.align import (IDENTITY, AffineTransform, AlignmentError,
                                  alignment_residual, apply_transform,
                                  fit_alignment, invert_transform)

from conftest import path_graph


def test_hand_checked_two_marker_fit():
    # target {(0,0),(1,0)} onto source {(0,0),(0,2)}: rotate +90 deg, scale 2
    t = fit_alignment(np.array([[0, 0], [1, 0]]), np.array([[0, 0], [0, 2]]))
    assert np.allclose([t.s, t.h, t.tx, t.ty], [0, -2, 0, 0], atol=1e-12)
    assert np.allclose(t.apply_points([[1, 0]]), [[0, 2]], atol=1e-12)


def test_fit_matches_normal_equations_oracle(rng):
    for _ in range(20):
        m = int(rng.integers(2, 9))
        tgt = rng.normal(0, 3, (m, 2))
        src = rng.normal(0, 3, (m, 2))
        t = fit_alignment(tgt, src)
        # oracle: explicit normal equations A^T A x = A^T b
        a = np.zeros((2 * m, 4))
        b = np.zeros(2 * m)
        for i in range(m):
            a[2 * i] = (tgt[i, 0], tgt[i, 1], 1, 0)
            a[2 * i + 1] = (tgt[i, 1], -tgt[i, 0], 0, 1)
            b[2 * i], b[2 * i + 1] = src[i]
        x = np.linalg.solve(a.T @ a, a.T @ b)
        assert np.allclose([t.s, t.h, t.tx, t.ty], x, atol=1e-8)


def test_fit_is_optimal_against_random_search(rng):
    tgt = rng.normal(0, 2, (5, 2))
    src = rng.normal(0, 2, (5, 2))
    t = fit_alignment(tgt, src)
    best = alignment_residual(t, tgt, src)
    for _ in range(2000):
        cand = AffineTransform(*(np.array([t.s, t.h, t.tx, t.ty])
                                 + rng.normal(0, 0.3, 4)))
        assert alignment_residual(cand, tgt, src) >= best - 1e-9


def test_exact_similarity_recovered(rng):
    theta, scale = 0.7, 1.8
    true = AffineTransform(s=scale * np.cos(theta), h=scale * np.sin(theta),
                           tx=2.5, ty=-1.0)
    tgt = rng.normal(0, 4, (6, 2))
    src = true.apply_points(tgt)
    t = fit_alignment(tgt, src)
    assert np.allclose([t.s, t.h, t.tx, t.ty],
                       [true.s, true.h, true.tx, true.ty], atol=1e-9)
    assert alignment_residual(t, tgt, src) <= 1e-16


def test_degenerate_configurations():
    with pytest.raises(AlignmentError):
        fit_alignment(np.array([[1.0, 2.0]]), np.array([[0.0, 0.0]]))
    coincident = np.array([[1.0, 1.0], [1.0, 1.0], [1.0, 1.0]])
    with pytest.raises(AlignmentError):
        fit_alignment(coincident, np.array([[0, 0], [1, 0], [2, 0]]))


@settings(max_examples=50, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-10, 10), st.floats(-10, 10),
       st.floats(-100, 100), st.floats(-100, 100))
def test_invert_round_trip(s, h, tx, ty, px, py):
    if s * s + h * h < 1e-4:
        return
    t = AffineTransform(s, h, tx, ty)
    p = np.array([[px, py]])
    back = invert_transform(t).apply_points(t.apply_points(p))
    assert np.allclose(back, p, atol=1e-6 * (1 + np.abs(p).max()))


def test_compose_order():
    rot = AffineTransform(s=0.0, h=1.0)   # (x,y) -> (y,-x)
    shift = AffineTransform(tx=1.0, ty=0.0)
    p = np.array([[2.0, 3.0]])
    both = rot.compose(shift)  # shift first, then rotate
    assert np.allclose(both.apply_points(p), rot.apply_points(shift.apply_points(p)))
    assert np.allclose(both.apply_points(p), [[3.0, -3.0]])


def test_apply_transform_to_graph():
    g = path_graph(3)
    moved = apply_transform(AffineTransform(tx=1.0, ty=2.0), g)
    assert moved.node_ids == g.node_ids
    assert moved.edges == g.edges
    assert np.allclose(moved.positions, g.positions + [1.0, 2.0])
    assert np.allclose(apply_transform(IDENTITY, g).positions, g.positions)
