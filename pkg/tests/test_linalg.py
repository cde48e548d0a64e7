import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from heunlim import linalg
from heunlim.linalg import (
    ConvergenceError,
    SymTridiag,
    dense_sym_eig,
    fix_signs,
    golub_welsch,
    lanczos,
    offband_leakage,
    sym_tridiag_eig,
)
from heunlim.orthopoly import JacobiParams, jacobi_recurrence

finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


@st.composite
def tridiags(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    d = draw(arrays(float, n, elements=finite))
    e = draw(arrays(float, n - 1, elements=finite))
    return SymTridiag(d, e)


@settings(max_examples=60, deadline=None)
@given(tridiags())
def test_ql_matches_lapack(t):
    ours = sym_tridiag_eig(t)
    ref = np.linalg.eigvalsh(t.to_dense())
    scale = max(1.0, np.abs(ref).max())
    assert np.allclose(ours.values, ref, atol=1e-12 * scale)
    assert ours.residual <= 1e-11 * scale
    # eigenvectors are orthonormal
    assert np.allclose(ours.vectors.T @ ours.vectors, np.eye(t.size), atol=1e-12)


def test_ql_two_by_two_by_hand():
    ev = sym_tridiag_eig(SymTridiag([2.0, 2.0], [1.0]))
    assert np.allclose(ev.values, [1.0, 3.0], atol=1e-15)
    s = 1 / np.sqrt(2)
    # largest-magnitude entry positive; the tie goes to the lower index
    assert np.allclose(ev.vectors, [[s, s], [-s, s]], atol=1e-15)


def test_ql_diagonal_input_is_returned_sorted():
    ev = sym_tridiag_eig(SymTridiag([3.0, -1.0, 2.0], [0.0, 0.0]))
    assert np.array_equal(ev.values, [-1.0, 2.0, 3.0])


def test_ql_sweep_cap(monkeypatch):
    monkeypatch.setattr(linalg, "MAX_SWEEPS", 0)
    with pytest.raises(ConvergenceError) as info:
        sym_tridiag_eig(SymTridiag([1.0, 2.0, 3.0], [1.0, 1.0]))
    assert info.value.index == 0


def test_symtridiag_validation():
    with pytest.raises(ValueError):
        SymTridiag([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        SymTridiag([1.0, np.nan], [1.0])
    with pytest.raises(ValueError):
        SymTridiag.from_dense(np.ones((3, 3)))
    t = SymTridiag.from_dense(np.array([[1.0, 2.0, 0], [2.0, 3.0, 4.0], [0, 4.0, 5.0]]))
    assert np.array_equal(t.offdiag, [2.0, 4.0])


def test_fix_signs_ties_and_zero_columns():
    v = fix_signs(np.array([[-1.0, 0.0], [1.0, 0.0]]))
    assert np.array_equal(v[:, 0], [1.0, -1.0])
    assert np.array_equal(v[:, 1], [0.0, 0.0])


def test_dense_sym_eig_rejects_asymmetric():
    with pytest.raises(ValueError):
        dense_sym_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        dense_sym_eig(np.ones((2, 3)))


def test_offband_leakage():
    a = np.zeros((4, 4))
    a[0, 3] = 3.0
    a[3, 1] = 4.0
    a[1, 2] = 100.0
    assert offband_leakage(a) == pytest.approx(5.0)


def test_lanczos_reproduces_tridiagonal_spectrum(rng):
    a = rng.normal(size=(10, 10))
    a = a + a.T
    q0 = rng.normal(size=10)
    res = lanczos(a, q0 / np.linalg.norm(q0))
    assert not res.breakdown
    assert np.allclose(res.basis.T @ res.basis, np.eye(10), atol=1e-12)
    assert np.allclose(np.linalg.eigvalsh(res.tridiag.to_dense()), np.linalg.eigvalsh(a), atol=1e-10)


def test_lanczos_breakdown_on_invariant_subspace():
    a = np.diag([1.0, 2.0, 3.0, 4.0])
    res = lanczos(a, np.array([1.0, 1.0, 0.0, 0.0]) / np.sqrt(2))
    assert res.breakdown
    assert res.basis.shape == (4, 2)
    with pytest.raises(ValueError):
        lanczos(a, np.ones(4))


def test_golub_welsch_matches_gauss_legendre():
    rec = jacobi_recurrence(JacobiParams(0.0, 0.0), 8)
    nodes, weights = golub_welsch(rec, 6)
    x, w = np.polynomial.legendre.leggauss(6)
    assert np.allclose(nodes, (x + 1) / 2, atol=1e-14)
    assert np.allclose(weights, w / 2, atol=1e-14)


def test_golub_welsch_exactness():
    a, b = 0.3, 1.4
    rec = jacobi_recurrence(JacobiParams(a, b), 8)
    nodes, weights = golub_welsch(rec, 5)
    from math import gamma

    for k in range(10):
        exact = gamma(a + 1 + k) * gamma(b + 1) / gamma(a + b + 2 + k)
        assert weights @ nodes**k == pytest.approx(exact, rel=1e-12)
    with pytest.raises(ValueError):
        golub_welsch(rec, 0)
    with pytest.raises(ValueError):
        golub_welsch(rec, 20)
