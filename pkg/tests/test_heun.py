import numpy as np
import pytest
import sympy as sp

from heunlim import heun
from heunlim.heun import (
    DiffHeunParams,
    HeunDiffParams,
    HeunTau,
    algebraic_heun,
    difference_heun,
    difference_sigma,
    explicit_m,
    explicit_m_printed,
    grid_degree,
    heun_diff_build,
    heun_hahn,
    jacobi_heun_operator,
    match_heun_params,
    newton_coefficients,
    param_match_difference,
    psi_basis,
    truncated_m,
    truncation_setup,
    tridiagonal_action,
    wilson_expansion,
)
from heunlim.operators import grid_x, grid_y, monomial_hypergeom, monomial_x
from heunlim.orthopoly import HahnParams, JacobiParams, hahn_operator, jacobi_eigenvalues

P = JacobiParams(0.3, 0.7)


def test_heun_params_fuchs_relation():
    HeunDiffParams(1.0, 1.0, 1.0, 2.0, 0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        HeunDiffParams(1.0, 1.0, 5.0, 2.0, 0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        HeunDiffParams(1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0)


def test_heun_diff_build_against_sympy():
    g, dl, d, q = sp.Rational(1, 2), sp.Rational(3, 4), sp.Integer(3), sp.Rational(-2, 5)
    ah, bh = sp.Rational(1, 3), sp.Rational(5, 3)
    eps = ah + bh - g - dl + 1
    p = HeunDiffParams(*(float(v) for v in (g, dl, eps, d, q, ah, bh)))
    K = 6
    op = heun_diff_build(p, K)
    x = sp.symbols("x")
    for n in range(op.window + 1):
        f = x**n
        # printed convention: the first-order and potential terms carry the
        # opposite sign of the textbook Heun operator
        img = (
            x * (x - 1) * (x - d) * sp.diff(f, x, 2)
            - (g * (x - 1) * (x - d) + dl * x * (x - d) + eps * x * (x - 1)) * sp.diff(f, x)
            - (ah * bh * x - q) * f
        )
        coeffs = sp.Poly(sp.expand(img), x).all_coeffs()[::-1]
        coeffs = [float(c) for c in coeffs] + [0.0] * (K + 1 - len(coeffs))
        assert np.allclose(op.matrix[:, n], coeffs, atol=1e-13)


def test_explicit_m_corrected_and_printed(rng):
    K = 10
    t = HeunTau(0.4, 1.3, -0.3, 0.9, 0.0)
    alg = algebraic_heun(monomial_x(K), monomial_hypergeom(P, K), t)
    ref = explicit_m(P, t, K)
    w = min(alg.window, ref.window)
    assert np.allclose(alg.matrix[:, : w + 1], ref.matrix[:, : w + 1], atol=1e-12)
    printed = explicit_m_printed(P, t, K)
    assert not np.allclose(alg.matrix[:, : w + 1], printed.matrix[:, : w + 1])
    with pytest.raises(ValueError):
        explicit_m(P, HeunTau(0, 1, 1, 0, 0), K)


def test_match_heun_params():
    t = HeunTau(0.2, 0.8, -0.5, 1.1, 0.6)
    m = match_heun_params(t, P)
    assert not m.degenerate
    assert m.residual <= 1e-10
    assert m.scale == pytest.approx(-(t.tau1 + t.tau2))
    assert m.params.d_sing == pytest.approx(-t.tau4 / (t.tau1 + t.tau2))


def test_match_heun_params_degenerate_cases():
    assert match_heun_params(HeunTau(0, 0.5, -0.5, 1.0, 0.3), P).degenerate
    # tau4 = 0 puts the extra singular point at d = 0
    assert match_heun_params(HeunTau(0, 1.0, 0.0, 1.0, 0.0), P).degenerate


def test_tridiagonal_action_bands():
    t = HeunTau(0.3, -0.4, 1.2, 0.5, 0.8)
    K = 12
    mj, rec = jacobi_heun_operator(P, t, K)
    act = tridiagonal_action(mj, t, rec, jacobi_eigenvalues(P, K + 1))
    assert max(act.deviation.values()) <= 1e-12
    # the diagonal carries tau0 + tau4 lambda_n beyond the bare part
    lam = jacobi_eigenvalues(P, K)[: act.eta.size]
    assert np.allclose(act.bare_eta_offset, t.tau0 + t.tau4 * lam, atol=1e-9)
    with pytest.raises(ValueError):
        tridiagonal_action(monomial_x(4), t, rec, lam)


@pytest.mark.parametrize("N", [1, 2, 4, 6])
def test_truncation(N):
    p = JacobiParams(0.2, 0.4)
    td = truncation_setup(p, N)
    assert td.tau.tau1 + td.tau.tau2 == pytest.approx(1.0)
    assert td.tau.tau2 == pytest.approx((1 - N) / 2)
    assert td.nu == N + 1
    assert td.alpha_t == pytest.approx(-N - 2.6)
    m = truncated_m(td, p)
    assert np.max(np.abs(m.matrix[N + 1 :, : N + 1])) <= 1e-11
    psi = psi_basis(td, p, N)
    for n, (row, lam) in enumerate(zip(psi, td.lambda_t)):
        # lowest power N - n, top power N
        assert np.all(row[: N - n] == 0) and row[N - n] == 1.0
        blk = m.matrix[: N + 1, : N + 1]
        assert np.max(np.abs(blk @ row - lam * row)) <= 1e-9 * np.max(np.abs(row))


def test_truncation_n1_tau2_zero():
    td = truncation_setup(P, 1)
    assert td.tau.tau2 == 0.0 and td.nu == 2.0
    with pytest.raises(ValueError):
        truncation_setup(P, 0)
    with pytest.raises(ValueError):
        psi_basis(td, P, 2)


def test_wilson_expansion():
    p = JacobiParams(0.2, 0.4)
    td = truncation_setup(p, 4)
    ex = wilson_expansion(td, p, 4)
    assert ex.route_gap <= 1e-9
    assert ex.recurrence_residual <= 1e-8
    # zeta_1 vanishes too, so G_0(n) = delta_{n0} and the last column normalizes
    assert np.allclose(ex.G[1:, 0], 0.0, atol=1e-12)
    assert ex.norm_index == 4
    assert np.allclose(ex.Q[:, 4], 1.0)
    scale = np.max(np.abs(ex.B_closed))
    assert np.max(np.abs(ex.B - ex.B_closed)) <= 1e-8 * scale
    assert np.max(np.abs(ex.U - ex.U_closed)) <= 1e-8 * max(1, np.max(np.abs(ex.U_closed)))
    assert np.max(np.abs(ex.F - ex.F_closed)) <= 1e-8 * max(1, np.max(np.abs(ex.F_closed)))


def test_newton_coefficients_and_degree():
    x = np.arange(6.0)
    c = newton_coefficients(3 * x**2 - x + 2)
    assert c[2] == pytest.approx(3.0)
    assert np.allclose(c[3:], 0)
    assert grid_degree(x**3) == 3
    assert grid_degree(np.zeros(5)) == -1


@pytest.mark.parametrize("N", [6, 11])
def test_sigma_leading_coefficient(N):
    t = HeunTau(0.5, 0.7, 0.4, -1.2, 0.9)
    dp = param_match_difference(t, HahnParams(0.3, 0.7, N))
    w = difference_heun(dp).matrix
    x = np.arange(N + 1.0)
    for n in range(N):
        c = newton_coefficients(w @ x**n)
        assert c[n + 1] == pytest.approx(difference_sigma(dp, n), rel=1e-8, abs=1e-8)


def test_sigma_depends_on_grid_size_only_through_kappa():
    t = HeunTau(0.5, 0.7, -0.7, -1.2, 0.9)  # tau1 + tau2 = 0
    s = [
        [difference_sigma(param_match_difference(t, HahnParams(0.3, 0.7, N)), n) for n in range(4)]
        for N in (6, 11)
    ]
    # with kappa = 0 the remaining N-dependence sits in mu1 - nu1, which cancels
    assert np.allclose(s[0], s[1])


def test_heun_hahn_matches_tau_construction(rng):
    for _ in range(5):
        t = HeunTau(*rng.normal(size=5))
        hp = HahnParams(*rng.uniform(-0.9, 3, 2), int(rng.integers(2, 15)))
        w = heun_hahn(t, hp).matrix
        ref = algebraic_heun(grid_x(hp.n_grid), grid_y(hahn_operator(hp)), t).matrix
        assert np.max(np.abs(w - ref)) <= 1e-11 * np.max(np.abs(ref))


def test_difference_params_rebuild():
    t = HeunTau(0.1, 0.2, 0.3, 0.4, 0.5)
    hp = HahnParams(1.0, 2.0, 5)
    dp = param_match_difference(t, hp)
    assert isinstance(dp, DiffHeunParams)
    assert dp.kappa == pytest.approx(0.5)
    x = np.arange(6.0)
    # A1 vanishes at the top of the grid, A2 at the bottom
    assert dp.a1(5.0) == 0 and dp.a2(0.0) == 0
    assert np.allclose(dp.a0(x) + dp.a1(x) + dp.a2(x), dp.r1 * x + dp.r0)


def test_degree_excess_helpers():
    p = HeunDiffParams(1.0, 1.0, 1.0, 2.0, 0.0, 1.0, 1.0)
    assert np.max(heun.degree_excess_polynomial(heun_diff_build(p, 9))) == 0.0
    dp = param_match_difference(HeunTau(1, 2, 3, 4, 5), HahnParams(0.1, 0.1, 8))
    assert np.max(heun.degree_excess_grid(difference_heun(dp))) <= 1e-12
    with pytest.raises(ValueError):
        heun.degree_excess_polynomial(grid_x(3))


def test_heun_tau_helpers():
    t = HeunTau.from_seq([1, 2, 3, 4, 5])
    assert t.as_tuple() == (1, 2, 3, 4, 5)
    n = t.normalized()
    assert n.tau1 + n.tau2 == pytest.approx(1.0)
