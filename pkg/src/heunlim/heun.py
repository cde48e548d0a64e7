"""Heun operators: differential, algebraic, difference and Heun-Hahn.

The algebraic Heun operator built from a bispectral pair ``(X, Y)`` is

    W = tau1 X Y + tau2 Y X + tau3 X + tau4 Y + tau0 I.

In the Jacobi realization (``X = x``, ``Y`` the hypergeometric operator) it
is the classical Heun operator; on the Hahn grid it is the difference Heun
operator. Every identity here is checked on matrices, restricted to the
exactness window when the basis is a truncated polynomial space.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .linalg import golub_welsch, offband_leakage
from .operators import (
    BasisOperator,
    _monic_coefficients,
    BasisTag,
    grid_x,
    grid_y,
    jacobi_basis_matrix,
    monomial_hypergeom,
    monomial_x,
    to_jacobi_basis,
)
from .orthopoly import (
    HahnParams,
    JacobiParams,
    RecurrencePair,
    eval_recurrence,
    jacobi_coefficients,
    jacobi_eigenvalues,
    jacobi_norms,
    jacobi_recurrence,
    hahn_operator,
)

__all__ = [
    "HeunDiffParams",
    "HeunTau",
    "DiffHeunParams",
    "HeunMatch",
    "TridiagonalAction",
    "TruncationData",
    "ExpansionData",
    "polynomial_diff_operator",
    "heun_diff_build",
    "algebraic_heun",
    "explicit_m",
    "explicit_m_printed",
    "match_heun_params",
    "tridiagonal_action",
    "jacobi_heun_operator",
    "truncation_setup",
    "truncated_m",
    "psi_basis",
    "wilson_expansion",
    "difference_heun",
    "difference_sigma",
    "newton_coefficients",
    "grid_degree",
    "degree_excess_polynomial",
    "degree_excess_grid",
    "heun_hahn",
    "param_match_difference",
]


# -- parameter containers -----------------------------------------------------


@dataclass(frozen=True)
class HeunDiffParams:
    """Parameters of ``x(x-1)(x-d) D^2 + (rho2 x^2 + rho1 x + rho0) D + r1 x + r0``.

    ``alpha_h`` and ``beta_h`` are the exponents at infinity and may form a
    complex-conjugate pair; only their sum and product enter the operator.
    ``lam`` is the spectral shift folded into ``r0 = q + lam``.
    """

    gamma: float
    delta: float
    epsilon: float
    d_sing: float
    q: float
    alpha_h: complex
    beta_h: complex
    lam: float = 0.0

    def __post_init__(self):
        if self.d_sing in (0.0, 1.0):
            raise ValueError("singular point d must differ from 0 and 1")
        fuchs = self.alpha_h + self.beta_h - self.gamma - self.delta + 1
        if abs(self.epsilon - fuchs) > 1e-10 * max(1.0, abs(self.epsilon)):
            raise ValueError(
                f"Fuchs relation violated: epsilon={self.epsilon}, "
                f"alpha+beta-gamma-delta+1={fuchs}"
            )

    @property
    def rho2(self):
        return -(self.gamma + self.delta + self.epsilon)

    @property
    def rho1(self):
        return (self.gamma + self.delta) * self.d_sing + self.gamma + self.epsilon

    @property
    def rho0(self):
        return -self.gamma * self.d_sing

    @property
    def r1(self):
        return -(complex(self.alpha_h) * complex(self.beta_h)).real

    @property
    def r0(self):
        return self.q + self.lam


@dataclass(frozen=True)
class HeunTau:
    tau0: float = 0.0
    tau1: float = 0.0
    tau2: float = 0.0
    tau3: float = 0.0
    tau4: float = 0.0

    @classmethod
    def from_seq(cls, seq):
        if len(seq) != 5:
            raise ValueError("tau needs exactly five entries (tau0..tau4)")
        return cls(*(float(v) for v in seq))

    def as_tuple(self):
        return (self.tau0, self.tau1, self.tau2, self.tau3, self.tau4)

    def normalized(self):
        """Rescale so that ``tau1 + tau2 = 1``."""
        s = self.tau1 + self.tau2
        if s == 0:
            raise ValueError("tau1 + tau2 = 0 cannot be normalized")
        return HeunTau(*(v / s for v in self.as_tuple()))


@dataclass(frozen=True)
class DiffHeunParams:
    kappa: float
    mu1: float
    mu0: float
    nu1: float
    nu0: float
    r1: float
    r0: float
    n_grid: int

    def a1(self, x):
        return (x - self.n_grid) * (self.kappa * x * x + self.mu1 * x + self.mu0)

    def a2(self, x):
        return x * (self.kappa * x * x + self.nu1 * x + self.nu0)

    def a0(self, x):
        return -self.a1(x) - self.a2(x) + self.r1 * x + self.r0


# -- differential operators on monomials -------------------------------------


def polynomial_diff_operator(c2, c1, c0, K) -> BasisOperator:
    """Matrix of ``c2(x) D^2 + c1(x) D + c0(x)`` on ``1, x, ..., x^K``.

    Coefficient polynomials are given low order first.
    """
    c2, c1, c0 = (np.trim_zeros(np.asarray(c, dtype=float), "b") for c in (c2, c1, c0))
    m = np.zeros((K + 1, K + 1))
    for n in range(K + 1):
        for coef, order, fac in ((c2, 2, n * (n - 1)), (c1, 1, n), (c0, 0, 1)):
            if fac == 0:
                continue
            for j, cj in enumerate(coef):
                row = n - order + j
                if 0 <= row <= K:
                    m[row, n] += fac * cj
    raise_ = max(c2.size - 3, c1.size - 2, c0.size - 1, 0)
    return BasisOperator(m, BasisTag("monomial", K + 1), K - raise_, raise_)


def heun_diff_build(p: HeunDiffParams, K: int) -> BasisOperator:
    if K < 3:
        raise ValueError("need K >= 3")
    d = p.d_sing
    cubic = [0.0, d, -(1.0 + d), 1.0]
    return polynomial_diff_operator(cubic, [p.rho0, p.rho1, p.rho2], [p.r0, p.r1], K)


def algebraic_heun(x_op: BasisOperator, y_op: BasisOperator, t: HeunTau) -> BasisOperator:
    """``tau1 XY + tau2 YX + tau3 X + tau4 Y + tau0``; bases must agree."""
    return (
        t.tau1 * (x_op @ y_op)
        + t.tau2 * (y_op @ x_op)
        + t.tau3 * x_op
        + t.tau4 * y_op
        + t.tau0 * x_op.identity()
    )


def explicit_m(p: JacobiParams, t: HeunTau, K: int) -> BasisOperator:
    """Closed form of ``tau1 XY + tau2 YX + tau3 X + tau0`` when ``tau1 + tau2 = 1``.

    ``x^2(1-x) D^2 + x[alpha+1+2 tau2 - (alpha+beta+2+2 tau2) x] D
    - [tau2(alpha+beta+2) - tau3] x + (alpha+1) tau2 + tau0``.
    """
    if abs(t.tau1 + t.tau2 - 1.0) > 1e-12:
        raise ValueError("explicit form requires tau1 + tau2 = 1")
    a, b, t2 = p.alpha, p.beta, t.tau2
    c2 = [0.0, 0.0, 1.0, -1.0]
    c1 = [0.0, a + 1 + 2 * t2, -(a + b + 2 + 2 * t2)]
    c0 = [(a + 1) * t2 + t.tau0, -(t2 * (a + b + 2) - t.tau3)]
    return polynomial_diff_operator(c2, c1, c0, K)


def explicit_m_printed(p: JacobiParams, t: HeunTau, K: int) -> BasisOperator:
    """The closed form exactly as printed, kept for comparison only.

    ``x^2(x-1) D^2 + x[alpha+1-2 tau2 - (alpha+beta-2 tau2) x] D
    - [tau2(alpha+beta+2) - tau3] x + (alpha+1) tau2 + tau0``. It does not
    equal ``tau1 XY + tau2 YX + tau3 X + tau0`` for the hypergeometric
    operator; :func:`explicit_m` is the corrected version.
    """
    a, b, t2 = p.alpha, p.beta, t.tau2
    c2 = [0.0, 0.0, -1.0, 1.0]
    c1 = [0.0, a + 1 - 2 * t2, -(a + b - 2 * t2)]
    c0 = [(a + 1) * t2 + t.tau0, -(t2 * (a + b + 2) - t.tau3)]
    return polynomial_diff_operator(c2, c1, c0, K)


# -- matching the algebraic operator to the standard Heun form ----------------


@dataclass(frozen=True)
class HeunMatch:
    """Result of identifying ``algebraic_heun(X, D_x, tau)`` with a Heun operator.

    ``operator == scale * heun_diff_build(params)`` on the exactness window.
    ``degenerate`` is set when the cubic leading coefficient collapses
    (``tau1 + tau2 = 0``) or the singular point ``d`` hits 0 or 1; ``params``
    is then ``None``.
    """

    params: HeunDiffParams | None
    scale: float
    residual: float
    degenerate: bool
    coefficients: tuple = field(default=())


def _fit_poly_coefficients(op: BasisOperator):
    """Least-squares recovery of ``(c2, c1, c0)`` (degrees 3, 2, 1) from a matrix."""
    K = op.dim - 1
    basis_ops = []
    for which, deg in ((0, 3), (1, 2), (2, 1)):
        for j in range(deg + 1):
            cs = [[0.0], [0.0], [0.0]]
            cs[which] = [0.0] * j + [1.0]
            basis_ops.append(polynomial_diff_operator(*cs, K))
    w = op.window
    for b in basis_ops:
        w = min(w, b.window)
    a = np.stack([b.matrix[:, : w + 1].ravel() for b in basis_ops], axis=1)
    coef, *_ = np.linalg.lstsq(a, op.matrix[:, : w + 1].ravel(), rcond=None)
    return coef[:4], coef[4:7], coef[7:9]


def match_heun_params(t: HeunTau, p: JacobiParams, K: int = 12, tol=1e-10) -> HeunMatch:
    w = algebraic_heun(monomial_x(K), monomial_hypergeom(p, K), t)
    c2, c1, c0 = _fit_poly_coefficients(w)
    norm = np.linalg.norm(w.block())
    scale = c2[3]
    coeffs = (tuple(c2), tuple(c1), tuple(c0))
    if abs(scale) <= 1e-12 * max(norm, 1.0):
        return HeunMatch(None, 0.0, 0.0, True, coeffs)
    d = c2[1] / scale
    if abs(d) < 1e-12 or abs(d - 1.0) < 1e-12:
        return HeunMatch(None, scale, 0.0, True, coeffs)
    rho0, rho1, rho2 = c1 / scale
    r0, r1 = c0 / scale
    gamma = -rho0 / d
    delta = (rho1 + rho2 - gamma * d) / (d - 1.0)
    epsilon = -rho2 - gamma - delta
    # alpha_h + beta_h from the Fuchs relation, alpha_h * beta_h = -r1
    s = epsilon + gamma + delta - 1.0
    disc = cmath.sqrt(s * s + 4.0 * r1)
    ah, bh = (s + disc) / 2, (s - disc) / 2
    if abs(ah.imag) < 1e-14 * max(1.0, abs(ah)):
        ah, bh = ah.real, bh.real
    params = HeunDiffParams(gamma, delta, epsilon, d, r0, ah, bh)
    h = heun_diff_build(params, K)
    win = min(w.window, h.window)
    diff = w.matrix[:, : win + 1] - scale * h.matrix[:, : win + 1]
    residual = float(np.linalg.norm(diff) / max(norm, np.finfo(float).tiny))
    if residual > tol:
        raise ArithmeticError(f"Heun identification failed, relative residual {residual:.3e}")
    return HeunMatch(params, scale, residual, False, coeffs)


# -- tridiagonal action in the Jacobi basis -----------------------------------


@dataclass(frozen=True)
class TridiagonalAction:
    """Bands of ``M`` on monic Jacobi polynomials.

    ``M P_n = xi[n+1] P_{n+1} + eta[n] P_n + zeta_u[n] P_{n-1}``; ``xi[0]`` and
    ``zeta_u[0]`` are unused. ``deviation`` holds, per band, the worst gap
    between the matrix elements and the closed forms; ``bare_eta_offset`` is
    the diagonal minus ``(tau1+tau2) lambda_n b_n + tau3 b_n``.
    """

    xi: np.ndarray
    eta: np.ndarray
    zeta_u: np.ndarray
    leakage: float
    deviation: dict
    bare_eta_offset: np.ndarray


def jacobi_heun_operator(p: JacobiParams, t: HeunTau, K: int):
    """``algebraic_heun`` in the monic Jacobi basis, with the recurrence used."""
    rec = jacobi_recurrence(p, K + 1)
    m = algebraic_heun(monomial_x(K), monomial_hypergeom(p, K), t)
    return to_jacobi_basis(m, jacobi_basis_matrix(p, rec, K)), rec


def tridiagonal_action(
    m: BasisOperator, t: HeunTau, rec: RecurrencePair, lam, tol=1e-10
) -> TridiagonalAction:
    if m.basis.kind != "jacobi":
        raise ValueError("expected an operator in the Jacobi basis")
    w = m.window
    blk = m.matrix[: w + 2, : w + 1]
    full = np.zeros((w + 2, w + 2))
    full[:, : w + 1] = blk
    leak = offband_leakage(full)
    if leak > tol * np.linalg.norm(blk):
        raise ValueError(f"operator is not tridiagonal in the Jacobi basis (leak {leak:.3e})")
    n = np.arange(w + 1)
    lam = np.asarray(lam, dtype=float)
    xi = np.zeros(w + 2)
    xi[1:] = blk[n + 1, n]
    eta = blk[n, n].copy()
    zeta_u = np.zeros(w + 1)
    zeta_u[1:] = blk[n[1:] - 1, n[1:]]

    xi_form = t.tau1 * lam[: w + 1] + t.tau2 * lam[1 : w + 2] + t.tau3  # xi_{n+1}
    zeta_form = (t.tau1 * lam[1 : w + 1] + t.tau2 * lam[: w] + t.tau3) * rec.u[1 : w + 1]
    bare = (t.tau1 + t.tau2) * lam[: w + 1] * rec.b[: w + 1] + t.tau3 * rec.b[: w + 1]
    eta_form = bare + t.tau0 + t.tau4 * lam[: w + 1]
    scale = max(float(np.max(np.abs(blk))), 1.0)
    deviation = {
        "xi": float(np.max(np.abs(xi[1:] - xi_form))) / scale,
        "zeta_u": float(np.max(np.abs(zeta_u[1:] - zeta_form), initial=0.0)) / scale,
        "eta": float(np.max(np.abs(eta - eta_form))) / scale,
    }
    return TridiagonalAction(xi, eta, zeta_u, float(leak), deviation, eta - bare)


# -- truncation and the Racah expansion ---------------------------------------


@dataclass(frozen=True)
class TruncationData:
    """Choice of ``tau`` making ``M`` preserve polynomials of degree ``<= N``.

    ``tau1 + tau2 = 1``, ``tau2 = (1 - N)/2`` and ``tau3`` solves
    ``xi_{N+1} = 0``. The eigenvectors are ``x^N P_n^{(alpha_t, beta_t)}(1/x)``
    with ``alpha_t = -N - alpha - beta - 2`` and eigenvalues
    ``lambda_t[n] = n(n + alpha_t + beta_t + 1) + shift`` where ``shift`` is
    the eigenvalue on ``x^N``.
    """

    n_trunc: int
    nu: float
    tau: HeunTau
    alpha_t: float
    beta_t: float
    shift: float
    lambda_t: np.ndarray
    xi_top: float


def truncation_setup(p: JacobiParams, N: int, tau0: float = 0.0) -> TruncationData:
    if N < 1:
        raise ValueError("need N >= 1")
    a, b = p.alpha, p.beta
    nu = N + 1.0
    tau2 = (2.0 - nu) / 2.0
    tau1 = 1.0 - tau2
    tau3 = (4 + a + b - nu) * (tau2 + nu - 1) - nu * tau2
    lam = jacobi_eigenvalues(p, N + 1)
    xi_top = tau1 * lam[N] + tau2 * lam[N + 1] + tau3
    if abs(xi_top) > 1e-11 * max(1.0, abs(lam[N + 1])):
        raise ArithmeticError(f"truncation condition fails: xi_(N+1) = {xi_top:.3e}")
    alpha_t = -N - a - b - 2.0
    beta_t = b
    shift = tau1 * N * (N + a) + tau2 * (N + 1) * (N + 1 + a) + tau0
    n = np.arange(N + 1)
    lam_t = n * (n + alpha_t + beta_t + 1) + shift
    return TruncationData(
        N, nu, HeunTau(tau0, tau1, tau2, tau3, 0.0), alpha_t, beta_t, shift, lam_t, xi_top
    )


def truncated_m(td: TruncationData, p: JacobiParams, extra: int = 2) -> BasisOperator:
    """``M`` on monomials up to degree ``N + extra`` (room to observe leakage)."""
    K = td.n_trunc + extra
    return algebraic_heun(monomial_x(K), monomial_hypergeom(p, K), td.tau)


def psi_basis(td: TruncationData, p: JacobiParams, N: int) -> np.ndarray:
    """Row ``n``: monomial coefficients of ``psi_n(x) = x^N P_n(1/x)``.

    ``psi_n`` spans ``x^(N-n), ..., x^N``; ``psi_0 = x^N``.
    """
    if N != td.n_trunc:
        raise ValueError("N does not match the truncation data")
    try:
        b, u = jacobi_coefficients(td.alpha_t, td.beta_t, N)
    except ZeroDivisionError as exc:
        raise ValueError(f"recurrence undefined for the truncated parameters: {exc}") from exc
    c = _monic_coefficients(b, u, N)
    return c[:, ::-1].copy()


@dataclass(frozen=True)
class ExpansionData:
    """Expansion ``psi_n = sum_k G[n, k] P_k`` and its three-term structure.

    ``Q = G / G[:, j]`` with ``j = norm_index`` (0 when ``G_0`` has no
    zeros, otherwise ``N``). ``B, U, F`` are fitted from
    ``lambda_t[n] Q_k(n) = B_k Q_{k+1}(n) + U_k Q_k(n) + F_k Q_{k-1}(n)``;
    the ``*_closed`` arrays are the closed forms ``B_k = u_{k+1} zeta_{k+1}``,
    ``U_k = eta_k``, ``F_k = xi_k``.
    """

    G: np.ndarray
    G_quadrature: np.ndarray
    Q: np.ndarray
    B: np.ndarray
    U: np.ndarray
    F: np.ndarray
    B_closed: np.ndarray
    U_closed: np.ndarray
    F_closed: np.ndarray
    route_gap: float
    recurrence_residual: float
    gram_psi: np.ndarray
    norm_index: int = 0


def wilson_expansion(td: TruncationData, p: JacobiParams, N: int, g0_tol=1e-12) -> ExpansionData:
    psi = psi_basis(td, p, N)
    rec = jacobi_recurrence(p, N + 1)
    cmat = jacobi_basis_matrix(p, rec, N)
    # triangular route: psi = G C  (rows are polynomials)
    g_tri = np.linalg.solve(cmat.T, psi.T).T

    # quadrature route: R_{n,k} h_k = int psi_n P_k w
    nodes, weights = golub_welsch(rec, N + 1)
    # values by recurrence: psi_n(x) = x^N P~_n(1/x) and P_k(x) directly
    bt, ut = jacobi_coefficients(td.alpha_t, td.beta_t, N)
    inv = 1.0 / nodes
    psi_vals = np.stack([nodes**N * eval_recurrence(bt, ut, n, inv) for n in range(N + 1)])
    p_vals = np.stack([eval_recurrence(rec.b, rec.u, k, nodes) for k in range(N + 1)])
    h = jacobi_norms(p, rec).h[: N + 1]
    g_quad = (psi_vals * weights) @ p_vals.T / h[None, :]
    gram = (psi_vals * weights) @ psi_vals.T

    scale = max(float(np.max(np.abs(g_tri))), 1.0)
    route_gap = float(np.max(np.abs(g_tri - g_quad))) / scale

    # With the truncation tau one also has zeta_1 = 0, so psi_n is orthogonal
    # to constants and G_0(n) = 0 for n >= 1. Normalize on the first column
    # that never vanishes; the three-term recurrence is unaffected.
    norm_index = None
    for ref in (0, N):
        g_ref = g_tri[:, ref]
        if np.all(np.abs(g_ref) > g0_tol * np.max(np.abs(g_tri), axis=1)):
            norm_index = ref
            break
    if norm_index is None:
        raise ArithmeticError("no expansion column is free of zeros")
    q = g_tri / g_tri[:, norm_index][:, None]

    t = td.tau
    lam = jacobi_eigenvalues(p, N + 1)
    big_b = np.zeros(N + 1)
    big_u = np.zeros(N + 1)
    big_f = np.zeros(N + 1)
    worst = 0.0
    lam_t = td.lambda_t
    for k in range(N + 1):
        cols, names = [], []
        if k < N:
            cols.append(q[:, k + 1])
            names.append("B")
        cols.append(q[:, k])
        names.append("U")
        if k > 0:
            cols.append(q[:, k - 1])
            names.append("F")
        a = np.stack(cols, axis=1)
        rhs = lam_t * q[:, k]
        coef, *_ = np.linalg.lstsq(a, rhs, rcond=None)
        resid = np.linalg.norm(a @ coef - rhs) / max(np.linalg.norm(rhs), 1.0)
        worst = max(worst, float(resid))
        for name, c in zip(names, coef):
            {"B": big_b, "U": big_u, "F": big_f}[name][k] = c

    k = np.arange(N + 1)
    zeta_next = t.tau1 * lam[k + 1] + t.tau2 * lam[k] + t.tau3
    b_closed = rec.u[k + 1] * zeta_next
    b_closed[N] = 0.0
    u_closed = (t.tau1 + t.tau2) * lam[k] * rec.b[k] + t.tau3 * rec.b[k] + t.tau0
    lam_prev = np.concatenate([[0.0], lam[:N]])
    f_closed = t.tau1 * lam_prev + t.tau2 * lam[k] + t.tau3
    f_closed[0] = 0.0
    return ExpansionData(
        g_tri, g_quad, q, big_b, big_u, big_f, b_closed, u_closed, f_closed,
        route_gap, worst, gram, norm_index,
    )


# -- difference Heun operator -------------------------------------------------


def difference_heun(dp: DiffHeunParams) -> BasisOperator:
    """``A1 T+ + A2 T- + A0`` on the grid ``{0, ..., N}``."""
    N = dp.n_grid
    if N < 1:
        raise ValueError("need N >= 1")
    x = np.arange(N + 1, dtype=float)
    m = np.diag(dp.a0(x)) + np.diag(dp.a1(x)[:-1], 1) + np.diag(dp.a2(x)[1:], -1)
    return BasisOperator(m, BasisTag("grid-delta", N + 1), N)


def difference_sigma(dp: DiffHeunParams, n: int) -> float:
    """Leading coefficient of ``W[x^n]`` (coefficient of ``x^(n+1)``)."""
    return (
        dp.kappa * n * (n - 1)
        + n * (dp.mu1 - dp.nu1 - dp.n_grid * dp.kappa)
        + dp.r1
    )


def newton_coefficients(values) -> np.ndarray:
    """Forward-difference coefficients ``Delta^k f(0) / k!`` on the grid ``0..N``.

    These are the coordinates of the interpolant in the falling-factorial
    basis; the top nonzero one equals the leading monomial coefficient.
    """
    v = np.array(values, dtype=float)
    out = np.empty_like(v)
    fact = 1.0
    for k in range(v.size):
        if k:
            fact *= k
        out[k] = v[0] / fact
        v = np.diff(v)
    return out


def grid_degree(values, rtol=1e-12) -> int:
    c = newton_coefficients(values)
    scale = np.max(np.abs(c))
    if scale == 0:
        return -1
    nz = np.nonzero(np.abs(c) > rtol * scale)[0]
    return int(nz[-1])


def degree_excess_polynomial(op: BasisOperator) -> np.ndarray:
    """Per input degree ``n``, the size of the image above degree ``n + 1``.

    Entry ``n`` is ``max_{k > n+1} |op[k, n]|`` relative to the largest entry
    of column ``n``; only columns inside the exactness window are reported.
    """
    if op.basis.kind != "monomial":
        raise ValueError("expected a monomial-basis operator")
    out = np.zeros(op.window + 1)
    for n in range(op.window + 1):
        col = op.matrix[:, n]
        scale = max(float(np.max(np.abs(col))), np.finfo(float).tiny)
        out[n] = float(np.max(np.abs(col[n + 2 :]), initial=0.0)) / scale
    return out


def degree_excess_grid(op: BasisOperator) -> np.ndarray:
    """Grid analogue of :func:`degree_excess_polynomial`.

    Inputs are the falling factorials ``x(x-1)...(x-n+1)`` for ``n < N``
    (exact on the grid, and the natural basis for forward differences).
    The image is expanded in the same basis by :func:`newton_coefficients`.
    """
    N = op.dim - 1
    x = np.arange(N + 1, dtype=float)
    out = np.zeros(N)
    f = np.ones(N + 1)
    for n in range(N):
        c = newton_coefficients(op.matrix @ f)
        scale = max(float(np.max(np.abs(c))), np.finfo(float).tiny)
        out[n] = float(np.max(np.abs(c[n + 2 :]), initial=0.0)) / scale
        f = f * (x - n)
    return out


def heun_hahn(t: HeunTau, p: HahnParams, rtol=1e-11) -> BasisOperator:
    """Difference Heun operator of Hahn type from its factored coefficients.

    Cross-checked against ``algebraic_heun(grid_x, hahn_operator, t)``; a
    mismatch is an internal error.
    """
    w = difference_heun(param_match_difference(t, p))
    ref = algebraic_heun(grid_x(p.n_grid), grid_y(hahn_operator(p)), t)
    gap = np.max(np.abs(w.matrix - ref.matrix))
    if gap > rtol * max(np.max(np.abs(ref.matrix)), 1.0):
        raise ArithmeticError(f"Heun-Hahn operator disagrees with tau-construction ({gap:.3e})")
    return w


def param_match_difference(t: HeunTau, p: HahnParams) -> DiffHeunParams:
    a, b, N = p.alpha, p.beta, p.n_grid
    kappa = t.tau1 + t.tau2
    plus = t.tau2 + t.tau4
    minus = t.tau4 - t.tau2
    return DiffHeunParams(
        kappa=kappa,
        mu1=kappa * (a + 1) + plus,
        mu0=(a + 1) * plus,
        nu1=minus - kappa * (b + N + 1),
        nu0=-(b + N + 1) * minus,
        r1=(a + b + 2) * t.tau2 + t.tau3,
        r0=t.tau0 - N * (a + 1) * t.tau2,
        n_grid=N,
    )
