"""Quadratic and cubic algebras generated by the bispectral pair.

The grid position ``X`` and the Hahn difference operator ``Y`` close into
a quadratic (Racah) algebra: ``[[X, Y], X]`` and ``[[X, Y], Y]`` are linear
combinations of a handful of words in ``X`` and ``Y``. Replacing ``Y`` by a
Heun-Hahn operator ``W`` generally needs cubic words, and the cubic terms
switch off only on two special lines of parameters.

Everything here is a least-squares fit with a relative residual, so a
residual at rounding level means the identity holds exactly.

Run with ``python demos/algebra_closure.py``.
"""

from heunlim.algebra import (
    JACOBI_PRINTED,
    cubic_closure_hahn,
    hahn_algebra_check,
    jacobi_algebra_check,
    w_pair_checks,
)
from heunlim.heun import HeunTau
from heunlim.orthopoly import HahnParams, JacobiParams


def show(label, rep):
    coeffs = ", ".join(f"{k}={v:+.5f}" for k, v in rep.coefficients.items())
    print(f"  {label}: residual {rep.residual:.1e}  [{coeffs}]")


p = JacobiParams(0.3, 0.7)
print("Jacobi pair (x, D_x) on monomials:")
for label, rep in zip(("[x,[D,x]]", "[[D,x],D]"), jacobi_algebra_check(p)):
    show(label, rep)
print("  closed-form constants:", {k: round(v, 5) for k, v in JACOBI_PRINTED(p).items()})

hp = HahnParams(0.3, 0.7, 10)
print(f"\nHahn pair (X, Y) on a grid of {hp.n_grid + 1} points:")
for label, rep in zip(("[Y,[X,Y]]", "[[X,Y],X]"), hahn_algebra_check(hp)):
    show(label, rep)

print("\nHeun-Hahn W against Y, cubic coefficients e1 (Y^2) and e2 (Y^3):")
for t in (
    HeunTau(0.3, 1.1, -0.2, 0.5, 0.7),
    HeunTau(0.3, 0.4, -0.4, 0.5, 0.1),
    HeunTau(0.3, 0.4, -0.4, 0.5, 0.4),
):
    _, _, e1, e2 = cubic_closure_hahn(t, hp)
    print(f"  tau = {t.as_tuple()}: e1 = {e1:+.3e}, e2 = {e2:+.3e}")

print("\nthe two quadratic W operators, every ordered pair with Y:")
for pair, (first, second) in w_pair_checks(hp, gamma=0.7, eps=-0.2).items():
    print(f"  {pair[0]:>2} / {pair[1]:<2}  residuals {first.residual:.1e}, {second.residual:.1e}")
