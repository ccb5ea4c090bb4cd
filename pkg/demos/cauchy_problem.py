"""Solve a linear Cauchy problem by Picard iteration and print the diagnostics."""

from qprabhakar import (
    CauchyProblem,
    PrabhakarParams,
    QContext,
    SolverConfig,
    differential_residual,
    solve,
    volterra_residual,
)

ctx = QContext(0.5)
p = PrabhakarParams(alpha=0.9, beta=0.6, gamma=0.4, omega=0.05)
lam = 0.3

for shift in (+1, -1):
    prob = CauchyProblem(p, 0.0, 1.0, 1.0, lambda x, y: lam * y, lipschitz_A=lam, kernel_shift=shift)
    rep = solve(ctx, prob, SolverConfig(h=1.0, tol=1e-12))
    y = rep.solution
    print(f"kernel shift {shift:+d}: delta1={rep.delta1:.3f}, iterations={rep.iterations}, converged={rep.converged}")
    print(f"  volterra residual     {volterra_residual(ctx, prob, y):.2e}")
    print(f"  differential residual {differential_residual(ctx, prob, y):.2e}")
    print("  y on the first lattice nodes:", ", ".join(f"{v:.10f}" for v in y.table[:4]))
