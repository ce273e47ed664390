# Cross-check against a plain leapfrog finite-difference solver.
#
# The explicit scheme shares nothing with the constructive solver except the
# equation and the data. Halving the step should cut the discrepancy by four.

from liouville import InitialData, compare_and_order, fd_solve_both, solve

for data in (InitialData("0", "0", 2.0), InitialData("sin(x)", "cos(2*x)", 1.0)):
    exact = solve(data, alpha=1, T=1)
    runs = [fd_solve_both(data, 1.0, 1.0, h) for h in (0.04, 0.02, 0.01, 0.005)]
    rep = compare_and_order(exact, runs, 1.0, 1.0)
    print(f"f1 = {data.f1}, f2 = {data.f2}, m = {data.m}")
    for r in rep.runs:
        print(f"  h = {r.h:<6} sup {r.sup:.3e}   L2 {r.l2:.3e}")
    print("  observed orders:", ", ".join(f"{o:.3f}" for o in rep.order_sup))
