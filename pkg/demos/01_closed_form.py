# Constant Cauchy data: the simplest solution of the Liouville equation.
#
# With F(0, x) = 0, dF/dt(0, x) = 0 and m = 2 the solution does not depend on x
# and is F(t, x) = -2 log cosh t. The constructive solver does not know that;
# it builds four functions of one variable and assembles F from them.

import numpy as np

from liouville import InitialData, solve

data = InitialData("0", "0", 2.0)
F = solve(data, alpha=2, T=2)

# %% the generating functions are hyperbolic sines and cosines of x/2
q = F.quartet
x = np.linspace(-2, 2, 5)
g1, g2, g3, g4 = (j[0] for j in q.jets(x, 0))
print("x      g1        g2        g3        g4")
for row in zip(x, g1, g2, g3, g4):
    print("  ".join(f"{v:8.5f}" for v in row))

# %% compare with the closed form on a grid
p = np.linspace(-2, 2, 201)
T, X = np.meshgrid(p, p, indexing="ij")
err = np.abs(F(T, X) + 2 * np.log(np.cosh(T)))
print(f"\nmax |F + 2 log cosh t| on 201x201: {err.max():.2e}")

# %% derivatives come from bivariate Taylor arithmetic, not finite differences
for b in [(1, 0), (2, 0), (0, 1), (1, 1)]:
    print(f"d^{b} F(1, 0.3) = {F.partial(1.0, 0.3, b): .10f}")
print(f"-2 tanh(1)     = {-2 * np.tanh(1.0): .10f}")
print(f"-2 sech(1)^2   = {-2 / np.cosh(1.0) ** 2: .10f}")

# %% and the field solves the equation to near machine precision
print(f"\nmax residual: {np.abs(F.residual(T, X)).max():.2e}")
