# A genuinely two-dimensional solution: F(0, x) = sin x, dF/dt(0, x) = cos 2x, m = 1.
#
# The solver integrates g'' = u g for a potential u built from the data, then
# recovers F on the box |t|, |x| <= 2. We check that it reproduces the data,
# solves the equation, and satisfies the t = 0 consistency identities.

import numpy as np

from liouville import InitialData, diagnostics, restrict_initial, solve
from liouville.smooth import to_string

data = InitialData("sin(x)", "cos(2*x)", 1.0)
F = solve(data, alpha=2)

print("potential u =", to_string(F.quartet.potentials.u))
print("ODE nodes for g2, g4:", F.quartet.g2.n_nodes, F.quartet.g4.n_nodes)

# %% the Cauchy data come back out
xs = np.linspace(-2, 2, 121)
F0, Ft0 = restrict_initial(F, xs)
print(f"\nmax |F(0,x) - sin x|      = {np.abs(F0 - np.sin(xs)).max():.2e}")
print(f"max |dtF(0,x) - cos 2x|   = {np.abs(Ft0 - np.cos(2 * xs)).max():.2e}")

# %% residual of the wave equation with exponential nonlinearity
p = np.linspace(-2, 2, 101)
T, X = np.meshgrid(p, p, indexing="ij")
res = F.residual(T, X)
print(f"max residual on [-2,2]^2  = {np.abs(res).max():.2e}")

# %% the Wronskians of the two pairs stay constant
d13, d24 = F.quartet.wronskian_defects(np.linspace(-5, 5, 1001))
print(f"Wronskian defects         = {np.abs(d13).max():.1e}, {np.abs(d24).max():.1e}")

# %% identities D1..D6 at t = 0
rep = diagnostics(data, F.quartet, np.linspace(-2, 2, 100))
for e in rep.entries:
    print(f"  {e.name}: max defect {e.max_defect:.1e} at x = {e.argmax_point:+.3f}")

# %% a coarse look at the field
print("\n t \\ x " + "".join(f"{v:8.2f}" for v in p[::20]))
for i in range(0, 101, 20):
    print(f"{p[i]:6.2f} " + "".join(f"{v:8.3f}" for v in F(T[i, ::20], X[i, ::20])))
