# Continuity of the solution map: small data give small solutions, with all derivatives.
#
# The family f1 = 2^-n sin x, f2 = 0 tends to zero. For each n we measure the
# distance of the solution to the zero-data solution in the seminorms
# q_{alpha,beta}(F) = max over [-alpha, alpha]^2 of |d_t^b1 d_x^b2 F|.

import numpy as np

from liouville import GridSpec, InitialData, SeminormIndex, convergence_study
from liouville.smooth import parse_expression

target = InitialData("0", "0", 2.0)
family = [InitialData(parse_expression("sin(x)") * 2.0**-n, "0", 2.0) for n in range(11)]
indices = [SeminormIndex(2, b) for b in [(0, 0), (1, 0), (0, 1), (2, 1), (0, 3)]]

table = convergence_study(family, target, indices, GridSpec(32))

# %% one column per seminorm; each halves with n, like the data
print(" n  input    " + "".join(f"q{idx.beta}".ljust(12) for idx in indices))
for n in range(11):
    rows = [r for r in table.rows if r["n"] == n]
    print(f"{n:2d}  {rows[0]['input_dist']:.2e} " + "".join(f"{r['output_dist']:.3e}   " for r in rows))

print("\nstrictly decreasing:", all(table.verdicts().values()))
ratios = [table.column(i)[-1]["output_dist"] / table.column(i)[0]["output_dist"] for i in indices]
print("q(n=10)/q(n=0):", np.round(ratios, 6))
