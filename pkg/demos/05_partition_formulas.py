# Partition formulas for derivatives of exp(h) and log(1 + J).
#
# d^beta exp(h) and d^beta log(1 + J) expand into sums over integer partitions
# of beta. For the mixed derivative d_t^gamma d_x^beta log(1 + J) a two-part
# partition sum is compared with the sum over all set partitions of the
# derivative slots; only the latter matches an exact oracle past order (1, 1).

from liouville.faa_di_bruno import (
    composition_coefficient,
    enumerate_compositions,
    format_check_table,
    verify_formulas,
)

# %% index sets
for b in range(1, 6):
    parts = list(enumerate_compositions("R", b))
    coeffs = [composition_coefficient("P", b, a) for a in parts]
    print(f"R({b}) = {parts}")
    print(f"   P  = {coeffs}  (sum {sum(coeffs)}, a Bell number)")

# %% every formula against its oracle
rows = verify_formulas(max_order=6, max_mixed=5, max_partition=12)
print()
print(format_check_table(rows))
