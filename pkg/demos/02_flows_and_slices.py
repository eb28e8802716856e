"""The exponential flow of delta_r and the slice for r >= 4."""

from triangular_ga import apply_derivation, delta, exp_flow, parse_poly

for r in range(1, 5):
    F = exp_flow(delta(r))
    print(f"r={r}: u -> {F.images['u']}")

for r in (4, 5):
    s = parse_poly(f"u - x^{r - 2}*y*z + 2/3*x^{r - 4}*y^3", ("y", "z", "u"))
    print(f"r={r}: d(s) = {apply_derivation(delta(r), s)} for s = {s}")
