"""The twin atlas for delta_2 fails to be separated over t = 3/2."""

from triangular_ga import build_side, delta, general_position, sharp_reduce

twin = sharp_reduce(delta(2)).twin
gp_twin, gp = general_position(twin)
print("general position:", gp_twin.p_plus, "|", gp_twin.p_minus)
side = build_side(gp_twin, gp, "+")
print("charts sigma:", [str(s) for s in side.atlas.sigmas])
sep = side.separatedness
print("separated:", bool(sep))
print("non-unit factor of the norm:", sep.non_unit_factor)
print("vanishes at t =", [str(v) for v in sep.vanishing_roots])
print("t is the invariant", gp.Phi_plus)
