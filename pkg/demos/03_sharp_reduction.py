"""Sharp reduction to twin form, and the non-properness certificate for delta_1."""

from triangular_ga import NonProperTrigger, delta, sharp_reduce
from triangular_ga.properness import non_properness_certificate, replay_gamma_certificate

res = sharp_reduce(delta(3))
print("delta_3 reduces to the twin form with n =", res.twin.n)
print("  p_plus  =", res.twin.p_plus)
print("  p_minus =", res.twin.p_minus)
for step in res.trail:
    print("  step:", step.kind, step.note)

res = sharp_reduce(delta(1))
assert isinstance(res, NonProperTrigger)
cert = non_properness_certificate(res.derivation, res.ell, res.p_ell)
print("delta_1 triggers at ell =", res.ell)
print("  Gamma  =", cert.to_json()["gamma"])
print("  replay =", replay_gamma_certificate(cert.to_json()))
