"""Classification driver: runs the reductions in order and returns a report."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .atlas import build_side, general_position
from .errors import PreconditionError, SearchBudgetError, UnsupportedSplittingError
from .lnd import SliceCertificate, TriangularDerivation, TwinDerivation, apply_derivation, fpf_check, verify_slice
from .properness import non_properness_certificate
from .reduction import (
    NonProperTrigger,
    constant_residue_slice_builder,
    easy_translation,
    pull_back,
    rank_two_slice,
    reducible_q_normalize,
    sharp_reduce,
)
from .ring import BaseElem, MPoly

SCHEMA_VERSION = 1
VERDICTS = (
    "NotFixedPointFree",
    "Translation",
    "NonProper",
    "ChartsAffine-ConditionallyTranslation",
    "Undecided",
)


def derivation_json(d) -> dict:
    if isinstance(d, TwinDerivation):
        return {"n": d.n, "p_plus": str(d.p_plus), "p_minus": str(d.p_minus)}
    return {"n": d.n, "q": str(d.q), "p": str(d.p)}


@dataclass
class ClassificationReport:
    verdict: str
    certificate: dict
    trail: list
    reason: str = ""
    input: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    objects: dict = field(default_factory=dict)

    def to_json(self, timings=True) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "input": self.input,
            "verdict": self.verdict,
            "reason": self.reason,
            "certificate": self.certificate,
            "trail": [s.to_json() for s in self.trail],
        }
        if timings:
            out["timings"] = {k: round(v, 6) for k, v in self.timings.items()}
        return out


class _Clock:
    def __init__(self):
        self.timings = {}
        self._start = time.perf_counter()

    def lap(self, name):
        now = time.perf_counter()
        self.timings[name] = self.timings.get(name, 0.0) + now - self._start
        self._start = now


def _slice_json(cert: SliceCertificate, original, trail) -> dict:
    """Slice certificate, pulled back to the input coordinates when possible."""
    if not cert.check():
        raise PreconditionError("slice does not verify")
    out = {
        "kind": "SliceCertificate",
        "derivation": derivation_json(cert.derivation),
        "variables": list(cert.derivation.vars),
        "slice": str(cert.s),
        "kernel_generators": [str(g) for g in cert.kernel_generators],
        "check": True,
    }
    if all(step.is_isomorphism for step in trail):
        s0 = pull_back(cert.s, trail).with_vars(original.vars)
        if apply_derivation(original, s0) != 1:
            raise PreconditionError("pulled-back slice does not verify on the input derivation")
        out["slice_original"] = str(s0)
        out["applies_to"] = "input"
    else:
        out["slice_original"] = None
        out["applies_to"] = "modified derivation with the same quotient"
    return out


def _translation(cert, original, trail, reason, clock, inp):
    cj = _slice_json(cert, original, trail)
    clock.lap("certificate")
    return ClassificationReport("Translation", cj, list(trail), reason, inp, clock.timings, {"slice": cert})


def classify_driver(d, splittings=(), shear_budget=100, max_steps=None) -> ClassificationReport:
    """Classify a triangular or twin derivation."""
    clock = _Clock()
    original = d
    inp = derivation_json(d)
    fpf = fpf_check(d)
    clock.lap("fpf")
    if not fpf:
        return ClassificationReport(
            "NotFixedPointFree",
            {"kind": "FPFWitness", "reason": fpf.reason, "witness": str(fpf.witness)},
            [], fpf.reason, inp, clock.timings,
        )
    if isinstance(d, TriangularDerivation):
        while True:
            cert = easy_translation(d)
            if cert is not None:
                return _translation(cert, original, d.trail, "easy translation", clock, inp)
            if d.q.residue():
                break
            if not d.q:
                return _translation(rank_two_slice(d), original, d.trail, "q = 0: rank-two slice", clock, inp)
            d, _ = reducible_q_normalize(d)
            clock.lap("reducible_q")
        try:
            res = sharp_reduce(d, max_steps)
        except PreconditionError as exc:
            return ClassificationReport("Undecided", {"kind": "None"}, list(d.trail), str(exc), inp, clock.timings)
        clock.lap("sharp_reduce")
        if isinstance(res, NonProperTrigger):
            cert = non_properness_certificate(res.derivation, res.ell, res.p_ell)
            clock.lap("certificate")
            return ClassificationReport(
                "NonProper", cert.to_json(), list(res.trail),
                f"top coefficient at z-degree {res.ell} does not decompose", inp, clock.timings,
                {"gamma": cert},
            )
        d = res.twin
    twin = d
    y, zp, zm = twin.vars
    for var, p in ((zp, twin.p_plus), (zm, twin.p_minus)):
        pb = p.residue()
        if twin.n == 0 or (pb and pb.is_constant()):
            if twin.n == 0:
                s = MPoly.var(y, twin.vars)
            else:
                s = constant_residue_slice_builder(twin.n, p, y, var, twin.vars)
            cert = verify_slice(twin, s)
            return _translation(cert, original, twin.trail, f"twin form with constant residue on {var}", clock, inp)
    try:
        gp_twin, gp = general_position(twin, shear_budget)
    except SearchBudgetError as exc:
        return ClassificationReport("Undecided", {"kind": "None"}, list(twin.trail), str(exc), inp, clock.timings)
    clock.lap("general_position")
    sides = {}
    unsupported = []
    for side in ("+", "-"):
        try:
            sa = build_side(gp_twin, gp, side, splittings)
        except UnsupportedSplittingError as exc:
            unsupported.append(f"{side}: {exc}")
            continue
        finally:
            clock.lap(f"atlas{side}")
        sides[side] = sa
        if not sa.separatedness:
            sep = sa.separatedness
            cert = {
                "kind": "CocycleWitness",
                "side": side,
                "n": gp_twin.n,
                "p_plus": str(gp_twin.p_plus),
                "p_minus": str(gp_twin.p_minus),
                "pair": list(sep.witness),
                "non_unit_factor": None if sep.non_unit_factor is None else str(sep.non_unit_factor),
                "vanishing_t": [str(r) for r in sep.vanishing_roots],
                "invariant": str(gp.Phi_plus if side == "+" else gp.Phi_minus),
                "general_position": gp.to_json(),
                "atlas": sa.to_json(),
            }
            data = _user_data_for(sa)
            if data is not None:
                cert["splitting_data"] = data
            return ClassificationReport(
                "NonProper", cert, list(gp_twin.trail), f"atlas over U{side} is not separated: {sep.reason}",
                inp, clock.timings, {"atlas": sa, "general_position": gp},
            )
    cert = {
        "kind": "AtlasCertificate",
        "n": gp_twin.n,
        "p_plus": str(gp_twin.p_plus),
        "p_minus": str(gp_twin.p_minus),
        "general_position": gp.to_json(),
        "sides": {k: v.to_json() for k, v in sides.items()},
    }
    if unsupported:
        return ClassificationReport(
            "Undecided", cert, list(gp_twin.trail), "; ".join(unsupported), inp, clock.timings,
            {"sides": sides, "general_position": gp},
        )
    return ClassificationReport(
        "ChartsAffine-ConditionallyTranslation", cert, list(gp_twin.trail),
        "both atlases are separated with affine charts; translation follows if the action is proper",
        inp, clock.timings, {"sides": sides, "general_position": gp},
    )


def _user_data_for(sa):
    alg = sa.atlas.splitting
    if alg.P_bar.degree(alg.var) <= 2:
        return None
    return alg.to_json()


def delta(r: int) -> TriangularDerivation:
    """x^2 d/dy + 2y d/dz + (1 + x^r z) d/du."""
    return TriangularDerivation(2, "2*y", MPoly.parse("1", ("y", "z", "u")) + MPoly.var("z", ("y", "z", "u")) * BaseElem.x(r))
