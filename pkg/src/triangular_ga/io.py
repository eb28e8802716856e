"""Reading derivations from JSON and writing classification reports."""

from __future__ import annotations

import json

from .atlas import replay_atlas_certificate
from .driver import SCHEMA_VERSION, ClassificationReport, derivation_json
from .errors import ParseError, SchemaError
from .lnd import TRI_VARS, TWIN_VARS, TriangularDerivation, TwinDerivation, apply_derivation, fpf_oracle
from .properness import replay_gamma_certificate
from .ring import MPoly, parse_poly

TRIANGULAR_KEYS = {"n", "q", "p"}
TWIN_KEYS = {"n", "p_plus", "p_minus"}


def loads(text: str):
    """Derivation from a JSON document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno, text) from None
    return from_dict(doc)


def from_dict(doc: dict):
    if not isinstance(doc, dict):
        raise SchemaError("input must be a JSON object")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unknown schema version {version!r}")
    keys = set(doc) - {"schema_version", "name"}
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise SchemaError("n must be a non-negative integer")
    if keys == TRIANGULAR_KEYS:
        return TriangularDerivation(n, _poly(doc, "q", TRI_VARS), _poly(doc, "p", TRI_VARS))
    if keys == TWIN_KEYS:
        return TwinDerivation(n, _poly(doc, "p_plus", TWIN_VARS), _poly(doc, "p_minus", TWIN_VARS))
    raise SchemaError(f"expected keys {sorted(TRIANGULAR_KEYS)} or {sorted(TWIN_KEYS)}, got {sorted(keys)}")


def _poly(doc, key, variables):
    value = doc[key]
    if isinstance(value, int) and not isinstance(value, bool):
        value = str(value)
    if not isinstance(value, str):
        raise SchemaError(f"{key} must be a polynomial string")
    try:
        return parse_poly(value, variables)
    except ParseError as exc:
        raise ParseError(f"field {key!r}: {exc.message}", exc.line, exc.column, value) from None


def parse(path):
    with open(path) as fh:
        return loads(fh.read())


def dumps_derivation(d) -> str:
    return json.dumps(derivation_json(d), sort_keys=True)


def render(report: ClassificationReport, fmt="json", timings=True) -> bytes:
    if fmt == "json":
        return (json.dumps(report.to_json(timings), indent=2, sort_keys=True) + "\n").encode()
    if fmt == "text":
        return render_text(report, timings).encode()
    raise ValueError(f"unknown format {fmt!r}")


def render_text(report: ClassificationReport, timings=True) -> str:
    cert = report.certificate
    lines = [f"verdict: {report.verdict}", f"reason:  {report.reason}"]
    kind = cert.get("kind")
    if kind == "SliceCertificate":
        lines.append(f"slice:   {cert['slice']}")
        if cert.get("slice_original"):
            lines.append(f"slice in input coordinates: {cert['slice_original']}")
    elif kind == "GammaCertificate":
        lines += [f"ell:     {cert['ell']}", f"Gamma:   {cert['gamma']}", f"Theta:   {cert['theta']}",
                  f"R:       {cert['R']}", f"Z basis: {cert['z_groebner_basis']}"]
    elif kind == "CocycleWitness":
        lines += [f"side:    U{cert['side']}", f"charts:  {cert['pair']}",
                  f"non-unit factor of the norm: {cert['non_unit_factor']}",
                  f"vanishes at t = {', '.join(cert['vanishing_t']) or '(no rational point)'}",
                  f"t is the invariant {cert['invariant']}"]
    elif kind == "AtlasCertificate":
        for side, sa in cert["sides"].items():
            lines.append(f"U{side}: {len(sa['atlas']['sigmas'])} charts, separated = {sa['separatedness']['separated']}")
    if report.trail:
        lines.append("trail:")
        lines += [f"  {s.kind}: {s.note}" for s in report.trail]
    if timings and report.timings:
        lines.append("timings: " + ", ".join(f"{k}={v:.3f}s" for k, v in report.timings.items()))
    return "\n".join(lines) + "\n"


def replay_certificate(report: dict) -> bool:
    """Re-check the certificate of a JSON report without searching."""
    verdict = report["verdict"]
    cert = report["certificate"]
    kind = cert.get("kind")
    if verdict == "Translation":
        doc = cert["derivation"]
        cls = TriangularDerivation if "q" in doc else TwinDerivation
        d = cls(*_rebuild_args(doc), variables=tuple(cert["variables"]))
        if apply_derivation(d, MPoly.parse(cert["slice"], d.vars)) != 1:
            return False
        if cert.get("slice_original"):
            orig = from_dict(report["input"])
            return apply_derivation(orig, MPoly.parse(cert["slice_original"], orig.vars)) == 1
        return True
    if kind == "GammaCertificate":
        return replay_gamma_certificate(cert)
    if kind == "CocycleWitness":
        return replay_atlas_certificate(cert)
    if verdict == "NotFixedPointFree":
        return not fpf_oracle(from_dict(report["input"]))
    raise SchemaError(f"no replay for verdict {verdict!r}")


def _rebuild_args(doc):
    if "q" in doc:
        return doc["n"], doc["q"], doc["p"]
    return doc["n"], doc["p_plus"], doc["p_minus"]
