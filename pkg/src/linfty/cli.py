"""Command line front end.

Exit codes: 0 all checks passed, 1 a verification failed, 2 input or usage error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction

from . import io
from .brackets import SymBrackets, check_linfty1_jacobi, check_linfty_jacobi, decalage, decalage_inv
from .errors import InputError, KernelError, NotADerivationError
from .fields import CoordinateSystem, brackets_to_field, derived_brackets, is_homological
from .graded import Element, GradedBasis
from .report import Report

COMMANDS = ("check-jacobi", "decalage", "derived-brackets", "brackets-to-field", "check-action",
            "verify-triple", "gauge", "build-extension", "is-semidirect", "cocycle", "adjoint",
            "rephom", "algebroid-extend")


class Outcome:
    def __init__(self):
        self.reports: list[Report] = []
        self.outputs: dict = {}
        self.document: dict | None = None

    def check(self, report: Report) -> Report:
        self.reports.append(report)
        return report


def _with_arity(S, args):
    return S.with_max_arity(args.max_arity) if args.max_arity else S


# -- commands ----------------------------------------------------------------------------

def cmd_check_jacobi(sf, args, out: Outcome):
    S = _with_arity(sf.brackets, args)
    checker = check_linfty1_jacobi if sf.convention == "linfty1" else check_linfty_jacobi
    out.check(checker(S))


def cmd_decalage(sf, args, out: Outcome):
    if sf.convention == "linfty":
        T = decalage(sf.brackets)
        back = decalage_inv(T)
    else:
        T = decalage_inv(sf.brackets)
        back = decalage(T)
    r = out.check(Report("decalage-round-trip"))
    if back != sf.brackets:
        r.add("round trip", "inverse does not recover the input")
    out.document = io.structure_document(T, options=sf.options)


def cmd_derived_brackets(sf, args, out: Outcome):
    if "field" not in sf.blocks:
        raise InputError("derived-brackets needs a 'field' block")
    coords = CoordinateSystem(sf.sym().base, args.weight_cutoff)
    Q = io.field_in(coords, sf.blocks["field"], "/field")
    out.check(is_homological(Q))
    S = derived_brackets(Q, args.max_arity)
    out.document = io.structure_document(S, options=sf.options)


def cmd_brackets_to_field(sf, args, out: Outcome):
    S = sf.sym()
    Q = brackets_to_field(S, args.weight_cutoff)
    out.check(is_homological(Q))
    out.document = io.structure_document(S, options=sf.options, blocks={"field": io.field_out(Q)})


def cmd_check_action(sf, args, out: Outcome):
    from .actions import check_action_mc, check_compatible

    datum, Q_M, hb = io.action_in(sf, args.weight_cutoff)
    out.check(check_action_mc(datum))
    if Q_M is None and hb is not None:
        Q_M = brackets_to_field(hb, args.weight_cutoff)
    if Q_M is not None:
        out.check(check_compatible(datum, Q_M))


def cmd_verify_triple(sf, args, out: Outcome):
    from .actions import verify_equivalence_triple

    datum, _, _ = io.action_in(sf, args.weight_cutoff)
    out.check(verify_equivalence_triple(datum))


def cmd_gauge(sf, args, out: Outcome):
    from .gauge import (GaugeParameter, check_mc, gauge_transform, gauge_transform_left_form,
                        isomorphism_from_gauge)

    datum, Q_M, hb = io.action_in(sf, args.weight_cutoff)
    if "gauge_lambda" not in sf.blocks:
        raise InputError("gauge needs a 'gauge_lambda' block")
    lam = GaugeParameter(datum.space,
                         io.field_in(datum.space.coords, sf.blocks["gauge_lambda"], "/gauge_lambda"))
    before = check_mc(datum)
    before.name = "maurer-cartan-input"
    out.check(before)
    new = gauge_transform(datum, lam)
    after = check_mc(new)
    after.name = "maurer-cartan-transformed"
    out.check(after)
    r = out.check(Report("closed-forms-agree"))
    left = gauge_transform_left_form(datum, lam)
    if left != new.X:
        r.add("left form - closed form", left - new.X, left - new.X)
    back = gauge_transform(new, -lam)
    r = out.check(Report("inverse"))
    if back.X != datum.X:
        r.add("gauge by -lambda after lambda", back.X - datum.X, back.X - datum.X)
    _, iso = isomorphism_from_gauge(datum, lam)
    out.check(iso)
    out.outputs["plus_class"] = lam.plus
    blocks = {"action": io.action_out(new, Q_M, hb),
              "gauge_lambda": io.field_out(lam.lam)}
    out.document = io.structure_document(sf.brackets, sf.convention, sf.options, blocks)


def _extension_from_action(sf, args):
    from .extensions import build_extension

    datum, _, hb = io.action_in(sf, args.weight_cutoff)
    if hb is None:
        raise InputError("build-extension needs 'M_brackets' (the brackets of h[1]) in the action")
    return build_extension(datum, hb)


def _extension_from_block(sf):
    from .extensions import ExtensionStructure

    S = sf.sym()
    labels = sf.blocks["extension"]["g"]
    n = len(labels)
    if tuple(labels) != S.base.labels[:n]:
        raise InputError("/extension/g: g labels must be the leading block of the space")
    gb = GradedBasis(list(S.base)[:n])
    hb = GradedBasis(list(S.base)[n:])
    gt, ht = {}, {}
    for k, word, v in S.entries():
        if all(i < n for i in word):
            gv = Element(gb, {i: c for i, c in v.coords.items() if i < n})
            if gv:
                gt.setdefault(k, {})[word] = gv
        elif all(i >= n for i in word):
            hv = Element(hb, {i - n: c for i, c in v.coords.items() if i >= n})
            if hv:
                ht.setdefault(k, {})[tuple(i - n for i in word)] = hv
    return ExtensionStructure(S, SymBrackets(gb, gt, S.max_arity), SymBrackets(hb, ht, S.max_arity))


def _extension_document(ext, sf):
    return io.structure_document(ext.brackets, "linfty1", sf.options,
                                 {"extension": {"g": list(ext.g.base.labels)}})


def cmd_build_extension(sf, args, out: Outcome):
    ext = _extension_from_action(sf, args)
    out.check(ext.check_strictness())
    out.check(check_linfty1_jacobi(_with_arity(ext.brackets, args)))
    out.document = _extension_document(ext, sf)


def cmd_is_semidirect(sf, args, out: Outcome):
    from .extensions import is_semidirect

    ext = _extension_from_block(sf) if "extension" in sf.blocks else _extension_from_action(sf, args)
    out.check(ext.check_strictness())
    ok, witness = is_semidirect(ext)
    r = out.check(Report("semidirect"))
    for w in witness:
        r.add("g[1] is not a subalgebra", w)


def cmd_cocycle(sf, args, out: Outcome):
    from .extensions import check_cocycle_extension, check_nonabelian_cocycle, cocycle_lie_algebra

    co = io.cocycle_in(sf)
    try:
        rep = out.check(check_nonabelian_cocycle(co))
    except NotADerivationError as exc:
        r = out.check(Report("nonabelian-cocycle"))
        r.add("derivation property", str(exc))
        return
    if rep.ok:
        out.check(check_cocycle_extension(co))
        out.document = io.structure_document(cocycle_lie_algebra(co), "linfty", sf.options)


def cmd_adjoint(sf, args, out: Outcome):
    from .modules import adjoint_module, check_module

    g = _with_arity(sf.sym(), args)
    ad = adjoint_module(g)
    out.check(ad.report)
    out.check(check_module(ad.module, ad.dg, args.max_arity and 2 * args.max_arity))
    out.document = io.structure_document(ad.module.g, "linfty", sf.options,
                                         {"module": io.module_out(ad.module, ad.dg)})


def cmd_rephom(sf, args, out: Outcome):
    from .modules import (check_module, check_rephom, module_to_rephom, rephom_to_module)

    if "module" in sf.blocks:
        mod, dg = io.module_in(sf)
        m = out.check(check_module(mod, dg))
        rep = module_to_rephom(mod, dg)
        r = out.check(check_rephom(rep))
        agree = out.check(Report("verdicts-agree"))
        if m.ok != r.ok:
            agree.add("module axioms vs D^2 = 0", f"{m.ok} vs {r.ok}")
        blocks = {"rephom": io.rephom_out(rep)}
    elif "rephom" in sf.blocks:
        rep = io.rephom_in(sf)
        r = out.check(check_rephom(rep))
        blocks = {"rephom": io.rephom_out(rep)}
        if r.ok:
            mod, dg = rephom_to_module(rep)
            out.check(check_module(mod, dg))
            blocks["module"] = io.module_out(mod, dg)
    else:
        raise InputError("rephom needs a 'module' or a 'rephom' block")
    out.document = io.structure_document(sf.skew(), "linfty", sf.options, blocks)


def cmd_algebroid_extend(sf, args, out: Outcome):
    from .algebroids import (build_algebroid_extension, canonical_lambda, check_algebroid_axioms,
                             check_algebroid_extension, check_algebroid_pair,
                             check_twist_isomorphism, product_pair,
                             verify_algebroid_iso_equivalence)

    A = io.algebroid_in(sf)
    out.check(check_algebroid_axioms(A))
    pair = io.pair_in(sf, A)
    rep = out.check(check_algebroid_pair(pair))
    if not rep.ok:
        return
    out.check(check_algebroid_extension(pair))
    if "twist" in sf.blocks:
        out.check(check_twist_isomorphism(pair))
        out.check(verify_algebroid_iso_equivalence(product_pair(pair.g, A), pair,
                                                   canonical_lambda(pair)))
    ext = build_algebroid_extension(pair)
    out.document = io.structure_document(sf.skew(), "linfty", sf.options,
                                         {"algebroid": io.algebroid_out(ext)})


HANDLERS = {
    "check-jacobi": cmd_check_jacobi, "decalage": cmd_decalage,
    "derived-brackets": cmd_derived_brackets, "brackets-to-field": cmd_brackets_to_field,
    "check-action": cmd_check_action, "verify-triple": cmd_verify_triple, "gauge": cmd_gauge,
    "build-extension": cmd_build_extension, "is-semidirect": cmd_is_semidirect,
    "cocycle": cmd_cocycle, "adjoint": cmd_adjoint, "rephom": cmd_rephom,
    "algebroid-extend": cmd_algebroid_extend,
}


# -- rendering ---------------------------------------------------------------------------

def _jsonable(value):
    if isinstance(value, Fraction):
        return io.scalar_out(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if value is None or isinstance(value, (bool, int, str)):
        return value
    return str(value)


def build_payload(command, digest, args, outcome: Outcome, code: int, elapsed=None) -> dict:
    payload = {
        "command": command,
        "input_sha256": digest,
        "effective": {"max_arity": args.max_arity, "weight_cutoff": args.weight_cutoff},
        "checks": [_jsonable(r.to_dict()) for r in outcome.reports],
        "verdict": "pass" if code == 0 else "fail",
        "exit_code": code,
    }
    if outcome.outputs:
        payload["outputs"] = _jsonable(outcome.outputs)
    if outcome.document is not None and args.out is None:
        payload["document"] = outcome.document
    if elapsed is not None:
        payload["timing_seconds"] = round(elapsed, 6)
    return payload


def render_report(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return io.dumps(payload)
    lines = [f"command: {payload['command']}"]
    eff = payload["effective"]
    lines.append(f"effective max_arity: {eff['max_arity'] if eff['max_arity'] else 'default'}, "
                 f"weight_cutoff: {eff['weight_cutoff'] if eff['weight_cutoff'] else 'none'}")
    for r in payload["checks"]:
        lines.append(f"{r['name']}: {'pass' if r['passed'] else 'FAIL'}")
        for v in r["violations"]:
            lines.append(f"  {v['where']}: {v['residual']}")
        for k, v in r["notes"].items():
            lines.append(f"  note {k}: {json.dumps(v, sort_keys=True)}")
    for k, v in payload.get("outputs", {}).items():
        lines.append(f"{k}: {json.dumps(v, sort_keys=True)}")
    if "document" in payload:
        lines.append("document:")
        lines.append(io.dumps(payload["document"]).rstrip("\n"))
    if "timing_seconds" in payload:
        lines.append(f"timing: {payload['timing_seconds']}s")
    lines.append("all checks passed" if payload["exit_code"] == 0 else "verification failed")
    lines.append(f"exit code: {payload['exit_code']}")
    return "\n".join(lines) + "\n"


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="linfty", description="Exact verification of L-infinity "
                                "structures, actions, gauge equivalences and extensions.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("file", help="structure file (JSON), or - for stdin")
    p.add_argument("--max-arity", type=int, default=None, metavar="N")
    p.add_argument("--weight-cutoff", type=int, default=None, metavar="N")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", default=None, metavar="PATH|-",
                   help="write the produced structure file here (- for stdout)")
    p.add_argument("--timing", action="store_true", help="add wall-clock timing to the report")
    return p


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = _parser().parse_args(argv)
    for name in ("max_arity", "weight_cutoff"):
        v = getattr(args, name)
        if v is not None and v < 1:
            print(f"error: --{name.replace('_', '-')} must be positive", file=stderr)
            return 2
    start = time.perf_counter()
    outcome = Outcome()
    try:
        doc = io.load_json(args.file)
        sf = io.parse_document(doc)
        if args.max_arity is None:
            args.max_arity = sf.options.get("max_arity")
        if args.weight_cutoff is None:
            args.weight_cutoff = sf.options.get("weight_cutoff")
        digest = hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()
        HANDLERS[args.command](sf, args, outcome)
    except InputError as exc:
        _emit_error(args, str(exc), stdout, stderr)
        return 2
    except KernelError as exc:
        outcome.reports.append(Report("kernel", notes={"error": str(exc)}))
        outcome.reports[-1].add("internal consistency", str(exc))
    code = 0 if all(r.ok for r in outcome.reports) else 1
    elapsed = time.perf_counter() - start if args.timing else None
    payload = build_payload(args.command, digest, args, outcome, code, elapsed)
    report_stream = stdout
    if args.out is not None and outcome.document is not None:
        text = io.dumps(outcome.document)
        if args.out == "-":
            stdout.write(text)
            report_stream = stderr
        else:
            try:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(text)
            except OSError as exc:
                print(f"error: cannot write {args.out}: {exc.strerror or exc}", file=stderr)
                return 2
    report_stream.write(render_report(payload, args.format))
    return code


def _emit_error(args, message: str, stdout, stderr):
    if args.format == "json":
        stdout.write(io.dumps({"command": args.command, "error": message, "exit_code": 2}))
    print(f"error: {message}", file=stderr)


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
