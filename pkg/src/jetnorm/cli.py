"""Command-line front end.

Exit codes: 0 computed, 2 size guardrail hit, 3 invalid input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field as dc_field
from pathlib import Path

from . import config
from .errors import GuardrailError, InvalidInputError, ParseError
from .gradedlin import v_space, w_complement
from .groups import GroupElementJet, GroupKind, act
from .jets import MatrixJet, constant_part
from .normalform import (check_pde, constant_preprocess, determinacy_report, jet_equivalence, normal_form,
                         one_variable_nf, verify_certificate)
from .parser import parse_poly_matrix
from .scalars import Field, field_from_name, format_scalar, real_part

EXIT_OK = 0
EXIT_GUARDRAIL = 2
EXIT_INVALID = 3

COMMANDS = ("nf", "verify-pde", "determinacy", "equiv", "smith")


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


@dataclass
class ProblemSpec:
    source: str
    variables: list
    trunc_order: int = config.DEFAULT_ORDER
    kind: GroupKind = GroupKind.TWO_SIDED
    field: Field = Field.RATIONAL
    params: dict = dc_field(default_factory=dict)

    @property
    def p(self) -> int:
        return len(self.variables)


def read_source(source: str) -> str:
    if source == "-":
        return sys.stdin.read()
    if source.lstrip().startswith("["):
        return source
    path = Path(source)
    if not path.is_file():
        raise InvalidInputError(f"no such matrix file: {source}")
    return path.read_text()


def load_matrix(spec: ProblemSpec, source: str | None = None, notices: list | None = None) -> MatrixJet:
    text = read_source(spec.source if source is None else source)
    return parse_poly_matrix(text, spec.variables, spec.trunc_order, spec.field, notices)


# --------------------------------------------------------------------------
# report pieces


def matrix_json(A: MatrixJet, names) -> dict:
    return {"text": A.to_text(names), "rows": A.rows, "cols": A.cols, "entries": A.to_json()}


def element_json(g: GroupElementJet, names) -> dict:
    out = {"kind": g.kind.value, "U": matrix_json(g.U, names)}
    if g.kind in (GroupKind.RIGHT, GroupKind.TWO_SIDED):
        out["V"] = matrix_json(g.V, names)
    return out


def pde_json(report, names) -> dict:
    rels = []
    for rel in report.relations:
        fn = None
        if rel.first_nonzero is not None:
            r, c, e, val = rel.first_nonzero
            fn = {"row": r + 1, "col": c + 1, "exps": list(e), "value": format_scalar(val)}
        rels.append({"name": rel.name, "passed": rel.passed, "first_nonzero": fn})
    return {"k": report.k, "passed": report.passed, "relations": rels}


def _leading_degree(B: MatrixJet, kind: GroupKind):
    X = B
    if kind is GroupKind.CONJUGACY:
        A0 = constant_part(B)
        lam = A0[0][0]
        if any(c != (lam if i == k else 0) for i, row in enumerate(A0) for k, c in enumerate(row)):
            return None
        X = B - MatrixJet.identity(B.rows, B.p, B.trunc_order).scale(lam)
    val = X.valuation()
    return None if val == float("inf") else int(val)


# --------------------------------------------------------------------------
# commands


def cmd_nf(spec: ProblemSpec, explain: bool = False, full_g: bool = False) -> dict:
    notices: list = []
    A = load_matrix(spec, notices=notices)
    names = spec.variables
    out = {"input": matrix_json(A, names), "preprocess": None}
    start = A
    if full_g:
        g0, start = constant_preprocess(A, spec.kind)
        out["preprocess"] = element_json(g0, names)
    res = normal_form(start, spec.kind)
    check = verify_certificate(res)
    out.update({
        "normal_form": matrix_json(res.B, names),
        "certificate": element_json(res.certificate, names),
        "verified": bool(check),
        "degrees": [{"j": s.j, "dim_v": s.dim_v, "dim_w": s.dim_w,
                     "residual_norm2": format_scalar(real_part(s.residual_norm2))} for s in res.log],
        "warnings": notices + list(res.warnings) + list(check.problems),
    })
    k = _leading_degree(res.B, spec.kind)
    out["pde"] = pde_json(check_pde(res.B, k, spec.kind), names) if k is not None else None
    if explain:
        dumps = []
        for j in range(1, res.B.trunc_order + 1):
            V = v_space(res.B, spec.kind, j)
            dumps.append(f"degree {j}: V\n{V.dump()}\ndegree {j}: W\n{w_complement(V).dump()}")
        out["explain"] = dumps
    return out


def cmd_verify_pde(spec: ProblemSpec) -> dict:
    notices: list = []
    B = load_matrix(spec, notices=notices)
    report = check_pde(B, spec.params["k"], spec.kind)
    return {"input": matrix_json(B, spec.variables), **pde_json(report, spec.variables), "warnings": notices}


def cmd_determinacy(spec: ProblemSpec) -> dict:
    notices: list = []
    A = load_matrix(spec, notices=notices)
    k = spec.params["k"]
    j_max = spec.params.get("j_max") or spec.trunc_order
    rep = determinacy_report(A, spec.kind, k, j_max)
    verdicts = []
    for v in rep.verdicts:
        item = {"j": v.j, "contained": v.contained, "missing_dim": v.missing_dim,
                "trace_obstruction": v.trace_obstruction}
        verdicts.append(item)
    if spec.kind is GroupKind.CONJUGACY and any(v.trace_obstruction for v in rep.verdicts):
        notices.append("trace obstruction: the image contains no multiple of x^I*1, since "
                       "trace(nu A - A nu) = 0 for every nu")
    return {"input": matrix_json(A, spec.variables), "k": k, "j_max": j_max, "verdicts": verdicts,
            "first_failure": rep.first_failure, "summary": rep.summary(), "warnings": notices}


def cmd_equiv(spec: ProblemSpec) -> dict:
    notices: list = []
    A = load_matrix(spec, notices=notices)
    B = load_matrix(spec, spec.params["target"], notices)
    j = spec.params.get("j")
    j = spec.trunc_order if j is None else j
    g = jet_equivalence(A, B, spec.kind, j, seed=spec.params.get("seed", 0))
    out = {"input": matrix_json(A, spec.variables), "target": matrix_json(B, spec.variables), "j": j,
           "found": g is not None, "witness": None, "warnings": notices}
    if g is not None:
        out["witness"] = element_json(g, spec.variables)
        out["verified"] = act(g, A).project(j) == B.project(j)
    return out


def cmd_smith(spec: ProblemSpec) -> dict:
    if spec.p != 1:
        raise InvalidInputError("smith needs exactly one variable")
    notices: list = []
    A = load_matrix(spec, notices=notices)
    res = one_variable_nf(A)
    ok = act(GroupElementJet(res.U, res.V, GroupKind.TWO_SIDED), A) == res.B
    if any(e is None for e in res.exponents):
        notices.append(f"some diagonal entries vanish through degree {A.trunc_order}")
    return {"input": matrix_json(A, spec.variables), "normal_form": matrix_json(res.B, spec.variables),
            "U": matrix_json(res.U, spec.variables), "V": matrix_json(res.V, spec.variables),
            "exponents": list(res.exponents), "verified": ok, "warnings": notices}


# --------------------------------------------------------------------------
# text rendering


def render_text(command: str, rep: dict) -> str:
    lines = [f"input: {rep['input']['text']}"]
    if command == "nf":
        if rep.get("preprocess"):
            lines.append(f"constant preprocessing U0: {rep['preprocess']['U']['text']}")
        lines.append(f"normal form: {rep['normal_form']['text']}")
        cert = rep["certificate"]
        lines.append(f"certificate U: {cert['U']['text']}")
        if "V" in cert:
            lines.append(f"certificate V: {cert['V']['text']}")
        lines.append(f"certificate verified: {rep['verified']}")
        lines.append("  j  dim V  dim W  |v_j|^2")
        for d in rep["degrees"]:
            lines.append(f"{d['j']:>3} {d['dim_v']:>6} {d['dim_w']:>6}  {d['residual_norm2']}")
        if rep.get("pde"):
            lines.extend(_pde_lines(rep["pde"]))
        for block in rep.get("explain", []):
            lines.append(block)
    elif command == "verify-pde":
        lines.extend(_pde_lines(rep))
    elif command == "determinacy":
        lines.append(f"k = {rep['k']}, degrees {rep['k'] + 1}..{rep['j_max']}")
        lines.append("  j  contained  missing  trace-obstruction")
        for v in rep["verdicts"]:
            lines.append(f"{v['j']:>3}  {str(v['contained']):>9}  {v['missing_dim']:>7}  {v['trace_obstruction']}")
        lines.append(rep["summary"])
    elif command == "equiv":
        lines.append(f"target: {rep['target']['text']}")
        if rep["found"]:
            w = rep["witness"]
            lines.append(f"witness U: {w['U']['text']}")
            if "V" in w:
                lines.append(f"witness V: {w['V']['text']}")
            lines.append(f"witness verified through degree {rep['j']}: {rep['verified']}")
        else:
            lines.append(f"no witness found through degree {rep['j']}")
    elif command == "smith":
        lines.append(f"normal form: {rep['normal_form']['text']}")
        lines.append(f"U: {rep['U']['text']}")
        lines.append(f"V: {rep['V']['text']}")
        lines.append(f"verified: {rep['verified']}")
    for w in rep.get("warnings", []):
        lines.append(f"warning: {w}")
    return "\n".join(lines)


def _pde_lines(pde: dict) -> list[str]:
    lines = [f"differential relations at k = {pde['k']}: {'pass' if pde['passed'] else 'FAIL'}"]
    for rel in pde["relations"]:
        if rel["passed"]:
            lines.append(f"  {rel['name']}: pass")
        else:
            fn = rel["first_nonzero"]
            lines.append(f"  {rel['name']}: fail at entry ({fn['row']},{fn['col']}), "
                         f"monomial {tuple(fn['exps'])}, coefficient {fn['value']}")
    return lines


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--vars", required=True, help="comma-separated variable names (defines x1..xp)")
    common.add_argument("--order", type=int, default=config.DEFAULT_ORDER, help="truncation order N")
    common.add_argument("--field", default="rational", help="rational (default) or gaussian")
    common.add_argument("--json", action="store_true", help="emit the JSON report")
    common.add_argument("-v", "--verbose", action="store_true")

    grp = argparse.ArgumentParser(add_help=False)
    grp.add_argument("--group", default="two-sided",
                     help="left, right, two-sided, conjugacy or congruence")

    parser = _ArgParser(prog="jetnorm", description="Normal forms of matrices of truncated power series.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgParser)

    p = sub.add_parser("nf", parents=[common, grp], help="jet-by-jet normal form with certificate")
    p.add_argument("--explain", action="store_true", help="dump the subspaces V and W per degree")
    p.add_argument("--full-g", action="store_true", help="reduce the constant term first (not unipotent)")
    p.add_argument("matrix")

    p = sub.add_parser("verify-pde", parents=[common, grp], help="check the differential relations")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("matrix")

    p = sub.add_parser("determinacy", parents=[common, grp], help="image-containment test per degree")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--j-max", type=int, default=None)
    p.add_argument("matrix")

    p = sub.add_parser("equiv", parents=[common, grp], help="search a jet-equivalence witness")
    p.add_argument("--j", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("matrix")
    p.add_argument("target")

    p = sub.add_parser("smith", parents=[common], help="one-variable two-sided diagonal form")
    p.add_argument("matrix")
    return parser


def run(command: str, spec: ProblemSpec, **flags) -> dict:
    if command == "nf":
        body = cmd_nf(spec, explain=flags.get("explain", False), full_g=flags.get("full_g", False))
    elif command == "verify-pde":
        body = cmd_verify_pde(spec)
    elif command == "determinacy":
        body = cmd_determinacy(spec)
    elif command == "equiv":
        body = cmd_equiv(spec)
    elif command == "smith":
        body = cmd_smith(spec)
    else:
        raise InvalidInputError(f"unknown command {command!r}")
    head = {"command": command, "field": spec.field.value, "vars": list(spec.variables),
            "order": spec.trunc_order}
    if command != "smith":
        head["group"] = spec.kind.value
    return {**head, **body}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        variables = [v.strip() for v in args.vars.split(",") if v.strip()]
        if not variables:
            raise InvalidInputError("--vars must name at least one variable")
        if args.order < 0:
            raise InvalidInputError("--order must be nonnegative")
        params = {}
        for key in ("k", "j_max", "j", "seed"):
            if getattr(args, key, None) is not None:
                params[key] = getattr(args, key)
        if args.command == "equiv":
            params["target"] = args.target
        spec = ProblemSpec(args.matrix, variables, args.order,
                           GroupKind.parse(getattr(args, "group", "two-sided")),
                           field_from_name(args.field), params)
        report = run(args.command, spec, explain=getattr(args, "explain", False),
                     full_g=getattr(args, "full_g", False))
    except GuardrailError as exc:
        print(f"jetnorm: guardrail: {exc}", file=sys.stderr)
        return EXIT_GUARDRAIL
    except ParseError as exc:
        print(f"jetnorm: parse error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except InvalidInputError as exc:
        print(f"jetnorm: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(render_text(args.command, report))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
