"""Command-line front end.

Subcommands::

    dlq reason sat CONCEPT --kb FILE [--show-model]
    dlq reason sub C D --kb FILE
    dlq reason instance OBJ C --kb FILE
    dlq reason role SUBJ ROLE OBJ --kb FILE
    dlq query type QUERY --kb FILE [--strict] [--splice name=CONCEPT ...]
    dlq query run QUERY --kb FILE [--strict] [--splice name=IRI ...]
    dlq lang check PROGRAM --kb FILE [--mode full|tbox-only]
    dlq lang run PROGRAM --kb FILE [--mode full|tbox-only]

Concepts, roles and IRIs on the command line are written in the
knowledge-base text syntax and resolved against the KB's prefix table.
Exit codes: 0 success (including empty results), 1 type or validation
failure, 2 syntax error, 3 runtime fault, 4 environment problems such as
a missing KB file.  Errors print ``ERROR <category> <line>:<col>`` on the
first line, then prose.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Mapping

from .algebra import eval_algebraic, project, table_to_json
from .inference import (
    SpliceMismatch,
    Unsatisfiable,
    UntypedSelectVar,
    Valid,
    validate_query,
)
from .interpretation import Interpretation
from .kbtext import (
    ParseError,
    parse_concept,
    parse_kb,
    parse_role,
    print_concept,
    shorten,
)
from .lang import (
    EvalError,
    IriVal,
    BoolVal,
    ListVal,
    TupleVal,
    LangTypeError,
    Value,
    evaluate,
    parse_program,
    typecheck,
    type_name,
)
from .model import Atomic, Iri, KnowledgeBase, Nominal
from .query import IriElem, SelectQuery, parse_query, substitute_splices
from .reasoner import Reasoner

__all__ = ["main"]


class _Environment(Exception):
    pass


def _load_kb(path: str) -> KnowledgeBase:
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise _Environment(f"cannot read KB file {path!r}: {exc.strerror}") from exc
    return parse_kb(text)


def _emit_error(category: str, pos: tuple[int, int], message: str) -> None:
    print(f"ERROR {category} {pos[0]}:{pos[1]}", file=sys.stderr)
    print(message, file=sys.stderr)


def _parse_name(text: str, prefixes: Mapping[str, str]) -> Iri:
    concept = parse_concept(text, prefixes)
    if not isinstance(concept, Atomic):
        raise ParseError(1, 1, f"expected an object name, got {text!r}")
    return concept.iri


def _splice_pairs(pairs: list[str]) -> list[tuple[str, str]]:
    out = []
    for pair in pairs:
        name, eq, value = pair.partition("=")
        if not eq or not name or not value:
            raise ParseError(1, 1, f"--splice expects name=VALUE, got {pair!r}")
        out.append((name, value))
    return out


def _model_summary(interp: Interpretation, prefixes) -> dict:
    return {
        "domain": sorted(interp.domain),
        "concepts": {
            shorten(iri, prefixes): sorted(ext)
            for iri, ext in sorted(interp.concept_ext.items(), key=lambda kv: kv[0].value)
            if ext
        },
        "roles": {
            shorten(iri, prefixes): sorted(map(list, pairs))
            for iri, pairs in sorted(interp.role_ext.items(), key=lambda kv: kv[0].value)
            if pairs
        },
        "objects": {
            shorten(obj, prefixes): elem
            for obj, elem in sorted(interp.object_map.items(), key=lambda kv: kv[0].value)
        },
    }


# --- dlq reason -------------------------------------------------------------


def _cmd_reason(args) -> int:
    kb = _load_kb(args.kb)
    r = Reasoner(kb)
    p = kb.prefixes
    show_model = None
    if args.check == "sat":
        result = r.is_satisfiable(parse_concept(args.concept, p))
        answer = result.satisfiable
        if args.show_model and result.witness is not None:
            show_model = _model_summary(result.witness, p)
    elif args.check == "sub":
        answer = r.entails_subsumption(parse_concept(args.sub, p),
                                       parse_concept(args.sup, p))
    elif args.check == "instance":
        answer = r.entails_instance(_parse_name(args.obj, p),
                                    parse_concept(args.concept, p))
    else:
        answer = r.entails_role(_parse_name(args.subject, p),
                                parse_role(args.role, p),
                                _parse_name(args.obj, p))
    if args.output == "json":
        payload: dict = {"result": answer}
        if show_model is not None:
            payload["model"] = show_model
        print(json.dumps(payload))
    else:
        print("true" if answer else "false")
        if show_model is not None:
            print(json.dumps(show_model, indent=2))
    return 0


# --- dlq query --------------------------------------------------------------


def _validation_failure(outcome, prefixes) -> int:
    if isinstance(outcome, Unsatisfiable):
        _emit_error("E-SAT", (1, 1),
                    f"?{outcome.var.name} can never match: "
                    f"{print_concept(outcome.concept, prefixes)} is unsatisfiable")
    elif isinstance(outcome, UntypedSelectVar):
        _emit_error("E-SAT", (1, 1),
                    f"SELECT variable ?{outcome.var.name} occurs only under MINUS "
                    f"and has no inferred type")
    else:
        assert isinstance(outcome, SpliceMismatch)
        category = "E-SUB" if outcome.mode == "strict" else "E-SAT"
        verb = "is not subsumed by" if outcome.mode == "strict" else "cannot overlap"
        _emit_error(category, (1, 1),
                    f"splice ${outcome.splice}: "
                    f"{print_concept(outcome.declared, prefixes)} {verb} inferred "
                    f"{print_concept(outcome.inferred, prefixes)}")
    return 1


def _render_table(table, prefixes) -> str:
    headers = ["?" + v.name for v in table.columns]
    rows = [[shorten(cell, prefixes) if cell is not None else "-" for cell in row]
            for row in table.rows]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    for row in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines)


def _cmd_query(args) -> int:
    kb = _load_kb(args.kb)
    r = Reasoner(kb)
    p = kb.prefixes
    sq: SelectQuery = parse_query(args.query, p)
    mode = "strict" if args.strict else "nonstrict"
    pairs = _splice_pairs(args.splice or [])
    given = dict(pairs)
    missing = [s for s in sq.splices if s not in given]
    if missing:
        raise ParseError(1, 1, "missing --splice for: "
                         + ", ".join(f"${s}" for s in missing))

    if args.action == "type":
        splice_types = {name: parse_concept(text, p) for name, text in pairs
                        if name in sq.splices}
        outcome = validate_query(r, sq, splice_types, mode)
        if not isinstance(outcome, Valid):
            return _validation_failure(outcome, p)
        lines = []
        splice_var_names = {v.name for v in outcome.splice_vars.values()}
        for var in sorted(outcome.variable_concepts, key=lambda v: v.name):
            if var.name in splice_var_names:
                continue
            lines.append(f"?{var.name}: "
                         f"{print_concept(outcome.variable_concepts[var], p)}")
        for splice in sq.splices:
            lines.append(f"${splice}: {print_concept(outcome.splice_concepts[splice], p)}")
        if args.output == "json":
            print(json.dumps({
                "variables": {
                    v.name: print_concept(c, p)
                    for v, c in sorted(outcome.variable_concepts.items(),
                                       key=lambda kv: kv[0].name)
                    if v.name not in splice_var_names
                },
                "splices": {
                    s: print_concept(outcome.splice_concepts[s], p)
                    for s in sq.splices
                },
            }))
        else:
            print("\n".join(lines))
        return 0

    # run: spliced values are IRIs; they validate at their nominal types.
    values = {name: _parse_name(text, p) for name, text in pairs
              if name in sq.splices}
    splice_types = {name: Nominal(iri) for name, iri in values.items()}
    outcome = validate_query(r, sq, splice_types, mode)
    if not isinstance(outcome, Valid):
        return _validation_failure(outcome, p)
    body = substitute_splices(sq.body, {s: IriElem(v) for s, v in values.items()})
    table = project(eval_algebraic(r, body), sq.select_vars)
    if args.output == "json":
        print(table_to_json(table))
    else:
        print(_render_table(table, p))
    return 0


# --- dlq lang ---------------------------------------------------------------


def _value_to_json(v: Value):
    if isinstance(v, IriVal):
        return v.iri.value
    if isinstance(v, BoolVal):
        return v.value
    assert isinstance(v, (ListVal, TupleVal))
    return [_value_to_json(i) for i in v.items]


def _render_value(v: Value, prefixes) -> str:
    if isinstance(v, IriVal):
        return shorten(v.iri, prefixes)
    if isinstance(v, BoolVal):
        return "true" if v.value else "false"
    if isinstance(v, ListVal):
        return "[" + ", ".join(_render_value(i, prefixes) for i in v.items) + "]"
    assert isinstance(v, TupleVal)
    return "(" + ", ".join(_render_value(i, prefixes) for i in v.items) + ")"


def _cmd_lang(args) -> int:
    kb = _load_kb(args.kb)
    r = Reasoner(kb)
    try:
        with open(args.program, encoding="utf-8") as handle:
            source = handle.read()
    except OSError as exc:
        raise _Environment(
            f"cannot read program file {args.program!r}: {exc.strerror}") from exc
    program = parse_program(source)
    mode = "tbox_only" if args.mode == "tbox-only" else "full"
    typecheck(r, program, mode)

    if args.action == "check":
        if args.output == "json":
            print(json.dumps({"ok": True,
                              "definitions": list(program.definitions)}))
        else:
            for name in program.definitions:
                d = program.definitions[name]
                params = ", ".join(type_name(t, kb.prefixes) for _, t in d.params)
                print(f"OK {name}({params}): {type_name(d.return_type, kb.prefixes)}")
            print("OK main")
        return 0

    value = evaluate(r, program)
    if args.output == "json":
        print(json.dumps(_value_to_json(value)))
    else:
        print(_render_value(value, kb.prefixes))
    return 0


# --- argument parsing ---------------------------------------------------------


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--kb", required=True, help="knowledge base file (.kb)")
    parser.add_argument("--mode", choices=["full", "tbox-only"], default="full",
                        help="whether assertional data is used at check time")
    parser.add_argument("--output", choices=["text", "json"], default="text")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dlq",
        description="Reason over DL knowledge bases, type and run queries, "
                    "check and run programs.")
    commands = parser.add_subparsers(dest="command", required=True)

    reason = commands.add_parser("reason", help="entailment checks")
    checks = reason.add_subparsers(dest="check", required=True)
    sat = checks.add_parser("sat", help="concept satisfiability")
    sat.add_argument("concept")
    sat.add_argument("--show-model", action="store_true")
    _common(sat)
    sub = checks.add_parser("sub", help="subsumption")
    sub.add_argument("sub")
    sub.add_argument("sup")
    _common(sub)
    inst = checks.add_parser("instance", help="instance entailment")
    inst.add_argument("obj")
    inst.add_argument("concept")
    _common(inst)
    role = checks.add_parser("role", help="role entailment")
    role.add_argument("subject")
    role.add_argument("role")
    role.add_argument("obj")
    _common(role)

    query = commands.add_parser("query", help="type or run a query")
    actions = query.add_subparsers(dest="action", required=True)
    for action in ("type", "run"):
        q = actions.add_parser(action)
        q.add_argument("query")
        q.add_argument("--strict", action="store_true")
        q.add_argument("--splice", action="append", metavar="NAME=VALUE",
                       help="declared concept (type) or IRI value (run) per splice")
        _common(q)

    lang = commands.add_parser("lang", help="check or run a program")
    actions = lang.add_subparsers(dest="action", required=True)
    for action in ("check", "run"):
        l = actions.add_parser(action)
        l.add_argument("program")
        _common(l)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "reason":
            return _cmd_reason(args)
        if args.command == "query":
            return _cmd_query(args)
        return _cmd_lang(args)
    except ParseError as exc:
        _emit_error("E-SYNTAX", (exc.line, exc.column), exc.message)
        return 2
    except LangTypeError as exc:
        _emit_error(exc.category, exc.pos, exc.message)
        return 1
    except EvalError as exc:
        _emit_error("E-RUNTIME", exc.pos, exc.message)
        return 3
    except RecursionError:
        # Recursion in programs is permitted and unchecked; a runaway one
        # is a runtime fault, not a crash.
        _emit_error("E-RUNTIME", (1, 1), "recursion depth exceeded")
        return 3
    except _Environment as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
