"""
Command dispatcher and report emitter.

    qhgeom COMMAND [NAMES...] (--doc FILE | --example NAME) [--field F]
           [--order N] [--suite NAME] [--json PATH] [--seed N]

Exit status: 0 when every check passes, 1 when some check fails, 2 on
input errors (unreadable or invalid documents, unknown names, missing
pieces a command needs).
"""

import argparse
import json
import sys

from ..exactcore import ExactError, field_from_name
from ..algmod import hom_A
from .document import SpecError, convert_field, dumps, parse_spec
from .examples import UnknownExample, list_examples, load_example
from .suites import SUITES, InputError, Section, suite_requirements
from .workspace import Workspace


COMMANDS = {
    "validate": ["quasi-hopf-axioms", "algebra-and-bimodule"],
    "derivations": ["derivations"],
    "diffops": ["diff-filtration"],
    "connections": ["connections"],
    "sum-connection": ["sum-connection-descent"],
    "hom-connection": ["hom-connection-descent"],
    "curvature": ["curvature"],
    "bianchi": ["bianchi"],
    "trace": ["trace"],
    "twist": ["twisting"],
}
OTHER_COMMANDS = ["hom-a", "check", "report", "list", "dump", "suites"]


class Report(object):
    """Ordered sections plus the header describing the run."""

    def __init__(self, doc, command, flags):
        self.header = {"document": doc.name, "field": repr(doc.field), "command": command,
                       "flags": flags}
        self.sections = []

    @property
    def passed(self):
        return all(s.passed for s in self.sections)

    def as_json(self):
        out = dict(self.header)
        out["passed"] = self.passed
        out["sections"] = [s.as_json() for s in self.sections]
        return out

    def to_json(self):
        return dumps(self.as_json())

    def summary(self):
        lines = ["%s: %s on %s" % ("PASS" if self.passed else "FAIL", self.header["command"],
                                   self.header["document"])]
        for s in self.sections:
            if s.skipped:
                lines.append("  [%s] skipped: %s" % (s.suite, s.skipped))
            for name, ok, w in s.checks:
                lines.append("  %-4s [%s] %s%s" % ("ok" if ok else "FAIL", s.suite, name,
                                                  "" if ok else "  witness=%s" % (w,)))
            for k, v in sorted(s.facts.items()):
                lines.append("       [%s] %s = %s" % (s.suite, k, json.dumps(_plain(v))))
        return "\n".join(lines)


def _plain(v):
    from .suites import jsonable
    return jsonable(v)


def run_command(doc, command, flags=None, names=()):
    """Run one command on a parsed document and return a Report.  Raises
    SpecError / InputError for input problems."""
    flags = dict(flags or {})
    opts = {"order": flags.get("order"), "seed": flags.get("seed", 0)}
    ws = Workspace(doc)
    rep = Report(doc, command, {k: flags[k] for k in sorted(flags) if flags[k] is not None})
    if command in COMMANDS:
        if command == "diffops" and opts["order"] is None:
            raise InputError("diffops needs --order N")
        suites = COMMANDS[command]
    elif command == "check":
        name = flags.get("suite")
        if name not in SUITES:
            raise InputError("unknown suite %r (see `qhgeom suites`)" % (name,))
        suites = [name]
    elif command == "report":
        suites = suite_requirements(ws)
    elif command == "hom-a":
        rep.sections.append(_hom_a(ws, names))
        return rep
    else:
        raise InputError("unknown command %r" % (command,))
    for name in suites:
        rep.sections.append(SUITES[name][1](ws, opts))
    return rep


def _hom_a(ws, names):
    if ws.V is None:
        raise InputError("the document declares no bimodule over its algebra")
    names = list(names) or [ws.V.name, ws.V.name]
    if len(names) != 2:
        raise InputError("hom-a takes two bimodule names")
    mods = []
    for n in names:
        if n not in ws.bimodules:
            raise InputError("unknown bimodule %r" % n)
        V = ws.bimodules[n]
        if ws.twisted:
            if V is not ws.V:
                raise InputError("only the twisted main bimodule is available")
            V = ws.VF
        mods.append(V)
    s = Section.__new__(Section)
    s.suite, s.description = "hom-a", "hom_A(V, W) as the kernel of the curried A-linearity condition"
    s.checks, s.facts, s.skipped = [], {}, None
    h = hom_A(*mods)
    s.facts["dims"] = {int(k): int(v) for k, v in h.sub.dims.items()} if h.dim else {}
    s.facts["dim"] = h.dim
    s.check("hom_A(V, W) is an H-submodule", h.sub.is_stable())
    return s


def _help_epilog():
    lines = ["commands:"]
    for c in sorted(list(COMMANDS) + OTHER_COMMANDS):
        lines.append("  " + c)
    lines.append("")
    lines.append("suites (check --suite NAME):")
    for name, (desc, _) in SUITES.items():
        lines.append("  %-24s %s" % (name, desc))
    lines.append("")
    lines.append("examples (--example NAME): " + ", ".join(list_examples()))
    return "\n".join(lines)


def _parser():
    p = argparse.ArgumentParser(prog="qhgeom", description="Exact checks for noncommutative and "
                                "nonassociative differential geometry over quasi-Hopf algebras.",
                                epilog=_help_epilog(),
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("command", choices=sorted(list(COMMANDS) + OTHER_COMMANDS))
    p.add_argument("names", nargs="*", help="bimodule names (hom-a V W, connections V)")
    p.add_argument("--doc", help="JSON input document")
    p.add_argument("--example", help="built-in example")
    p.add_argument("--field", help="override the field (Q or GF(p))")
    p.add_argument("--order", type=int, help="maximal order of differential operators")
    p.add_argument("--suite", help="suite for `check`")
    p.add_argument("--all", action="store_true", help="all applicable suites (report)")
    p.add_argument("--json", help="write the machine-readable report here ('-' for stdout)")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    return p


def _load(args):
    if (args.doc is None) == (args.example is None):
        raise InputError("give exactly one of --doc FILE and --example NAME")
    if args.example is not None:
        try:
            doc = load_example(args.example)
        except UnknownExample:
            raise InputError("unknown example %r; known: %s"
                             % (args.example, ", ".join(list_examples())))
    else:
        try:
            with open(args.doc, "rb") as f:
                raw = f.read()
        except OSError as e:
            raise InputError("cannot read %s: %s" % (args.doc, e.strerror))
        doc = parse_spec(raw)
    if args.field is not None:
        try:
            F = field_from_name(args.field)
        except ValueError as e:
            raise InputError(str(e))
        doc = convert_field(doc, F)
    return doc


def main(argv=None, stdout=None, stderr=None):
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    p = _parser()
    try:
        args = p.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        if args.command == "list":
            out.write("\n".join(list_examples()) + "\n")
            return 0
        if args.command == "suites":
            for name, (desc, _) in SUITES.items():
                out.write("%-24s %s\n" % (name, desc))
            return 0
        doc = _load(args)
        if args.command == "dump":
            out.write(doc.to_json())
            return 0
        if args.command == "report" and not args.all:
            raise InputError("report needs --all")
        if args.command == "connections" and args.names:
            if args.names != [doc.data.get("bimodules", [{}])[0].get("name")]:
                raise InputError("connections are computed on the main bimodule only")
        flags = {"order": args.order, "seed": args.seed, "suite": args.suite,
                 "field": args.field, "example": args.example}
        rep = run_command(doc, args.command, flags, args.names)
    except (SpecError, InputError) as e:
        err.write("input error: %s\n" % e)
        return 2
    except ExactError as e:
        err.write("input error: %s: %s\n" % (type(e).__name__, e))
        return 2
    text = rep.to_json()
    if args.json == "-":
        out.write(text)
    else:
        out.write(rep.summary() + "\n")
        if args.json:
            with open(args.json, "w", encoding="utf-8") as f:
                f.write(text)
    return 0 if rep.passed else 1


def entry():
    sys.exit(main())
