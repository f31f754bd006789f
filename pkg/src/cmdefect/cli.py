"""Session-file driver.

A session is a text file of declarations and commands run top to bottom::

    ring Q[X,Y,Z] grevlex
    ideal J = X*Z, Y*Z, Z^2
    compute A = quotient J
    invariants A
    check Sn n=1 on A --expect no

Exit status: 0 on success, 1 when a ``check`` contradicts its ``--expect``,
2 on a syntax or engine error.  In ``--json`` mode every command prints one
JSON document per line; infinities are written as the strings "+inf"/"-inf".
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import dataclass, field

from .corpus import Bounds, CorpusSpec, verify_statements
from .groebner import Ideal, ideal_combine
from .invariants import cm_defect, module_depth_graded, module_dimension
from .poly import CoefficientField, MonomialOrder, ParseError, PolyRing
from .resolution import PresentedModule
from .serre import PropertyQuery, check_condition, exhaustive_monomial_report

EXIT_OK, EXIT_EXPECT, EXIT_ERROR = 0, 1, 2


class SessionError(Exception):
    def __init__(self, message: str, line: int, col: int = 1):
        self.line, self.col, self.message = line, col, message
        super().__init__(f"line {line}, column {col}: {message}")


# ---------------------------------------------------------------------------
# AST


@dataclass
class Node:
    line: int
    text: str


@dataclass
class RingDecl(Node):
    ring: PolyRing = None


@dataclass
class IdealDecl(Node):
    name: str = ""
    ideal: Ideal = None


@dataclass
class ModuleDecl(Node):
    name: str = ""
    module: PresentedModule = None


@dataclass
class ComputeDecl(Node):
    name: str = ""
    op: str = ""
    args: tuple = ()


@dataclass
class InvariantsCmd(Node):
    name: str = ""


@dataclass
class ProfileCmd(Node):
    name: str = ""


@dataclass
class CheckCmd(Node):
    query: PropertyQuery = None
    name: str = ""
    expect: str | None = None


@dataclass
class CorpusCmd(Node):
    spec: CorpusSpec = None


@dataclass
class Session:
    nodes: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# parsing

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")
_RING = re.compile(r"ring\s+(Q|F\d+)\s*\[([^\]]*)\]\s*(\S+)?\s*$")
_CHECK_KINDS = {"Sn": "Sn", "Cn": "Cn", "Cnl": "Cnl", "Snl": "Snl", "acm": "almostCM", "cmd": "cmd_le_l"}


def _split_top(text: str, offset: int, sep: str = ",") -> list[tuple[str, int]]:
    """Split on ``sep`` outside brackets; keep each piece's column offset."""
    out, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == sep and depth == 0:
            out.append((text[start:i], offset + start))
            start = i + 1
    out.append((text[start:], offset + start))
    return out


def _strip(piece: str, col: int) -> tuple[str, int]:
    lead = len(piece) - len(piece.lstrip())
    return piece.strip(), col + lead


class _Parser:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.ring: PolyRing | None = None
        self.kinds: dict[str, tuple[str, PolyRing]] = {}
        self.session = Session()

    def error(self, msg, line, col=1):
        raise SessionError(msg, line, col)

    def poly(self, text, line, col):
        text, col = _strip(text, col)
        try:
            return self.ring.parse(text)
        except ParseError as e:
            pos = e.pos if e.pos is not None else 0
            raise SessionError(str(e).split(" (at offset")[0], line, col + pos) from None

    def need_ring(self, line):
        if self.ring is None:
            self.error("no ring declared yet", line)

    def declare(self, name, kind, line, col):
        if not _NAME.match(name):
            self.error(f"invalid name {name!r}", line, col)
        if name in self.kinds:
            self.error(f"duplicate name {name!r}", line, col)
        self.kinds[name] = (kind, self.ring)

    def ref(self, name, kind, line, col):
        if name not in self.kinds:
            self.error(f"undeclared object {name!r}", line, col)
        have = self.kinds[name][0]
        if kind is not None and have != kind:
            self.error(f"{name!r} is {'an' if have == 'ideal' else 'a'} {have}, expected {kind}", line, col)
        if self.kinds[name][1] != self.ring:
            self.error(f"{name!r} belongs to an earlier ring", line, col)

    def parse(self) -> Session:
        for no, raw in enumerate(self.lines, 1):
            body = raw.split("#", 1)[0].rstrip()
            if not body.strip():
                continue
            indent = len(body) - len(body.lstrip())
            self.parse_line(body.strip(), no, indent + 1)
        return self.session

    def parse_line(self, s: str, no: int, c0: int):
        head = s.split(None, 1)[0]
        add = self.session.nodes.append
        if head == "ring":
            m = _RING.match(s)
            if not m:
                self.error("expected 'ring <Field>[v1,...,vk] <order>'", no, c0)
            fld, names, order = m.group(1), m.group(2), m.group(3) or "grevlex"
            try:
                F = CoefficientField(0 if fld == "Q" else int(fld[1:]))
            except ValueError as e:
                self.error(str(e), no, c0 + m.start(1))
            try:
                MonomialOrder(order)
            except ValueError:
                self.error(f'unsupported order "{order}"', no, c0 + m.start(3))
            vs = [v.strip() for v in names.split(",")]
            try:
                self.ring = PolyRing(vs, F, MonomialOrder(order))
            except ValueError as e:
                self.error(str(e), no, c0 + m.start(2))
            add(RingDecl(no, s, self.ring))
            return
        if head in ("ideal", "module", "compute"):
            self.need_ring(no)
            m = re.match(rf"{head}\s+(\S+)\s*=\s*", s)
            if not m:
                self.error(f"expected '{head} NAME = ...'", no, c0)
            name, rhs, rc = m.group(1), s[m.end():], c0 + m.end()
            if head == "ideal":
                if not rhs.strip():
                    self.error("ideal needs at least one generator", no, rc)
                gens = [self.poly(p, no, col) for p, col in _split_top(rhs, rc)]
                ideal = Ideal(gens, self.ring)
                self.declare(name, "ideal", no, c0 + m.start(1))
                add(IdealDecl(no, s, name, ideal))
            elif head == "module":
                mod = self.parse_coker(rhs, no, rc)
                self.declare(name, "module", no, c0 + m.start(1))
                add(ModuleDecl(no, s, name, mod))
            else:
                parts = rhs.split()
                if not parts:
                    self.error("expected an operation", no, rc)
                op, args = parts[0], parts[1:]
                arity = {"quotient": 1, "intersect": 2, "sum": 2, "power": 2}
                if op not in arity:
                    self.error(f"unknown operation {op!r}", no, rc)
                if len(args) != arity[op]:
                    self.error(f"{op} takes {arity[op]} argument(s)", no, rc)
                if op == "power":
                    self.ref(args[0], "ideal", no, rc)
                    if not args[1].isdigit() or int(args[1]) < 1:
                        self.error("power needs a positive integer exponent", no, rc)
                    args = [args[0], int(args[1])]
                else:
                    for a in args:
                        self.ref(a, "ideal", no, rc)
                self.declare(name, "module" if op == "quotient" else "ideal", no, c0 + m.start(1))
                add(ComputeDecl(no, s, name, op, tuple(args)))
            return
        if head in ("invariants", "profile"):
            parts = s.split()
            if len(parts) != 2:
                self.error(f"expected '{head} NAME'", no, c0)
            self.ref(parts[1], "module", no, c0 + s.index(parts[1], len(head)))
            add((InvariantsCmd if head == "invariants" else ProfileCmd)(no, s, parts[1]))
            return
        if head == "check":
            add(self.parse_check(s, no, c0))
            return
        if head == "corpus":
            add(self.parse_corpus(s, no, c0))
            return
        self.error(f"unknown command {head!r}", no, c0)

    def parse_coker(self, rhs: str, no: int, rc: int) -> PresentedModule:
        m = re.match(r"coker\s*", rhs)
        if not m:
            self.error("expected 'coker [[...],...]'", no, rc)
        body, bc = rhs[m.end():], rc + m.end()
        twists = None
        tw = re.search(r"\s+twists\s+\[([^\]]*)\]\s*$", body)
        if tw:
            try:
                twists = [int(t) for t in tw.group(1).split(",") if t.strip()]
            except ValueError:
                self.error("twists must be integers", no, bc + tw.start(1))
            body = body[: tw.start()]
        text, bc = _strip(body, bc)
        if not (text.startswith("[") and text.endswith("]")):
            self.error("matrix must be written [[...],[...]]", no, bc)
        rows = []
        for piece, col in _split_top(text[1:-1], bc + 1):
            piece, col = _strip(piece, col)
            if not (piece.startswith("[") and piece.endswith("]")):
                self.error("each matrix row must be bracketed", no, col)
            inner = piece[1:-1]
            rows.append([self.poly(p, no, c) for p, c in _split_top(inner, col + 1)] if inner.strip() else [])
        if len({len(r) for r in rows}) > 1:
            self.error("matrix rows have different lengths", no, bc)
        if twists is not None and len(twists) != len(rows):
            self.error("one twist per matrix row is needed", no, bc)
        try:
            return PresentedModule.from_matrix(self.ring, rows, twists)
        except ValueError as e:
            self.error(str(e), no, bc)

    def parse_check(self, s: str, no: int, c0: int) -> CheckCmd:
        toks = s.split()
        if len(toks) < 4 or "on" not in toks:
            self.error("expected 'check PROPERTY [n=..] [l=..] on NAME'", no, c0)
        kind = toks[1]
        if kind not in _CHECK_KINDS:
            self.error(f"unknown property {kind!r}", no, c0 + s.index(kind))
        params: dict = {}
        i = 2
        while toks[i] != "on":
            k, eq, v = toks[i].partition("=")
            if not eq or k not in ("n", "l") or not v.isdigit():
                self.error(f"bad parameter {toks[i]!r}", no, c0 + s.index(toks[i]))
            params[k] = int(v)
            i += 1
        if i + 1 >= len(toks):
            self.error("missing module name after 'on'", no, c0 + len(s))
        name = toks[i + 1]
        self.ref(name, "module", no, c0 + s.index(name, s.index(" on ")))
        expect = None
        rest = toks[i + 2:]
        if rest:
            if len(rest) != 2 or rest[0] != "--expect" or rest[1] not in ("yes", "no"):
                self.error("trailing text; expected '--expect yes|no'", no, c0 + s.index(rest[0], s.index(name)))
            expect = rest[1]
        try:
            q = PropertyQuery(_CHECK_KINDS[kind], params.get("n"), params.get("l"))
        except ValueError as e:
            self.error(str(e), no, c0)
        return CheckCmd(no, s, q, name, expect)

    def parse_corpus(self, s: str, no: int, c0: int) -> CorpusCmd:
        toks = s.split()
        if toks[-1] != "verify":
            self.error("corpus command must end with 'verify'", no, c0 + len(s))
        keys = {"seed": "seed", "vars": "variable_count", "count": "instance_count",
                "degree": "max_degree", "gens": "generator_count"}
        kw = {}
        for t in toks[1:-1]:
            k, eq, v = t.partition("=")
            if not eq or k not in keys or not re.fullmatch(r"-?\d+", v):
                self.error(f"bad corpus parameter {t!r}", no, c0 + s.index(t))
            kw[keys[k]] = int(v)
        for req in ("seed", "variable_count", "instance_count"):
            if req not in kw:
                self.error(f"corpus needs {[k for k, v in keys.items() if v == req][0]}=..", no, c0)
        try:
            spec = CorpusSpec(**kw)
        except ValueError as e:
            self.error(str(e), no, c0)
        return CorpusCmd(no, s, spec)


def parse_session(text: str) -> Session:
    """Parse session text; raises SessionError with line and column."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# execution


def encode(x):
    """JSON-safe value: infinities become "+inf"/"-inf"."""
    if isinstance(x, float) and math.isinf(x):
        return "+inf" if x > 0 else "-inf"
    if isinstance(x, dict):
        return {k: encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [encode(v) for v in x]
    return x


def _fmt(x) -> str:
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return str(x)


def execute_session(session: Session, json_mode: bool = False, threads: int = 1,
                    expect: str | None = None, out=None, err=None) -> int:
    """Run ``session``; write reports to ``out`` and diagnostics to ``err``."""
    out = out or sys.stdout
    err = err or sys.stderr
    env: dict = {}
    code = EXIT_OK

    def emit(doc: dict, text: str):
        if json_mode:
            out.write(json.dumps(encode(doc)) + "\n")
        else:
            out.write(text.rstrip("\n") + "\n")

    for node in session.nodes:
        try:
            if isinstance(node, RingDecl):
                continue
            if isinstance(node, IdealDecl):
                env[node.name] = node.ideal
            elif isinstance(node, ModuleDecl):
                node.module.label = node.name
                env[node.name] = node.module
            elif isinstance(node, ComputeDecl):
                a = [env[x] if isinstance(x, str) else x for x in node.args]
                if node.op == "quotient":
                    env[node.name] = PresentedModule.cyclic(a[0], label=node.name)
                elif node.op == "intersect":
                    env[node.name] = ideal_combine(a[0], a[1], "intersection")
                elif node.op == "sum":
                    env[node.name] = ideal_combine(a[0], a[1], "sum")
                else:
                    env[node.name] = ideal_combine(a[0], None, "power", a[1])
            elif isinstance(node, InvariantsCmd):
                M = env[node.name]
                d, dp, c = module_dimension(M), module_depth_graded(M), cm_defect(M)
                emit({"dim": d, "depth": dp, "cmd": c},
                     f"{node.name}: dim {_fmt(d)}, depth {_fmt(dp)}, cmd {_fmt(c)}")
            elif isinstance(node, ProfileCmd):
                M = env[node.name]
                ring = M.ring
                rows = []
                lines = [f"{node.name}: profile at monomial primes",
                         f"  {'prime':<24} {'ht':>3} {'dim':>5} {'depth':>6} {'cmd':>4}  support"]
                for p in exhaustive_monomial_report(M):
                    label = p.prime.label(ring)
                    rows.append({"prime": label, "height": p.height, "dim": p.dim_local,
                                 "depth": p.depth_local, "cmd": p.cmd_local, "in_support": p.in_support})
                    lines.append(f"  {label:<24} {p.height:>3} {_fmt(p.dim_local):>5} "
                                 f"{_fmt(p.depth_local):>6} {p.cmd_local:>4}  {'yes' if p.in_support else 'no'}")
                emit({"rows": rows}, "\n".join(lines))
            elif isinstance(node, CheckCmd):
                M = env[node.name]
                v = check_condition(M, node.query)
                cert = v.record(M.ring)["certificate_prime"]
                text = f"{node.query} on {node.name}: {v.answer}"
                if cert is not None:
                    text += f" (witness {cert}"
                    if v.profile is not None:
                        text += f", dim {_fmt(v.profile.dim_local)}, depth {_fmt(v.profile.depth_local)}"
                    text += ")"
                emit({"answer": v.answer, "witness": cert}, text)
                want = node.expect or expect
                if want is not None and v.answer != want:
                    err.write(f"line {node.line}: expected {want}, got {v.answer}: {node.text}\n")
                    code = EXIT_EXPECT
            elif isinstance(node, CorpusCmd):
                reports = verify_statements(node.spec, Bounds(), threads=threads)
                bad = sum(len(r.counterexamples) for r in reports)
                lines = [f"corpus seed={node.spec.seed} vars={node.spec.variable_count} "
                         f"count={node.spec.instance_count}: {len(reports)} statements, {bad} counterexamples"]
                for r in reports:
                    lines.append(f"  ({r.statement_id}) {'pass' if r.passed else 'FAIL'} "
                                 f"[{r.instances_checked} checked, {len(r.counterexamples)} counterexamples] "
                                 f"{r.description}")
                emit({"statements": len(reports), "counterexamples": bad}, "\n".join(lines))
        except Exception as e:  # engine failure: report the command and stop
            err.write(f"line {node.line}: error in '{node.text}': {type(e).__name__}: {e}\n")
            return EXIT_ERROR
    return code


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="cmdefect", description="Run a session file of module computations.")
    ap.add_argument("session", help="session file, or - for standard input")
    ap.add_argument("--json", action="store_true", help="one JSON document per command")
    ap.add_argument("--threads", type=int, default=1, help="worker processes for corpus runs")
    ap.add_argument("--expect", choices=("yes", "no"), help="expected answer of every check")
    args = ap.parse_args(argv)
    if args.threads < 1:
        ap.error("--threads must be positive")
    try:
        text = sys.stdin.read() if args.session == "-" else open(args.session, encoding="utf-8").read()
    except OSError as e:
        sys.stderr.write(f"cannot read session: {e}\n")
        return EXIT_ERROR
    try:
        session = parse_session(text)
    except SessionError as e:
        sys.stderr.write(f"{args.session}:{e.line}:{e.col}: {e.message}\n")
        return EXIT_ERROR
    return execute_session(session, args.json, args.threads, args.expect)


if __name__ == "__main__":
    sys.exit(main())
