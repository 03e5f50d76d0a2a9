"""Line-oriented scenario files.

    # comment
    scenario NAME
    vars [TABLE] mu: m0 m1 m2
    vars [TABLE] x: x0 x1 ... x7
    poly NAME [@ TABLE] = <expr>          (a trailing backslash continues a line)
    coords l0 l1 l2 | x2 x3 x4 x5 x6 x7   (target coordinates of maps, '|' splits blocks)
    map NAME = (<expr>, <expr>, ...)
    locus NAME = <expr>, <expr>, ...
    class NAME = P(a,b): <expr in g1, g2>   or   P(a,b): ci (d,e) (d,e) ...
    table NAME = 0 0 2; 0 2 2; 2 2 0
    chart NAME ... end                    (key: value lines, see below)
    include PATH
    check NAME(ARG, ARG, key=value)

Chart keys: parent, change of variables, equation defining the blowup,
exceptional divisor, restrict, extension of phi, image of the exceptional
divisor, indeterminacy, dehomogenize, derived, note, and
``erratum <key>`` / ``note <key>`` for corrections of a printed item.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .birational import ChartSpec, Erratum, PolyMap
from .lattice import ChowClass, ci_class
from .poly import ParseError, Polynomial, PolynomialError, QQ, UnknownVariable, VarTable, parse_polynomial

DEFAULT_TABLE = "main"


class ScenarioError(ValueError):
    def __init__(self, msg: str, line: int | None = None, col: int | None = None, path: str | None = None):
        self.msg, self.line, self.col, self.path = msg, line, col, path
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {col}" if col is not None else "")
            if path:
                where = f"{path}: {where}"
            where += ": "
        super().__init__(where + msg)


@dataclass
class CheckCall:
    name: str
    args: list
    kwargs: dict
    line: int | None = None

    @property
    def label(self) -> str:
        parts = list(self.args) + [f"{k}={v}" for k, v in self.kwargs.items()]
        return f"{self.name}({', '.join(parts)})"


@dataclass
class Scenario:
    name: str = ""
    tables: dict = field(default_factory=dict)
    polys: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    loci: dict = field(default_factory=dict)
    charts: dict = field(default_factory=dict)
    classes: dict = field(default_factory=dict)
    grams: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    coords: tuple = ()
    blocks: tuple = ()
    field: int = QQ
    text: str = ""           # source with includes expanded

    @property
    def vars(self) -> VarTable:
        return self.tables[DEFAULT_TABLE]

    def poly(self, name: str) -> Polynomial:
        try:
            return self.polys[name]
        except KeyError:
            raise ScenarioError(f"undeclared polynomial {name!r}") from None


_CHECK_RE = re.compile(r"^([A-Za-z_][\w\-]*)\s*\((.*)\)\s*$")


def split_top(s: str, sep: str = ",") -> list[str]:
    """Split at separators outside parentheses."""
    out, depth, cur = [], 0, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    tail = "".join(cur).strip()
    if tail or out:
        out.append(tail)
    return out


def _strip_parens(s: str) -> str:
    s = s.strip()
    if s.startswith("(") and s.endswith(")"):
        depth = 0
        for i, ch in enumerate(s):
            depth += ch == "("
            depth -= ch == ")"
            if depth == 0 and i < len(s) - 1:
                return s
        return s[1:-1]
    return s


def _expand(text: str, base: Path | None, seen: tuple = ()) -> list[tuple[str, int, str]]:
    """Logical lines (text, line number, origin) with includes inlined."""
    out = []
    origin = str(base) if base else "<string>"
    raw = text.splitlines()
    i = 0
    while i < len(raw):
        start = i
        line = raw[i]
        while line.rstrip().endswith("\\") and i + 1 < len(raw):
            i += 1
            line = line.rstrip()[:-1].rstrip() + " " + raw[i].strip()
        i += 1
        stripped = line.split("#", 1)[0].strip()
        if stripped.startswith("include "):
            target = stripped[len("include "):].strip()
            path = (base.parent / target) if base else Path(target)
            if path.resolve() in seen:
                raise ScenarioError(f"include cycle through {target}", start + 1, path=origin)
            try:
                sub = path.read_text()
            except OSError as exc:
                raise ScenarioError(f"cannot read include {target}: {exc.strerror}", start + 1, path=origin) from None
            out.extend(_expand(sub, path, seen + (path.resolve(),)))
        else:
            out.append((line, start + 1, origin))
    return out


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc.strerror}") from None
    return parse_scenario(text, path)


def parse_scenario(text: str, path: Path | None = None) -> Scenario:
    lines = _expand(text, Path(path) if path else None)
    return _Builder(lines).build()


class _Builder:
    def __init__(self, lines):
        self.lines = lines
        self.sc = Scenario()
        self.blocks: dict = {}     # table -> {"mu": [...], "x": [...]}
        self.pending_charts = []
        self.expanded = []

    def error(self, msg, lineno, origin, col=None):
        return ScenarioError(msg, lineno, col, None if origin == "<string>" else origin)

    def build(self) -> Scenario:
        sc = self.sc
        it = iter(self.lines)
        declared = False
        for line, lineno, origin in it:
            self.expanded.append(line)
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            declared = True
            head, _, rest = body.partition(" ")
            rest = rest.strip()
            try:
                if head == "scenario":
                    sc.name = rest
                elif head == "vars":
                    self._vars(rest, lineno, origin)
                elif head == "field":
                    sc.field = int(rest)
                elif head == "poly":
                    self._poly(rest, lineno, origin, line)
                elif head == "coords":
                    self._coords(rest)
                elif head == "map":
                    self._map(rest, lineno, origin)
                elif head == "locus":
                    name, _, expr = rest.partition("=")
                    sc.loci[name.strip()] = [self._parse(e, lineno, origin) for e in split_top(expr)]
                elif head == "class":
                    self._class(rest, lineno, origin)
                elif head == "table":
                    name, _, expr = rest.partition("=")
                    sc.grams[name.strip()] = [[int(v) for v in row.replace(",", " ").split()]
                                              for row in expr.split(";")]
                elif head == "chart":
                    block = []
                    for cl, cn, co in it:
                        self.expanded.append(cl)
                        if cl.split("#", 1)[0].strip() == "end":
                            break
                        block.append((cl, cn, co))
                    else:
                        raise self.error(f"chart {rest} is missing 'end'", lineno, origin)
                    self.pending_charts.append((rest, block, lineno, origin))
                elif head == "check":
                    self._check(rest, lineno, origin)
                else:
                    raise self.error(f"unknown directive {head!r}", lineno, origin, 1)
            except ScenarioError:
                raise
            except UnknownVariable as exc:
                raise self.error(f"undeclared variable {exc.name!r}", lineno, origin) from None
            except (PolynomialError, ValueError) as exc:
                raise self.error(str(exc), lineno, origin) from None
        if not declared:
            raise ScenarioError("no declarations")
        for name, block, lineno, origin in self.pending_charts:
            sc.charts[name] = self._chart(name, block, lineno, origin)
        self._validate_checks()
        sc.text = "\n".join(self.expanded) + "\n"
        return sc

    # -- declarations ------------------------------------------------------
    def _vars(self, rest, lineno, origin):
        spec, _, names = rest.partition(":")
        words = spec.split()
        if len(words) == 1:
            table, kind = DEFAULT_TABLE, words[0]
        elif len(words) == 2:
            table, kind = words
        else:
            raise self.error("expected 'vars [TABLE] mu|x: names'", lineno, origin)
        if kind not in ("mu", "x"):
            raise self.error(f"variable block must be 'mu' or 'x', got {kind!r}", lineno, origin)
        self.blocks.setdefault(table, {"mu": [], "x": []})[kind] = names.split()
        b = self.blocks[table]
        self.sc.tables[table] = VarTable(tuple(b["mu"]), tuple(b["x"]))

    def _table(self, name, lineno, origin) -> VarTable:
        try:
            return self.sc.tables[name]
        except KeyError:
            raise self.error(f"no variables declared for table {name!r}", lineno, origin) from None

    def _parse(self, expr, lineno, origin, table=DEFAULT_TABLE, line=None) -> Polynomial:
        vars = self._table(table, lineno, origin)
        try:
            return parse_polynomial(expr.strip(), vars, self.sc.field)
        except UnknownVariable as exc:
            col = None
            if line is not None and exc.pos is not None:
                col = line.find(expr.strip()) + exc.pos + 1
            raise self.error(f"undeclared variable {exc.name!r}", lineno, origin, col) from None
        except ParseError as exc:
            col = line.find(expr.strip()) + exc.pos + 1 if line is not None else None
            raise self.error(f"{exc} in {expr.strip()!r}", lineno, origin, col) from None

    def _poly(self, rest, lineno, origin, line):
        lhs, eq, expr = rest.partition("=")
        if not eq:
            raise self.error("expected 'poly NAME = expr'", lineno, origin)
        name, _, table = lhs.partition("@")
        name, table = name.strip(), table.strip() or DEFAULT_TABLE
        if name in self.sc.polys:
            raise self.error(f"duplicate declaration of poly {name!r}", lineno, origin)
        self.sc.polys[name] = self._parse(expr, lineno, origin, table, line)

    def _coords(self, rest):
        groups = [g.split() for g in rest.split("|")]
        coords, blocks, start = [], [], 0
        for g in groups:
            coords += g
            blocks.append((start, start + len(g)))
            start += len(g)
        self.sc.coords, self.sc.blocks = tuple(coords), tuple(blocks)

    def _tuple(self, expr, lineno, origin):
        return [self._parse(e, lineno, origin) for e in split_top(_strip_parens(expr))]

    def _polymap(self, expr, lineno, origin) -> PolyMap:
        if not self.sc.coords:
            raise self.error("declare 'coords' before maps", lineno, origin)
        comps = self._tuple(expr, lineno, origin)
        vars = self.sc.vars
        try:
            return PolyMap(vars, vars, self.sc.coords, tuple(comps), self.sc.blocks)
        except PolynomialError as exc:
            raise self.error(str(exc), lineno, origin) from None

    def _map(self, rest, lineno, origin):
        name, _, expr = rest.partition("=")
        self.sc.maps[name.strip()] = self._polymap(expr, lineno, origin)

    def _class(self, rest, lineno, origin):
        name, _, expr = rest.partition("=")
        m = re.match(r"\s*P\((\d+)\s*,\s*(\d+)\)\s*:\s*(.*)$", expr)
        if not m:
            raise self.error("expected 'class NAME = P(a,b): expr'", lineno, origin)
        amb = (int(m.group(1)), int(m.group(2)))
        body = m.group(3).strip()
        if body.startswith("ci "):
            degs = [tuple(int(v) for v in d.split(",")) for d in re.findall(r"\(([^)]*)\)", body)]
            cls = ci_class(degs, amb)
        else:
            names = ("h1", "h2") if "h1" in body or "h2" in body else ("g1", "g2")
            cls = ChowClass.parse(body, amb, names)
        self.sc.classes[name.strip()] = cls

    def _check(self, rest, lineno, origin):
        m = _CHECK_RE.match(rest)
        if not m:
            raise self.error(f"malformed check {rest!r}; expected NAME(ARGS)", lineno, origin)
        args, kwargs = [], {}
        for a in split_top(m.group(2)):
            if not a:
                continue
            if "=" in a:
                k, _, v = a.partition("=")
                kwargs[k.strip()] = v.strip()
            else:
                args.append(a)
        self.sc.checks.append(CheckCall(m.group(1), args, kwargs, lineno))

    def _validate_checks(self):
        sc = self.sc
        known = set(sc.polys) | set(sc.maps) | set(sc.loci) | set(sc.charts) | set(sc.classes) | set(sc.grams)
        for c in sc.checks:
            for a in c.args:
                if a not in known:
                    raise ScenarioError(f"check {c.name} refers to undeclared name {a!r}", c.line)

    # -- charts ------------------------------------------------------------
    def _equations(self, value, lineno, origin):
        """'a = b, c = 0, d' -> [a - b, c, d]"""
        out = []
        for item in split_top(value):
            lhs, eq, rhs = item.partition("=")
            f = self._parse(lhs, lineno, origin)
            if eq:
                f = f - self._parse(rhs, lineno, origin)
            out.append(f)
        return out

    def _assignment(self, value, lineno, origin) -> dict:
        out = {}
        for item in split_top(value):
            lhs, eq, rhs = item.partition("=")
            if not eq or not re.fullmatch(r"[A-Za-z_][\w']*", lhs.strip()):
                raise self.error(f"expected 'variable = expr', got {item!r}", lineno, origin)
            self.sc.vars.position(lhs.strip())
            out[lhs.strip()] = self._parse(rhs, lineno, origin)
        return out

    def _item(self, key, value, lineno, origin):
        if key == "change of variables":
            return self._assignment(value, lineno, origin)
        if key == "equation defining the blowup":
            return self._equations(value, lineno, origin)[0]
        if key == "exceptional divisor":
            eqs = self._equations(value, lineno, origin)
            return (eqs[0], eqs[1] if len(eqs) > 1 else None)
        if key == "extension of phi":
            return self._polymap(value, lineno, origin)
        if key == "image of the exceptional divisor":
            return tuple(self._tuple(value, lineno, origin))
        raise self.error(f"no erratum support for {key!r}", lineno, origin)

    def _chart(self, name, block, lineno, origin) -> ChartSpec:
        fields, errata, notes, derived, erratum_notes = {}, {}, [], [], {}
        raw = {}
        for line, n, o in block:
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            key, sep, value = body.partition(":")
            if not sep:
                raise self.error(f"expected 'key: value' in chart {name}", n, o)
            key, value = key.strip(), value.strip()
            if key.startswith("erratum "):
                item = key[len("erratum "):]
                errata[item] = (value, self._item(item, value, n, o))
            elif key.startswith("note "):
                erratum_notes[key[len("note "):]] = value
            elif key == "note":
                notes.append(value)
            elif key == "derived":
                derived.append(value)
            else:
                raw[key] = value
                fields[key] = (value, n, o)
        need = ["parent", "change of variables", "equation defining the blowup", "exceptional divisor",
                "extension of phi", "image of the exceptional divisor"]
        missing = [k for k in need if k not in fields]
        if missing:
            raise self.error(f"chart {name} is missing {', '.join(missing)}", lineno, origin)

        def get(key):
            value, n, o = fields[key]
            return self._item(key, value, n, o)

        param, exc_eq = get("exceptional divisor")
        kw = {}
        if "restrict" in fields:
            v, n, o = fields["restrict"]
            kw["restriction"] = self._assignment(v, n, o)
        if "dehomogenize" in fields:
            v, n, o = fields["dehomogenize"]
            kw["dehomogenize"] = self._assignment(v, n, o)
        if "indeterminacy" in fields:
            v, n, o = fields["indeterminacy"]
            kw["indeterminacy"] = self._equations(v, n, o)
        err = {}
        for item, (text, value) in errata.items():
            if item == "exceptional divisor":
                value = value[1]
            err[item] = Erratum(item, raw.get(item, ""), text, erratum_notes.get(item, ""), value)
        try:
            return ChartSpec(
                name=name,
                parent=fields["parent"][0],
                substitution=get("change of variables"),
                chart_equation=get("equation defining the blowup"),
                exceptional_parameter=param,
                exceptional_equation=exc_eq,
                extension=get("extension of phi"),
                claimed_image=get("image of the exceptional divisor"),
                errata=err,
                derived=tuple(derived),
                notes=tuple(notes),
                **kw,
            )
        except PolynomialError as exc:
            raise self.error(str(exc), lineno, origin) from None
