"""Expression and definition-file parsing.

Expression grammar: identifiers, integer literals, ``+ - * / ^`` with the
usual precedence, parentheses, and ``cos(theta)``/``sin(theta)`` for periodic
variables.  Definition files add ``[chart]``, ``[tensor NAME]``,
``[connection NAME]`` and ``[form NAME]`` sections with sparse component
lines; ``#`` starts a comment.
"""

import re

from pcoupling import ring


class ParseError(Exception):
    def __init__(self, msg, line=None, col=None):
        if line is not None:
            msg = f"line {line}, col {col}: {msg}"
        super().__init__(msg)
        self.line = line
        self.col = col


_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<int>[0-9]+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\*|\+|-|/|\^|\(|\)|,)
""", re.VERBOSE)


def tokenize(text, line=1):
    toks = []
    pos = 0
    col = 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        if m.lastgroup != "ws":
            toks.append((m.lastgroup, m.group(), line, col))
        col += m.end() - pos
        pos = m.end()
    toks.append(("end", "", line, col))
    return toks


class _ExprParser:
    def __init__(self, chart, toks):
        self.chart = chart
        self.toks = toks
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg):
        kind, val, line, col = self.peek()
        raise ParseError(msg + (f" (got {val!r})" if val else " (at end)"),
                         line, col)

    def parse(self):
        e = self.expression(0)
        if self.peek()[0] != "end":
            self.error("trailing input")
        return e

    def expression(self, min_prec):
        left = self.atom()
        while True:
            kind, val, _, _ = self.peek()
            if kind != "op" or val not in ("+", "-", "*", "/", "^"):
                break
            prec = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 30}[val]
            if prec < min_prec:
                break
            self.next()
            if val == "^":
                right = self.exponent()
                left = left ** right
            else:
                right = self.expression(prec + 1)
                if val == "+":
                    left = left + right
                elif val == "-":
                    left = left - right
                elif val == "*":
                    left = left * right
                else:
                    if right.is_zero():
                        self.error("division by zero")
                    left = left / right
        return left

    def exponent(self):
        kind, val, _, _ = self.peek()
        if kind != "int":
            self.error("integer exponent expected")
        self.next()
        return int(val)

    def atom(self):
        kind, val, line, col = self.peek()
        if kind == "int":
            self.next()
            return self.chart.const(int(val))
        if kind == "op" and val == "-":
            self.next()
            return -self.atom()
        if kind == "op" and val == "(":
            self.next()
            e = self.expression(0)
            if self.peek()[1] != ")":
                self.error("')' expected")
            self.next()
            return e
        if kind == "name":
            self.next()
            if val in ("cos", "sin"):
                if self.peek()[1] != "(":
                    raise ParseError(f"{val} requires a periodic argument",
                                     line, col)
                self.next()
                k2, arg, l2, c2 = self.next()
                if k2 != "name":
                    raise ParseError("variable name expected", l2, c2)
                if self.peek()[1] != ")":
                    self.error("')' expected")
                self.next()
                try:
                    return (self.chart.cos_(arg) if val == "cos"
                            else self.chart.sin_(arg))
                except ring.RingError as exc:
                    raise ParseError(str(exc), l2, c2) from None
            try:
                return self.chart.var(val)
            except ring.RingError as exc:
                raise ParseError(str(exc), line, col) from None
        self.error("expression expected")


def parse_scalar(chart, text, line=1):
    return _ExprParser(chart, tokenize(text, line)).parse()


# -- definition files --------------------------------------------------------

_SECTION_RE = re.compile(r"\[\s*(\w+)(?:\s+([A-Za-z_][A-Za-z0-9_]*))?\s*\]$")


class Section:
    def __init__(self, kind, name, line):
        self.kind = kind
        self.name = name
        self.line = line
        self.entries = []  # (key_text | None, value_text, line)


class DefinitionFile:
    """Parsed definition file: a chart plus named tensors, connections, forms.

    Tensors/forms are stored as antisymmetric-normalized component maps
    (sorted variable tuples with sign folded into the expression)."""

    def __init__(self, chart, tensors, connections, forms, source=""):
        self.chart = chart
        self.tensors = tensors          # name -> (degree, {dir_tuple: ScalarExpr})
        self.connections = connections  # name -> {(base_slot, fiber_slot): ScalarExpr}
        self.forms = forms              # name -> (degree, {dir_tuple: ScalarExpr})
        self.source = source


def _split_sections(text):
    sections = []
    current = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if line.lstrip().startswith("["):
            m = _SECTION_RE.match(line.strip())
            if not m:
                raise ParseError("malformed section header", ln, 1)
            current = Section(m.group(1).lower(), m.group(2), ln)
            sections.append(current)
            continue
        if current is None:
            raise ParseError("content before first section", ln, 1)
        if "=" not in line:
            raise ParseError("expected 'key = value'", ln, 1)
        key, val = line.split("=", 1)
        current.entries.append((key.strip(), val.strip(), ln))
    return sections


def _parse_chart_section(sec):
    lists = {"base": [], "fiber": [], "periodic": [], "constant": []}
    for key, val, ln in sec.entries:
        if key not in lists:
            raise ParseError(f"unknown chart key {key!r}", ln, 1)
        lists[key].extend(val.split())
    seen = set()
    for group in ("base", "fiber", "constant"):
        for n in lists[group]:
            if n in seen:
                raise ParseError(f"duplicate variable {n!r}", sec.line, 1)
            seen.add(n)
    for n in lists["periodic"]:
        if n not in seen:
            raise ParseError(f"periodic {n!r} not declared base/fiber",
                             sec.line, 1)
    return ring.Chart.make(base=lists["base"], fiber=lists["fiber"],
                           periodic=lists["periodic"],
                           constants=lists["constant"])


def _parse_key_tuple(chart, key, ln):
    key = key.strip()
    if not (key.startswith("(") and key.endswith(")")):
        raise ParseError("component key must be a tuple '(v1,v2) = expr'", ln, 1)
    names = [p.strip() for p in key[1:-1].split(",") if p.strip()]
    dirs = []
    for n in names:
        vi = chart.var_index.get(n)
        if vi is None:
            raise ParseError(f"unknown variable {n!r}", ln, 1)
        if chart.specs[vi].kind == ring.CONSTANT:
            raise ParseError(f"constant {n!r} is not a direction", ln, 1)
        dirs.append(chart.dir_index[vi])
    return tuple(dirs)


def _sort_sign(dirs):
    # antisymmetric normalization: sort indices, sign of the permutation
    arr = list(dirs)
    sign = 1
    for i in range(1, len(arr)):
        j = i
        while j > 0 and arr[j - 1] > arr[j]:
            arr[j - 1], arr[j] = arr[j], arr[j - 1]
            sign = -sign
            j -= 1
    return tuple(arr), sign


def _parse_component_section(chart, sec):
    degree = None
    comps = {}
    for key, val, ln in sec.entries:
        if key == "degree":
            degree = int(val)
            continue
        dirs = _parse_key_tuple(chart, key, ln)
        if len(set(dirs)) != len(dirs):
            raise ParseError("repeated index in component key", ln, 1)
        if degree is None:
            degree = len(dirs)
        elif len(dirs) != degree:
            raise ParseError(f"component arity {len(dirs)} != degree {degree}",
                             ln, 1)
        skey, sign = _sort_sign(dirs)
        expr = parse_scalar(chart, val, ln)
        if sign < 0:
            expr = -expr
        prev = comps.get(skey)
        comps[skey] = expr if prev is None else prev + expr
    if degree is None:
        raise ParseError(f"empty section [{sec.kind} {sec.name}]", sec.line, 1)
    comps = {k: v for k, v in comps.items() if not v.is_zero()}
    return degree, comps


def _parse_connection_section(chart, sec):
    base_dirs = chart.base_dirs
    fiber_dirs = chart.fiber_dirs
    coeffs = {}
    for key, val, ln in sec.entries:
        dirs = _parse_key_tuple(chart, key, ln)
        if len(dirs) != 2:
            raise ParseError("connection entries are '(base_var, fiber_var)'",
                             ln, 1)
        if dirs[0] not in base_dirs or dirs[1] not in fiber_dirs:
            raise ParseError("connection key must pair a base and a fiber "
                             "variable", ln, 1)
        i = base_dirs.index(dirs[0])
        a = fiber_dirs.index(dirs[1])
        if (i, a) in coeffs:
            raise ParseError("duplicate connection entry", ln, 1)
        coeffs[(i, a)] = parse_scalar(chart, val, ln)
    return coeffs


def parse_definition(text):
    sections = _split_sections(text)
    if not sections or sections[0].kind != "chart":
        raise ParseError("first section must be [chart]", 1, 1)
    chart = _parse_chart_section(sections[0])
    tensors = {}
    connections = {}
    forms = {}
    for sec in sections[1:]:
        if sec.name is None:
            raise ParseError(f"section [{sec.kind}] needs a name", sec.line, 1)
        for table in (tensors, connections, forms):
            if sec.name in table:
                raise ParseError(f"duplicate name {sec.name!r}", sec.line, 1)
        if sec.kind == "tensor":
            tensors[sec.name] = _parse_component_section(chart, sec)
        elif sec.kind == "form":
            forms[sec.name] = _parse_component_section(chart, sec)
        elif sec.kind == "connection":
            connections[sec.name] = _parse_connection_section(chart, sec)
        else:
            raise ParseError(f"unknown section kind {sec.kind!r}", sec.line, 1)
    return DefinitionFile(chart, tensors, connections, forms, source=text)


def print_definition(df):
    """Canonical text for a parsed definition file (round-trip normal form)."""
    ch = df.chart
    out = ["[chart]"]
    base = [s.name for s in ch.specs if s.role == ring.BASE
            and s.kind != ring.CONSTANT]
    fiber = [s.name for s in ch.specs if s.role == ring.FIBER
             and s.kind != ring.CONSTANT]
    periodic = [s.name for s in ch.specs if s.kind == ring.PERIODIC]
    consts = [s.name for s in ch.specs if s.kind == ring.CONSTANT]
    if base:
        out.append("base = " + " ".join(base))
    if fiber:
        out.append("fiber = " + " ".join(fiber))
    if periodic:
        out.append("periodic = " + " ".join(periodic))
    if consts:
        out.append("constant = " + " ".join(consts))
    def emit(kind, name, degree, comps):
        out.append("")
        out.append(f"[{kind} {name}]")
        out.append(f"degree = {degree}")
        for key in sorted(comps):
            names = ",".join(ch.dir_name(d) for d in key)
            out.append(f"({names}) = {comps[key]}")
    for name in sorted(df.tensors):
        degree, comps = df.tensors[name]
        emit("tensor", name, degree, comps)
    for name in sorted(df.forms):
        degree, comps = df.forms[name]
        emit("form", name, degree, comps)
    for name in sorted(df.connections):
        coeffs = df.connections[name]
        out.append("")
        out.append(f"[connection {name}]")
        for (i, a) in sorted(coeffs):
            u = ch.dir_name(ch.base_dirs[i])
            y = ch.dir_name(ch.fiber_dirs[a])
            out.append(f"({u},{y}) = {coeffs[(i, a)]}")
    return "\n".join(out) + "\n"
