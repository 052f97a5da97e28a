"""Line-oriented text format for constraint systems.

    # comments run to end of line; blank lines are ignored
    vars: x y                  (required header, fixes variable order)
    cone                       (optional: already-homogeneous cone)
    maximize: x + y            (optional objective)
    -x + y <= 2                (constraints; rel in <=, >=, =, <, >)
    1/2*x - 3*y >= 0           (coefficients are integers or p/q)
    nonneg: all                (or a list of names; expands to sign rows)

Everything is stored in <= / < orientation; >= and > rows are negated on
entry.  Printing emits the canonical form, so parse(print(s)) reproduces s
and print(parse(text)) canonicalizes text.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Mapping

from .core import (
    Constraint,
    LincertError,
    LinearExpr,
    Provenance,
    Relation,
    System,
    ZERO,
    rat,
)


class ParseError(LincertError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


_NAME = r"[A-Za-z_]\w*"
_NUMBER = r"\d+(?:/\d+)?"
_TERM = re.compile(rf"\s*(?P<sign>[+-])?\s*(?:(?P<coef>{_NUMBER})\s*\*\s*)?(?P<var>{_NAME})")
_RELATION = re.compile(r"\s*(<=|>=|=|<|>)\s*")
_RHS = re.compile(rf"\s*(?P<sign>[+-])?\s*(?P<value>{_NUMBER})\s*$")


def format_rational(q: Fraction) -> str:
    return str(q)  # Fraction prints p or p/q, never a float


def parse_rational(token: str, line: int = 0) -> Fraction:
    m = _RHS.match(token)
    if not m:
        raise ParseError(f"expected a rational number, got {token.strip()!r}", line)
    try:
        value = rat(m.group("value"))
    except ZeroDivisionError:
        raise ParseError(f"zero denominator in {m.group('value')!r}", line) from None
    return -value if m.group("sign") == "-" else value


def parse_expr(text: str, index: Mapping[str, int], line: int) -> LinearExpr:
    pos = 0
    first = True
    terms: list[tuple[int, Fraction]] = []
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ParseError(f"cannot read term at {text[pos:].strip()!r}", line)
            break
        if not first and m.group("sign") is None:
            raise ParseError(f"missing + or - before {m.group('var')!r}", line)
        try:
            coef = rat(m.group("coef")) if m.group("coef") else Fraction(1)
        except ZeroDivisionError:
            raise ParseError(f"zero denominator in {m.group('coef')!r}", line) from None
        if m.group("sign") == "-":
            coef = -coef
        name = m.group("var")
        if name not in index:
            raise ParseError(f"unknown variable {name!r}", line)
        terms.append((index[name], coef))
        pos = m.end()
        first = False
    if first:
        raise ParseError("empty expression", line)
    return LinearExpr.from_terms(terms)


def parse(text: str) -> System:
    variables: tuple[str, ...] | None = None
    index: dict[str, int] = {}
    mains: list[tuple[LinearExpr, Relation, Fraction]] = []
    nonneg: list[str] = []
    objective: LinearExpr | None = None
    is_cone = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if variables is None:
            if not line.startswith("vars:"):
                raise ParseError("the first line must be 'vars: <name>...'", lineno)
            names = line[len("vars:"):].split()
            for n in names:
                if not re.fullmatch(_NAME, n):
                    raise ParseError(f"bad variable name {n!r}", lineno)
                if n in index:
                    raise ParseError(f"duplicate variable {n!r}", lineno)
                index[n] = len(index)
            variables = tuple(names)
            continue
        if line == "cone":
            is_cone = True
            continue
        if line.startswith("maximize:"):
            if objective is not None:
                raise ParseError("duplicate maximize line", lineno)
            objective = parse_expr(line[len("maximize:"):], index, lineno)
            continue
        if line.startswith("nonneg:"):
            names = line[len("nonneg:"):].split()
            if names == ["all"]:
                nonneg.extend(variables)
            else:
                for n in names:
                    if n not in index:
                        raise ParseError(f"unknown variable {n!r}", lineno)
                    nonneg.append(n)
            continue
        m = _RELATION.search(line)
        if not m:
            raise ParseError("expected '<expr> <relation> <rational>'", lineno)
        expr = parse_expr(line[: m.start()], index, lineno)
        rhs = parse_rational(line[m.end():], lineno)
        rel = m.group(1)
        if rel == ">=":
            expr, rel, rhs = -expr, Relation.LE, -rhs
        elif rel == ">":
            expr, rel, rhs = -expr, Relation.LT, -rhs
        else:
            rel = Relation(rel)
        mains.append((expr, rel, rhs))

    if variables is None:
        raise ParseError("missing 'vars:' header", len(text.splitlines()) or 1)

    rows = []
    cid = 0
    for expr, rel, rhs in mains:
        rows.append(Constraint(cid, expr, rel, rhs, Provenance.main()))
        cid += 1
    seen = set()
    for n in nonneg:
        if n in seen:
            continue
        seen.add(n)
        rows.append(
            Constraint(cid, LinearExpr.from_terms({index[n]: -1}), Relation.LE, ZERO, Provenance.sign())
        )
        cid += 1
    return System(variables, tuple(rows), objective, is_cone)


def format_expr(expr: LinearExpr, system: System) -> str:
    if expr.is_zero:
        if not system.variables:
            raise LincertError("cannot print a zero expression without variables")
        return f"0*{system.variables[0]}"
    parts = []
    for var, coef in expr.terms:
        name = system.variables[var]
        mag = abs(coef)
        body = name if mag == 1 else f"{format_rational(mag)}*{name}"
        if not parts:
            parts.append(body if coef > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if coef > 0 else f"- {body}")
    return " ".join(parts)


def format_constraint(c: Constraint, system: System, orientation: str = "le") -> str:
    expr, rel, rhs = c.expr, c.relation, c.rhs
    if orientation == "ge" and rel in (Relation.LE, Relation.LT):
        expr, rhs = -expr, -rhs
        symbol = ">=" if rel is Relation.LE else ">"
    else:
        symbol = rel.value
    return f"{format_expr(expr, system)} {symbol} {format_rational(rhs)}"


def print_system(
    system: System,
    orientation: str = "le",
    comments: Mapping[int, str] | None = None,
) -> str:
    """Canonical text form; `comments` adds a '# ...' line above a row id."""
    comments = comments or {}
    out = ["vars: " + " ".join(system.variables) if system.variables else "vars:"]
    if system.is_cone:
        out.append("cone")
    if system.objective is not None:
        out.append("maximize: " + format_expr(system.objective, system))
    sign_names = []
    for c in system.constraints:
        if c.provenance.kind == "sign":
            sign_names.append(system.variables[c.expr.terms[0][0]])
            continue
        if c.cid in comments:
            out.append(f"# {comments[c.cid]}")
        out.append(format_constraint(c, system, orientation))
    if sign_names:
        ordered = [n for n in system.variables if n in sign_names]
        if len(ordered) == len(system.variables):
            out.append("nonneg: all")
        else:
            out.append("nonneg: " + " ".join(ordered))
    return "\n".join(out) + "\n"
