"""CPLEX-LP text export of an LpModel."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable

from csp_extform.instance import Sense
from csp_extform.lpmodel import LpModel
from csp_extform.rational import decimal_string, format_rational, is_exact_decimal

TERMS_PER_LINE = 8
ZERO_COLUMN = "zero_"

_NAME_MAP = str.maketrans({"=": "#", "-": "n"})


def lp_name(name: str) -> str:
    """Map characters outside the CPLEX name alphabet: ``=`` to ``#``, ``-`` to ``n``."""
    return name.translate(_NAME_MAP)


def _number(value: Fraction) -> str:
    return decimal_string(value)


def _scale(values: Iterable[Fraction]) -> int:
    """1 if every value is an exact decimal, else the lcm of the denominators."""
    values = list(values)
    if all(is_exact_decimal(v) for v in values):
        return 1
    scale = 1
    for v in values:
        scale = math.lcm(scale, v.denominator)
    return scale


def _terms(coeffs: Iterable[tuple[str, Fraction]], scale: int) -> list[str]:
    out = []
    for name, a in coeffs:
        a = a * scale
        sign = "-" if a < 0 else "+"
        out.append(f"{sign}{_number(abs(a))} {lp_name(name)}")
    return out


def _wrap(label: str, terms: list[str]) -> list[str]:
    lines = []
    for start in range(0, len(terms), TERMS_PER_LINE):
        chunk = " ".join(terms[start : start + TERMS_PER_LINE])
        lines.append(f" {label}: {chunk}" if start == 0 else f"   {chunk}")
    return lines or [f" {label}:"]


def _exact_comment(coeffs: Iterable[tuple[str, Fraction]], rhs: Fraction | None, scale: int) -> str:
    parts = [f"{format_rational(a)} {lp_name(n)}" for n, a in coeffs]
    if rhs is not None:
        parts.append(f"rhs {format_rational(rhs)}")
    return f"\\ scaled by {scale}: " + ", ".join(parts)


def write_lp(model: LpModel, stats: dict[str, object] | None = None) -> str:
    """Render ``model`` in CPLEX-LP format; output is stable for a fixed model.

    Coefficients are written as decimals when the decimal is exact. A row
    (or the objective) holding a non-terminating rational is multiplied by
    the lcm of its denominators, and the original p/q values follow in a
    comment line.
    """
    lines = [
        f"\\ model {model.name}",
        "\\ exact rationals: decimals are exact; rows with non-terminating values are",
        "\\ scaled to integers and their p/q coefficients recorded in a comment above them",
    ]
    if stats:
        lines.append("\\ stats: " + " ".join(f"{k}={v}" for k, v in stats.items()))

    lines.append("maximize" if model.sense is Sense.MAX else "minimize")
    objective = [(v.name, model.objective[v.name]) for v in model.variables if v.name in model.objective]
    if objective:
        scale = _scale(a for _, a in objective)
        if scale != 1:
            lines.append(_exact_comment(objective, None, scale))
        lines.extend(_wrap("obj", _terms(objective, scale)))
    elif model.variables:
        lines.append(f" obj: 0 {lp_name(model.variables[0].name)}")
    else:
        lines.append(" obj:")

    filler = lp_name(model.variables[0].name) if model.variables else ZERO_COLUMN
    needs_zero_column = False
    lines.append("subject to")
    for c in model.constraints:
        scale = _scale([a for _, a in c.coeffs] + [c.rhs])
        if scale != 1:
            lines.append(_exact_comment(c.coeffs, c.rhs, scale))
        terms = _terms(c.coeffs, scale)
        if not terms:
            # CPLEX-LP rows need at least one term.
            terms = [f"0 {filler}"]
            needs_zero_column = needs_zero_column or not model.variables
        body = _wrap(lp_name(c.name), terms)
        rhs = c.rhs * scale
        sign = "-" if rhs < 0 else ""
        body[-1] += f" {c.relation.value} {sign}{_number(abs(rhs))}"
        lines.extend(body)

    lines.append("bounds")
    for v in model.variables:
        name = lp_name(v.name)
        if v.upper is None:
            lines.append(f" {name} >= {_bound(v.lower)}")
        else:
            lines.append(f" {_bound(v.lower)} <= {name} <= {_bound(v.upper)}")
    if needs_zero_column:
        lines.append(f" {ZERO_COLUMN} = 0")
    lines.append("end")
    return "\n".join(lines) + "\n"


def _bound(value: Fraction) -> str:
    if is_exact_decimal(value):
        return decimal_string(value)
    return format_rational(value)
