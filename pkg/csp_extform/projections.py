"""The linear maps f -> (y, g) -> (z, h) -> problem solutions."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from csp_extform.configurations import Configuration, enumerate_configurations
from csp_extform.errors import NonIntegralInput
from csp_extform.extform import BaseModel, ExtendedModel, g_name, y_name
from csp_extform.instance import Assignment, CspInstance, ExtendedAssignment

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass
class YgPoint:
    """A point of the base relaxation: y per (v, i), g per (constraint id, K in K(U))."""

    y: dict[tuple[int, int], Fraction] = field(default_factory=dict)
    g: dict[tuple[str, Configuration], Fraction] = field(default_factory=dict)

    def as_values(self) -> dict[str, Fraction]:
        """Keyed by base-LP variable names, for ``check_point`` against ``build_base_lp``."""
        values = {y_name(v, i): x for (v, i), x in self.y.items()}
        values.update({g_name(cid, k): x for (cid, k), x in self.g.items()})
        return values

    def is_integral(self) -> bool:
        return all(x in (ZERO, ONE) for x in (*self.y.values(), *self.g.values()))


def proj2(model: ExtendedModel, point: Mapping[Configuration, Fraction]) -> YgPoint:
    """Sum f over each designated bag: y_v^i and g(K) are marginals of that bag's distribution."""
    instance = model.instance
    result = YgPoint()
    for v in instance.variables:
        bag_configs = model.configs[model.vertex_bag[v]]
        for i in instance.domain(v):
            result.y[(v, i)] = sum(
                (point.get(k, ZERO) for k in bag_configs if k[v] == i), ZERO
            )
    for cid, scope in model.scopes.items():
        marginal: dict[Configuration, Fraction] = {}
        for k in model.configs[model.scope_bag[cid]]:
            key = k.restrict(scope)
            marginal[key] = marginal.get(key, ZERO) + point.get(k, ZERO)
        for k in enumerate_configurations(instance, scope):
            result.g[(cid, k)] = marginal.get(k, ZERO)
    return result


def yg_from_base_values(model: BaseModel, values: Mapping[str, Fraction]) -> YgPoint:
    """Read a base-LP solution back as a YgPoint."""
    instance = model.instance
    result = YgPoint()
    for v in instance.variables:
        for i in instance.domain(v):
            result.y[(v, i)] = values.get(y_name(v, i), ZERO)
    for cid, configs in model.configs.items():
        for k in configs:
            result.g[(cid, k)] = values.get(g_name(cid, k), ZERO)
    return result


def proj1(instance: CspInstance, point: YgPoint) -> ExtendedAssignment:
    """Integral (y, g) to (z, h): z_v is the value with y_v^i = 1, h reads the chosen g.

    Raises:
        NonIntegralInput: some y or g value is not 0 or 1.
    """
    if not point.is_integral():
        fractional = sorted(
            str(name) for name, x in point.as_values().items() if x not in (ZERO, ONE)
        )
        raise NonIntegralInput(f"Point is fractional at {', '.join(fractional[:5])}")

    z: list[int] = []
    for v in instance.variables:
        chosen = [i for i in instance.domain(v) if point.y.get((v, i)) == ONE]
        if len(chosen) != 1:
            raise NonIntegralInput(f"y_{v} selects {len(chosen)} values")
        z.append(chosen[0])

    h: list[int] = []
    for c in instance.soft:
        cid = f"s{c.id}"
        chosen_k = [k for (gid, k), x in point.g.items() if gid == cid and x == ONE]
        if len(chosen_k) != 1:
            raise NonIntegralInput(f"g_{cid} selects {len(chosen_k)} configurations")
        h.append(int(c.satisfied_by(chosen_k[0].values_on(c.scope))))

    return ExtendedAssignment(
        z=tuple(z), h=tuple(h), soft_ids=tuple(c.id for c in instance.soft)
    )


def proj_V(ex: ExtendedAssignment) -> Assignment:
    return ex.z


def proj_E(ex: ExtendedAssignment) -> tuple[int, ...]:
    return ex.h


def proj_id(ex: ExtendedAssignment) -> ExtendedAssignment:
    return ex


def proj_oct(point: YgPoint) -> dict[int, Fraction]:
    """(y, g) to (y_1^2, ..., y_n^2): the deletion-set indicator of the OCT encoding."""
    vertices = sorted({v for v, _ in point.y})
    return {v: point.y.get((v, 2), ZERO) for v in vertices}


def witness_from_point(model: ExtendedModel, point: Mapping[Configuration, Fraction]) -> ExtendedAssignment:
    """proj1 after proj2, for integral points of P(Q)."""
    return proj1(model.instance, proj2(model, point))
