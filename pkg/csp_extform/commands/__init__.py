"""Sub-command modules; each exposes NAME, HELP, add_arguments(parser) and run(args, session, settings)."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any

from csp_extform.extform import FormulationStats
from csp_extform.instance import CspInstance, load_instance
from csp_extform.treedec import TreeDecomposition, read_td


@dataclass
class RunReport:
    """Everything a run reports; ``golden()`` drops the timing for byte comparisons."""

    instance: dict[str, Any]
    td_width: int
    td_nodes: int
    formulation: str
    stats: dict[str, Any]
    status: str
    optimum: str | None
    integral: bool | None
    oracles: dict[str, bool] = field(default_factory=dict)
    wall_time: float = 0.0

    def golden(self) -> dict[str, Any]:
        data = asdict(self)
        data.pop("wall_time")
        return data

    def to_json(self) -> dict[str, Any]:
        return asdict(self)


def instance_summary(instance: CspInstance) -> dict[str, Any]:
    return {
        "n": instance.n,
        "D": instance.max_domain_size,
        "hard": len(instance.hard),
        "soft": len(instance.soft),
        "sense": instance.sense.value,
    }


def stats_json(stats: FormulationStats) -> dict[str, Any]:
    return {k: v for k, v in stats.as_row().items()}


def load_inputs(instance_path: str, td_path: str | None) -> tuple[CspInstance, TreeDecomposition | None]:
    instance = load_instance(instance_path)
    td = read_td(td_path) if td_path else None
    return instance, td
