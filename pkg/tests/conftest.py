"""Shared fixtures: the small reduction instances most tests are phrased in."""

from __future__ import annotations

import json

import pytest

from csp_extform.instance import CspInstance, instance_to_dict
from csp_extform.reductions import (
    reduce_coloring,
    reduce_independent_set,
    reduce_max_cut,
    reduce_vertex_cover,
)
from tests.helpers import complete_graph, path_graph


@pytest.fixture
def is_k3() -> CspInstance:
    return reduce_independent_set(complete_graph(3)).instance


@pytest.fixture
def vc_k3() -> CspInstance:
    return reduce_vertex_cover(complete_graph(3)).instance


@pytest.fixture
def maxcut_k3() -> CspInstance:
    return reduce_max_cut(complete_graph(3)).instance


@pytest.fixture
def maxcut_p3() -> CspInstance:
    return reduce_max_cut(path_graph(3)).instance


@pytest.fixture
def single_var() -> CspInstance:
    return CspInstance(1, ((0, 1),))


@pytest.fixture
def write_instance(tmp_path):
    """Write an instance as JSON under tmp_path and return the path."""

    def _write(instance: CspInstance, name: str = "instance.json"):
        path = tmp_path / name
        path.write_text(json.dumps(instance_to_dict(instance), indent=2))
        return path

    return _write


@pytest.fixture
def k4_three_colours() -> CspInstance:
    return reduce_coloring(complete_graph(4), 3).instance
