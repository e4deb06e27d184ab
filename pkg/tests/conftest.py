import json

import pytest

from hypertoric_toolbox.lattice import Character, build_action


@pytest.fixture
def diagonal():
    """G_m acting on A^2 with weights (1, 1)."""
    return build_action([[1], [1]], label="diagonal")


@pytest.fixture
def a3():
    """The rank-two torus acting on A^3 with weights e1, e2, e1 + e2."""
    return build_action([[1, 0], [0, 1], [1, 1]], label="A3")


@pytest.fixture
def one():
    return Character((1,))


@pytest.fixture
def write_input(tmp_path):
    def _write(payload: dict, name: str = "input.json") -> str:
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return str(path)
    return _write
