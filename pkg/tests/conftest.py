import json

import numpy as np
import pytest

from models.domain import MatrixGame, rock_paper_scissors, zero_game


@pytest.fixture
def rps() -> MatrixGame:
    return rock_paper_scissors()


@pytest.fixture
def zero2() -> MatrixGame:
    return zero_game(2)


@pytest.fixture
def identity3() -> MatrixGame:
    return MatrixGame(np.eye(3), name="identity")


@pytest.fixture
def write_game(tmp_path):
    """Write a game file into tmp_path and return its path as a string."""

    def _write(name: str, rows, label=None) -> str:
        payload = {"n": len(rows), "payoff_matrix": rows}
        if label:
            payload["name"] = label
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return str(path)

    return _write


@pytest.fixture
def rps_file(write_game) -> str:
    return write_game("rps.json", [[0, -1, 1], [1, 0, -1], [-1, 1, 0]], "rps")


@pytest.fixture
def few_gumbel_draws(monkeypatch):
    """Run the Gumbel check of the suite on 20k draws instead of a million."""
    from config.settings import settings

    monkeypatch.setattr(settings, "GUMBEL_DRAWS", 20_000)
