from __future__ import annotations

import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from collabnet import Edge, Layer, Network, Researcher, Roster  # noqa: E402

DATA = Path(__file__).parent / "data"


def ids(n: int) -> list[str]:
    return [f"v{i}" for i in range(n)]


def make_net(n: int, edges, directed: bool = False) -> Network:
    layer = Layer.INFORMATION if directed else Layer.COAUTHORSHIP
    names = ids(n)
    return Network.build(names, [Edge(names[s], names[d], 1.0) for s, d in edges], layer=layer)


def labelled_roster(n: int, attribute: str, labels) -> Roster:
    return Roster(Researcher(f"v{i}", **{attribute: None if lab is None else str(lab)})
                  for i, lab in enumerate(labels))


def load_json(name: str):
    return json.loads((DATA / name).read_text())


@pytest.fixture(scope="session")
def metric_oracles():
    return load_json("metric_oracles.json")


@pytest.fixture(scope="session")
def ei_oracles():
    return load_json("ei_oracles.json")
