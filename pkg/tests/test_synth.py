import math

import numpy as np
import pytest

from collabnet.errors import SpecError
from collabnet.geo import haversine_km
from collabnet.ingest import load_edge_list, load_roster, write_edges, write_roster
from collabnet.synth import (BoxLocations, ClusterLocations, FixedLocations, GeneratorSpec, demo_spec,
                             generate_dyadic_network, generate_planted_partition, node_ids)


def test_intercept_only_rate():
    spec = GeneratorSpec(n=60, beta={"intercept": math.log(0.3 / 0.7)}, seed=4)
    _, net, table = generate_dyadic_network(spec)
    rate = net.m / (60 * 59)
    assert abs(rate - 0.3) < 3 * math.sqrt(0.3 * 0.7 / (60 * 59))
    assert len(table) == 3540


def test_distance_decay_between_clusters():
    spec = GeneratorSpec(n=60, beta={"intercept": 0.0, "distance": -1.0},
                         locations=ClusterLocations(((0, 0), (0, 60)), spread_km=30), seed=2)
    roster, net, table = generate_dyadic_network(spec)
    same = np.array([int(i[1:]) % 2 == int(j[1:]) % 2 for i, j in zip(table.i, table.j)])
    y = table.outcome
    assert y[~same].mean() < y[same].mean()


def test_determinism_and_seed():
    spec = demo_spec()
    a = generate_dyadic_network(spec)
    b = generate_dyadic_network(spec)
    assert a[0] == b[0] and a[1] == b[1]
    other = generate_dyadic_network(demo_spec(seed=1))
    assert other[1] != a[1]


def test_bundled_demo_matches_generator(tmp_path):
    from collabnet.cli import demo_paths

    roster, net, _ = generate_dyadic_network(demo_spec())
    write_roster(tmp_path / "n.csv", roster)
    write_edges(tmp_path / "e.csv", net)
    nodes, edges = demo_paths()
    assert (tmp_path / "n.csv").read_bytes() == nodes.read_bytes()
    assert (tmp_path / "e.csv").read_bytes() == edges.read_bytes()


def test_round_trip_through_ingest(tmp_path):
    spec = GeneratorSpec(n=12, beta={"intercept": -0.5, "gender": 0.5}, attributes={"gender": {"f": 1, "m": 1}},
                         locations=BoxLocations(-10, 10, -10, 10), seed=6)
    roster, net, _ = generate_dyadic_network(spec)
    write_roster(tmp_path / "n.csv", roster)
    write_edges(tmp_path / "e.csv", net)
    back, _ = load_roster(tmp_path / "n.csv")
    assert back == roster
    assert load_edge_list(tmp_path / "e.csv", net.layer, back)[0] == net


def test_planted_partition():
    roster, net, truth = generate_planted_partition(3, [4, 5, 6], 1.0, 0.0, seed=0)
    assert net.m == 6 + 10 + 15 and truth.sizes == [4, 5, 6]
    roster, net, truth = generate_planted_partition(2, 20, 0.5, 0.1, centers=[(0, 0), (0, 45)], spread_km=50,
                                                    countries=["A", "B"], seed=3)
    r0 = roster[truth.communities[0][0]]
    assert r0.country_residence == "A" and haversine_km(r0.location, (0, 0)) < 300


def test_spec_errors():
    with pytest.raises(SpecError):
        generate_dyadic_network(GeneratorSpec(n=5, beta={"distance": -1}))
    with pytest.raises(SpecError):
        generate_dyadic_network(GeneratorSpec(n=5, beta={"intercept": 0, "distance": -1}))
    with pytest.raises(SpecError):
        generate_dyadic_network(GeneratorSpec(n=5, beta={"intercept": 0, "gender": 1}))
    with pytest.raises(SpecError):
        generate_dyadic_network(GeneratorSpec(n=3, beta={"intercept": 0}, locations=FixedLocations(((0, 0),))))
    with pytest.raises(SpecError):
        generate_planted_partition(2, 5, 0.1, 0.5)
    with pytest.raises(SpecError):
        generate_planted_partition(2, [5], 0.5, 0.1)


def test_node_ids():
    assert node_ids(3) == ["r000", "r001", "r002"] and node_ids(1500)[-1] == "r1499"
