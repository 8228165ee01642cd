import itertools

import pytest

from collabnet import Edge, Layer, Network, Researcher, Roster
from collabnet.errors import DataError, DuplicateIdentifierError, IdentifierError
from collabnet.model import (canonical_attribute, connected_components, degree, parse_education,
                             shortest_path_lengths, undirected_view)


def test_degree_modes():
    tri = Network.build("ABC", [("A", "B"), ("B", "C"), ("A", "C")], layer="coauthorship")
    assert degree(tri, "A") == 2
    one = Network.build("AB", [("A", "B")], layer="information")
    assert (degree(one, "B", "in"), degree(one, "B", "out"), degree(one, "B", "total")) == (1, 0, 1)
    four = Network.build("ABCD", [("A", "B"), ("A", "C")], layer="trust")
    assert degree(four, "A", "out") == 2 and degree(four, "D") == 0
    with pytest.raises(IdentifierError):
        degree(four, "Z")


def test_weighted_degree():
    net = Network.build("ABC", [("A", "B", 2.0), ("A", "C", 1.5)], layer="coauthorship")
    assert degree(net, "A", weighted=True) == 3.5


def test_shortest_paths():
    path = Network.build("ABC", [("A", "B"), ("B", "C")])
    assert shortest_path_lengths(path, "A") == {"A": 0, "B": 1, "C": 2}
    arc = Network.build("AB", [("A", "B")], layer="information")
    assert shortest_path_lengths(arc, "B") == {"B": 0, "A": None}
    assert shortest_path_lengths(arc, "B", respect_direction=False) == {"B": 0, "A": 1}
    c5 = Network.build(range_ids := [str(i) for i in range(5)],
                       [(range_ids[k], range_ids[(k + 1) % 5]) for k in range(5)])
    assert sorted(shortest_path_lengths(c5, "0").values()) == [0, 1, 1, 2, 2]


def test_undirected_view():
    both = Network.build("AB", [("A", "B"), ("B", "A")], layer="information")
    view = undirected_view(both)
    assert not view.directed and view.edges == (Edge("A", "B", 2.0),)
    assert undirected_view(Network.build("AB", [("A", "B")], layer="trust")).edges == (Edge("A", "B", 1.0),)
    und = Network.build("ABC", [("A", "B"), ("B", "C")])
    assert undirected_view(und) is und


def test_components():
    two = Network.build("abcdef", [("a", "b"), ("b", "c"), ("a", "c"), ("d", "e"), ("e", "f"), ("d", "f")])
    assert sorted(len(c) for c in connected_components(two)) == [3, 3]
    assert len(connected_components(Network.build("abcd", []))) == 4
    nodes = [str(i) for i in range(10)]
    edges = [(nodes[a], nodes[b]) for a, b in itertools.combinations(range(5), 2)]
    edges += [(nodes[a], nodes[b]) for a, b in itertools.combinations(range(5, 10), 2)] + [("4", "5")]
    assert [len(c) for c in connected_components(Network.build(nodes, edges))] == [10]


def test_build_canonicalises():
    net = Network.build("AB", [("B", "A", 1), ("A", "B", 2), ("A", "A", 1)], layer="coauthorship")
    assert net.edges == (Edge("A", "B", 3.0),)
    assert net.m == 1 and net._meta["self_loops_dropped"] == 1
    info = Network.build("AB", [("A", "B", 5), ("A", "B", 5)], layer="information")
    assert info.edges == (Edge("A", "B", 1.0),)
    with pytest.raises(IdentifierError, match="zzz"):
        Network.build("AB", [("A", "zzz")])
    with pytest.raises(DuplicateIdentifierError):
        Network.build("AA", [])
    with pytest.raises(DataError):
        Network.build("AB", [("A", "B", -1)])
    with pytest.raises(DataError):
        Network.build("AB", [], directed=False, layer="trust")


def test_researcher_validation():
    assert Researcher("x", education="PhD").education == "doctorate"
    with pytest.raises(DataError):
        Researcher("x", location=(91, 0))
    with pytest.raises(DataError):
        Researcher("")
    with pytest.raises(DataError):
        parse_education("kindergarten")
    assert canonical_attribute("country_of_residence") == "country_residence"
    with pytest.raises(IdentifierError):
        canonical_attribute("height")


def test_roster():
    roster = Roster([Researcher("a", gender="f"), Researcher("b")])
    assert roster.ids == ("a", "b") and roster.values("gender") == ["f", None]
    with pytest.raises(IdentifierError, match="zz"):
        roster["zz"]
    with pytest.raises(DuplicateIdentifierError):
        Roster([Researcher("a"), Researcher("a")])


def test_layers():
    assert Layer("trust").directed and not Layer("coauthorship").directed
