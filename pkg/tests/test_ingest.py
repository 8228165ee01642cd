import pytest

from collabnet import Edge, Layer, Network, Researcher, Roster
from collabnet.errors import DataError, DuplicateIdentifierError, IdentifierError, ShapeError
from collabnet.ingest import (AuthorshipRecord, load_adjacency_matrix, load_authorship, load_edge_list,
                              load_roster, project_bipartite, write_adjacency_matrix, write_authorship,
                              write_edges, write_roster)


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_roster_basic(tmp_path):
    p = write(tmp_path, "n.csv", "id,lat,lon\na,1.5,2.5\nb,-3,4\n")
    roster, rep = load_roster(p)
    assert roster.ids == ("a", "b") and roster["a"].location == (1.5, 2.5)
    assert rep.rows_kept == 2 and rep.rows_dropped == 0


def test_roster_duplicate_and_bad_rows(tmp_path):
    with pytest.raises(DuplicateIdentifierError, match="'x'"):
        load_roster(write(tmp_path, "d.csv", "id\nx\nx\n"))
    roster, rep = load_roster(write(tmp_path, "m.csv", "id,lat,lon\na,abc,1\nb,,\nc,95,0\n"))
    assert roster.ids == ("b",) and [r for r, _ in rep.dropped] == [2, 4]
    with pytest.raises(DataError, match="row 2"):
        load_roster(write(tmp_path, "e.csv", "id,education\na,preschool\n"))
    with pytest.raises(DataError):
        load_roster(write(tmp_path, "h.csv", "name\na\n"))


def test_galup_sized_roster(tmp_path):
    rows = "".join(f"g{i},,female,masters\n" for i in range(22))
    roster, _ = load_roster(write(tmp_path, "g.csv", "id,label,gender,education\n" + rows))
    assert len(roster) == 22


def test_semicolon_delimiter(tmp_path):
    roster, _ = load_roster(write(tmp_path, "s.csv", "id;gender\na;f\nb;m\n"), delimiter=";")
    assert roster.values("gender") == ["f", "m"]


def test_edge_list(tmp_path):
    roster = Roster.from_ids("ab")
    net, rep = load_edge_list(write(tmp_path, "e.csv", "src,dst\na,b\nb,a\n"), "trust", roster)
    assert net.directed and net.m == 2
    net, rep = load_edge_list(write(tmp_path, "u.csv", "src,dst,weight\na,zzz,1\na,a,1\na,b,0\na,b,x\n"),
                              "information", roster)
    assert net.m == 0 and rep.unknown_ids == ["zzz"] and rep.rows_dropped == 4
    net, rep = load_edge_list(write(tmp_path, "l.csv", "src,dst,layer\na,b,trust\na,b,information\n"),
                              "information", roster)
    assert net.m == 1 and rep.rows_dropped == 1
    with pytest.raises(DataError, match="dst"):
        load_edge_list(write(tmp_path, "x.csv", "src,target\na,b\n"), "trust", roster)


def test_srg_sized_edge_list(tmp_path):
    ids = [f"s{i:02d}" for i in range(34)]
    pairs = [(a, b) for a in ids for b in ids if a != b][:254]
    text = "src,dst\n" + "".join(f"{a},{b}\n" for a, b in pairs)
    net, _ = load_edge_list(write(tmp_path, "srg.csv", text), "information", Roster.from_ids(ids))
    assert net.m == 254


def test_adjacency(tmp_path):
    roster = Roster.from_ids("abc")
    net = load_adjacency_matrix(write(tmp_path, "a.csv", "id,a,b,c\na,0,1,0\nb,0,0,0\nc,0,0,0\n"), "trust", roster)
    assert net.edges == (Edge("a", "b", 1.0),)
    five = Roster.from_ids("abcde")
    zero = "id,a,b,c,d,e\n" + "".join(f"{x},0,0,0,0,0\n" for x in "abcde")
    assert load_adjacency_matrix(write(tmp_path, "z.csv", zero), "information", five).m == 0
    sym = "id,a,b,c\na,0,1,1\nb,1,0,0\nc,1,0,0\n"
    assert load_adjacency_matrix(write(tmp_path, "s.csv", sym), "coauthorship", roster).m == 2
    with pytest.raises(DataError, match="symmetric"):
        load_adjacency_matrix(write(tmp_path, "n.csv", "id,a,b,c\na,0,1,0\nb,0,0,0\nc,0,0,0\n"),
                              "coauthorship", roster)
    with pytest.raises(ShapeError):
        load_adjacency_matrix(write(tmp_path, "r.csv", "id,a,b,c\na,0,1,0\nb,0,0,0\n"), "trust", roster)
    with pytest.raises(IdentifierError):
        load_adjacency_matrix(write(tmp_path, "i.csv", "id,a,b,c\na,0,1,0\nc,0,0,0\nb,0,0,0\n"), "trust", roster)


def test_projection():
    recs = [AuthorshipRecord("P1", a) for a in "ABC"] + [AuthorshipRecord("P2", a) for a in "BC"]
    net = project_bipartite(recs)
    assert {(e.src, e.dst): e.weight for e in net.edges} == {("A", "B"): 1, ("A", "C"): 1, ("B", "C"): 2}
    solo = project_bipartite([AuthorshipRecord("P1", "A")])
    assert solo.nodes == ("A",) and solo.m == 0
    with pytest.raises(IdentifierError):
        project_bipartite(recs, nodes=["A", "B"])


def test_projection_counts(tmp_path):
    # 79 papers by 391 distinct authors give a 391-node network.
    rows = ["paper_id,author_id"]
    for a in range(391):
        rows.append(f"P{a % 79},r{a}")
    records, rep = load_authorship(write(tmp_path, "auth.csv", "\n".join(rows) + "\nP0,r0\n"))
    assert rep.rows_dropped == 1
    net = project_bipartite(records)
    assert net.n == 391 and len({r.paper_id for r in records}) == 79


def test_round_trip(tmp_path):
    roster = Roster([Researcher("b", gender="m", location=(1.25, -3.5)), Researcher("a", education="masters")])
    net = Network.build(["a", "b"], [("a", "b", 2.5)], layer="coauthorship")
    write_roster(tmp_path / "n.csv", roster)
    write_edges(tmp_path / "e.csv", net)
    back, _ = load_roster(tmp_path / "n.csv")
    assert back["b"] == roster["b"] and back["a"] == roster["a"]
    net2, _ = load_edge_list(tmp_path / "e.csv", "coauthorship", back)
    assert net2.edges == net.edges
    write_adjacency_matrix(tmp_path / "m.csv", net)
    assert load_adjacency_matrix(tmp_path / "m.csv", "coauthorship", back).edges == net.edges
    recs = [AuthorshipRecord("P1", "a"), AuthorshipRecord("P1", "b")]
    write_authorship(tmp_path / "au.csv", recs)
    assert load_authorship(tmp_path / "au.csv")[0] == recs


def test_missing_file(tmp_path):
    with pytest.raises(OSError, match="nope.csv"):
        load_roster(tmp_path / "nope.csv")
