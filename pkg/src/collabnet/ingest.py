"""Delimited-text loaders and writers for rosters, edge lists, adjacency
matrices and authorship records, plus the co-authorship projection."""
from __future__ import annotations

import csv
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, NamedTuple, Optional, Sequence

from .errors import DataError, DuplicateIdentifierError, IdentifierError, ShapeError
from .model import ATTRIBUTES, Edge, Layer, Network, Researcher, Roster, parse_education

log = logging.getLogger(__name__)

NODE_COLUMNS = ("id", "label", *ATTRIBUTES, "lat", "lon")
EDGE_COLUMNS = ("src", "dst", "weight", "layer")
AUTHORSHIP_COLUMNS = ("paper_id", "author_id")


class AuthorshipRecord(NamedTuple):
    paper_id: str
    author_id: str


@dataclass
class IngestReport:
    source: str = ""
    rows_read: int = 0
    rows_kept: int = 0
    dropped: list[tuple[int, str]] = field(default_factory=list)
    unknown_ids: list[str] = field(default_factory=list)
    missing: dict[str, int] = field(default_factory=dict)

    @property
    def rows_dropped(self) -> int:
        return len(self.dropped)

    def drop(self, row: int, reason: str) -> None:
        self.dropped.append((row, reason))

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "rows_read": self.rows_read,
            "rows_kept": self.rows_kept,
            "rows_dropped": self.rows_dropped,
            "dropped": [{"row": r, "reason": why} for r, why in self.dropped],
            "unknown_ids": self.unknown_ids,
            "missing": self.missing,
        }


def _reader(path, delimiter: str):
    path = Path(path)
    try:
        handle = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror}") from exc
    return handle, csv.DictReader(handle, delimiter=delimiter)


def _cell(row: dict, key: str) -> Optional[str]:
    value = row.get(key)
    if value is None:
        return None
    value = value.strip()
    return value or None


def load_roster(path, delimiter: str = ",") -> tuple[Roster, IngestReport]:
    """Read a nodes file into a :class:`Roster`.

    Only ``id`` is required.  Empty cells become missing values.  Rows with
    malformed or half-specified coordinates are dropped and reported; an
    unrecognised education level or a repeated id is a hard error.
    """
    report = IngestReport(source=str(path))
    handle, reader = _reader(path, delimiter)
    with handle:
        if reader.fieldnames is None or "id" not in [f.strip() for f in reader.fieldnames]:
            raise DataError(f"{path}: header must name an 'id' column")
        reader.fieldnames = [f.strip() for f in reader.fieldnames]
        researchers: list[Researcher] = []
        seen: set[str] = set()
        missing = {a: 0 for a in (*ATTRIBUTES, "location")}
        for rownum, row in enumerate(reader, start=2):
            report.rows_read += 1
            rid = _cell(row, "id")
            if rid is None:
                report.drop(rownum, "empty id")
                continue
            if rid in seen:
                raise DuplicateIdentifierError(f"{path}: duplicate id {rid!r} at row {rownum}")
            lat, lon = _cell(row, "lat"), _cell(row, "lon")
            location = None
            if lat is not None or lon is not None:
                try:
                    location = (float(lat), float(lon))
                    if not all(math.isfinite(v) for v in location):
                        raise ValueError
                    if not (-90 <= location[0] <= 90 and -180 <= location[1] <= 180):
                        raise ValueError
                except (TypeError, ValueError):
                    report.drop(rownum, f"malformed coordinates for {rid!r}: lat={lat!r} lon={lon!r}")
                    continue
            try:
                education = parse_education(_cell(row, "education"))
            except DataError as exc:
                raise DataError(f"{path}: row {rownum} ({rid}): {exc}") from None
            attrs = {a: _cell(row, a) for a in ATTRIBUTES if a != "education"}
            r = Researcher(id=rid, label=_cell(row, "label"), education=education, location=location, **attrs)
            for a in ATTRIBUTES:
                if getattr(r, a) is None:
                    missing[a] += 1
            if location is None:
                missing["location"] += 1
            seen.add(rid)
            researchers.append(r)
            report.rows_kept += 1
    report.missing = {k: v for k, v in missing.items() if v}
    return Roster(researchers), report


def _ids_of(roster) -> tuple[str, ...]:
    if isinstance(roster, Roster):
        return roster.ids
    return tuple(roster)


def load_edge_list(path, layer: Layer | str, roster, delimiter: str = ",") -> tuple[Network, IngestReport]:
    """Read ``src,dst[,weight][,layer]`` rows into a network over ``roster``.

    Rows naming unknown ids, non-positive weights, self-loops or a different
    layer (when the file carries a ``layer`` column) are dropped and reported.
    """
    layer = Layer(layer)
    ids = _ids_of(roster)
    known = set(ids)
    report = IngestReport(source=str(path))
    unknown: set[str] = set()
    edges: list[Edge] = []
    handle, reader = _reader(path, delimiter)
    with handle:
        if reader.fieldnames is None:
            raise DataError(f"{path}: empty edge file")
        reader.fieldnames = [f.strip() for f in reader.fieldnames]
        for col in ("src", "dst"):
            if col not in reader.fieldnames:
                raise DataError(f"{path}: missing required column {col!r}")
        for rownum, row in enumerate(reader, start=2):
            report.rows_read += 1
            src, dst = _cell(row, "src"), _cell(row, "dst")
            row_layer = _cell(row, "layer")
            if row_layer is not None and row_layer != layer.value:
                report.drop(rownum, f"layer {row_layer!r} is not {layer.value!r}")
                continue
            if src is None or dst is None:
                report.drop(rownum, "empty endpoint")
                continue
            bad = [x for x in (src, dst) if x not in known]
            if bad:
                unknown.update(bad)
                report.drop(rownum, f"unknown id(s) {', '.join(sorted(set(bad)))}")
                continue
            raw_w = _cell(row, "weight")
            try:
                w = 1.0 if raw_w is None else float(raw_w)
            except ValueError:
                report.drop(rownum, f"unparsable weight {raw_w!r}")
                continue
            if not (w > 0 and math.isfinite(w)):
                report.drop(rownum, f"non-positive weight {raw_w}")
                continue
            if src == dst:
                report.drop(rownum, f"self-loop on {src!r}")
                continue
            edges.append(Edge(src, dst, w))
            report.rows_kept += 1
    report.unknown_ids = sorted(unknown)
    if unknown:
        log.warning("%s: dropped edges referencing unknown ids %s", path, report.unknown_ids)
    return Network.build(ids, edges, layer=layer), report


def load_adjacency_matrix(path, layer: Layer | str, roster, delimiter: str = ",") -> Network:
    """Read a square matrix whose first row and column hold researcher ids.

    A nonzero cell ``(i, j)`` is a tie ``i -> j``; the diagonal is ignored.
    Co-authorship matrices must be symmetric and cell values become weights.
    """
    layer = Layer(layer)
    ids = _ids_of(roster)
    known = set(ids)
    with Path(path).open(newline="", encoding="utf-8") as handle:
        rows = [r for r in csv.reader(handle, delimiter=delimiter) if any(c.strip() for c in r)]
    if not rows:
        raise ShapeError(f"{path}: empty matrix")
    header = [c.strip() for c in rows[0][1:]]
    body = rows[1:]
    if len(body) != len(header) or any(len(r) - 1 != len(header) for r in body):
        raise ShapeError(f"{path}: matrix is not square ({len(body)} rows, {len(header)} columns)")
    row_ids = [r[0].strip() for r in body]
    if row_ids != header:
        raise IdentifierError(f"{path}: row ids do not match column ids")
    unknown = [i for i in header if i not in known]
    if unknown:
        raise IdentifierError(f"{path}: ids not in roster: {', '.join(unknown)}")
    values = []
    for r, row in zip(row_ids, body):
        try:
            vals = [float(c) if c.strip() else 0.0 for c in row[1:]]
        except ValueError as exc:
            raise DataError(f"{path}: row {r!r}: {exc}") from None
        if any(v < 0 or not math.isfinite(v) for v in vals):
            raise DataError(f"{path}: row {r!r} has negative or non-finite entries")
        values.append(vals)
    edges = []
    k = len(header)
    for a in range(k):
        for b in range(k):
            if a == b or values[a][b] == 0:
                continue
            if not layer.directed:
                if values[a][b] != values[b][a]:
                    raise DataError(f"{path}: co-authorship matrix is not symmetric at ({header[a]}, {header[b]})")
                if a > b:
                    continue
            edges.append(Edge(header[a], header[b], values[a][b]))
    return Network.build(ids, edges, layer=layer)


def load_authorship(path, delimiter: str = ",") -> tuple[list[AuthorshipRecord], IngestReport]:
    report = IngestReport(source=str(path))
    records: list[AuthorshipRecord] = []
    seen: set[AuthorshipRecord] = set()
    handle, reader = _reader(path, delimiter)
    with handle:
        if reader.fieldnames is None:
            raise DataError(f"{path}: empty authorship file")
        reader.fieldnames = [f.strip() for f in reader.fieldnames]
        for col in AUTHORSHIP_COLUMNS:
            if col not in reader.fieldnames:
                raise DataError(f"{path}: missing required column {col!r}")
        for rownum, row in enumerate(reader, start=2):
            report.rows_read += 1
            rec = AuthorshipRecord(_cell(row, "paper_id"), _cell(row, "author_id"))
            if rec.paper_id is None or rec.author_id is None:
                report.drop(rownum, "empty paper_id or author_id")
                continue
            if rec in seen:
                report.drop(rownum, f"duplicate record {rec.paper_id}/{rec.author_id}")
                continue
            seen.add(rec)
            records.append(rec)
            report.rows_kept += 1
    return records, report


def project_bipartite(records: Iterable[AuthorshipRecord], nodes: Optional[Sequence[str]] = None) -> Network:
    """Project author-paper incidence onto an author co-authorship network.

    Pair weight is the number of distinct papers the two authors share.
    Authors without co-authors stay in the network as isolated nodes.
    ``nodes`` fixes the node order (and may add authors with no papers).
    """
    papers: dict[str, set[str]] = defaultdict(set)
    authors: set[str] = set()
    for paper_id, author_id in records:
        papers[paper_id].add(author_id)
        authors.add(author_id)
    if nodes is None:
        nodes = sorted(authors)
    else:
        missing = authors.difference(nodes)
        if missing:
            raise IdentifierError(f"authors not in node list: {', '.join(sorted(missing))}")
    edges = []
    for paper_id in sorted(papers):
        for a, b in combinations(sorted(papers[paper_id]), 2):
            edges.append(Edge(a, b, 1.0))
    return Network.build(nodes, edges, layer=Layer.COAUTHORSHIP)


def _num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def write_roster(path, roster: Roster, delimiter: str = ",") -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        w = csv.writer(handle, delimiter=delimiter, lineterminator="\n")
        w.writerow(NODE_COLUMNS)
        for r in sorted(roster, key=lambda r: r.id):
            lat, lon = r.location if r.location is not None else ("", "")
            w.writerow([r.id, r.label or "", r.gender or "", r.education or "", r.discipline or "",
                        r.employer or "", r.country_origin or "", r.country_residence or "",
                        r.race_ethnicity or "", repr(lat) if lat != "" else "", repr(lon) if lon != "" else ""])


def write_edges(path, net: Network, delimiter: str = ",") -> None:
    layer = net.layer.value if net.layer is not None else ""
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        w = csv.writer(handle, delimiter=delimiter, lineterminator="\n")
        w.writerow(EDGE_COLUMNS)
        for e in sorted(net.edges, key=lambda e: (e.src, e.dst)):
            w.writerow([e.src, e.dst, _num(e.weight), layer])


def write_authorship(path, records: Iterable[AuthorshipRecord], delimiter: str = ",") -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        w = csv.writer(handle, delimiter=delimiter, lineterminator="\n")
        w.writerow(AUTHORSHIP_COLUMNS)
        for rec in sorted(set(records)):
            w.writerow(rec)


def write_adjacency_matrix(path, net: Network, delimiter: str = ",") -> None:
    ids = sorted(net.nodes)
    a = net.adjacency(weighted=True)
    idx = net.index
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        w = csv.writer(handle, delimiter=delimiter, lineterminator="\n")
        w.writerow(["id", *ids])
        for i in ids:
            w.writerow([i, *(_num(a[idx[i], idx[j]]) for j in ids)])
