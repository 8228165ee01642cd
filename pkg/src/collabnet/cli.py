"""Command-line front end.

Every run writes its analysis files plus ``config.json`` (the resolved
configuration, seed included) into the output directory.  Wall-clock data
such as timestamps and the thread count go to ``metadata.json`` only, so two
runs with the same configuration and inputs produce byte-identical analysis
files.

Exit status: 0 success, 2 configuration error, 3 data error, 4 numerical
failure (separation, rank deficiency, non-convergence).
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import logging
import os
import platform
import sys
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__, outputs
from .communities import Partition, community_summary, walktrap
from .errors import (CollabnetError, ConfigError, DataError, DegenerateInputError, IdentifierError,
                     NumericalError, SpecError)
from .homophily import DEFAULT_ATTRIBUTES, ei_table
from .ingest import (load_adjacency_matrix, load_authorship, load_edge_list, load_roster, project_bipartite,
                     write_edges, write_roster)
from .metrics import MEASURES, centrality, metrics_report
from .model import Layer, Network, Roster, canonical_attribute
from .permtest import DEFAULT_DIRECTION, STATISTICS, permutation_test
from .regression import (DEFAULT_COVARIATES, DEFAULT_DISTANCE_SCALE, build_dyads, canonical_covariate,
                         fit_logistic, predict_curve)
from .synth import (DEMO_CENTERS, DEMO_COUNTRIES, GeneratorSpec, ClusterLocations, demo_spec,
                    generate_dyadic_network, generate_planted_partition)

log = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERICAL = 0, 2, 3, 4
OUTPUT_ENV = "COLLABNET_OUTPUT_DIR"
DEFAULT_OUTPUT = "collabnet-out"
SUBCOMMANDS = ("ingest", "metrics", "homophily", "regress", "communities", "permtest", "synth", "report")
DEMO_FILES = ("demo_nodes.csv", "demo_edges.csv")


def demo_paths() -> tuple[Path, Path]:
    base = resources.files(__package__).joinpath("data")
    return tuple(Path(str(base.joinpath(name))) for name in DEMO_FILES)


def _sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass(frozen=True)
class RunConfig:
    """Resolved configuration of one run.

    ``out`` and ``threads`` are excluded from :meth:`to_dict`: neither may
    change the analysis files.
    """

    subcommand: str
    nodes: Optional[str] = None
    edges: Optional[str] = None
    adjacency: Optional[str] = None
    authorship: Optional[str] = None
    demo: bool = False
    layer: str = Layer.COAUTHORSHIP.value
    delimiter: str = ","
    covariates: tuple[str, ...] = DEFAULT_COVARIATES
    ordering: Optional[str] = None
    distance_scale: float = DEFAULT_DISTANCE_SCALE
    walk_length: int = 4
    permutations: int = 1000
    seed: int = 0
    format: str = "csv"
    attributes: tuple[str, ...] = DEFAULT_ATTRIBUTES
    statistics: tuple[str, ...] = STATISTICS
    direction: Optional[str] = None
    pooled: bool = True
    bins: int = 30
    curve_step_km: float = 100.0
    curve_max_km: Optional[float] = None
    fixed: tuple[tuple[str, float], ...] = ()
    partition: Optional[str] = None
    synth_kind: str = "demo"
    synth_n: int = 60
    beta: tuple[tuple[str, float], ...] = ()
    communities: int = 3
    community_size: int = 10
    p_in: float = 0.9
    p_out: float = 0.02
    spread_km: float = 50.0
    out: str = field(default=DEFAULT_OUTPUT, compare=False)
    threads: int = field(default=1, compare=False)

    def input_files(self) -> dict[str, Path]:
        if self.demo:
            nodes, edges = demo_paths()
            return {"nodes": nodes, "edges": edges}
        return {k: Path(v) for k, v in (("nodes", self.nodes), ("edges", self.edges),
                                         ("adjacency", self.adjacency), ("authorship", self.authorship)) if v}

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("out")
        d.pop("threads")
        d["inputs"] = {
            k: {"path": "<bundled demo>/" + p.name if self.demo else str(p),
                "sha256": _sha256(p) if p.exists() else None}
            for k, p in self.input_files().items()
        }
        d["fixed"] = dict(self.fixed)
        d["beta"] = dict(self.beta)
        d["version"] = __version__
        return d


def _pairs(items: Optional[Sequence[str]], what: str) -> tuple[tuple[str, float], ...]:
    out = []
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"{what} entry {item!r} must read NAME=VALUE")
        try:
            out.append((name.strip(), float(value)))
        except ValueError:
            raise ConfigError(f"{what} entry {item!r}: {value!r} is not a number") from None
    return tuple(out)


def _split(text: Optional[str]) -> Optional[tuple[str, ...]]:
    if text is None:
        return None
    return tuple(t.strip() for t in text.split(",") if t.strip())


def resolve_config(args: argparse.Namespace, environ=os.environ) -> RunConfig:
    """Validate parsed arguments and fill in defaults."""
    cmd = args.command
    out = args.out or environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT
    kw = dict(subcommand=cmd, out=out, threads=args.threads, seed=args.seed, format=args.format)
    if args.threads < 1:
        raise ConfigError("--threads must be >= 1")
    try:
        layer = Layer(args.layer).value
    except ValueError:
        raise ConfigError(f"unknown layer {args.layer!r}; choose from {[m.value for m in Layer]}") from None
    kw["layer"] = layer
    if cmd != "synth":
        sources = [s for s in ("edges", "adjacency", "authorship") if getattr(args, s)]
        if args.demo:
            if sources or args.nodes:
                raise ConfigError("--demo cannot be combined with input files")
        else:
            if len(sources) != 1:
                raise ConfigError("give exactly one of --edges, --adjacency, --authorship (or --demo)")
            if not args.nodes and sources[0] != "authorship":
                raise ConfigError(f"--{sources[0]} needs --nodes")
        if args.authorship and layer != Layer.COAUTHORSHIP.value:
            raise ConfigError("authorship input always yields the coauthorship layer")
        if len(args.delimiter) != 1:
            raise ConfigError("--delimiter must be a single character")
        kw.update(nodes=args.nodes, edges=args.edges, adjacency=args.adjacency, authorship=args.authorship,
                  demo=args.demo, delimiter=args.delimiter)
    if args.permutations < 1:
        raise ConfigError("--permutations must be >= 1")
    if args.walk_length < 1:
        raise ConfigError("--walk-length must be >= 1")
    if not args.distance_scale > 0:
        raise ConfigError("--distance-scale must be positive")
    try:
        covs = _split(args.covariates)
        covs = DEFAULT_COVARIATES if covs is None else tuple(dict.fromkeys(canonical_covariate(c) for c in covs))
        attrs = _split(args.attributes)
        attrs = DEFAULT_ATTRIBUTES if attrs is None else tuple(canonical_attribute(a) for a in attrs)
    except IdentifierError as exc:
        raise ConfigError(str(exc)) from None
    stats = _split(args.statistics) or STATISTICS
    bad = [s for s in stats if s not in STATISTICS]
    if bad:
        raise ConfigError(f"unknown statistic(s) {bad}; choose from {STATISTICS}")
    if args.curve_step_km <= 0:
        raise ConfigError("--curve-step-km must be positive")
    kw.update(covariates=covs, ordering=args.ordering, distance_scale=args.distance_scale,
              walk_length=args.walk_length, permutations=args.permutations, attributes=attrs,
              statistics=stats, direction=args.direction, pooled=not args.per_community,
              bins=args.bins, curve_step_km=args.curve_step_km, curve_max_km=args.curve_max_km,
              fixed=_pairs(args.fixed, "--fixed"), partition=args.partition, synth_kind=args.kind,
              synth_n=args.n, beta=_pairs(args.beta, "--beta"), communities=args.communities,
              community_size=args.community_size, p_in=args.p_in, p_out=args.p_out, spread_km=args.spread_km)
    return RunConfig(**kw)


# -- loading ---------------------------------------------------------------

def load_inputs(cfg: RunConfig) -> tuple[Roster, Network, dict]:
    """Roster, network and ingest reports for the configured inputs."""
    files = cfg.input_files()
    reports = {}
    roster = None
    if "nodes" in files:
        roster, rep = load_roster(files["nodes"], cfg.delimiter)
        reports["nodes"] = rep.to_dict()
    if "edges" in files:
        net, rep = load_edge_list(files["edges"], cfg.layer, roster, cfg.delimiter)
        reports["edges"] = rep.to_dict()
    elif "adjacency" in files:
        net = load_adjacency_matrix(files["adjacency"], cfg.layer, roster, cfg.delimiter)
    else:
        records, rep = load_authorship(files["authorship"], cfg.delimiter)
        reports["authorship"] = rep.to_dict()
        if roster is None:
            roster = Roster.from_ids(sorted({r.author_id for r in records}))
        net = project_bipartite(records, roster.ids)
    return roster, net, reports


def _read_partition(path: str, net: Network) -> Partition:
    assignment = {}
    with Path(path).open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or not {"id", "community"} <= set(reader.fieldnames):
            raise DataError(f"{path}: partition file needs columns 'id' and 'community'")
        for rownum, row in enumerate(reader, start=2):
            try:
                assignment[row["id"].strip()] = int(row["community"])
            except ValueError:
                raise DataError(f"{path}: row {rownum}: community {row['community']!r} is not an integer") from None
    missing = [v for v in net.nodes if v not in assignment]
    if missing:
        raise IdentifierError(f"{path}: no community for node(s) {', '.join(missing[:5])}")
    return Partition.from_assignment(assignment, net.nodes)


# -- analyses ----------------------------------------------------------------

def do_ingest(cfg, out: Path, roster, net, reports) -> list[Path]:
    nodes, edges = out / "nodes.csv", out / "edges.csv"
    write_roster(nodes, roster)
    write_edges(edges, net)
    return [nodes, edges, outputs.write_json(out / "ingest_report.json", reports)]


def do_metrics(cfg, out: Path, roster, net) -> list[Path]:
    scores = {m: centrality(net, m) for m in MEASURES}
    return [outputs.write_metrics(out / "metrics", metrics_report(net), cfg.format),
            outputs.write_centrality(out / "centrality", net.nodes, scores, cfg.format)]


def do_homophily(cfg, out: Path, roster, net) -> tuple[list[Path], list]:
    reports = ei_table(net, roster, cfg.attributes, cfg.permutations, cfg.seed, cfg.threads)
    if not reports:
        raise DegenerateInputError("no attribute has ties with known values on both ends")
    return [outputs.write_homophily(out / "homophily", reports, cfg.format)], reports


def _curve_grid(cfg, table) -> list[float]:
    top = cfg.curve_max_km
    if top is None:
        top = float(np.max(table.distance_km)) if table.distance_km is not None and len(table) else 0.0
        top = cfg.curve_step_km * np.ceil(top / cfg.curve_step_km)
    return [float(d) for d in np.arange(0.0, top + cfg.curve_step_km / 2, cfg.curve_step_km)]


def do_regress(cfg, out: Path, roster, net) -> tuple[list[Path], object]:
    table = build_dyads(net, roster, cfg.covariates, cfg.ordering, cfg.distance_scale)
    if table.dropped:
        log.warning("dropped %d dyad(s) with missing covariates", table.dropped)
    fit = fit_logistic(table)
    files = [outputs.write_fit(out / "regression", fit, cfg.format)]
    if "distance" in fit.names:
        try:
            points = predict_curve(fit, _curve_grid(cfg, table), dict(cfg.fixed))
        except IdentifierError as exc:
            raise ConfigError(f"--fixed: {exc}") from None
        files.append(outputs.write_curve(out / "curve", points, cfg.format))
    return files, fit


def do_communities(cfg, out: Path, roster, net) -> tuple[list[Path], Partition]:
    part = walktrap(net, cfg.walk_length)
    summary = community_summary(part)
    files = [
        outputs.write_partition(out / "partition", part, cfg.format),
        outputs.write_community_summary(out / "communities", summary, cfg.format),
        outputs.write_merges(out / "merges", part, cfg.format),
        outputs.write_json(out / "communities_summary.json", {
            "walk_length": cfg.walk_length, "modularity": part.modularity, "n_communities": summary.n_communities,
            "singletons": summary.singletons, "largest_share": summary.largest_share, "cut_after_merges": part.cut,
        }),
    ]
    return files, part


def do_permtest(cfg, out: Path, roster, net, part: Optional[Partition] = None) -> list[Path]:
    if part is None:
        part = _read_partition(cfg.partition, net) if cfg.partition else walktrap(net, cfg.walk_length)
    results = [permutation_test(s, part, roster, cfg.permutations, cfg.seed,
                                cfg.direction or DEFAULT_DIRECTION[s], cfg.pooled, cfg.threads)
               for s in cfg.statistics]
    files = [outputs.write_permtest_summary(out / "permtest", results, cfg.format)]
    for res in results:
        files.append(outputs.write_histogram(out / f"permtest_hist_{res.statistic}", res, cfg.bins))
    return files


def do_synth(cfg, out: Path) -> list[Path]:
    if cfg.synth_kind == "planted":
        k = cfg.communities
        centers = [(0.0, (45.0 * c + 180.0) % 360.0 - 180.0) for c in range(k)]
        countries = [f"C{c}" for c in range(k)]
        roster, net, truth = generate_planted_partition(k, cfg.community_size, cfg.p_in, cfg.p_out, centers,
                                                        cfg.spread_km, cfg.seed, countries)
        extra = [outputs.write_partition(out / "truth_partition", truth, "csv")]
    else:
        if cfg.synth_kind == "demo":
            spec = demo_spec(cfg.seed)
        else:
            beta = dict(cfg.beta) or {"intercept": -2.0, "distance": -0.5, "employer": -1.0}
            if "intercept" not in beta:
                raise ConfigError("--beta must include intercept=VALUE")
            base = demo_spec(cfg.seed)
            spec = GeneratorSpec(
                n=cfg.synth_n, beta=beta,
                locations=ClusterLocations(DEMO_CENTERS, spread_km=cfg.spread_km, countries=DEMO_COUNTRIES),
                attributes=base.attributes, distance_scale=cfg.distance_scale, seed=cfg.seed,
                directed=Layer(cfg.layer).directed,
            )
        roster, net, table = generate_dyadic_network(spec)
        extra = [outputs.write_json(out / "truth_beta.json", {
            "beta": dict(spec.beta), "distance_scale_km": spec.distance_scale, "n": spec.n,
            "directed": spec.directed, "dyads": len(table)})]
    nodes, edges = out / "nodes.csv", out / "edges.csv"
    write_roster(nodes, roster)
    write_edges(edges, net)
    return [nodes, edges, *extra]


def do_report(cfg, out: Path, roster, net) -> list[Path]:
    files = do_metrics(cfg, out, roster, net)
    rep = metrics_report(net).to_dict()
    files.append(outputs.write_rows(out / "plot_centralization.csv", ("measure", "centralization"),
                                    [(m, rep[f"centralization_{m}"]) for m in MEASURES]))
    hfiles, ei = do_homophily(cfg, out, roster, net)
    files += hfiles
    files.append(outputs.write_rows(out / "plot_homophily.csv", ("attribute", "ei_raw", "ei_normalized"),
                                    [(r.attribute, r.ei_raw, r.ei_normalized) for r in ei]))
    rfiles, _ = do_regress(cfg, out, roster, net)
    files += rfiles
    cfiles, part = do_communities(cfg, out, roster, net)
    files += cfiles
    files += do_permtest(cfg, out, roster, net, part)
    return files


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("inputs")
    g.add_argument("--nodes", help="researcher attribute CSV")
    g.add_argument("--edges", help="edge list CSV (src,dst,weight,layer)")
    g.add_argument("--adjacency", help="square adjacency matrix CSV")
    g.add_argument("--authorship", help="author-paper incidence CSV (paper_id,author_id)")
    g.add_argument("--demo", action="store_true", help="use the bundled synthetic demo network")
    g.add_argument("--layer", default=Layer.COAUTHORSHIP.value, help="information, trust or coauthorship")
    g.add_argument("--delimiter", default=",")
    o = common.add_argument_group("output")
    o.add_argument("--out", help=f"output directory (default: ${OUTPUT_ENV} or ./{DEFAULT_OUTPUT})")
    o.add_argument("--format", choices=("csv", "json"), default="csv")
    a = common.add_argument_group("analysis")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--threads", type=int, default=1, help="worker cap; never changes results")
    a.add_argument("--permutations", type=int, default=1000)
    a.add_argument("--walk-length", type=int, default=4)
    a.add_argument("--distance-scale", type=float, default=DEFAULT_DISTANCE_SCALE, help="km per distance unit")
    a.add_argument("--covariates", help="comma-separated regression covariates")
    a.add_argument("--ordering", choices=("ordered", "unordered"),
                   help="dyad ordering (default: ordered for directed layers)")
    a.add_argument("--attributes", help="comma-separated attributes for the E-I table")
    a.add_argument("--statistics", help=f"comma-separated permutation statistics from {STATISTICS}")
    a.add_argument("--direction", choices=("less", "greater"),
                   help="alternative (default: less for distance, greater for country share)")
    a.add_argument("--per-community", action="store_true",
                   help="average per-community means instead of pooling pairs")
    a.add_argument("--partition", help="CSV (id,community) to test instead of running walktrap")
    a.add_argument("--bins", type=int, default=30, help="histogram bins for permutation outputs")
    a.add_argument("--curve-step-km", type=float, default=100.0)
    a.add_argument("--curve-max-km", type=float)
    a.add_argument("--fixed", action="append", metavar="NAME=VALUE",
                   help="hold a covariate at VALUE along the curve (default 0)")
    s = common.add_argument_group("synth")
    s.add_argument("--kind", choices=("demo", "dyadic", "planted"), default="demo")
    s.add_argument("--n", type=int, default=60)
    s.add_argument("--beta", action="append", metavar="NAME=VALUE")
    s.add_argument("--communities", type=int, default=3)
    s.add_argument("--community-size", type=int, default=10)
    s.add_argument("--p-in", type=float, default=0.9)
    s.add_argument("--p-out", type=float, default=0.02)
    s.add_argument("--spread-km", type=float, default=50.0)

    parser = argparse.ArgumentParser(prog="collabnet", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "ingest": "validate inputs and write canonical node and edge files",
        "metrics": "whole-network metrics and node centralities",
        "homophily": "raw and permutation-normalised E-I indices",
        "regress": "dyadic logistic regression and distance-decay curve",
        "communities": "walktrap communities",
        "permtest": "permutation tests of community compactness",
        "synth": "generate a synthetic network",
        "report": "all analyses plus plot-data files for one network",
    }
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def run(cfg: RunConfig) -> list[Path]:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    if cfg.subcommand == "synth":
        files = do_synth(cfg, out)
    else:
        roster, net, reports = load_inputs(cfg)
        if cfg.subcommand == "ingest":
            files = do_ingest(cfg, out, roster, net, reports)
        elif cfg.subcommand == "metrics":
            files = do_metrics(cfg, out, roster, net)
        elif cfg.subcommand == "homophily":
            files = do_homophily(cfg, out, roster, net)[0]
        elif cfg.subcommand == "regress":
            files = do_regress(cfg, out, roster, net)[0]
        elif cfg.subcommand == "communities":
            files = do_communities(cfg, out, roster, net)[0]
        elif cfg.subcommand == "permtest":
            files = do_permtest(cfg, out, roster, net)
        else:
            files = do_report(cfg, out, roster, net)
    files.append(outputs.write_json(out / "config.json", cfg.to_dict()))
    outputs.write_json(out / "metadata.json", {
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "elapsed_seconds": round(time.perf_counter() - started, 3),
        "threads": cfg.threads,
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "files": sorted(p.name for p in files),
    })
    return files


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        files = run(cfg)
    except (ConfigError, SpecError) as exc:
        print(f"collabnet: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"collabnet: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DataError, IdentifierError, DegenerateInputError, OSError) as exc:
        print(f"collabnet: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except CollabnetError as exc:
        print(f"collabnet: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    for p in files:
        print(p)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
