"""SteinLib STP parsing and benchmark file output.

STP documents are 1-indexed; ids are mapped to the 0-indexed internal
representation only in ``to_instance``.  Section names and keywords are
matched case-insensitively, blank lines and anything outside sections
(magic header, EOF marker) are ignored.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

from .errors import CountMismatch, MissingSection, NoCoordinates, StpSyntaxError
from .graph import Instance, bidirect, build_instance
from .laminar import pick_central_root

RESULTS_HEADER = (
    "instance,algorithm,iterations,replications,seed,cost,opt,"
    "gap_percent,iters_run,avg_iter_ms"
)


@dataclass(frozen=True)
class StpLink:
    tail: int
    head: int
    cost: float
    directed: bool


@dataclass(frozen=True)
class RawStpInstance:
    name: str
    creator: str
    remark: str
    nodes: int
    links: tuple[StpLink, ...]
    terminals: tuple[int, ...]
    declared_root: int | None
    coordinates: dict[int, tuple[float, float]] | None


def _ints(parts, line_no, count):
    try:
        values = [int(p) for p in parts[:count]]
    except ValueError:
        raise StpSyntaxError(f"expected integers, got {parts!r}", line_no) from None
    if len(values) != count:
        raise StpSyntaxError(f"expected {count} fields, got {parts!r}", line_no)
    return values


def parse_stp(text: str) -> RawStpInstance:
    """Parse one STP document into its raw sections."""
    name = creator = remark = ""
    nodes = None
    declared_edges = declared_arcs = declared_terms = None
    links: list[StpLink] = []
    terminals: list[int] = []
    declared_root = None
    coordinates: dict[int, tuple[float, float]] | None = None
    seen_sections: set[str] = set()

    section = None
    for line_no, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.strip()
        if not line:
            continue
        lowered = line.lower()
        if section is None:
            if lowered.startswith("section"):
                parts = line.split()
                if len(parts) < 2:
                    raise StpSyntaxError("SECTION without a name", line_no)
                section = parts[1].lower()
                seen_sections.add(section)
                if section == "coordinates" and coordinates is None:
                    coordinates = {}
            continue
        if lowered == "end":
            section = None
            continue

        parts = line.split()
        key = parts[0].lower()
        if section == "comment":
            value = line[len(parts[0]):].strip().strip('"')
            if key == "name":
                name = value
            elif key == "creator":
                creator = value
            elif key == "remark":
                remark = value
            # other comment keys are informational; keep parsing
        elif section == "graph":
            if key == "nodes":
                (nodes,) = _ints(parts[1:], line_no, 1)
            elif key == "edges":
                (declared_edges,) = _ints(parts[1:], line_no, 1)
            elif key == "arcs":
                (declared_arcs,) = _ints(parts[1:], line_no, 1)
            elif key in ("e", "a"):
                if len(parts) != 4:
                    raise StpSyntaxError(f"link line needs 3 fields: {line!r}", line_no)
                u, v = _ints(parts[1:3], line_no, 2)
                try:
                    cost = float(parts[3])
                except ValueError:
                    raise StpSyntaxError(f"bad cost {parts[3]!r}", line_no) from None
                links.append(StpLink(u, v, cost, directed=(key == "a")))
            else:
                raise StpSyntaxError(f"unknown graph line {line!r}", line_no)
        elif section == "terminals":
            if key == "terminals":
                (declared_terms,) = _ints(parts[1:], line_no, 1)
            elif key == "t":
                (t,) = _ints(parts[1:], line_no, 1)
                terminals.append(t)
            elif key == "root":
                (declared_root,) = _ints(parts[1:], line_no, 1)
            else:
                raise StpSyntaxError(f"unknown terminals line {line!r}", line_no)
        elif section == "coordinates":
            if key == "dd":
                if len(parts) != 4:
                    raise StpSyntaxError(f"DD line needs 3 fields: {line!r}", line_no)
                (node,) = _ints(parts[1:2], line_no, 1)
                try:
                    x, y = float(parts[2]), float(parts[3])
                except ValueError:
                    raise StpSyntaxError(f"bad coordinate in {line!r}", line_no) from None
                coordinates[node] = (x, y)
            else:
                raise StpSyntaxError(f"unknown coordinates line {line!r}", line_no)
        # unknown sections are skipped line by line

    if "graph" not in seen_sections:
        raise MissingSection("no Graph section")
    if "terminals" not in seen_sections:
        raise MissingSection("no Terminals section")
    if nodes is None:
        raise StpSyntaxError("Graph section declares no node count")

    n_edges = sum(1 for l in links if not l.directed)
    n_arcs = sum(1 for l in links if l.directed)
    if declared_edges is not None and declared_edges != n_edges:
        raise CountMismatch(f"declared {declared_edges} edges, found {n_edges}")
    if declared_arcs is not None and declared_arcs != n_arcs:
        raise CountMismatch(f"declared {declared_arcs} arcs, found {n_arcs}")
    if declared_terms is not None and declared_terms != len(terminals):
        raise CountMismatch(f"declared {declared_terms} terminals, found {len(terminals)}")

    for link in links:
        if not (1 <= link.tail <= nodes and 1 <= link.head <= nodes):
            raise StpSyntaxError(f"link ({link.tail},{link.head}) outside 1..{nodes}")
    for t in terminals:
        if not 1 <= t <= nodes:
            raise StpSyntaxError(f"terminal {t} outside 1..{nodes}")

    return RawStpInstance(
        name=name,
        creator=creator,
        remark=remark,
        nodes=nodes,
        links=tuple(links),
        terminals=tuple(terminals),
        declared_root=declared_root,
        coordinates=coordinates,
    )


def to_instance(raw: RawStpInstance, root_policy="first") -> Instance:
    """Resolve the root and build a validated 0-indexed instance.

    A root declared in the file always wins.  Otherwise ``root_policy`` is
    an explicit 1-based node id, "first" (first terminal), or "central"
    (most central terminal by coordinates).  The chosen root is removed
    from the terminal list.
    """
    if raw.declared_root is not None:
        root = raw.declared_root
    elif isinstance(root_policy, int):
        root = root_policy
    elif root_policy == "first":
        if not raw.terminals:
            raise ValueError("instance has no terminals")
        root = raw.terminals[0]
    elif root_policy == "central":
        if raw.coordinates is None:
            raise NoCoordinates("central root policy requires a Coordinates section")
        missing = [t for t in raw.terminals if t not in raw.coordinates]
        if missing:
            raise NoCoordinates(f"terminals {missing} have no coordinates")
        root = pick_central_root(raw.coordinates, raw.terminals)
    else:
        raise ValueError(f"unknown root policy {root_policy!r}")

    arcs: list[tuple[int, int, float]] = []
    for link in raw.links:
        if link.directed:
            arcs.append((link.tail - 1, link.head - 1, link.cost))
        else:
            arcs.extend(bidirect([(link.tail - 1, link.head - 1, link.cost)]))
    terminals = [t - 1 for t in raw.terminals if t != root]
    return build_instance(raw.nodes, arcs, root - 1, terminals)


def terminal_coords(raw: RawStpInstance, instance: Instance) -> dict[int, tuple[float, float]]:
    """Map each commodity to the plane position of its terminal."""
    if raw.coordinates is None:
        raise NoCoordinates("instance has no Coordinates section")
    return {k: raw.coordinates[t + 1] for k, t in enumerate(instance.terminals)}


def format_stp(raw: RawStpInstance) -> str:
    """Render a raw instance back to STP text (used for test fixtures)."""
    out = ["33D32945 STP File, STP Format Version 1.0", ""]
    out.append("SECTION Comment")
    if raw.name:
        out.append(f'Name "{raw.name}"')
    if raw.creator:
        out.append(f'Creator "{raw.creator}"')
    if raw.remark:
        out.append(f'Remark "{raw.remark}"')
    out.append("END")
    out.append("")
    out.append("SECTION Graph")
    out.append(f"Nodes {raw.nodes}")
    edges = [l for l in raw.links if not l.directed]
    arcs = [l for l in raw.links if l.directed]
    if edges or not arcs:
        out.append(f"Edges {len(edges)}")
    if arcs:
        out.append(f"Arcs {len(arcs)}")
    for l in raw.links:
        tag = "A" if l.directed else "E"
        out.append(f"{tag} {l.tail} {l.head} {_num(l.cost)}")
    out.append("END")
    out.append("")
    out.append("SECTION Terminals")
    out.append(f"Terminals {len(raw.terminals)}")
    if raw.declared_root is not None:
        out.append(f"Root {raw.declared_root}")
    for t in raw.terminals:
        out.append(f"T {t}")
    out.append("END")
    out.append("")
    if raw.coordinates is not None:
        out.append("SECTION Coordinates")
        for node in sorted(raw.coordinates):
            x, y = raw.coordinates[node]
            out.append(f"DD {node} {_num(x)} {_num(y)}")
        out.append("END")
        out.append("")
    out.append("EOF")
    out.append("")
    return "\n".join(out)


# --- result files -------------------------------------------------------------

@dataclass(frozen=True)
class ResultRow:
    instance: str
    algorithm: str
    iterations: int
    replications: int
    seed: int
    cost: float | None
    opt: float | None
    iters_run: int | None
    avg_iter_ms: float | None

    @property
    def gap_percent(self) -> float | None:
        if self.cost is None or self.opt is None:
            return None
        return 100.0 * (self.cost - self.opt) / self.opt


def _num(x) -> str:
    return f"{x:.10g}"


def _opt_num(x) -> str:
    return "" if x is None else _num(x)


def write_results(rows, path, append: bool = False) -> None:
    """Write benchmark rows as CSV, preserving input order."""
    mode = "a" if append else "w"
    with open(path, mode, newline="") as fh:
        if not append:
            fh.write(RESULTS_HEADER + "\n")
        for row in rows:
            fields = [
                row.instance,
                row.algorithm,
                str(row.iterations),
                str(row.replications),
                str(row.seed),
                _opt_num(row.cost),
                _opt_num(row.opt),
                _opt_num(row.gap_percent),
                "" if row.iters_run is None else str(row.iters_run),
                _opt_num(row.avg_iter_ms),
            ]
            fh.write(",".join(fields) + "\n")


def read_results(path) -> list[dict]:
    """Parse a results CSV back into typed records."""
    def fnum(s):
        return None if s == "" else float(s)

    out = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            out.append(
                {
                    "instance": rec["instance"],
                    "algorithm": rec["algorithm"],
                    "iterations": int(rec["iterations"]) if rec["iterations"] else None,
                    "replications": int(rec["replications"]) if rec["replications"] else None,
                    "seed": int(rec["seed"]) if rec["seed"] else None,
                    "cost": fnum(rec["cost"]),
                    "opt": fnum(rec["opt"]),
                    "gap_percent": fnum(rec["gap_percent"]),
                    "iters_run": int(rec["iters_run"]) if rec["iters_run"] else None,
                    "avg_iter_ms": fnum(rec["avg_iter_ms"]),
                }
            )
    return out


def write_solution(path, instance: Instance, arc_ids, cost: float) -> None:
    """One `tail head cost` line per arc (1-based ids), then the total."""
    with open(path, "w") as fh:
        for a in sorted(arc_ids):
            u, v, c = instance.arcs[a]
            fh.write(f"{u + 1} {v + 1} {_num(c)}\n")
        fh.write(f"TOTAL {_num(cost)}\n")
