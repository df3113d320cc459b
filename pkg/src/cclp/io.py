"""Text formats for graphs, clusterings, preclustered instances and solutions."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

from .cover import FractionalClusterSolution
from .graph import Clustering, SignedGraph
from .precluster import PreclusteredInstance


class FormatError(ValueError):
    """Malformed input file; ``line`` is 1-based (0 when not tied to a line)."""

    def __init__(self, message: str, line: int = 0, path: str | None = None):
        super().__init__(f"{path or '<input>'}:{line}: {message}")
        self.message = message
        self.line = line
        self.path = path

    def to_dict(self) -> dict:
        return {"error": "format", "path": self.path, "line": self.line, "message": self.message}


def _ints(text: str, lineno: int, path: str | None) -> list[int]:
    try:
        return [int(t) for t in text.split()]
    except ValueError:
        raise FormatError(f"expected integers, got {text.strip()!r}", lineno, path) from None


def _lines(source: str | Path) -> tuple[list[str], str]:
    p = str(source)
    try:
        return Path(p).read_text().splitlines(), p
    except OSError as e:
        raise FormatError(f"cannot read file: {e.strerror}", 0, p) from None


# graph: "n m" then m lines "u v" with u < v


def parse_graph(lines: Iterable[str], path: str | None = None) -> SignedGraph:
    rows = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip()]
    if not rows:
        raise FormatError("empty graph file", 1, path)
    head_no, head = rows[0]
    hv = _ints(head, head_no, path)
    if len(hv) != 2 or hv[0] < 0 or hv[1] < 0:
        raise FormatError("header must be 'n m' with non-negative integers", head_no, path)
    n, m = hv
    body = rows[1:]
    if len(body) != m:
        line = body[-1][0] + 1 if body else head_no + 1
        raise FormatError(f"header announces {m} edges, found {len(body)}", line, path)
    edges = []
    seen = set()
    for no, ln in body:
        e = _ints(ln, no, path)
        if len(e) != 2:
            raise FormatError("edge line must be 'u v'", no, path)
        u, v = e
        if not 0 <= u < v < n:
            raise FormatError(f"edge ({u}, {v}) must satisfy 0 <= u < v < n", no, path)
        if (u, v) in seen:
            raise FormatError(f"duplicate edge ({u}, {v})", no, path)
        seen.add((u, v))
        edges.append((u, v))
    return SignedGraph(n, edges)


def read_graph(path: str | Path) -> SignedGraph:
    lines, p = _lines(path)
    return parse_graph(lines, p)


def format_graph(g: SignedGraph) -> str:
    es = g.edges()
    return "".join([f"{g.n} {len(es)}\n"] + [f"{u} {v}\n" for u, v in es])


def write_graph(g: SignedGraph, path: str | Path) -> None:
    Path(path).write_text(format_graph(g))


# clustering: one ascending cluster per line, lines ordered by minimum


def format_clustering(c: Clustering) -> str:
    return "".join(" ".join(map(str, cl)) + "\n" for cl in c.clusters)


def parse_clustering(lines: Iterable[str], path: str | None = None) -> Clustering:
    clusters = []
    for i, ln in enumerate(lines):
        if ln.strip():
            clusters.append(tuple(_ints(ln, i + 1, path)))
    try:
        return Clustering(tuple(clusters))
    except ValueError as e:
        raise FormatError(str(e), 0, path) from None


def read_clustering(path: str | Path) -> Clustering:
    lines, p = _lines(path)
    return parse_clustering(lines, p)


def write_clustering(c: Clustering, path: str | Path) -> None:
    Path(path).write_text(format_clustering(c))


# instance: "#atoms" section then "#adm" section


def format_instance(inst: PreclusteredInstance) -> str:
    out = [f"#n {inst.n}\n", "#atoms\n"]
    out += [" ".join(map(str, a)) + "\n" for a in inst.atoms]
    out.append("#adm\n")
    out += [f"{u} {v}\n" for u, v in sorted(inst.adm)]
    return "".join(out)


def parse_instance(lines: Iterable[str], path: str | None = None, n: int | None = None) -> PreclusteredInstance:
    section = None
    atoms, adm = [], []
    for i, ln in enumerate(lines):
        no = i + 1
        s = ln.strip()
        if not s:
            continue
        if s.startswith("#n"):
            vals = _ints(s[2:], no, path)
            if len(vals) != 1:
                raise FormatError("'#n' needs one integer", no, path)
            n = vals[0]
        elif s == "#atoms":
            section = "atoms"
        elif s == "#adm":
            section = "adm"
        elif section == "atoms":
            atoms.append(tuple(_ints(s, no, path)))
        elif section == "adm":
            pair = _ints(s, no, path)
            if len(pair) != 2:
                raise FormatError("admissible pair line must be 'u v'", no, path)
            adm.append(tuple(pair))
        else:
            raise FormatError("content before '#atoms' section", no, path)
    if n is None:
        raise FormatError("vertex count unknown: add '#n' or pass the graph", 0, path)
    try:
        return PreclusteredInstance(n, tuple(atoms), frozenset(adm))
    except ValueError as e:
        raise FormatError(str(e), 0, path) from None


def read_instance(path: str | Path, n: int | None = None) -> PreclusteredInstance:
    lines, p = _lines(path)
    return parse_instance(lines, p, n)


def write_instance(inst: PreclusteredInstance, path: str | Path) -> None:
    Path(path).write_text(format_instance(inst))


# solution: "D" then "k: v1 v2 ..." per entry


def format_solution(sol: FractionalClusterSolution) -> str:
    out = [f"{sol.denominator}\n"]
    out += [f"{k}: " + " ".join(map(str, S)) + "\n" for S, k in sol.entries]
    return "".join(out)


def parse_solution(lines: Iterable[str], n: int, path: str | None = None) -> FractionalClusterSolution:
    rows = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip()]
    if not rows:
        raise FormatError("empty solution file", 1, path)
    vals = _ints(rows[0][1], rows[0][0], path)
    if len(vals) != 1 or vals[0] < 1:
        raise FormatError("first line must be a positive denominator", rows[0][0], path)
    entries = []
    for no, ln in rows[1:]:
        if ":" not in ln:
            raise FormatError("entry must be 'k: v1 v2 ...'", no, path)
        head, tail = ln.split(":", 1)
        k = _ints(head, no, path)
        S = _ints(tail, no, path)
        if len(k) != 1 or k[0] < 1 or not S:
            raise FormatError("entry needs a positive weight and a nonempty set", no, path)
        if any(not 0 <= v < n for v in S):
            raise FormatError("vertex out of range", no, path)
        entries.append((tuple(S), k[0]))
    return FractionalClusterSolution(n, vals[0], entries)


def read_solution(path: str | Path, n: int) -> FractionalClusterSolution:
    lines, p = _lines(path)
    return parse_solution(lines, n, p)


def write_solution(sol: FractionalClusterSolution, path: str | Path) -> None:
    Path(path).write_text(format_solution(sol))
