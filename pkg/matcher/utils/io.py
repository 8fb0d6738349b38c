"""Plain-text file formats. Vertex ids are 1-based in every file and 0-based in memory.

graph       p edge <n> <m> / e <u> <v> / c label <v> <text>
cnf         p cnf <n> <m> / one clause per line, terminated by 0
matching    m <u> <v>
assignment  v <lit> <lit> ... 0
"""
from typing import Dict, Iterator, List, Tuple

from matcher.graph import Graph, GraphBuilder
from matcher.matching import Matching
from matcher.sat import Assignment, CnfFormula


def _lines(file_path: str) -> Iterator[Tuple[int, List[str]]]:
    with open(file_path) as fp:
        for number, line in enumerate(fp, start=1):
            parts = line.split()
            if parts:
                yield number, parts


def _vertex(token: str, n: int, where: str) -> int:
    v = int(token)
    if not 1 <= v <= n:
        raise ValueError(f"{where}: vertex {v} outside 1..{n}")
    return v - 1


def read_graph(file_path: str) -> Graph:
    builder = None
    declared_edges = 0
    labels: Dict[int, str] = {}
    edges = []
    for number, parts in _lines(file_path):
        where = f"{file_path}:{number}"
        if parts[0] == "c":
            if len(parts) >= 3 and parts[1] == "label":
                labels[int(parts[2])] = " ".join(parts[3:])
            continue
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] not in ("edge", "col"):
                raise ValueError(f"{where}: invalid problem line: {' '.join(parts)}")
            builder = GraphBuilder(int(parts[2]))
            declared_edges = int(parts[3])
            continue
        if parts[0] == "e":
            if builder is None:
                raise ValueError(f"{where}: edge line before the problem line")
            if len(parts) != 3:
                raise ValueError(f"{where}: invalid edge line: {' '.join(parts)}")
            edges.append((_vertex(parts[1], builder.vertex_count, where), _vertex(parts[2], builder.vertex_count, where)))
            continue
        raise ValueError(f"{where}: unknown line type {parts[0]!r}")

    if builder is None:
        raise ValueError(f"{file_path}: missing problem line 'p edge <n> <m>'")
    for u, v in edges:
        builder.add_edge(u, v)
    for v, text in labels.items():
        builder.set_label(_vertex(str(v), builder.vertex_count, file_path), text)
    g = builder.freeze()
    if g.edge_count != declared_edges:
        print(f"read_graph: {file_path} declares {declared_edges} edges, found {g.edge_count} distinct", flush=True)
    return g


def write_graph(g: Graph, file_path: str):
    with open(file_path, "w") as fp:
        fp.write(f"p edge {g.vertex_count} {g.edge_count}\n")
        for v in g.vertices():
            if g.label(v) is not None:
                fp.write(f"c label {v + 1} {g.label(v)}\n")
        for u, v in g.sorted_edges:
            fp.write(f"e {u + 1} {v + 1}\n")


def read_cnf(file_path: str) -> CnfFormula:
    n, declared = None, 0
    clauses = []
    for number, parts in _lines(file_path):
        if parts[0] in ("c", "%"):
            continue
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"{file_path}:{number}: invalid problem line: {' '.join(parts)}")
            n, declared = int(parts[2]), int(parts[3])
            continue
        if n is None:
            raise ValueError(f"{file_path}:{number}: clause before the problem line")
        literals = [int(x) for x in parts]
        if literals[-1] != 0:
            raise ValueError(f"{file_path}:{number}: clause must end with 0")
        clauses.append(tuple(literals[:-1]))
    if n is None:
        raise ValueError(f"{file_path}: missing problem line 'p cnf <n> <m>'")
    if len(clauses) != declared:
        raise ValueError(f"{file_path}: declares {declared} clauses, found {len(clauses)}")
    return CnfFormula(n, tuple(clauses))


def write_cnf(f: CnfFormula, file_path: str, comments: Tuple[str, ...] = ()):
    with open(file_path, "w") as fp:
        for comment in comments:
            fp.write(f"c {comment}\n")
        fp.write(f"p cnf {f.variable_count} {f.m}\n")
        for clause in f.clauses:
            fp.write(" ".join(str(lit) for lit in clause) + " 0\n")


def read_matching(file_path: str, g: Graph) -> Matching:
    pairs = []
    for number, parts in _lines(file_path):
        if parts[0] == "c":
            continue
        where = f"{file_path}:{number}"
        if parts[0] != "m" or len(parts) != 3:
            raise ValueError(f"{where}: expected 'm <u> <v>', got {' '.join(parts)}")
        pairs.append((_vertex(parts[1], g.vertex_count, where), _vertex(parts[2], g.vertex_count, where)))
    return Matching.of(pairs)


def write_matching(m: Matching, file_path: str):
    with open(file_path, "w") as fp:
        for u, v in m:
            fp.write(f"m {u + 1} {v + 1}\n")


def read_assignment(file_path: str) -> Assignment:
    values = {}
    for number, parts in _lines(file_path):
        if parts[0] in ("c", "s"):
            continue
        if parts[0] != "v":
            raise ValueError(f"{file_path}:{number}: expected 'v <lit> ... 0', got {' '.join(parts)}")
        for token in parts[1:]:
            lit = int(token)
            if lit != 0:
                values[abs(lit)] = 1 if lit > 0 else 0
    return Assignment(values)


def write_assignment(a: Assignment, file_path: str):
    literals = [var if a.value(var) else -var for var in sorted(a.values)]
    with open(file_path, "w") as fp:
        fp.write("v " + " ".join(str(lit) for lit in literals + [0]) + "\n")
