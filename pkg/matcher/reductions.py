"""Gadget graphs built from CNF formulas, and witness conversion in both directions.

Vertex numbering is fixed: variable blocks first (u_i, f_i, t_i for i = 1..n), then
clause blocks (v_j followed by one vertex per literal of c_j in clause order).

t1: every variable block is a triangle, every clause block a clique; f_i is joined to
    the vertices of the positive occurrences of x_i, t_i to the negative one.
t2: every variable block is a path f_i - u_i - t_i, every clause block a star centred
    at v_j; f_i is joined to the occurrences of x_i, t_i to the other literal
    vertices of the clauses containing x_i.
"""
from dataclasses import asdict, dataclass
from typing import Callable, Dict, List, Literal, Optional, Set, Tuple

from matcher.errors import InternalConsistencyError
from matcher.graph import Edge, Graph, GraphBuilder, normalize_edge
from matcher.matching import Matching, check_matching, is_induced_matching
from matcher.sat import Assignment, CnfFormula, eval_cnf, eval_exact, validate_t1_shape, validate_t2_shape

Reduction = Literal["t1", "t2"]


@dataclass(frozen=True)
class Role:
    kind: Literal["u", "f", "t", "v", "lit"]
    var: Optional[int] = None
    clause: Optional[int] = None
    pos: Optional[int] = None
    literal: Optional[int] = None

    @property
    def in_variable_block(self) -> bool:
        return self.kind in ("u", "f", "t")

    def to_json(self) -> dict:
        return {key: value for key, value in asdict(self).items() if value is not None}


@dataclass(frozen=True)
class ReductionGraph:
    graph: Graph
    roles: Tuple[Role, ...]
    formula: CnfFormula
    which: Reduction
    clause_starts: Tuple[int, ...]

    @property
    def n(self) -> int:
        return self.formula.variable_count

    @property
    def m(self) -> int:
        return self.formula.m

    def u(self, i: int) -> int:
        return 3 * (i - 1)

    def f(self, i: int) -> int:
        return 3 * (i - 1) + 1

    def t(self, i: int) -> int:
        return 3 * (i - 1) + 2

    def v(self, j: int) -> int:
        return self.clause_starts[j - 1]

    def literal_vertex(self, j: int, pos: int) -> int:
        return self.clause_starts[j - 1] + pos

    def clause_block(self, j: int) -> List[int]:
        start = self.clause_starts[j - 1]
        return list(range(start, start + len(self.formula.clauses[j - 1]) + 1))

    def role(self, vertex: int) -> Role:
        return self.roles[vertex]


def _lay_out(f: CnfFormula) -> Tuple[GraphBuilder, List[Role], List[int]]:
    builder = GraphBuilder()
    roles: List[Role] = []
    for i in range(1, f.variable_count + 1):
        for kind in ("u", "f", "t"):
            builder.add_vertex(f"{kind}{i}")
            roles.append(Role(kind, var=i))
    clause_starts = []
    for j, clause in enumerate(f.clauses, start=1):
        clause_starts.append(builder.add_vertex(f"v{j}"))
        roles.append(Role("v", clause=j))
        for pos, lit in enumerate(clause, start=1):
            builder.add_vertex(f"l{j}.{pos}")
            roles.append(Role("lit", var=abs(lit), clause=j, pos=pos, literal=lit))
    return builder, roles, clause_starts


def build_t1(f: CnfFormula) -> ReductionGraph:
    validate_t1_shape(f).raise_if_invalid()
    builder, roles, clause_starts = _lay_out(f)
    for i in range(1, f.variable_count + 1):
        builder.add_clique([3 * (i - 1), 3 * (i - 1) + 1, 3 * (i - 1) + 2])
    for j, clause in enumerate(f.clauses, start=1):
        start = clause_starts[j - 1]
        builder.add_clique(list(range(start, start + len(clause) + 1)))
        for pos, lit in enumerate(clause, start=1):
            var = abs(lit)
            builder.add_edge(3 * (var - 1) + (1 if lit > 0 else 2), start + pos)
    return ReductionGraph(builder.freeze(), tuple(roles), f, "t1", tuple(clause_starts))


def build_t2(f: CnfFormula) -> ReductionGraph:
    validate_t2_shape(f).raise_if_invalid()
    builder, roles, clause_starts = _lay_out(f)
    for i in range(1, f.variable_count + 1):
        builder.add_edge(3 * (i - 1), 3 * (i - 1) + 1)
        builder.add_edge(3 * (i - 1), 3 * (i - 1) + 2)
    occurrences: Dict[int, List[int]] = {}
    for j, clause in enumerate(f.clauses, start=1):
        start = clause_starts[j - 1]
        for pos, lit in enumerate(clause, start=1):
            builder.add_edge(start, start + pos)
            occurrences.setdefault(lit, []).append(j)
    for var, clauses in occurrences.items():
        f_i, t_i = 3 * (var - 1) + 1, 3 * (var - 1) + 2
        for j in clauses:
            start = clause_starts[j - 1]
            for pos, lit in enumerate(f.clauses[j - 1], start=1):
                builder.add_edge(f_i if lit == var else t_i, start + pos)
    return ReductionGraph(builder.freeze(), tuple(roles), f, "t2", tuple(clause_starts))


def build(f: CnfFormula, which: Reduction) -> ReductionGraph:
    if which == "t1":
        return build_t1(f)
    if which == "t2":
        return build_t2(f)
    raise ValueError(f"Unknown reduction: {which!r} (expected t1 or t2)")


def roles_to_json(rg: ReductionGraph) -> Dict[str, dict]:
    """roles.json content; vertex ids are 1-based like the graph file."""
    return {str(v + 1): {**role.to_json(), "label": rg.graph.label(v)} for v, role in enumerate(rg.roles)}


def _require(rg: ReductionGraph, which: Reduction):
    if rg.which != which:
        raise ValueError(f"expected a {which} reduction graph, got {rg.which}")


def _variable_edges(rg: ReductionGraph, a: Assignment) -> List[Edge]:
    return [(rg.u(i), rg.t(i) if a.value(i) else rg.f(i)) for i in range(1, rg.n + 1)]


def assignment_to_matching_t1(rg: ReductionGraph, a: Assignment) -> Matching:
    """Induced matching of size n+m from a satisfying assignment."""
    _require(rg, "t1")
    if not eval_cnf(rg.formula, a):
        unsatisfied = [
            j for j, clause in enumerate(rg.formula.clauses, start=1)
            if not any(a.is_true(lit) for lit in clause)
        ]
        raise ValueError(f"assignment does not satisfy clauses {unsatisfied}")
    edges = _variable_edges(rg, a)
    for j, clause in enumerate(rg.formula.clauses, start=1):
        pos = next(p for p, lit in enumerate(clause, start=1) if a.is_true(lit))
        edges.append((rg.v(j), rg.literal_vertex(j, pos)))
    return Matching.of(edges)


def assignment_to_matching_t2(rg: ReductionGraph, a: Assignment) -> Matching:
    """Induced matching of size n+m from an exact-satisfying assignment."""
    _require(rg, "t2")
    if not eval_exact(rg.formula, a):
        wrong = [
            j for j, clause in enumerate(rg.formula.clauses, start=1)
            if sum(a.is_true(lit) for lit in clause) != 1
        ]
        raise ValueError(f"assignment does not make exactly one literal true in clauses {wrong}")
    edges = _variable_edges(rg, a)
    for j, clause in enumerate(rg.formula.clauses, start=1):
        pos = next(p for p, lit in enumerate(clause, start=1) if a.is_true(lit))
        edges.append((rg.v(j), rg.literal_vertex(j, pos)))
    return Matching.of(edges)


def baseline_matching_t1(rg: ReductionGraph) -> Matching:
    """{u_i t_i} plus one edge inside every clause block; acyclic for every formula."""
    _require(rg, "t1")
    edges = [(rg.u(i), rg.t(i)) for i in range(1, rg.n + 1)]
    edges += [(rg.v(j), rg.literal_vertex(j, 1)) for j in range(1, rg.m + 1)]
    return Matching.of(edges)


def baseline_matching_t2(rg: ReductionGraph) -> Matching:
    """{u_i t_i} plus one star edge per clause block; uniquely restricted for every formula."""
    _require(rg, "t2")
    edges = [(rg.u(i), rg.t(i)) for i in range(1, rg.n + 1)]
    edges += [(rg.v(j), rg.literal_vertex(j, 1)) for j in range(1, rg.m + 1)]
    return Matching.of(edges)


# ---------------------------------------------------------------------------
# reverse direction: exchange steps until every block holds one internal edge

def _split_cross(rg: ReductionGraph, edge: Edge) -> Optional[Tuple[int, int]]:
    """(variable-block end, clause-block end) if edge runs between the two kinds of blocks."""
    a, b = edge
    ra, rb = rg.role(a), rg.role(b)
    if ra.in_variable_block and not rb.in_variable_block:
        return a, b
    if rb.in_variable_block and not ra.in_variable_block:
        return b, a
    return None


def _t1_exchange(rg: ReductionGraph, edges: Set[Edge]) -> Optional[Set[Edge]]:
    for edge in sorted(edges):
        cross = _split_cross(rg, edge)
        if cross is not None:
            x, _ = cross
            return (edges - {edge}) | {normalize_edge(rg.u(rg.role(x).var), x)}
        a, b = edge
        if {rg.role(a).kind, rg.role(b).kind} == {"f", "t"}:
            i = rg.role(a).var
            return (edges - {edge}) | {normalize_edge(rg.u(i), rg.f(i))}
    return None


def _t2_exchange(rg: ReductionGraph, edges: Set[Edge]) -> Optional[Set[Edge]]:
    by_variable: Dict[int, List[Tuple[Edge, int, int]]] = {}
    for edge in sorted(edges):
        cross = _split_cross(rg, edge)
        if cross is not None:
            x, c = cross
            by_variable.setdefault(rg.role(x).var, []).append((edge, x, c))
    if not by_variable:
        return None
    i = min(by_variable)
    crossing = by_variable[i]
    if len(crossing) == 1:
        edge, x, _ = crossing[0]
        return (edges - {edge}) | {normalize_edge(rg.u(i), x)}
    if len(crossing) != 2:
        raise InternalConsistencyError(f"variable block {i} carries {len(crossing)} cross edges")
    (e1, x1, c1), (e2, x2, c2) = crossing
    t_edge, t_end = (e1, c1) if x1 == rg.t(i) else (e2, c2)
    f_edge = e2 if t_edge == e1 else e1
    v_j = rg.v(rg.role(t_end).clause)
    return (edges - {t_edge, f_edge}) | {normalize_edge(rg.u(i), rg.f(i)), normalize_edge(v_j, t_end)}


def _canonicalize(rg: ReductionGraph, mm: Matching, exchange: Callable) -> Matching:
    check_matching(rg.graph, mm)
    if len(mm) < rg.n + rg.m:
        raise ValueError(f"matching has {len(mm)} edges, need n+m = {rg.n + rg.m}")
    if not is_induced_matching(rg.graph, mm):
        raise ValueError("matching is not induced")

    edges = set(mm.edges)
    budget = rg.graph.edge_count
    steps = 0
    while True:
        exchanged = exchange(rg, edges)
        if exchanged is None:
            break
        steps += 1
        if steps > budget:
            raise InternalConsistencyError(f"exchange loop did not settle within {budget} steps")
        edges = exchanged

    canonical = Matching(frozenset(edges))
    if not is_induced_matching(rg.graph, canonical):
        raise InternalConsistencyError("exchange steps produced a matching that is not induced")
    return canonical


def _read_assignment(rg: ReductionGraph, canonical: Matching) -> Assignment:
    values = {}
    for i in range(1, rg.n + 1):
        if (rg.u(i), rg.t(i)) in canonical:
            values[i] = 1
        elif (rg.u(i), rg.f(i)) in canonical:
            values[i] = 0
        else:
            raise InternalConsistencyError(f"variable block {i} holds neither u{i}f{i} nor u{i}t{i}")
    for j in range(1, rg.m + 1):
        block = set(rg.clause_block(j))
        if not any(a in block and b in block for a, b in canonical.edges):
            raise InternalConsistencyError(f"clause block {j} holds no internal edge")
    return Assignment(values)


def matching_to_assignment_t1(rg: ReductionGraph, mm: Matching) -> Assignment:
    """Satisfying assignment from an induced matching of size n+m."""
    _require(rg, "t1")
    a = _read_assignment(rg, _canonicalize(rg, mm, _t1_exchange))
    if not eval_cnf(rg.formula, a):
        raise InternalConsistencyError("assignment read off the canonical matching does not satisfy the formula")
    return a


def matching_to_assignment_t2(rg: ReductionGraph, mm: Matching) -> Assignment:
    """Exact-satisfying assignment from an induced matching of size n+m."""
    _require(rg, "t2")
    a = _read_assignment(rg, _canonicalize(rg, mm, _t2_exchange))
    if not eval_exact(rg.formula, a):
        raise InternalConsistencyError("assignment read off the canonical matching is not exact-satisfying")
    return a


def canonical_matching(rg: ReductionGraph, mm: Matching) -> Matching:
    """The matching the reverse conversion reads its assignment from."""
    return _canonicalize(rg, mm, _t1_exchange if rg.which == "t1" else _t2_exchange)
