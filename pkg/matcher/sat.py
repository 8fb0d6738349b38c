"""CNF formulas, SAT / exact-SAT oracles, instance-shape validators and the
normalisation of positive exact-3-SAT instances into the restricted shape
(positive literals, clauses of size exactly three, no repeated literal, every
literal at most three times).
"""
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement, product
from typing import Dict, Iterator, List, Literal, Mapping, Optional, Sequence, Tuple

from matcher.errors import ResourceLimitError
from matcher.utils.utils import get_prng

Clause = Tuple[int, ...]

DEFAULT_ORACLE_LIMIT = 24


@dataclass(frozen=True)
class CnfFormula:
    variable_count: int
    clauses: Tuple[Clause, ...] = ()

    def __post_init__(self):
        if self.variable_count < 0:
            raise ValueError(f"variable_count must be non-negative, got {self.variable_count}")
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        for j, clause in enumerate(self.clauses):
            for lit in clause:
                if lit == 0 or abs(lit) > self.variable_count:
                    raise ValueError(f"clause {j}: literal {lit} references no variable in 1..{self.variable_count}")

    @property
    def n(self) -> int:
        return self.variable_count

    @property
    def m(self) -> int:
        return len(self.clauses)

    def __str__(self) -> str:
        def fmt(lit):
            return f"x{lit}" if lit > 0 else f"~x{-lit}"
        return " & ".join("(" + " | ".join(fmt(l) for l in c) + ")" for c in self.clauses) or "(empty)"


@dataclass(frozen=True)
class Assignment:
    values: Mapping[int, int]

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "Assignment":
        return cls({i + 1: int(b) for i, b in enumerate(bits)})

    def value(self, var: int) -> int:
        return self.values[var]

    def is_true(self, lit: int) -> bool:
        value = self.values[abs(lit)]
        return value == 1 if lit > 0 else value == 0

    def is_total_for(self, f: CnfFormula) -> bool:
        return all(v in self.values for v in range(1, f.variable_count + 1))

    def bits(self, n: int) -> Tuple[int, ...]:
        return tuple(self.values[v] for v in range(1, n + 1))


def _require_total(f: CnfFormula, a: Assignment):
    missing = [v for v in range(1, f.variable_count + 1) if v not in a.values]
    if missing:
        raise ValueError(f"assignment is partial, variables {missing} have no value")


def eval_cnf(f: CnfFormula, a: Assignment) -> bool:
    _require_total(f, a)
    return all(any(a.is_true(lit) for lit in clause) for clause in f.clauses)


def eval_exact(f: CnfFormula, a: Assignment) -> bool:
    """Every clause has exactly one true literal (repeated literals count repeatedly)."""
    _require_total(f, a)
    return all(sum(a.is_true(lit) for lit in clause) == 1 for clause in f.clauses)


def _first_assignment(f: CnfFormula, exact: bool, limit: int) -> Optional[Assignment]:
    # Depth-first in binary counting order over x1..xn (0 before 1); a branch is cut as
    # soon as some clause is already violated, so the first leaf reached is the same
    # assignment plain enumeration would return first.
    n = f.variable_count
    if n > limit:
        raise ResourceLimitError("oracle variable count", limit, n)

    touching: List[List[int]] = [[] for _ in range(n + 1)]
    closing: List[List[int]] = [[] for _ in range(n + 1)]
    for j, clause in enumerate(f.clauses):
        if not clause:
            return None
        for var in {abs(lit) for lit in clause}:
            touching[var].append(j)
        closing[max(abs(lit) for lit in clause)].append(j)

    values = [0] * (n + 1)

    def true_count(j: int, upto: int) -> int:
        count = 0
        for lit in f.clauses[j]:
            var = abs(lit)
            if var <= upto and (values[var] == 1) == (lit > 0):
                count += 1
        return count

    def consistent(var: int) -> bool:
        if exact:
            if any(true_count(j, var) > 1 for j in touching[var]):
                return False
            return all(true_count(j, var) == 1 for j in closing[var])
        return all(true_count(j, var) >= 1 for j in closing[var])

    def search(var: int) -> bool:
        if var > n:
            return True
        for bit in (0, 1):
            values[var] = bit
            if consistent(var) and search(var + 1):
                return True
        return False

    if not search(1):
        return None
    return Assignment.from_bits(values[1:])


def brute_force_sat(f: CnfFormula, limit: int = DEFAULT_ORACLE_LIMIT) -> Optional[Assignment]:
    """First satisfying assignment in binary counting order, or None."""
    return _first_assignment(f, exact=False, limit=limit)


def brute_force_xsat(f: CnfFormula, limit: int = DEFAULT_ORACLE_LIMIT) -> Optional[Assignment]:
    """First exactly-one-true assignment in binary counting order, or None."""
    return _first_assignment(f, exact=True, limit=limit)


# ---------------------------------------------------------------------------
# shape validators

@dataclass(frozen=True)
class Violation:
    rule: str
    detail: str
    clause_index: Optional[int] = None


@dataclass
class ValidationReport:
    shape: str
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def add(self, rule: str, detail: str, clause_index: Optional[int] = None):
        self.violations.append(Violation(rule, detail, clause_index))

    def raise_if_invalid(self):
        if self.violations:
            listed = "; ".join(
                f"{v.rule}" + (f" (clause {v.clause_index})" if v.clause_index is not None else "") + f": {v.detail}"
                for v in self.violations
            )
            raise ValueError(f"formula is not of {self.shape} shape: {listed}")


def _check_repeats(report: ValidationReport, j: int, clause: Clause):
    for lit, count in Counter(clause).items():
        if count > 1:
            report.add("repeated-literal", f"literal {lit} appears {count} times", j)


def validate_t1_shape(f: CnfFormula) -> ValidationReport:
    """2- or 3-literal clauses, x_i in at most two clauses, ~x_i in at most one, no x and ~x together.

    Repeated literals inside a clause are rejected as well. Each clause entry gets its own
    literal vertex joined to f_i or t_i, and the occurrence counts above see a clause once,
    so a repeat would push f_i or t_i past the degree bound of 4.
    """
    report = ValidationReport("t1")
    seen_in: Dict[int, int] = Counter()
    for j, clause in enumerate(f.clauses):
        if len(clause) not in (2, 3):
            report.add("clause-size", f"{len(clause)} literals, expected 2 or 3", j)
        _check_repeats(report, j, clause)
        literals = set(clause)
        for lit in literals:
            if -lit in literals and lit > 0:
                report.add("complementary-pair", f"contains x{lit} and its negation", j)
        for lit in sorted(literals):
            seen_in[lit] += 1
            if lit > 0 and seen_in[lit] == 3:
                report.add("positive-occurrence", f"x{lit} appears in more than two clauses", j)
            if lit < 0 and seen_in[lit] == 2:
                report.add("negative-occurrence", f"~x{-lit} appears in more than one clause", j)
    return report


def validate_t2_shape(f: CnfFormula) -> ValidationReport:
    """Only positive literals, each at most three times, clauses of size exactly three, no repeats."""
    report = ValidationReport("t2")
    occurrences: Dict[int, int] = Counter()
    for j, clause in enumerate(f.clauses):
        if len(clause) != 3:
            report.add("clause-size", f"{len(clause)} literals, expected 3", j)
        _check_repeats(report, j, clause)
        for lit in clause:
            if lit < 0:
                report.add("negative-literal", f"~x{-lit}", j)
            occurrences[lit] += 1
            if occurrences[lit] == 4:
                report.add("occurrence", f"literal {lit} occurs more than three times", j)
    return report


def validate_source_form(f: CnfFormula, strict: bool = True) -> ValidationReport:
    """Input of normalize_xsat: positive literals, size-3 clauses, each variable exactly
    three times (``strict``) or at most three times. Repeated literals are allowed."""
    report = ValidationReport("source")
    occurrences: Dict[int, int] = Counter()
    for j, clause in enumerate(f.clauses):
        if len(clause) != 3:
            report.add("clause-size", f"{len(clause)} literals, expected 3", j)
        for lit in clause:
            if lit < 0:
                report.add("negative-literal", f"~x{-lit}", j)
            occurrences[abs(lit)] += 1
    for var in range(1, f.variable_count + 1):
        count = occurrences[var]
        if count > 3 or (strict and count != 3):
            report.add("occurrence", f"x{var} occurs {count} times, expected {'exactly' if strict else 'at most'} three")
    return report


# ---------------------------------------------------------------------------
# normalisation

@dataclass(frozen=True)
class VariableOrigin:
    kind: Literal["source", "gadget"]
    source_var: Optional[int] = None  # kind == "source"
    clause: Optional[int] = None      # kind == "gadget": index of the size-2 clause it replaces
    slot: Optional[int] = None        # kind == "gadget": 1..4 for a1..a4


@dataclass(frozen=True)
class NormalizeResult:
    source_variable_count: int
    formula: Optional[CnfFormula] = None
    origins: Mapping[int, VariableOrigin] = field(default_factory=dict)
    fixed: Mapping[int, int] = field(default_factory=dict)
    unsatisfiable: bool = False
    gadgets: Tuple[Tuple[int, int, int, int], ...] = ()  # (a1, a2, a3, a4) per replaced clause

    def renumbering(self) -> Dict[int, int]:
        return {o.source_var: new for new, o in self.origins.items() if o.kind == "source"}

    def lift(self, a: Assignment) -> Assignment:
        """Carry an assignment of the normalised formula back to the source variables."""
        if self.unsatisfiable:
            raise ValueError("cannot lift an assignment through an unsatisfiable verdict")
        renumbering = self.renumbering()
        values = {}
        for var in range(1, self.source_variable_count + 1):
            values[var] = self.fixed[var] if var in self.fixed else a.value(renumbering[var])
        return Assignment(values)


def normalize_xsat(f: CnfFormula, strict: bool = True) -> NormalizeResult:
    validate_source_form(f, strict).raise_if_invalid()
    n = f.variable_count

    # (a) a repeated literal x forces x=0; a lone remaining literal is forced to 1
    fixed: Dict[int, int] = {}
    changed = True
    while changed:
        changed = False
        for clause in f.clauses:
            true_count = sum(1 for x in clause if fixed.get(x) == 1)
            free = [x for x in clause if x not in fixed]
            if true_count > 1:
                return NormalizeResult(n, fixed=fixed, unsatisfiable=True)
            if true_count == 1:
                for x in free:
                    fixed[x] = 0
                    changed = True
                continue
            if not free:
                return NormalizeResult(n, fixed=fixed, unsatisfiable=True)
            if len(free) == 1:
                fixed[free[0]] = 1
                changed = True
                continue
            for x, count in Counter(free).items():
                if count > 1:
                    fixed[x] = 0
                    changed = True

    survivors = [v for v in range(1, n + 1) if v not in fixed]
    renumber = {old: new for new, old in enumerate(survivors, start=1)}
    origins = {new: VariableOrigin("source", source_var=old) for old, new in renumber.items()}
    reduced = [
        tuple(renumber[x] for x in clause if x not in fixed)
        for clause in f.clauses
        if not any(fixed.get(x) == 1 for x in clause)
    ]

    # (b) every size-2 clause x|y becomes x|y|a1, a1|a2|a3, a1|a2|a4, a2|a3|a4
    next_var = len(survivors) + 1
    clauses: List[Clause] = []
    gadgets = []
    for j, clause in enumerate(reduced):
        if len(clause) == 3:
            clauses.append(clause)
            continue
        a1, a2, a3, a4 = range(next_var, next_var + 4)
        for slot, var in enumerate((a1, a2, a3, a4), start=1):
            origins[var] = VariableOrigin("gadget", clause=j, slot=slot)
        next_var += 4
        gadgets.append((a1, a2, a3, a4))
        clauses.extend([clause + (a1,), (a1, a2, a3), (a1, a2, a4), (a2, a3, a4)])

    formula = CnfFormula(next_var - 1, tuple(clauses))
    return NormalizeResult(n, formula=formula, origins=origins, fixed=fixed, gadgets=tuple(gadgets))


# ---------------------------------------------------------------------------
# instance generators

def random_t1_instance(n: int, m: int, seed: int, max_attempts: int = 1000) -> CnfFormula:
    """Random formula passing validate_t1_shape: each variable offers two positive and one negative slot."""
    if n < 2 or m < 1 or 2 * m > 3 * n:
        raise ValueError(f"no t1 instance with n={n}, m={m}: need n >= 2, m >= 1 and 2m <= 3n")
    prng = get_prng(seed)
    for _ in range(max_attempts):
        slots = {v: [1, 1, -1] for v in range(1, n + 1)}
        clauses = []
        for _ in range(m):
            available = [v for v in slots if slots[v]]
            if len(available) < 2:
                break
            size = min(int(prng.choice([2, 3])), len(available))
            chosen = sorted(prng.choice(available, size=size, replace=False).tolist())
            clause = []
            for v in chosen:
                sign = slots[v].pop(int(prng.randint(len(slots[v]))))
                clause.append(sign * v)
            clauses.append(tuple(clause))
        else:
            return CnfFormula(n, tuple(clauses))
    raise ValueError(f"could not draw a t1 instance with n={n}, m={m} in {max_attempts} attempts")


def random_x3sat_instance(n: int, m: int, seed: int, max_attempts: int = 1000) -> CnfFormula:
    """Random formula passing validate_t2_shape."""
    if n < 3 or m < 0 or m > n:
        raise ValueError(f"no t2 instance with n={n}, m={m}: need n >= 3 and m <= n")
    prng = get_prng(seed)
    for _ in range(max_attempts):
        capacity = {v: 3 for v in range(1, n + 1)}
        clauses = []
        for _ in range(m):
            available = [v for v in capacity if capacity[v]]
            if len(available) < 3:
                break
            weights = [capacity[v] for v in available]
            total = float(sum(weights))
            chosen = sorted(prng.choice(available, size=3, replace=False, p=[w / total for w in weights]).tolist())
            for v in chosen:
                capacity[v] -= 1
            clauses.append(tuple(chosen))
        else:
            return CnfFormula(n, tuple(clauses))
    raise ValueError(f"could not draw a t2 instance with n={n}, m={m} in {max_attempts} attempts")


def random_source_instance(n: int, seed: int) -> CnfFormula:
    """Random source-form formula: n size-3 clauses, every variable exactly three times."""
    if n < 1:
        raise ValueError(f"source instances need n >= 1, got {n}")
    prng = get_prng(seed)
    pool = [v for v in range(1, n + 1) for _ in range(3)]
    order = prng.permutation(len(pool)).tolist()
    shuffled = [pool[i] for i in order]
    clauses = tuple(tuple(sorted(shuffled[k:k + 3])) for k in range(0, len(shuffled), 3))
    return CnfFormula(n, clauses)


def _t1_clause_patterns(n: int) -> List[Clause]:
    patterns = []
    for size in (2, 3):
        for variables in combinations(range(1, n + 1), size):
            for signs in product((1, -1), repeat=size):
                patterns.append(tuple(s * v for s, v in zip(signs, variables)))
    return patterns


def exhaustive_t1_instances(n_max: int, m_max: int) -> Iterator[CnfFormula]:
    """Every valid t1 formula with 2..n_max variables and 1..m_max clauses, clauses as a multiset.

    One variable admits no valid 2-literal clause, so enumeration starts at n = 2.
    """
    for n in range(2, n_max + 1):
        patterns = _t1_clause_patterns(n)
        for m in range(1, m_max + 1):
            for clauses in combinations_with_replacement(patterns, m):
                f = CnfFormula(n, clauses)
                if validate_t1_shape(f):
                    yield f


def exhaustive_t2_instances(n_max: int, m_max: int) -> Iterator[CnfFormula]:
    for n in range(3, n_max + 1):
        patterns = list(combinations(range(1, n + 1), 3))
        for m in range(1, m_max + 1):
            for clauses in combinations_with_replacement(patterns, m):
                f = CnfFormula(n, clauses)
                if validate_t2_shape(f):
                    yield f


def exhaustive_source_instances(n: int) -> Iterator[CnfFormula]:
    """Every strict source-form formula on n variables, as sorted lists of sorted clauses."""
    counts = {v: 3 for v in range(1, n + 1)}

    def extend(previous: Clause, clauses: List[Clause]) -> Iterator[List[Clause]]:
        remaining = [v for v in range(1, n + 1) if counts[v]]
        if not remaining:
            yield list(clauses)
            return
        x = remaining[0]
        counts[x] -= 1
        for y in [v for v in remaining if counts[v]]:
            counts[y] -= 1
            for z in [v for v in remaining if v >= y and counts[v]]:
                clause = (x, y, z)
                if clause >= previous:
                    counts[z] -= 1
                    clauses.append(clause)
                    yield from extend(clause, clauses)
                    clauses.pop()
                    counts[z] += 1
            counts[y] += 1
        counts[x] += 1

    for clauses in extend((), []):
        yield CnfFormula(n, tuple(clauses))
