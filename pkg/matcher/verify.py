"""Desk-scale verification of the two reductions.

Each routine builds the gadget graph of one formula, runs the exact solvers and the
brute-force oracles on it, and records every comparison as a ``Check``. ``run_corpus``
streams exhaustive or seeded-random instances through the routines and aggregates.
"""
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterator, List, Optional, Tuple

import pandas as pd
from pydantic import BaseModel
from tqdm import tqdm

from matcher.config import CorpusConfig, SolverConfig
from matcher.graph import is_bipartite, max_degree
from matcher.matching import (
    MatchingKind,
    is_acyclic_matching,
    is_induced_matching,
    is_uniquely_restricted,
)
from matcher.reductions import (
    ReductionGraph,
    assignment_to_matching_t1,
    assignment_to_matching_t2,
    baseline_matching_t1,
    baseline_matching_t2,
    build_t1,
    build_t2,
    matching_to_assignment_t1,
    matching_to_assignment_t2,
)
from matcher.sat import (
    CnfFormula,
    brute_force_sat,
    brute_force_xsat,
    eval_cnf,
    eval_exact,
    exhaustive_source_instances,
    exhaustive_t1_instances,
    exhaustive_t2_instances,
    normalize_xsat,
    random_t1_instance,
    random_x3sat_instance,
    validate_source_form,
    validate_t2_shape,
)
from matcher.solvers import max_matching_number
from matcher.utils.json_stuff import write_json_lines
from matcher.utils.utils import get_prng, timed


class Check(BaseModel):
    name: str
    expected: Any
    actual: Any
    passed: bool
    elapsed: float = 0.0


class VerificationReport(BaseModel):
    instance_id: str
    routine: str
    n: int
    m: int
    clauses: List[List[int]]
    checks: List[Check] = []

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def record(self, name: str, expected, actual, elapsed: float = 0.0) -> bool:
        passed = expected == actual
        self.checks.append(Check(name=name, expected=expected, actual=actual, passed=passed, elapsed=elapsed))
        return passed

    def measure(self, name: str, expected, compute: Callable[[], Any]):
        """Run compute, record its result against expected, return the result."""
        actual, elapsed = timed(compute)()
        self.record(name, expected, actual, elapsed)
        return actual


def _new_report(routine: str, f: CnfFormula, instance_id: Optional[str]) -> VerificationReport:
    return VerificationReport(
        instance_id=instance_id or routine,
        routine=routine,
        n=f.variable_count,
        m=f.m,
        clauses=[list(c) for c in f.clauses],
    )


def _nu(rg: ReductionGraph, kind: MatchingKind, config: SolverConfig):
    return max_matching_number(rg.graph, kind, config)


def verify_lemma1(f: CnfFormula, config: Optional[SolverConfig] = None, instance_id: Optional[str] = None) -> VerificationReport:
    """nu_ac of the t1 graph equals n+m, plus the structural guarantees of the construction."""
    config = config or SolverConfig()
    report = _new_report("lemma1", f, instance_id)
    rg = build_t1(f)
    report.measure("vertex_count", 3 * f.n + sum(len(c) + 1 for c in f.clauses), lambda: rg.graph.vertex_count)
    report.measure("max_degree_at_most_4", True, lambda: max_degree(rg.graph) <= 4)
    report.measure("baseline_is_acyclic", True, lambda: is_acyclic_matching(rg.graph, baseline_matching_t1(rg)))
    report.measure("nu_ac", f.n + f.m, lambda: _nu(rg, MatchingKind.ACYCLIC, config).value)
    return report


def verify_theorem1(f: CnfFormula, config: Optional[SolverConfig] = None, instance_id: Optional[str] = None) -> VerificationReport:
    """Satisfiable iff nu_ac = nu_s on the t1 graph; witnesses convert both ways."""
    config = config or SolverConfig()
    report = _new_report("thm1", f, instance_id)
    rg = build_t1(f)
    witness = brute_force_sat(f, config.oracle_limit)
    induced = _nu(rg, MatchingKind.INDUCED, config)
    report.measure(
        "satisfiable_iff_nu_ac_equals_nu_s",
        witness is not None,
        lambda: _nu(rg, MatchingKind.ACYCLIC, config).value == induced.value,
    )

    if witness is not None:
        mm, elapsed = timed(assignment_to_matching_t1)(rg, witness)
        report.record("forward_witness_size", f.n + f.m, len(mm), elapsed)
        report.measure("forward_witness_induced", True, lambda: is_induced_matching(rg.graph, mm))
        report.measure(
            "round_trip", list(witness.bits(f.n)), lambda: list(matching_to_assignment_t1(rg, mm).bits(f.n))
        )
    if induced.value == f.n + f.m:
        report.measure(
            "solver_witness_satisfies", True, lambda: eval_cnf(f, matching_to_assignment_t1(rg, induced.witness))
        )
    return report


def verify_lemma4(f: CnfFormula, config: Optional[SolverConfig] = None, instance_id: Optional[str] = None) -> VerificationReport:
    """nu_ur of the t2 graph equals n+m; the graph is bipartite with maximum degree at most 7."""
    config = config or SolverConfig()
    report = _new_report("lemma4", f, instance_id)
    rg = build_t2(f)
    report.measure("vertex_count", 3 * f.n + 4 * f.m, lambda: rg.graph.vertex_count)
    report.measure("bipartite", True, lambda: is_bipartite(rg.graph).is_bipartite)
    report.measure("max_degree_at_most_7", True, lambda: max_degree(rg.graph) <= 7)
    report.measure(
        "baseline_is_uniquely_restricted", True, lambda: is_uniquely_restricted(rg.graph, baseline_matching_t2(rg))
    )
    report.measure("nu_ur", f.n + f.m, lambda: _nu(rg, MatchingKind.UNIQUELY_RESTRICTED, config).value)
    return report


def _gadgets_settled(normalized, witness) -> bool:
    return all(
        (witness.value(a1), witness.value(a2), witness.value(a3), witness.value(a4)) == (0, 1, 0, 0)
        for a1, a2, a3, a4 in normalized.gadgets
    )


def verify_theorem2(
    f: CnfFormula,
    config: Optional[SolverConfig] = None,
    instance_id: Optional[str] = None,
    strict_source_form: bool = True,
) -> VerificationReport:
    """Exact-satisfiable iff nu_ur = nu_s on the t2 graph.

    Formulas in source form (every variable three times, repeats allowed) are
    normalised first and the normalisation itself is checked against the oracle.
    """
    config = config or SolverConfig()
    report = _new_report("thm2", f, instance_id)

    if not validate_t2_shape(f):
        if not validate_source_form(f, strict_source_form):
            raise ValueError(
                "formula is neither of t2 shape nor of source form: "
                + "; ".join(v.detail for v in validate_t2_shape(f).violations)
            )
        source_witness = brute_force_xsat(f, config.oracle_limit)
        normalized, elapsed = timed(normalize_xsat)(f, strict=strict_source_form)
        if normalized.unsatisfiable:
            report.record("unsatisfiable_verdict_matches_oracle", False, source_witness is not None, elapsed)
            return report
        g = normalized.formula
        g_witness, oracle_elapsed = timed(brute_force_xsat)(g, config.oracle_limit)
        report.record(
            "normalization_preserves_exact_satisfiability",
            source_witness is not None,
            g_witness is not None,
            elapsed + oracle_elapsed,
        )
        if g_witness is not None:
            report.measure("gadgets_settled", True, lambda: _gadgets_settled(normalized, g_witness))
            report.measure("lifted_witness_exact", True, lambda: eval_exact(f, normalized.lift(g_witness)))
        f = g

    rg = build_t2(f)
    witness = brute_force_xsat(f, config.oracle_limit)
    induced = _nu(rg, MatchingKind.INDUCED, config)
    report.measure(
        "exact_satisfiable_iff_nu_ur_equals_nu_s",
        witness is not None,
        lambda: _nu(rg, MatchingKind.UNIQUELY_RESTRICTED, config).value == induced.value,
    )

    if witness is not None:
        mm, elapsed = timed(assignment_to_matching_t2)(rg, witness)
        report.record("forward_witness_size", f.n + f.m, len(mm), elapsed)
        report.measure("forward_witness_induced", True, lambda: is_induced_matching(rg.graph, mm))
        report.measure(
            "round_trip", list(witness.bits(f.n)), lambda: list(matching_to_assignment_t2(rg, mm).bits(f.n))
        )
    if induced.value == f.n + f.m:
        report.measure(
            "solver_witness_exact", True, lambda: eval_exact(f, matching_to_assignment_t2(rg, induced.witness))
        )
    return report


ROUTINES = {
    "lemma1": verify_lemma1,
    "thm1": verify_theorem1,
    "lemma4": verify_lemma4,
    "thm2": verify_theorem2,
}


# ---------------------------------------------------------------------------
# corpora

Instance = Tuple[str, CnfFormula, List[str]]

VERDICT_CHECKS = ("satisfiable_iff_nu_ac_equals_nu_s", "exact_satisfiable_iff_nu_ur_equals_nu_s")


def _exhaustive_stream(config: CorpusConfig, reduction: str) -> Iterator[Tuple[str, CnfFormula]]:
    bounds = config.limits[reduction]
    generate = exhaustive_t1_instances if reduction == "t1" else exhaustive_t2_instances
    for k, f in enumerate(generate(bounds["n_max"], bounds["m_max"])):
        yield f"{reduction}-exh-n{f.n}-m{f.m}-{k:05d}", f


def _random_stream(config: CorpusConfig, reduction: str) -> Iterator[Tuple[str, CnfFormula]]:
    bounds = config.limits[reduction]
    n_min = 2 if reduction == "t1" else 3
    if bounds["n_max"] < n_min or bounds["m_max"] < 1:
        return
    prng = get_prng(config.seed)
    for k in range(config.count):
        n = int(prng.randint(n_min, bounds["n_max"] + 1))
        m_cap = 3 * n // 2 if reduction == "t1" else n
        m = int(prng.randint(1, min(bounds["m_max"], m_cap) + 1))
        instance_seed = int(prng.randint(2 ** 31 - 1))
        if reduction == "t1":
            f = random_t1_instance(n, m, instance_seed)
        else:
            f = random_x3sat_instance(n, m, instance_seed)
        yield f"{reduction}-rnd-s{config.seed}-{k:04d}", f


def corpus_instances(config: CorpusConfig) -> List[Instance]:
    instances: List[Instance] = []
    for reduction in config.reductions():
        checks = config.checks_for(reduction)
        stream = _exhaustive_stream if config.mode == "exhaustive" else _random_stream
        instances.extend((instance_id, f, checks) for instance_id, f in stream(config, reduction))
        for k, clauses in enumerate(config.extra_formulas.get(reduction, [])):
            n = max((abs(lit) for clause in clauses for lit in clause), default=0)
            f = CnfFormula(n, tuple(tuple(clause) for clause in clauses))
            instances.append((f"{reduction}-extra-{k:03d}", f, checks))
    if "thm2" in config.checks_for("t2"):
        for n in range(1, config.source_n_max + 1):
            for k, f in enumerate(exhaustive_source_instances(n)):
                instances.append((f"src-exh-n{n}-{k:05d}", f, ["thm2"]))
    return instances


def _verify_instance(args) -> List[VerificationReport]:
    instance_id, f, checks, config = args
    reports = []
    for routine in checks:
        if routine == "thm2":
            reports.append(verify_theorem2(f, config.solver, instance_id, config.strict_source_form))
        else:
            reports.append(ROUTINES[routine](f, config.solver, instance_id))
    return reports


@dataclass
class CorpusResult:
    reports: List[VerificationReport] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.reports)

    @property
    def failures(self) -> List[VerificationReport]:
        return [report for report in self.reports if not report.passed]

    def verdicts(self) -> Dict[str, Dict[bool, int]]:
        """Per routine, how many reports expected each side of its satisfiability biconditional."""
        counts: Dict[str, Dict[bool, int]] = {}
        for report in self.reports:
            for check in report.checks:
                if check.name in VERDICT_CHECKS:
                    tally = counts.setdefault(report.routine, {True: 0, False: 0})
                    tally[bool(check.expected)] += 1
        return counts

    def summary(self) -> pd.DataFrame:
        rows = [
            {"routine": report.routine, "check": check.name, "passed": int(check.passed), "elapsed": check.elapsed}
            for report in self.reports
            for check in report.checks
        ]
        if not rows:
            return pd.DataFrame(columns=["routine", "check", "total", "passed", "failed", "elapsed"])
        df = pd.DataFrame(rows)
        summary = df.groupby(["routine", "check"], sort=True).agg(
            total=("passed", "size"), passed=("passed", "sum"), elapsed=("elapsed", "sum")
        ).reset_index()
        summary["failed"] = summary["total"] - summary["passed"]
        return summary[["routine", "check", "total", "passed", "failed", "elapsed"]]

    def save(self, output_dir: str):
        os.makedirs(output_dir, exist_ok=True)
        write_json_lines([report.model_dump() for report in self.reports], os.path.join(output_dir, "reports.jsonl"))
        self.summary().to_csv(os.path.join(output_dir, "summary.csv"), index=False)


def run_corpus(config: CorpusConfig) -> CorpusResult:
    start = time.perf_counter()
    instances = corpus_instances(config)
    print(
        f"verify: {len(instances)} instances ({config.mode}, checks for {config.reductions()})",
        file=sys.stderr,
        flush=True,
    )

    jobs = [(instance_id, f, checks, config) for instance_id, f, checks in instances]
    reports: List[VerificationReport] = []
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            for batch in tqdm(pool.map(_verify_instance, jobs, chunksize=4), total=len(jobs), disable=not jobs):
                reports.extend(batch)
    else:
        for job in tqdm(jobs, disable=not jobs):
            reports.extend(_verify_instance(job))

    reports.sort(key=lambda report: (report.instance_id, report.routine))
    result = CorpusResult(reports=reports, elapsed=time.perf_counter() - start)
    if config.output_dir:
        result.save(config.output_dir)
    for report in result.failures:
        failed = [check.name for check in report.checks if not check.passed]
        print(f"verify: FAILED {report.instance_id} [{report.routine}] {failed}", file=sys.stderr, flush=True)
    passed = len(reports) - len(result.failures)
    print(f"verify: {passed}/{len(reports)} reports passed in {result.elapsed:.1f}s", file=sys.stderr, flush=True)
    return result
