import os

import pandas as pd
import pytest

from matcher.config import CorpusConfig, SolverConfig
from matcher.sat import CnfFormula
from matcher.utils.json_stuff import load_json, load_json_lines
from matcher.verify import (
    corpus_instances,
    run_corpus,
    verify_lemma1,
    verify_lemma4,
    verify_theorem1,
    verify_theorem2,
)

UNSAT_T1 = CnfFormula(4, ((1, 3), (1, 4), (2, 3), (2, 4), (-1, -2), (-3, -4)))
NO_EXACT_T2 = CnfFormula(4, ((1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)))


def _check(report, name):
    return next(check for check in report.checks if check.name == name)


class TestRoutines:
    def test_lemma1_example(self):
        report = verify_lemma1(CnfFormula(2, ((1, 2), (-1, 2))))
        assert report.passed
        assert _check(report, "nu_ac").actual == 4
        assert _check(report, "vertex_count").actual == 12

    def test_lemma1_single_clause(self):
        report = verify_lemma1(CnfFormula(2, ((1, 2),)), instance_id="single")
        assert report.passed
        assert report.instance_id == "single"
        assert _check(report, "nu_ac").actual == 3

    def test_lemma1_rejects_invalid_formula(self):
        with pytest.raises(ValueError):
            verify_lemma1(CnfFormula(2, ((1, 1),)))

    def test_theorem1_satisfiable(self):
        report = verify_theorem1(CnfFormula(3, ((1, -2, 3), (2, -3))))
        assert report.passed
        names = [check.name for check in report.checks]
        assert names == [
            "satisfiable_iff_nu_ac_equals_nu_s",
            "forward_witness_size",
            "forward_witness_induced",
            "round_trip",
            "solver_witness_satisfies",
        ]

    def test_lemma4(self):
        report = verify_lemma4(CnfFormula(4, ((1, 2, 3), (2, 3, 4))))
        assert report.passed
        assert _check(report, "nu_ur").actual == 6

    def test_theorem2_exact_satisfiable(self):
        report = verify_theorem2(CnfFormula(5, ((1, 2, 3), (3, 4, 5))))
        assert report.passed
        assert _check(report, "exact_satisfiable_iff_nu_ur_equals_nu_s").expected is True

    def test_theorem2_source_form_is_normalized_first(self):
        report = verify_theorem2(CnfFormula(3, ((1, 1, 2), (2, 3, 3), (1, 2, 3))))
        assert report.passed
        assert _check(report, "normalization_preserves_exact_satisfiability").actual is True
        assert _check(report, "lifted_witness_exact").actual is True

    def test_theorem2_unsatisfiable_source_form(self):
        report = verify_theorem2(CnfFormula(1, ((1, 1, 1),)))
        assert report.passed
        assert [check.name for check in report.checks] == ["unsatisfiable_verdict_matches_oracle"]

    def test_theorem2_rejects_other_formulas(self):
        with pytest.raises(ValueError):
            verify_theorem2(CnfFormula(2, ((1, -2),)))

    def test_theorem2_relaxed_source_form(self):
        f = CnfFormula(4, ((1, 1, 2), (2, 3, 4)))
        with pytest.raises(ValueError):
            verify_theorem2(f)
        assert verify_theorem2(f, strict_source_form=False).passed

    def test_every_check_is_timed(self):
        reports = [
            verify_lemma1(CnfFormula(2, ((1, 2), (-1, 2)))),
            verify_theorem1(CnfFormula(3, ((1, -2, 3), (2, -3)))),
            verify_lemma4(CnfFormula(4, ((1, 2, 3), (2, 3, 4)))),
            verify_theorem2(CnfFormula(3, ((1, 1, 2), (2, 3, 3), (1, 2, 3)))),
        ]
        for report in reports:
            assert report.passed
            assert all(check.elapsed > 0 for check in report.checks), report.routine

    @pytest.mark.slow
    def test_theorem1_unsatisfiable(self):
        report = verify_theorem1(UNSAT_T1)
        assert report.passed
        assert _check(report, "satisfiable_iff_nu_ac_equals_nu_s").actual is False

    @pytest.mark.slow
    def test_theorem2_not_exact_satisfiable(self):
        report = verify_theorem2(NO_EXACT_T2)
        assert report.passed
        assert _check(report, "exact_satisfiable_iff_nu_ur_equals_nu_s").actual is False


class TestCorpusConfig:
    def test_default_limits(self):
        config = CorpusConfig()
        assert config.limits == {"t1": {"n_max": 4, "m_max": 3}, "t2": {"n_max": 5, "m_max": 3}}
        assert config.reductions() == ["t1", "t2"]

    def test_overrides_apply_to_both_reductions(self):
        config = CorpusConfig(n_max=2, m_max=1)
        assert config.limits["t1"] == config.limits["t2"] == {"n_max": 2, "m_max": 1}

    def test_partial_limits_keep_defaults(self):
        config = CorpusConfig(limits={"t1": {"n_max": 3}})
        assert config.limits["t1"] == {"n_max": 3, "m_max": 3}

    def test_checks_for(self):
        config = CorpusConfig(which="lemma4")
        assert config.checks_for("t1") == []
        assert config.checks_for("t2") == ["lemma4"]
        assert config.reductions() == ["t2"]

    @pytest.mark.parametrize("bad", [{"workers": 0}, {"count": -1}, {"source_n_max": -2}, {"n_max": -1}])
    def test_invalid_values(self, bad):
        with pytest.raises(ValueError):
            CorpusConfig(**bad)

    def test_extra_formulas_need_a_known_reduction(self):
        with pytest.raises(ValueError):
            CorpusConfig(extra_formulas={"t3": [[[1, 2, 3]]]})

    def test_json_round_trip(self, tmp_path):
        config = CorpusConfig(which="thm2", mode="random", count=7, seed=5, limits={"t2": {"n_max": 4, "m_max": 2}})
        path = str(tmp_path / "corpus.json")
        config.save_as_json(path)
        assert CorpusConfig.from_json(path).model_dump() == config.model_dump()

    def test_solver_limits_from_environment(self, monkeypatch):
        monkeypatch.setenv("MATCHER_ORACLE_LIMIT", "10")
        monkeypatch.setenv("MATCHER_VERTEX_LIMIT", "12")
        config = SolverConfig()
        assert (config.oracle_limit, config.vertex_limit) == (10, 12)

    def test_bundled_configs_load(self):
        root = os.path.join(os.path.dirname(__file__), "..", "verify_configs")
        for name in sorted(os.listdir(root)):
            data = load_json(os.path.join(root, name))
            data.pop("output_dir", None)
            config = CorpusConfig(**data)
            assert config.workers >= 1
            assert config.reductions()


class TestCorpus:
    def test_instance_ids(self):
        instances = corpus_instances(CorpusConfig(which="lemma1", n_max=2, m_max=1))
        assert [instance_id for instance_id, _, _ in instances] == [
            f"t1-exh-n2-m1-{k:05d}" for k in range(len(instances))
        ]
        assert all(checks == ["lemma1"] for _, _, checks in instances)

    def test_source_instances_join_thm2(self):
        instances = corpus_instances(CorpusConfig(which="thm2", n_max=3, m_max=1, source_n_max=2))
        source = [instance_id for instance_id, _, _ in instances if instance_id.startswith("src-")]
        assert source[0] == "src-exh-n1-00000"
        assert any(instance_id.startswith("src-exh-n2-") for instance_id in source)
        assert not corpus_instances(CorpusConfig(which="lemma4", n_max=3, m_max=1, source_n_max=2))[-1][0].startswith("src-")

    def test_exhaustive_lemma1(self, capsys):
        result = run_corpus(CorpusConfig(which="lemma1", n_max=2, m_max=2))
        assert result.passed
        assert result.reports
        captured = capsys.readouterr()
        assert "reports passed" in captured.err
        assert "verify:" not in captured.out

    def test_exhaustive_all_small(self):
        result = run_corpus(CorpusConfig(n_max=3, m_max=1, source_n_max=1))
        assert result.passed
        assert {report.routine for report in result.reports} == {"lemma1", "thm1", "lemma4", "thm2"}

    def test_random_is_reproducible(self):
        config = CorpusConfig(which="thm2", mode="random", count=5, seed=3, limits={"t2": {"n_max": 5, "m_max": 2}})
        first, second = run_corpus(config), run_corpus(config)
        assert first.passed
        assert [(r.instance_id, r.clauses) for r in first.reports] == [(r.instance_id, r.clauses) for r in second.reports]
        assert first.reports[0].instance_id == "t2-rnd-s3-0000"

    def test_extra_formulas_join_their_reduction(self):
        config = CorpusConfig(
            which="thm2",
            limits={"t2": {"n_max": 3, "m_max": 1}},
            extra_formulas={"t2": [list(map(list, NO_EXACT_T2.clauses[:2]))]},
        )
        instances = corpus_instances(config)
        assert [instance_id for instance_id, _, _ in instances] == ["t2-exh-n3-m1-00000", "t2-extra-000"]
        assert instances[-1][1] == CnfFormula(4, NO_EXACT_T2.clauses[:2])
        assert instances[-1][2] == ["thm2"]
        assert not corpus_instances(CorpusConfig(which="lemma1", n_max=0, m_max=0, extra_formulas=config.extra_formulas))

    def test_verdicts(self):
        config = CorpusConfig(
            which="thm2",
            limits={"t2": {"n_max": 3, "m_max": 2}},
            extra_formulas={"t2": [[[1, 2, 3], [1, 2, 3]]]},
        )
        result = run_corpus(config)
        assert result.passed
        assert result.verdicts() == {"thm2": {True: 3, False: 0}}

    def test_workers_give_the_same_reports(self):
        config = dict(which="thm1", mode="random", count=6, seed=11, limits={"t1": {"n_max": 3, "m_max": 2}})
        sequential = run_corpus(CorpusConfig(**config))
        parallel = run_corpus(CorpusConfig(workers=2, **config))
        assert [(r.instance_id, r.clauses, r.passed) for r in sequential.reports] == [
            (r.instance_id, r.clauses, r.passed) for r in parallel.reports
        ]

    def test_empty_corpus_passes(self):
        result = run_corpus(CorpusConfig(mode="random", count=0))
        assert result.passed
        assert result.reports == []
        assert list(result.summary().columns) == ["routine", "check", "total", "passed", "failed", "elapsed"]

    def test_outputs_are_written(self, tmp_path):
        output_dir = str(tmp_path / "run")
        result = run_corpus(CorpusConfig(which="lemma4", n_max=4, m_max=1, output_dir=output_dir))
        records = load_json_lines(os.path.join(output_dir, "reports.jsonl"))
        assert len(records) == len(result.reports)
        assert records[0]["routine"] == "lemma4"
        summary = pd.read_csv(os.path.join(output_dir, "summary.csv"))
        assert set(summary["check"]) == {
            "vertex_count", "bipartite", "max_degree_at_most_7", "baseline_is_uniquely_restricted", "nu_ur",
        }
        assert (summary["failed"] == 0).all()


def _as_lists(f: CnfFormula):
    return [list(clause) for clause in f.clauses]


class TestAcceptanceCorpora:
    """The reduction corpora at full size, each with a formula of the opposite verdict mixed in."""

    def _run(self, **config):
        result = run_corpus(CorpusConfig(workers=2, **config))
        assert result.passed, [(r.instance_id, r.routine) for r in result.failures]
        return result

    @pytest.mark.slow
    def test_t1_exhaustive(self):
        result = self._run(
            limits={"t1": {"n_max": 3, "m_max": 2}, "t2": {"n_max": 0, "m_max": 0}},
            extra_formulas={"t1": [_as_lists(UNSAT_T1)]},
        )
        assert {report.routine for report in result.reports} == {"lemma1", "thm1"}
        verdicts = result.verdicts()["thm1"]
        assert verdicts[True] > 0 and verdicts[False] == 1

    @pytest.mark.slow
    def test_t1_random(self):
        result = self._run(
            mode="random",
            count=100,
            seed=0,
            limits={"t2": {"n_max": 0, "m_max": 0}},
            extra_formulas={"t1": [_as_lists(UNSAT_T1)]},
        )
        assert len(result.reports) == 2 * 101
        verdicts = result.verdicts()["thm1"]
        assert verdicts[True] > 0 and verdicts[False] >= 1

    @pytest.mark.slow
    def test_t2_exhaustive(self):
        result = self._run(
            limits={"t1": {"n_max": 0, "m_max": 0}, "t2": {"n_max": 5, "m_max": 2}},
            extra_formulas={"t2": [_as_lists(NO_EXACT_T2)]},
        )
        assert {report.routine for report in result.reports} == {"lemma4", "thm2"}
        verdicts = result.verdicts()["thm2"]
        assert verdicts[True] > 0 and verdicts[False] >= 1

    @pytest.mark.slow
    def test_t2_random(self):
        result = self._run(
            mode="random",
            count=100,
            seed=0,
            limits={"t1": {"n_max": 0, "m_max": 0}, "t2": {"n_max": 5, "m_max": 3}},
            extra_formulas={"t2": [_as_lists(NO_EXACT_T2)]},
        )
        assert len(result.reports) == 2 * 101
        verdicts = result.verdicts()["thm2"]
        assert verdicts[True] > 0 and verdicts[False] >= 1
