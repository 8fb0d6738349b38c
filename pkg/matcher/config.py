import os
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field

from matcher.utils.json_stuff import load_json, save_as_json


def _env_int(name: str, default: int) -> int:
    value = os.environ.get(name)
    return int(value) if value else default


# Default corpus sizes keep every reduction graph under ~27 vertices (t2 graphs have 3n+4m).
CORPUS_DEFAULTS = {
    "t1": {"n_max": 4, "m_max": 3},
    "t2": {"n_max": 5, "m_max": 3},
}

CHECKS_BY_REDUCTION = {
    "t1": ["lemma1", "thm1"],
    "t2": ["lemma4", "thm2"],
}


class SolverConfig(BaseModel):
    vertex_limit: int = Field(default_factory=lambda: _env_int("MATCHER_VERTEX_LIMIT", 40))
    oracle_limit: int = Field(default_factory=lambda: _env_int("MATCHER_ORACLE_LIMIT", 24))
    split_components: bool = True  # matching numbers are additive over components
    debug: bool = False

    @classmethod
    def from_json(cls, file_path: str):
        return cls(**load_json(file_path))

    def save_as_json(self, file_path: str) -> None:
        save_as_json(self.model_dump(), file_path)


class CorpusConfig(BaseModel):
    which: Literal["lemma1", "thm1", "lemma4", "thm2", "all"] = "all"
    mode: Literal["exhaustive", "random"] = "exhaustive"
    n_max: Optional[int] = None   # overrides the per-reduction defaults when set
    m_max: Optional[int] = None
    limits: Dict[str, Dict[str, int]] = {}
    count: int = 100              # random mode only
    seed: int = 0
    workers: int = 1
    strict_source_form: bool = True
    source_n_max: int = 0         # also run thm2 on every source-form formula with n up to this
    extra_formulas: Dict[str, List[List[List[int]]]] = {}  # clause lists per reduction, appended to either mode
    output_dir: Optional[str] = None
    json_output: bool = False
    solver: SolverConfig = Field(default_factory=SolverConfig)

    def __init__(self, **data):
        super().__init__(**data)

        limits = {}
        for reduction, defaults in CORPUS_DEFAULTS.items():
            given = dict(self.limits.get(reduction, {}))
            limits[reduction] = {
                "n_max": self.n_max if self.n_max is not None else given.get("n_max", defaults["n_max"]),
                "m_max": self.m_max if self.m_max is not None else given.get("m_max", defaults["m_max"]),
            }
        self.limits = limits

        if self.source_n_max < 0:
            raise ValueError(f"source_n_max must be non-negative, got {self.source_n_max}")
        if self.count < 0:
            raise ValueError(f"count must be non-negative, got {self.count}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")
        unknown = sorted(set(self.extra_formulas) - set(CHECKS_BY_REDUCTION))
        if unknown:
            raise ValueError(f"extra_formulas keys must be t1 or t2, got {unknown}")
        for reduction, bounds in self.limits.items():
            if bounds["n_max"] < 0 or bounds["m_max"] < 0:
                raise ValueError(f"negative corpus bounds for {reduction}: {bounds}")

        if self.output_dir:
            os.makedirs(self.output_dir, exist_ok=True)

    def checks_for(self, reduction: str) -> List[str]:
        """Which verification routines run on instances of the given reduction."""
        if self.which == "all":
            return list(CHECKS_BY_REDUCTION[reduction])
        return [c for c in CHECKS_BY_REDUCTION[reduction] if c == self.which]

    def reductions(self) -> List[str]:
        return [r for r in CHECKS_BY_REDUCTION if self.checks_for(r)]

    @classmethod
    def from_json(cls, file_path: str):
        return cls(**load_json(file_path))

    def save_as_json(self, file_path: str) -> None:
        save_as_json(self.model_dump(), file_path)
