"""
Run configuration and report Pydantic schemas.
"""

from pathlib import Path
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field, field_validator

from app.core.config import Settings
from app.models.bush import SComposition

OutputFormat = Literal["json", "dot", "off", "text"]


class RunConfig(BaseModel):
    """Per-run configuration assembled from CLI flags over the settings."""
    s: str = Field(..., description="Weak composition, e.g. '1,2,0'")
    command: str
    downset_file: Optional[Path] = None
    lambda_file: Optional[Path] = None
    out: OutputFormat = "json"
    cache_dir: Optional[str] = None
    use_cache: bool = True
    enumeration_cap: int = Field(10**6, gt=0)
    arc_cap: int = Field(24, gt=0)
    seed: int = 0

    @field_validator("s")
    @classmethod
    def check_composition(cls, value: str) -> str:
        return str(SComposition.parse(value))

    @property
    def composition(self) -> SComposition:
        return SComposition.parse(self.s)

    def apply(self, settings: Settings) -> None:
        """Push the caps, seed and cache directory into the global settings."""
        settings.enumeration_cap = self.enumeration_cap
        settings.arc_cap = self.arc_cap
        settings.seed = self.seed
        settings.cache_enabled = self.use_cache
        if self.cache_dir:
            settings.cache_dir = self.cache_dir

    def cache_params(self, **extra) -> Dict[str, object]:
        """Everything that determines the artifact, for the cache key."""
        params = {
            "s": self.s,
            "command": self.command,
            "out": self.out,
            "enumeration_cap": self.enumeration_cap,
            "arc_cap": self.arc_cap,
            "seed": self.seed,
        }
        params.update(extra)
        return params


class CheckResultSchema(BaseModel):
    """Outcome of one acceptance check."""
    criterion: int
    name: str
    s: str
    passed: bool
    detail: str = ""


class CheckReportSchema(BaseModel):
    """Schema for a check-suite report."""
    s: str
    suite: str
    seed: int
    passed: bool
    results: List[CheckResultSchema]

    @property
    def failures(self) -> List[CheckResultSchema]:
        return [r for r in self.results if not r.passed]


class InvariantsSchema(BaseModel):
    name: str
    cardinality: int
    f_vector: List[int]
    regular_arcs: bool
    cellularly_regular: Optional[bool] = None


class ConjectureReportSchema(BaseModel):
    """Schema for a conjecture harness report; nothing in it is asserted."""
    s: str
    family: str
    seed: int
    groups: Dict[str, List[InvariantsSchema]]
    agreements: List[str] = Field(default_factory=list)
    counterexamples: List[str] = Field(default_factory=list)

    @classmethod
    def from_report(cls, report) -> "ConjectureReportSchema":
        groups = {
            key: [
                InvariantsSchema(
                    name=inv.name,
                    cardinality=inv.cardinality,
                    f_vector=list(inv.f_vector),
                    regular_arcs=inv.regular_arcs,
                    cellularly_regular=inv.cellularly_regular,
                )
                for inv in members
            ]
            for key, members in report.groups.items()
        }
        return cls(
            s=report.s,
            family=report.family,
            seed=report.seed,
            groups=groups,
            agreements=report.agreements,
            counterexamples=report.counterexamples,
        )
