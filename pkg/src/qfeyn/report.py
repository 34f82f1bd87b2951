"""
Report models shared by the verification routines and the command line.

Every verification in this package returns an :class:`IdentityReport`;
the ``verify`` command collects them into :class:`SuiteReport` objects
and finally one :class:`RunReport`, whose JSON schema is shipped as
``report.schema.json`` next to this module.
"""

from __future__ import annotations

__all__ = ['IdentityReport', 'SuiteReport', 'RunReport', 'load_schema', 'SCHEMA_FILE']


import importlib.resources
from typing import Any

import orjson
from pydantic import BaseModel, ConfigDict, Field

SCHEMA_FILE = 'report.schema.json'


class IdentityReport(BaseModel):
    """
    Outcome of checking one identity over a range of instances.

    ``failures`` holds one JSON-friendly record per failing instance,
    naming the instance and both sides of the comparison.
    """

    model_config = ConfigDict(frozen=True)

    theorem: str
    order: int | None = None
    checked: int = 0
    failures: list[dict[str, Any]] = Field(default_factory=list)
    details: dict[str, Any] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures


class SuiteReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    identity: str
    checked: int
    failed: int
    passed: bool
    failures: list[dict[str, Any]] = Field(default_factory=list)

    @classmethod
    def from_identity(cls, name: str, report: IdentityReport) -> SuiteReport:
        return cls(
            name=name,
            identity=report.theorem,
            checked=report.checked,
            failed=len(report.failures),
            passed=report.passed,
            failures=report.failures,
        )


class RunReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    command: str = 'verify'
    q: float
    seed: int
    tol: float
    suites: list[SuiteReport]
    passed: bool
    total_checked: int
    total_failed: int

    @classmethod
    def from_suites(cls, suites: list[SuiteReport], *, q: float, seed: int, tol: float) -> RunReport:
        suites = sorted(suites, key=lambda s: s.name)
        return cls(
            q=q,
            seed=seed,
            tol=tol,
            suites=suites,
            passed=all(s.passed for s in suites),
            total_checked=sum(s.checked for s in suites),
            total_failed=sum(s.failed for s in suites),
        )


def load_schema() -> dict:
    """The checked-in JSON schema of :class:`RunReport`."""
    data = importlib.resources.files('qfeyn').joinpath(SCHEMA_FILE).read_bytes()
    return orjson.loads(data)
