"""Analysis registry: name -> AnalysisDef factory."""

from __future__ import annotations

from typing import Callable

from .analyses import (
    AnalysisDef,
    TaintConfig,
    make_constants,
    make_liveness,
    make_reaching_defs,
    make_taint,
)
from .buggy import make_taint_bug1, make_taint_bug2


class UnknownAnalysisError(Exception):
    def __init__(self, name: str):
        super().__init__(f"unknown analysis: {name}")
        self.name = name


_FACTORIES: dict[str, Callable[..., AnalysisDef]] = {
    "taint": make_taint,
    "reaching-defs": lambda config=None: make_reaching_defs(),
    "liveness": lambda config=None: make_liveness(),
    "constants": lambda config=None: make_constants(),
    "taint-bug1": make_taint_bug1,
    "taint-bug2": make_taint_bug2,
}


def analysis_names() -> list[str]:
    return list(_FACTORIES)


def get_analysis(name: str, taint_config: TaintConfig | None = None) -> AnalysisDef:
    try:
        factory = _FACTORIES[name]
    except KeyError:
        raise UnknownAnalysisError(name) from None
    return factory(taint_config)
