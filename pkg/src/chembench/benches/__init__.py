"""The three episodic benches behind one reset/step/spaces contract."""

from __future__ import annotations

from pathlib import Path

from ..errors import ConfigError
from .base import ActionSpec, BenchEnv, CONFIG_DIR, ObservationSpec, StepResult, load_config
from .distillation import DistillationBench, make_distillation_bench
from .extraction import ExtractionBench, make_extraction_bench
from .reaction import ReactionBench, make_reaction_bench

BENCH_KINDS = ("rxn", "ext", "dit")

__all__ = [
    "ActionSpec",
    "BenchEnv",
    "BENCH_KINDS",
    "CONFIG_DIR",
    "DistillationBench",
    "ExtractionBench",
    "ObservationSpec",
    "ReactionBench",
    "StepResult",
    "load_config",
    "make_bench",
    "make_distillation_bench",
    "make_extraction_bench",
    "make_reaction_bench",
]


def make_bench(
    kind: str,
    scenario: str = "wurtz",
    config: str | Path | dict | None = None,
    seed: int | None = None,
) -> BenchEnv:
    """Build any bench by kind; the single entry point used by CLI and bindings."""
    if kind == "rxn":
        return make_reaction_bench(scenario=scenario, config=config, seed=seed)
    if kind == "ext":
        return make_extraction_bench(config=config, seed=seed)
    if kind == "dit":
        return make_distillation_bench(config=config, seed=seed)
    raise ConfigError(f"unknown bench kind {kind!r}; use one of {BENCH_KINDS}")
