"""chembench: an episodic digital-chemistry simulation engine.

Software agents transform, separate and purify virtual materials on three
benches (reaction, extraction, distillation), observe them through a
characterization bench, and move vessels between benches through snapshot
files. See README.md for the tour.
"""

from .benches import (
    ActionSpec,
    BenchEnv,
    ObservationSpec,
    StepResult,
    make_bench,
    make_distillation_bench,
    make_extraction_bench,
    make_reaction_bench,
)
from .errors import BenchError
from .kinetics import (
    IntegratorConfig,
    Reaction,
    ReactionNetwork,
    derivatives,
    integrate,
    load_network,
    load_shipped_network,
    rate_constant,
)
from .materials import (
    Material,
    MaterialRegistry,
    load_default_registry,
    load_registry,
    lookup,
)
from .policies import (
    Policy,
    ReturnStats,
    heuristic_dit,
    heuristic_ext,
    heuristic_rxn,
    make_policy,
    random_policy,
    rollout,
    run_episode,
)
from .snapshots import load_vessel, save_vessel
from .solvents import (
    LayerProfile,
    asymptotic_partition,
    layer_mean,
    layer_profile,
    layer_variance,
    mix,
    render_layers,
    settle,
)
from .spectra import Spectrum, characterize, uv_vis
from .thermal import HeatEvent, HeatResult, apply_heat, boil_point_order
from .vessel import (
    TransferReport,
    Vessel,
    absolute_purity,
    add_material,
    drain,
    pour,
    solute_purity,
    total_moles,
)

__version__ = "0.1.0"

__all__ = [
    "ActionSpec",
    "BenchEnv",
    "BenchError",
    "HeatEvent",
    "HeatResult",
    "IntegratorConfig",
    "LayerProfile",
    "Material",
    "MaterialRegistry",
    "ObservationSpec",
    "Policy",
    "Reaction",
    "ReactionNetwork",
    "ReturnStats",
    "Spectrum",
    "StepResult",
    "TransferReport",
    "Vessel",
    "absolute_purity",
    "add_material",
    "apply_heat",
    "asymptotic_partition",
    "boil_point_order",
    "characterize",
    "derivatives",
    "drain",
    "heuristic_dit",
    "heuristic_ext",
    "heuristic_rxn",
    "integrate",
    "layer_mean",
    "layer_profile",
    "layer_variance",
    "load_default_registry",
    "load_network",
    "load_registry",
    "load_shipped_network",
    "load_vessel",
    "lookup",
    "make_bench",
    "make_distillation_bench",
    "make_extraction_bench",
    "make_policy",
    "make_reaction_bench",
    "mix",
    "pour",
    "random_policy",
    "rate_constant",
    "render_layers",
    "rollout",
    "run_episode",
    "save_vessel",
    "settle",
    "solute_purity",
    "spectra",
    "total_moles",
    "uv_vis",
]
