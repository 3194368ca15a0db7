"""Vessel snapshot files and trajectory logs.

Snapshots are JSON with a format_version, every vessel field and the name of
the registry they were authored against. Floats serialize via their shortest
round-tripping decimal representation, so save -> load -> save is bit-exact.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import ParseError, ValidationError
from .materials import MaterialRegistry
from .vessel import Vessel

SNAPSHOT_FORMAT_VERSION = 1


def vessel_state(vessel: Vessel) -> dict:
    return {
        "format_version": SNAPSHOT_FORMAT_VERSION,
        "registry": vessel.registry.source_name,
        "label": vessel.label,
        "temperature": vessel.temperature,
        "volume_capacity": vessel.volume_capacity,
        "pressure": vessel.pressure,
        "settle_time": vessel.settle_time,
        "solvents": dict(vessel.solvents),
        "solutes": {k: dict(v) for k, v in vessel.solutes.items()},
        "solids": dict(vessel.solids),
        "gases": dict(vessel.gases),
    }


def vessel_from_state(state: dict, registry: MaterialRegistry) -> Vessel:
    version = state.get("format_version", SNAPSHOT_FORMAT_VERSION)
    if version != SNAPSHOT_FORMAT_VERSION:
        raise ValidationError(f"unsupported snapshot format_version {version!r}")
    vessel = Vessel(
        label=state["label"],
        registry=registry,
        temperature=float(state["temperature"]),
        volume_capacity=float(state["volume_capacity"]),
        pressure=float(state["pressure"]),
        settle_time=float(state["settle_time"]),
        solvents={k: float(v) for k, v in state.get("solvents", {}).items()},
        solutes={
            k: {s: float(v) for s, v in inner.items()}
            for k, inner in state.get("solutes", {}).items()
        },
        solids={k: float(v) for k, v in state.get("solids", {}).items()},
        gases={k: float(v) for k, v in state.get("gases", {}).items()},
    )
    for name in vessel.material_names():
        if name not in registry:
            raise ValidationError(
                f"snapshot references material {name!r} missing from registry "
                f"{registry.source_name!r}"
            )
    vessel.clamp()
    return vessel


def save_vessel(vessel: Vessel, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(vessel_state(vessel), indent=2, sort_keys=True) + "\n")
    return path


def load_vessel(path: str | Path, registry: MaterialRegistry) -> Vessel:
    path = Path(path)
    try:
        state = json.loads(path.read_text())
    except OSError as exc:
        raise ParseError(f"cannot read snapshot {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed snapshot {path}: {exc}", line=exc.lineno) from None
    return vessel_from_state(state, registry)


class TrajectoryLog:
    """Line-delimited JSON episode log: one record per step."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = self.path.open("w")

    def record(self, episode: int, step: int, action, reward: float, done: bool,
               extra: dict | None = None) -> None:
        entry = {
            "episode": episode,
            "step": step,
            "action": action.tolist() if hasattr(action, "tolist") else action,
            "reward": reward,
            "done": done,
        }
        if extra:
            entry.update(extra)
        self._fh.write(json.dumps(entry, sort_keys=True) + "\n")

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
