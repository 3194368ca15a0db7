"""chembench-gym: standard episodic-environment binding for chembench."""

from ._compat import HAVE_GYMNASIUM, register
from .envs import ChemBenchEnv, wrap

ENV_IDS = {
    "chemgym/rxn": {"bench_kind": "rxn"},
    "chemgym/ext": {"bench_kind": "ext"},
    "chemgym/dit": {"bench_kind": "dit"},
}


def register_all() -> tuple[str, ...]:
    """Register the three bench ids with the host ecosystem's registry."""
    for env_id, kwargs in ENV_IDS.items():
        register(env_id, "chembench_gym.envs:ChemBenchEnv", **kwargs)
    return tuple(ENV_IDS)


register_all()

__all__ = ["ChemBenchEnv", "ENV_IDS", "HAVE_GYMNASIUM", "register_all", "wrap"]
