"""Gymnasium import with a minimal API-compatible fallback.

When gymnasium is installed the binding subclasses its Env and uses its
spaces, so trainers and the standard env checker work unmodified. Without it
(offline installs), these stand-ins expose the same call surface: Box and
Discrete with seed/sample/contains, and an Env base with the five-tuple step
contract. No simulation logic lives here.
"""

from __future__ import annotations

import numpy as np

try:
    import gymnasium

    HAVE_GYMNASIUM = True
    Env = gymnasium.Env
    Box = gymnasium.spaces.Box
    Discrete = gymnasium.spaces.Discrete

    def register(env_id: str, entry_point: str, **kwargs) -> None:
        if env_id not in gymnasium.registry:
            gymnasium.register(id=env_id, entry_point=entry_point, kwargs=kwargs)

except ImportError:  # minimal stand-ins, same call surface
    HAVE_GYMNASIUM = False

    class _Space:
        def __init__(self):
            self._rng = np.random.default_rng()

        def seed(self, seed=None):
            self._rng = np.random.default_rng(seed)
            return [seed]

    class Box(_Space):
        def __init__(self, low, high, shape, dtype=np.float64):
            super().__init__()
            self.low = np.full(shape, low, dtype=dtype)
            self.high = np.full(shape, high, dtype=dtype)
            self.shape = tuple(shape)
            self.dtype = np.dtype(dtype)

        def sample(self):
            return self._rng.uniform(self.low, self.high).astype(self.dtype)

        def contains(self, x) -> bool:
            x = np.asarray(x)
            return (
                x.shape == self.shape
                and bool(np.all(x >= self.low - 1e-12))
                and bool(np.all(x <= self.high + 1e-12))
            )

    class Discrete(_Space):
        def __init__(self, n: int):
            super().__init__()
            self.n = int(n)

        def sample(self) -> int:
            return int(self._rng.integers(self.n))

        def contains(self, x) -> bool:
            try:
                value = int(x)
            except (TypeError, ValueError):
                return False
            return 0 <= value < self.n

    class Env:
        metadata: dict = {"render_modes": []}
        observation_space = None
        action_space = None

        def reset(self, *, seed=None, options=None):
            # matches the base-class contract: seed bookkeeping only
            self._np_random = np.random.default_rng(seed)
            return None, {}

        def step(self, action):
            raise NotImplementedError

        def close(self):
            pass

        @property
        def unwrapped(self):
            return self

    _REGISTRY: dict[str, tuple[str, dict]] = {}

    def register(env_id: str, entry_point: str, **kwargs) -> None:
        _REGISTRY[env_id] = (entry_point, kwargs)
