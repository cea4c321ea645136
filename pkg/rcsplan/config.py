import os
from dataclasses import dataclass
from typing import Mapping, Optional

# Angle comparison tolerance (radians)
ANGLE_EPS = 1e-9
# Contacts closer than this to an ignored point do not block (scene units)
IGNORE_RADIUS = 1e-9
# Anchors closer than this are degenerate
DEGENERATE_EPS = 1e-12
# Parametric slack of the segment predicate
PARAM_EPS = 1e-12
# Path checker slack
LEG_SLACK = 1e-9
TURN_SLACK = 1e-9

DEFAULT_SEED = 7


@dataclass(frozen=True)
class Settings:
    seed: int = DEFAULT_SEED
    log_level: str = "WARNING"
    workers: int = 1
    astar_max_expansions: int = 400_000

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "Settings":
        """Read settings from RCS_* environment variables"""
        env = os.environ if environ is None else environ
        defaults = cls()
        return cls(
            seed=int(env.get("RCS_SEED", defaults.seed)),
            log_level=env.get("RCS_LOG_LEVEL", defaults.log_level).upper(),
            workers=max(1, int(env.get("RCS_WORKERS", defaults.workers))),
            astar_max_expansions=int(
                env.get("RCS_ASTAR_MAX_EXPANSIONS", defaults.astar_max_expansions)
            ),
        )
