"""Monte Carlo simulator for mmWave wearable networks in cuboid enclosures."""

__version__ = "0.1.0"

from .config import ExperimentSpec, ScenarioConfig, load_config  # noqa: F401
from .geometry import Enclosure  # noqa: F401
