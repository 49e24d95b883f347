import sys
from pathlib import Path

from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "hyp2col",
    deadline=None,  # first calls pay numba JIT costs
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("hyp2col")
