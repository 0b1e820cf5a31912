import numpy as np
import pytest
from hypothesis import HealthCheck, settings

# kernels are compiled on first use; keep hypothesis from timing that
settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
# pytest --hypothesis-profile=stress for a longer hunt
settings.register_profile("stress", parent=settings.get_profile("default"), max_examples=600)
settings.load_profile("default")


def rel_close(x, y, rtol, floor=1.0):
    x = np.asarray(x)
    y = np.asarray(y)
    scale = np.maximum(np.maximum(np.abs(x), np.abs(y)), floor)
    return bool(np.all(np.abs(x - y) <= rtol * scale))


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    from trieig import clement, solve

    solve(clement(6))
