import pytest

from brl.params import Parameters
from brl.shooting import ShootingConfig, ShootingResult, find_b_tilde

_CACHE: dict = {}


def _shoot(N: int, p: float, a: float = 1.0,
           r_max: float = 500.0) -> ShootingResult:
    """Memoized critical-threshold search shared across test modules."""
    key = (N, p, a, r_max)
    if key not in _CACHE:
        _CACHE[key] = find_b_tilde(
            a, Parameters(N, p), ShootingConfig(r_max=r_max)
        )
    return _CACHE[key]


@pytest.fixture(scope="session")
def shoot_cached():
    return _shoot
