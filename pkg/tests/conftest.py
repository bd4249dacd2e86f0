import pytest

from sddelab import FbmConfig, generate_fbm, make_grid

ALPHA = 0.3
HURST = 0.75


@pytest.fixture(scope="session")
def rough_driver():
    """One shared driver path on [0, 1]: H = 0.75, n = 512."""
    grid = make_grid(1.0, 512, 0.0)
    return generate_fbm(grid, FbmConfig(hurst=HURST, seed=11))
