import numpy as np
import pytest


def make_phantom(n: int = 256) -> np.ndarray:
    """Piecewise-constant benchmark scene: gray levels 64/128/192, two
    axis-aligned squares and one diagonal edge across a corner."""
    img = np.full((n, n), 128.0)
    img[n // 8 : 3 * n // 8, 9 * n // 16 : 13 * n // 16] = 64.0
    img[9 * n // 16 : 13 * n // 16, n // 8 : 3 * n // 8] = 192.0
    rows, cols = np.ogrid[:n, :n]
    img[rows + cols >= 3 * n // 2] = 192.0
    return img


@pytest.fixture(scope="session")
def phantom() -> np.ndarray:
    return make_phantom()
