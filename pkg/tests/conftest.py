import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def random_image(rng):
    """20x24 random image in [0, 1]."""
    from hopgr import GrayImage
    return GrayImage(rng.random((20, 24)))


def make_line_image(theta, height=64, width=128, row=None, col=None,
                    line_width=4.0, background=0.8, contrast=0.5):
    """One noise-free dark band at a controlled position."""
    from hopgr import GrayImage
    import numpy as np
    row = height / 2 if row is None else row
    col = width / 2 if col is None else col
    rr = np.arange(height, dtype=np.float64)[:, None]
    cc = np.arange(width, dtype=np.float64)[None, :]
    d = np.abs((rr - row) * np.cos(theta) + (cc - col) * np.sin(theta))
    cov = np.clip(line_width / 2 - d + 0.5, 0.0, 1.0)
    return GrayImage(np.clip(background - contrast * cov, 0.0, 1.0))
