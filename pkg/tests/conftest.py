import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from curvebounds.curves import PolyCurve


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    return Rotation.random(random_state=rng).as_matrix()


def random_closed_polyline(rng: np.random.Generator, n: int | None = None) -> PolyCurve:
    """Random closed polygon with a solid hull."""
    n = n if n is not None else int(rng.integers(5, 16))
    return PolyCurve(rng.normal(size=(n, 3)) * rng.uniform(0.2, 3.0, size=3), closed=True)


def circle(n: int = 4000, radius: float = 1.0, z: float = 0.0) -> PolyCurve:
    th = np.linspace(0, 2 * np.pi, n, endpoint=False)
    return PolyCurve(np.column_stack([radius * np.cos(th), radius * np.sin(th), np.full(n, z)]), closed=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
