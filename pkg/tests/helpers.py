"""Small shared oracles for the test modules."""
import numpy as np

from qslice.quat import Quaternion

I = Quaternion(0, 1, 0, 0)
J = Quaternion(0, 0, 1, 0)
K = Quaternion(0, 0, 0, 1)


def qclose(a, b, tol=1e-12) -> bool:
    return abs(Quaternion.of(a) - Quaternion.of(b)) <= tol


def to_complex2x2(q) -> np.ndarray:
    """Independent 2x2 complex representation, used as a multiplication oracle."""
    w, x, y, z = Quaternion.of(q)
    return np.array([[w + 1j * x, y + 1j * z], [-y + 1j * z, w - 1j * x]])
