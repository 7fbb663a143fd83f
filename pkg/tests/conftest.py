import numpy as np

from evotransit import Raster


def all_differing_pair(height, width):
    """Start/target pair where every pixel differs (no FIXED cells)."""
    start = Raster(np.zeros((height, width, 3), np.uint8))
    target = Raster(np.full((height, width, 3), 255, np.uint8))
    return start, target


def random_pair(height, width, seed, fixed_fraction=0.25):
    """Random pair with a controlled set of equal (FIXED) pixels.

    Non-fixed pixels use target = 255 - start, which can never equal start,
    so the FIXED set is exactly the masked cells.
    """
    rng = np.random.default_rng(seed)
    start = rng.integers(0, 256, (height, width, 3), dtype=np.uint8)
    target = (255 - start).astype(np.uint8)
    equal = rng.random((height, width)) < fixed_fraction
    equal[0, 0] = False
    target[equal] = start[equal]
    return Raster(start), Raster(target)


class StubRng:
    """Scripted generator stand-in: integer and double draws pop preset values."""

    def __init__(self, integers=(), randoms=()):
        self._integers = list(integers)
        self._randoms = list(randoms)

    def integers(self, bound):
        value = self._integers.pop(0)
        assert 0 <= value < bound, f"scripted anchor {value} out of range {bound}"
        return value

    def random(self, size=None):
        assert size is None, "stub only scripts scalar double draws"
        return self._randoms.pop(0)
