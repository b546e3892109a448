import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_scene(seed, size=96, channels=3, n_boxes=4):
    """Noisy textured image with a few rectangular 'buildings'."""
    g = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size]
    base = (60 + 40 * np.sin(xx / 9.0) + 30 * np.cos(yy / 13.0))[:, :, None]
    image = np.clip(base + g.normal(0, 8, (size, size, channels)), 0, 255).astype(np.uint8)
    label = np.zeros((size, size), np.uint8)
    for _ in range(n_boxes):
        h, w = g.integers(4, 12, size=2)
        r, c = g.integers(0, size - h), g.integers(0, size - w)
        label[r:r + h, c:c + w] = 1
        image[r:r + h, c:c + w] = g.integers(150, 250, size=channels)
    return image, label


@pytest.fixture
def scene():
    return make_scene(0)


def write_dataset(root, n=3, size=96, instance_ids=False):
    from PIL import Image

    (root / "images").mkdir(parents=True, exist_ok=True)
    (root / "masks").mkdir(parents=True, exist_ok=True)
    for i in range(n):
        image, label = make_scene(i, size=size)
        Image.fromarray(image).save(root / "images" / f"tile{i:02d}.png")
        Image.fromarray(label * 255).save(root / "masks" / f"tile{i:02d}.png")
    return root


@pytest.fixture
def dataset(tmp_path):
    return write_dataset(tmp_path / "data")


ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for number, text, ok in sorted(ACCEPTANCE_RESULTS):
            terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {text}")
