import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT / "scripts"))


@pytest.fixture(scope="session")
def mnist_dir() -> Path:
    path = REPO_ROOT / "data" / "mnist"
    if not path.exists():
        pytest.skip("bundled MNIST subset missing (run scripts/prepare_mnist.py)")
    return path
