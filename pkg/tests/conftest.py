import json
import subprocess
import sys

import numpy as np
import pytest

from stardmp.matcore import to_json

J2 = np.array([[0, 1], [0, 0]], dtype=complex)
IDEM = np.array([[1, 1], [0, 0]], dtype=complex)


def diag(*xs):
    return np.diag(np.array(xs, dtype=complex))


@pytest.fixture
def write_json(tmp_path):
    def write(name, obj):
        path = tmp_path / name
        path.write_text(json.dumps(obj))
        return str(path)

    return write


@pytest.fixture
def write_matrix(write_json):
    return lambda name, a: write_json(name, to_json(np.asarray(a, dtype=complex)))


@pytest.fixture
def run_cli():
    def run(*args):
        proc = subprocess.run(
            [sys.executable, "-m", "stardmp", *map(str, args)],
            capture_output=True,
            text=True,
            timeout=300,
        )
        return proc

    return run
