import numpy as np
import pytest

import dais

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def central_diff_grad(f, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def central_diff_jac(f, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        cols.append((f(x + e) - f(x - e)) / (2 * h))
    return np.stack(cols, axis=-1)


def rel_err(a, b, floor=1e-8):
    return np.max(np.abs(a - b)) / max(np.max(np.abs(b)), floor)


@pytest.fixture
def example_pair():
    """N(0, I_10) proposal and the correlated Gaussian target of the control-variate example."""
    return dais.standard_normal(10), dais.correlated_gaussian_target(10, 1.0, 0.9, 0.1)


def read_outputs(directory):
    """File name -> bytes for every output file; ``wall_seconds`` is dropped from summary.json."""
    import json
    import os

    out = {}
    for name in sorted(os.listdir(directory)):
        with open(os.path.join(directory, name), "rb") as fh:
            raw = fh.read()
        if name == "summary.json":
            obj = json.loads(raw)
            obj.pop("wall_seconds", None)
            raw = json.dumps(obj, sort_keys=True).encode()
        out[name] = raw
    return out
