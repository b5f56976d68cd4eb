import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

from uape import AttitudeState, generate_synthetic  # noqa: E402

CRITERIA: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(CRITERIA, key=lambda k: int(k.split()[0])):
        ok, detail = CRITERIA[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {detail}")


def random_instance(rng, n_max=50, m_max=200, z_max=3, extra_known=0.2):
    """Random graph + attitude table with per-edge weights, for engine/oracle comparisons."""
    n = int(rng.integers(1, n_max + 1))
    z = int(rng.integers(1, z_max + 1))
    m = int(rng.integers(0, min(m_max, n * (n - 1)) + 1))
    graph, attitudes, _ = generate_synthetic(n, m, z, int(rng.integers(0, n + 1)),
                                             int(rng.integers(1 << 30)))
    values = attitudes.values.copy()
    mask = rng.random(values.shape) < extra_known
    values[mask] = rng.choice([0.0, 0.5, 1.0], size=int(mask.sum()))
    graph = graph.with_weights(rng.random(m))
    return graph, AttitudeState(values)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def write_corpus(directory, edges, attitudes, config="", seeds=None):
    """Write edge list, attitude table and config text files; return their paths."""
    directory.mkdir(parents=True, exist_ok=True)
    paths = {}
    for name, text in (("edges.csv", edges), ("attitudes.csv", attitudes),
                       ("config.txt", config), ("seeds.csv", seeds)):
        if text is not None:
            (directory / name).write_text(text)
            paths[name.split(".")[0]] = str(directory / name)
    return paths
