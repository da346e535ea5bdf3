import sys
from pathlib import Path

import numpy as np

# oracles.py lives next to the tests and is imported as a plain module
sys.path.insert(0, str(Path(__file__).parent))

from granular_tsvm.granulation import GranularBall, GranulationResult  # noqa: E402


def make_balls(C1, C2, R1=None, R2=None):
    """GranulationResult from explicit centers and radii (counts and purity dummy)."""
    C1, C2 = np.atleast_2d(C1).astype(float), np.atleast_2d(C2).astype(float)
    R1 = np.zeros(len(C1)) if R1 is None else np.asarray(R1, float)
    R2 = np.zeros(len(C2)) if R2 is None else np.asarray(R2, float)
    balls = ([GranularBall(c, float(r), 1, 1, 1.0) for c, r in zip(C1, R1)]
             + [GranularBall(c, float(r), -1, 1, 1.0) for c, r in zip(C2, R2)])
    return GranulationResult(balls, 0, [np.array([i]) for i in range(len(balls))])


def random_balls(seed, p1=None, p2=None, m=2, radius=0.3):
    rng = np.random.default_rng(seed)
    # at least m + 2 balls per class keeps H'H and G'G well away from singular
    p1 = p1 or int(rng.integers(m + 2, m + 7))
    p2 = p2 or int(rng.integers(m + 2, m + 7))
    C1 = rng.standard_normal((p1, m)) + 1.0
    C2 = rng.standard_normal((p2, m)) - 1.0
    return make_balls(C1, C2, rng.random(p1) * radius, rng.random(p2) * radius)



# acceptance criteria append (number, passed, detail); printed after the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
