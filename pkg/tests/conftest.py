"""Shared fixtures: the large simulation batches reused across test modules.

Each batch is 100,000 experiments, deterministic from its fixed master seed,
so every assertion against them is stable run to run.
"""

import pytest

from fdrlab.montecarlo import SimConfig, run_batch

# One line per acceptance criterion, shown in the terminal summary so the
# PASS/FAIL roll-call survives pytest's output capture.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

NULL16_SEED = 1005
EFF16_SEED = 2003
EFF_SEEDS = {3: 3001, 4: 4001, 8: 8001, 50: 5001}
N_SIMS = 100_000


@pytest.fixture(scope="session")
def null16():
    return run_batch(SimConfig(n_per_group=16, n_sims=N_SIMS,
                               master_seed=NULL16_SEED))


@pytest.fixture(scope="session")
def eff16():
    return run_batch(SimConfig(n_per_group=16, true_mean_treatment=1.0,
                               n_sims=N_SIMS, master_seed=EFF16_SEED))


@pytest.fixture(scope="session")
def effect_batches(eff16):
    batches = {16: eff16}
    for n, seed in EFF_SEEDS.items():
        batches[n] = run_batch(SimConfig(n_per_group=n, true_mean_treatment=1.0,
                                         n_sims=N_SIMS, master_seed=seed))
    return batches
