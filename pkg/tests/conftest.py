import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from steiner_sa import AnnealingConfig, best_benchmark, build_instance, compute_apsp, replicate

import corpus as corpus_mod

RUN_SEED = 90210


@pytest.fixture(scope="session")
def g1():
    # r=0, a=1, t1=2, t2=3; optimum 3 via the shared hub a
    return build_instance(
        4,
        [(0, 1, 1), (1, 2, 1), (1, 3, 1), (0, 2, 3), (0, 3, 3)],
        0,
        [2, 3],
    )


@pytest.fixture(scope="session")
def g1_apsp(g1):
    return compute_apsp(g1)


@pytest.fixture(scope="session")
def corpus(tmp_path_factory):
    directory = tmp_path_factory.mktemp("corpus")
    return corpus_mod.build_corpus(directory)


@pytest.fixture(scope="session")
def corpus_runs(corpus):
    """The benchmark runs shared by the acceptance criteria (fixed seed)."""
    runs = {}
    for e in corpus:
        entry = {
            "bb2": best_benchmark(e.instance, e.apsp),
            "sa_test": replicate(
                e.instance,
                e.apsp,
                AnnealingConfig(n_iter=1000, seed=RUN_SEED, variant="sa-test", replications=10),
            ),
            "sa": replicate(
                e.instance,
                e.apsp,
                AnnealingConfig(n_iter=150, seed=RUN_SEED, variant="sa", replications=2),
            ),
        }
        if e.rect:
            entry["sa_rect"] = replicate(
                e.instance_central,
                e.apsp_central,
                AnnealingConfig(n_iter=1000, seed=RUN_SEED, variant="sa-rect", replications=10),
                coords=e.coords,
            )
        runs[e.name] = entry
    return runs
