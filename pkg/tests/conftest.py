import json
import os

import pytest

from fragex import annotate_releases, build_stem, load_dump

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")

FIXTURE_NAMES = [
    "tiny3", "fx_linear", "fx_release", "fx_branchy", "fx_crisscross",
    "fx_octopus", "fx_large",
]

# Stems short enough for exhaustive clustering checks.
SMALL_FIXTURES = ["tiny3", "fx_linear", "fx_release", "fx_branchy",
                  "fx_crisscross", "fx_octopus"]


def fixture_path(name: str) -> str:
    return os.path.join(DATA_DIR, f"{name}.ndjson")


def load_truth(name: str) -> dict:
    with open(os.path.join(DATA_DIR, f"{name}.truth.json")) as fp:
        return json.load(fp)


@pytest.fixture(scope="session")
def snapshots():
    return {name: load_dump(fixture_path(name)) for name in FIXTURE_NAMES}


@pytest.fixture(scope="session")
def stems(snapshots):
    return {name: annotate_releases(build_stem(snap))
            for name, snap in snapshots.items()}
