import json
from pathlib import Path

import pytest
from hypothesis import settings

# property tests must not vary between runs
settings.register_profile("ratekit", derandomize=True, deadline=None, max_examples=60)
settings.load_profile("ratekit")

DATA = Path(__file__).parent / "data" / "oracles.json"


@pytest.fixture(scope="session")
def oracles():
    if not DATA.exists():
        pytest.fail("tests/data/oracles.json is missing; run tools/make_oracles.py")
    return json.loads(DATA.read_text())
