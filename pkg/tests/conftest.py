from pathlib import Path

import pytest

from kkwreath.groups import parse_group_text, parse_elements, subgroup_generated

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"


def load(name: str):
    return parse_group_text((FIXTURES / f"{name}.txt").read_text(), name=name)


def sub(G, spec: str):
    return subgroup_generated(G, parse_elements(G, spec))


@pytest.fixture
def fixtures_dir():
    return FIXTURES
