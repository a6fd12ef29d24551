import pytest

from patchdesign import availability
from patchdesign.model import example_network_path, load_model


@pytest.fixture(scope="session")
def model():
    return load_model(example_network_path())


@pytest.fixture(scope="session")
def rates(model):
    return availability.aggregate_all(model.templates, model.policy)


# the five single-redundancy comparison designs plus the worked example
COMPARISON_LABELS = [
    "1dns-1web-1app-1db",
    "2dns-1web-1app-1db",
    "1dns-2web-1app-1db",
    "1dns-1web-2app-1db",
    "1dns-1web-1app-2db",
]

BASELINE = "1dns-1web-1app-1db"
