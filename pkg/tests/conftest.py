import json

import pytest
from click.testing import CliRunner
from hypothesis import HealthCheck, settings

from repositories.document_repository import DocumentRepository
from services.models import get_model

settings.register_profile(
    "planefield",
    derandomize=True,
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("planefield")


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def repository(tmp_path):
    return DocumentRepository(tmp_path)


@pytest.fixture
def reeb():
    return get_model("reeb")


@pytest.fixture
def write_json(tmp_path):
    def write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return path

    return write
