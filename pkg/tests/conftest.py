import json
import os

import pytest
from hypothesis import HealthCheck, settings

from guicorpus.action_lang import AliasRegistry, CustomActionManifest

settings.register_profile("default", deadline=None, max_examples=200,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def registry():
    return AliasRegistry.default()


@pytest.fixture(scope="session")
def manifest():
    return CustomActionManifest.default()


@pytest.fixture
def write_json(tmp_path):
    def write(name, document):
        path = tmp_path / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(document), encoding="utf-8")
        return str(path)
    return write
