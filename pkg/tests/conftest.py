from __future__ import annotations

import logging

import pytest
import yaml


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for name in ("ROOKSTAT_CAP", "ROOKSTAT_SHARDS", "ROOKSTAT_PRECISION"):
        monkeypatch.delenv(name, raising=False)
    yield
    logger = logging.getLogger("rookstat")
    for handler in list(logger.handlers):
        handler.close()
    logger.handlers = []
    logger.propagate = True
    logger.setLevel(logging.NOTSET)


@pytest.fixture
def config_file(tmp_path):
    data = {
        "paths": {"output_dir": str(tmp_path / "out"), "logs_dir": str(tmp_path / "logs")},
        "limits": {"enumeration_cap": 12, "attempt_cap": 200000, "compare_max_n": 2000},
        "numerics": {"working_precision": 96},
        "sampling": {"shards": 2, "batch_size": 1024, "max_workers": 2},
        "verify": {"max_n": 4, "samples": 4000, "seed": 11},
    }
    path = tmp_path / "rookstat.yaml"
    path.write_text(yaml.safe_dump(data))
    return str(path)

