import os
import subprocess
import sys

import requests

from conftest import RV_SAMPLE, PRIMARY_ROOT


class TestWireProtocol:
    def test_health(self, running_service):
        assert requests.get(f"{running_service}/health", timeout=10).status_code == 200

    def test_predict_memorized_sample(self, running_service):
        source, target = RV_SAMPLE
        response = requests.post(
            f"{running_service}/predict", json={"source": source}, timeout=60
        )
        assert response.status_code == 200
        assert response.json() == {"target": target}

    def test_malformed_json_is_400(self, running_service):
        response = requests.post(
            f"{running_service}/predict",
            data="{not json",
            headers={"Content-Type": "application/json"},
            timeout=10,
        )
        assert response.status_code == 400

    def test_missing_source_key_is_400(self, running_service):
        response = requests.post(
            f"{running_service}/predict", json={"wrong": "key"}, timeout=10
        )
        assert response.status_code == 400


class TestPrimaryClientSuite:
    def test_primary_backend_suite_passes_against_service(self, running_service):
        """Wire conformance: the toolkit's whole backend test module runs
        against this live service via its endpoint env hook."""
        env = dict(os.environ)
        env["SANSKRITKIT_REMOTE_ENDPOINT"] = running_service
        proc = subprocess.run(
            [sys.executable, "-m", "pytest", "tests/test_backend.py", "-q"],
            cwd=str(PRIMARY_ROOT),
            env=env,
            capture_output=True,
            text=True,
            timeout=600,
        )
        assert proc.returncode == 0, proc.stdout + proc.stderr
        assert "skipped" not in proc.stdout.splitlines()[-1], (
            "live-endpoint test must not be skipped:\n" + proc.stdout
        )
