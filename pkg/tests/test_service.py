import json

import pytest
from fastapi.testclient import TestClient
from pydantic import ValidationError

from bkapprox.app.runner import execute, render
from bkapprox.service.api import app
from bkapprox.service.schemas import ModelSchema, RunConfig

MODEL = {"sigma": 0.25, "b": 0.1, "r0": 0.03, "a": [{"t": 0.0, "level": -0.35}]}


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


def bond_config(**extra):
    return {"task": "price", "model": MODEL, "instrument": {"type": "bond", "tau": 5.0}, **extra}


class TestSchemas:
    def test_unknown_top_level_key(self):
        with pytest.raises(ValidationError) as info:
            RunConfig.model_validate({**bond_config(), "seeds": 3})
        assert info.value.errors()[0]["loc"] == ("seeds",)

    def test_unknown_nested_key(self):
        with pytest.raises(ValidationError) as info:
            RunConfig.model_validate(bond_config(overrides={"gh_point": 10}))
        assert ("overrides", "gh_point") in [e["loc"] for e in info.value.errors()]

    def test_pricing_requires_instrument(self):
        with pytest.raises(ValidationError, match="requires instrument"):
            RunConfig.model_validate({"task": "price", "model": MODEL})

    def test_model_and_model_file_exclusive(self):
        with pytest.raises(ValidationError, match="not both"):
            RunConfig.model_validate(bond_config(model_file="m.json"))

    def test_task_method_conflict(self):
        with pytest.raises(ValidationError, match="implies method"):
            RunConfig.model_validate({**bond_config(), "task": "mc", "method": "fast"})

    def test_swaption_strike_choice(self):
        inst = {"type": "swaption", "expiry": 1.0, "payments": 2}
        with pytest.raises(ValidationError, match="exactly one"):
            RunConfig.model_validate({"task": "price", "model": MODEL, "instrument": inst})

    def test_model_round_trip(self):
        schema = ModelSchema.model_validate(MODEL)
        assert ModelSchema.from_params(schema.to_params()) == schema

    def test_bond_quote_alias(self):
        cfg = RunConfig.model_validate(
            {"task": "calibrate", "calibration": {"r0": 0.03, "bonds": [{"maturity": 1.0, "yield": 0.03}]}}
        )
        assert cfg.calibration.bonds[0].yield_ == 0.03

    def test_model_file(self, tmp_path):
        (tmp_path / "m.json").write_text(json.dumps(MODEL))
        cfg = RunConfig.model_validate(
            {"task": "price", "model_file": "m.json", "instrument": {"type": "bond", "tau": 1.0}}
        )
        assert cfg.resolved_model(tmp_path).sigma == 0.25
        with pytest.raises(ValueError, match="cannot read"):
            cfg.resolved_model(tmp_path / "missing")


class TestRunner:
    def test_price_payload(self):
        payload = execute(RunConfig.model_validate(bond_config()))
        assert payload["kind"] == "price" and payload["task"] == "price"
        assert payload["body"]["instrument"]["tau"] == 5.0
        assert 0 < payload["body"]["price"] < 1

    def test_csv_key_value(self):
        text = render(execute(RunConfig.model_validate(bond_config())), "csv")
        lines = text.splitlines()
        assert lines[0] == "key,value"
        assert any(line.startswith("diagnostics.gh_points,") for line in lines)

    def test_table_csv(self):
        cfg = RunConfig.model_validate(
            {"task": "bond-table", "grid": {"models": [MODEL], "maturities": [1.0]}, "overrides": {"paths": 200}}
        )
        text = render(execute(cfg), "csv")
        assert "a2_yield" in text

    def test_render_format(self):
        with pytest.raises(ValueError):
            render(execute(RunConfig.model_validate(bond_config())), "xml")


class TestApi:
    def test_health(self, client):
        assert client.get("/health").json()["status"] == "ok"

    def test_price(self, client):
        resp = client.post("/price", json=bond_config())
        assert resp.status_code == 200
        local = execute(RunConfig.model_validate(bond_config()))
        assert resp.json() == local

    def test_run_any_task(self, client):
        resp = client.post("/run", json={**bond_config(), "task": "mc", "overrides": {"paths": 500, "seed": 1}})
        assert resp.status_code == 200
        assert resp.json()["body"]["diagnostics"]["paths"] == 500

    def test_unknown_key_names_field(self, client):
        resp = client.post("/price", json={**bond_config(), "bogus": 1})
        assert resp.status_code == 422
        assert any("bogus" in err["loc"] for err in resp.json()["detail"])

    def test_wrong_endpoint_for_task(self, client):
        resp = client.post("/tables", json=bond_config())
        assert resp.status_code == 422
        assert "not served here" in resp.json()["detail"]

    def test_domain_error_is_422(self, client):
        cfg = bond_config(method="lattice", instrument={"type": "bond", "start": 1.0, "tau": 1.0, "r_start": 0.05})
        resp = client.post("/price", json=cfg)
        assert resp.status_code == 422
        assert "r_start" in resp.json()["detail"]

    def test_calibrate(self, client):
        cfg = {"task": "calibrate", "calibration": {"r0": 0.03, "bonds": [{"maturity": 1.0, "yield": 0.031}]}}
        resp = client.post("/calibrate", json=cfg)
        assert resp.status_code == 200
        body = resp.json()["body"]
        assert body["converged"] is True
        assert abs(body["residuals"][0]["residual"]) <= 1e-10
