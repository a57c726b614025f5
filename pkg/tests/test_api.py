from decimal import Decimal

import pytest
from fastapi.testclient import TestClient

from main import app
from src.gateway import CostLedger
from src.loop import Booklog, BatchStats, Flow, FpvStats

from conftest import ISSUES, RTL, SVA, read


@pytest.fixture
def client(tmp_path, monkeypatch):
    monkeypatch.setenv("SVA_FORGE_BOOKLOG", str(tmp_path / "booklog.jsonl"))
    monkeypatch.setenv("SVA_FORGE_LEDGER", str(tmp_path / "ledger.jsonl"))
    monkeypatch.delenv("SVA_FORGE_RULES", raising=False)
    return TestClient(app)


class TestBooklogRoutes:

    def test_root(self, client):
        assert client.get("/").json()["service"] == "sva-forge"

    def test_empty_booklog(self, client):
        response = client.get("/v1/booklog")
        assert response.status_code == 200
        assert response.json() == []

    def test_records_and_table(self, client, tmp_path):
        booklog = Booklog(tmp_path / "booklog.jsonl")
        booklog.add(flow=Flow.Refine, batch_stats=BatchStats(n_assertions=8),
                    fpv_stats=FpvStats(compiled=True, n_failing=0, n_proven=8))
        records = client.get("/v1/booklog").json()
        assert [r["index"] for r in records] == [1]
        assert records[0]["fpv_stats"]["n_proven"] == 8

        table = client.get("/v1/booklog/table")
        assert table.status_code == 200
        assert "Full Proof" in table.text

    def test_corrupt_booklog_is_a_conflict(self, client, tmp_path):
        (tmp_path / "booklog.jsonl").write_text('{"schema": 99}\n')
        assert client.get("/v1/booklog").status_code == 409
        assert client.get("/v1/booklog/table").status_code == 409

    def test_cost(self, client, tmp_path):
        CostLedger(tmp_path / "ledger.jsonl").record(2000, 500, Decimal("0.03"), provider="mock")
        assert client.get("/v1/cost").json() == {"calls": 1, "usd": "0.075"}


class TestLintRoute:

    def test_clean_batch(self, client):
        response = client.post("/v1/lint", json={"sva": read(SVA / "t23.sv"), "rtl": read(RTL / "fifo.sv")})
        assert response.status_code == 200
        body = response.json()
        assert len(body["assertions"]) == 8
        assert body["errors"] == 0
        assert body["findings"] == []

    def test_findings(self, client):
        response = client.post("/v1/lint", json={
            "sva": read(ISSUES / "t01_unprefixed_internal.sv"),
            "rtl": read(RTL / "fifo.sv"),
        })
        body = response.json()
        assert body["errors"] == 2
        assert {f["lint_key"] for f in body["findings"]} == {"unprefixed_internal"}

    def test_without_rtl(self, client):
        body = client.post("/v1/lint", json={"sva": read(ISSUES / "t03_foreach.sv")}).json()
        assert [f["lint_key"] for f in body["findings"]] == ["no_foreach"]

    def test_enable(self, client):
        body = client.post("/v1/lint", json={"sva": read(SVA / "t23.sv"), "enable": ["reduction_advisory"]}).json()
        assert len(body["findings"]) == 2
        assert body["errors"] == 0

    def test_bad_rtl(self, client):
        response = client.post("/v1/lint", json={"sva": read(SVA / "t23.sv"), "rtl": "assign a = b;"})
        assert response.status_code == 422

    def test_missing_body_field(self, client):
        assert client.post("/v1/lint", json={"rtl": "module m; endmodule"}).status_code == 422
