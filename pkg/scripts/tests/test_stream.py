"""
Tests for the TCP stream listener feeding the detection service.
"""
import asyncio
import json

import pytest
from fastapi.testclient import TestClient

from conftest import make_sample
from src.api.app import create_app
from src.detector.mlp import init_model
from src.errors import BindError
from src.sim import source
from src.store.timeseries import MemoryTimeSeriesStore
from src.telemetry.wire import encode_sample
from src.xapp.prediction_log import PredictionLog
from src.xapp.service import DetectionService
from src.xapp.stream import StreamServer, send_samples


async def _wait_for(service, received, timeout=5.0):
    deadline = asyncio.get_running_loop().time() + timeout
    while service.stats.received < received:
        if asyncio.get_running_loop().time() > deadline:
            raise AssertionError(f"only {service.stats.received} of {received} samples arrived")
        await asyncio.sleep(0.01)


@pytest.fixture
def service(registry):
    registry.register(init_model())
    svc = DetectionService(registry, prediction_log=PredictionLog(MemoryTimeSeriesStore(), asynchronous=False))
    svc.load_latest()
    return svc


async def test_hundred_samples_give_86_predictions(service):
    server = StreamServer(service, "127.0.0.1", 0)
    await server.start()
    try:
        sent = await send_samples("127.0.0.1", server.bound_port, [make_sample(i * 100) for i in range(100)])
        assert sent == 100
        await _wait_for(service, 100)
    finally:
        await server.stop()
    assert service.stats.inferred == 86
    assert len(service.prediction_log.store.query_predictions(0, 10 ** 9)) == 86


async def test_reconnect_resets_window(service):
    server = StreamServer(service, "127.0.0.1", 0)
    await server.start()
    try:
        await send_samples("127.0.0.1", server.bound_port, [make_sample(i * 100) for i in range(20)])
        await _wait_for(service, 20)
        await send_samples("127.0.0.1", server.bound_port, [make_sample(i * 100) for i in range(20, 40)])
        await _wait_for(service, 40)
    finally:
        await server.stop()
    assert server.connections == 2
    assert service.stats.received == 40
    assert service.stats.inferred == 6 + 6


async def test_paced_sending(service):
    server = StreamServer(service, "127.0.0.1", 0)
    await server.start()
    try:
        await send_samples("127.0.0.1", server.bound_port,
                           [make_sample(i * 100) for i in range(16)], period_s=0.001)
        await _wait_for(service, 16)
    finally:
        await server.stop()
    assert service.stats.inferred == 2


async def test_port_in_use(service):
    first = StreamServer(service, "127.0.0.1", 0)
    await first.start()
    try:
        second = StreamServer(service, "127.0.0.1", first.bound_port)
        with pytest.raises(BindError):
            await second.start()
    finally:
        await first.stop()


class _RecordingStore(MemoryTimeSeriesStore):
    def __init__(self, order):
        super().__init__()
        self.order = order

    def append_sample(self, sample):
        self.order.append(("store", sample.timestamp_ms))
        super().append_sample(sample)


async def test_emit_interleaves_store_and_stream(service, tmp_path, monkeypatch):
    order = []

    def encode_and_record(sample):
        order.append(("tcp", sample.timestamp_ms))
        return encode_sample(sample)

    monkeypatch.setattr(source, "encode_sample", encode_and_record)
    store = _RecordingStore(order)
    items = [(make_sample(i * 100), i % 2 == 0) for i in range(50)]

    server = StreamServer(service, "127.0.0.1", 0)
    await server.start()
    try:
        emitted = await source.emit_stream(items, store=store, tcp=("127.0.0.1", server.bound_port))
        await _wait_for(service, 50)
    finally:
        await server.stop()

    assert emitted == 50
    assert order == [(kind, i * 100) for i in range(50) for kind in ("store", "tcp")]
    assert len(store.query_samples(0, 10 ** 9)) == 50
    assert [r["label"] for r in store.query_range("ground_truth", 0, 10 ** 9)] == [1, 0] * 25
    assert service.stats.received == 50


async def test_emit_writes_json_ground_truth(tmp_path):
    out = tmp_path / "run" / "samples.ndjson"
    items = [(make_sample(i * 100), i >= 3) for i in range(5)]
    assert await source.emit_stream(items, out=out) == 5

    truth = [json.loads(line) for line in (tmp_path / "run" / "samples.ndjson.truth").read_text().splitlines()]
    assert truth == [{"ts": i * 100, "label": int(i >= 3)} for i in range(5)]
    assert len(out.read_bytes().splitlines()) == 5


async def test_http_swaps_during_tcp_stream_lose_nothing(registry):
    """2000 streamed samples, three model updates over the control API: one prediction per full window."""
    for seed in range(4):
        registry.register(init_model(seed=seed))
    store = MemoryTimeSeriesStore()
    svc = DetectionService(registry, prediction_log=PredictionLog(store, asynchronous=False))
    svc.load_latest()
    svc.handle_model_update(1, "registry://v1")
    client = TestClient(create_app(svc))

    async def swapper():
        acks = []
        for version in (2, 3, 4):
            while svc.stats.received < 500 * (version - 1):
                await asyncio.sleep(0.001)
            body = {"model_version": version, "registry_uri": f"registry://v{version}"}
            response = await asyncio.to_thread(client.post, "/a1/model-update", json=body)
            acks.append(response.json())
        return acks

    server = StreamServer(svc, "127.0.0.1", 0)
    await server.start()
    try:
        swaps = asyncio.create_task(swapper())
        sent = await send_samples("127.0.0.1", server.bound_port,
                                  [make_sample(i * 100) for i in range(2000)], period_s=0.0005)
        await _wait_for(svc, 2000)
        acks = await asyncio.wait_for(swaps, timeout=10)
    finally:
        await server.stop()

    assert sent == 2000
    assert [a["new"] for a in acks] == [2, 3, 4]
    assert all(a["ack"] for a in acks)
    predictions = store.query_predictions(0, 10 ** 9)
    assert [p.timestamp_ms for p in predictions] == [i * 100 for i in range(14, 2000)]
    versions = [p.model_version for p in predictions]
    assert versions == sorted(versions)
    assert versions[0] == 1
    assert svc.stats.dropped == 0
    assert svc.stats.inferred == 1986
    assert client.get("/a1/status").json()["model_version"] == 4
