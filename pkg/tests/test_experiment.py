import asyncio
import xml.etree.ElementTree as ET

import pytest
import pytest_asyncio
from sqlalchemy.ext.asyncio import create_async_engine

from dhtguard.errors import DegenerateBaselineError, UsageError
from dhtguard.events import Broker, EventType
from dhtguard.experiment import (
    ExperimentConfig, attach_progress_log, attach_storage, paper_summary, run, run_experiment,
    run_paper_suite, run_sweep, run_transform, worker_count,
)
import dhtguard.experiment as experiment
from dhtguard.results import read_csv
from dhtguard.signal import Signal
from dhtguard.sql import SqlStorage
from dhtguard.sweep import sweep
from dhtguard.waveforms import WaveformKind, WaveformSpec, generate

sine_spec = WaveformSpec(WaveformKind.SINE, 90)


@pytest_asyncio.fixture
async def storage():
    engine = create_async_engine("sqlite+aiosqlite:///:memory:", echo=False, future=True)
    storage = SqlStorage(engine)
    await storage.initialize()
    yield storage
    await engine.dispose()


def test_config_needs_exactly_one_source(tmp_path):
    with pytest.raises(UsageError):
        ExperimentConfig(output_csv=tmp_path / "a.csv")
    with pytest.raises(UsageError):
        ExperimentConfig(output_csv=tmp_path / "a.csv", waveform=sine_spec, input_samples=tmp_path / "s.txt")


@pytest.mark.parametrize("guards", [(), (10, 90), (0, 90, 30)])
def test_config_rejects_bad_guards(tmp_path, guards):
    with pytest.raises(UsageError):
        ExperimentConfig(output_csv=tmp_path / "a.csv", waveform=sine_spec, guards=guards)


def test_config_rejects_bad_threshold(tmp_path):
    with pytest.raises(UsageError):
        ExperimentConfig(output_csv=tmp_path / "a.csv", waveform=sine_spec, theta=0.0)


@pytest.mark.asyncio
async def test_async_sweep_matches_sync_sweep():
    broker = Broker()
    rows = []

    async def record(event):
        rows.append(event.row.guard)

    broker.subscribe("*", [EventType.ROW_COMPUTED], record)
    signal = generate(WaveformSpec(WaveformKind.RAMP, 60))
    guards = [0, 5, 20, 60, 200]

    result = await run_sweep(signal, guards, "ramp", broker)
    await broker.drain()

    assert result == sweep(signal, guards, "ramp")
    assert sorted(rows) == guards


@pytest.mark.asyncio
async def test_async_sweep_of_zero_signal():
    with pytest.raises(DegenerateBaselineError):
        await run_sweep(Signal(0, (0.0,) * 4), [0, 10], "zero", Broker())


@pytest.mark.asyncio
async def test_experiment_writes_outputs(tmp_path):
    config = ExperimentConfig(
        output_csv=tmp_path / "sine.csv",
        output_svg=tmp_path / "sine.svg",
        waveform=sine_spec,
        guards=(0, 90),
        theta=None,
    )
    report = await run_experiment(config, Broker())

    rows = read_csv(config.output_csv)
    assert [r.guard for r in rows] == [0, 90]
    assert rows[0].ratio_percent == 100.0
    assert 0 < rows[1].ratio_percent < 2.0
    assert report.result.row(90).ratio_percent == pytest.approx(rows[1].ratio_percent, rel=1e-11)
    ET.parse(config.output_svg)


@pytest.mark.asyncio
async def test_experiment_threshold_search(tmp_path):
    baseline = sweep(generate(sine_spec), [0]).baseline_rms
    config = ExperimentConfig(
        output_csv=tmp_path / "sine.csv",
        waveform=sine_spec,
        guards=(0, 50, 100, 200),
        theta=0.02 * baseline,
    )
    report = await run_experiment(config, Broker())
    assert report.min_guard is not None
    assert report.min_guard <= 90


@pytest.mark.asyncio
async def test_experiment_from_signal_file(tmp_path):
    samples = tmp_path / "pulse.txt"
    samples.write_text("# pulse\n0\n1\n1\n0\n", encoding="utf-8")
    config = ExperimentConfig(output_csv=tmp_path / "pulse.csv", input_samples=samples, guards=(0, 8))
    report = await run_experiment(config, Broker())
    assert report.result.label == "pulse"
    assert report.result.width == 4


@pytest.mark.asyncio
async def test_paper_suite_acceptance(tmp_path):
    results = await run_paper_suite(tmp_path, Broker(), guards=[0, 30, 90, 300, 900])

    assert [r.label for r in results] == ["sine", "ramp", "square", "triangle"]
    ratios = {r.label: r.row(90).ratio_percent for r in results}
    assert all(0 < ratio < 2.0 for ratio in ratios.values())
    assert max(ratios, key=ratios.get) == "square"

    for r in results:
        assert (tmp_path / f"{r.label}.csv").exists()
        ET.parse(tmp_path / f"{r.label}.svg")

    summary = paper_summary(results)
    assert "square" in summary
    assert "270" in summary
    assert "1.02" in summary


@pytest.mark.asyncio
async def test_paper_suite_is_byte_reproducible(tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    await run_paper_suite(first, Broker())
    await run_paper_suite(second, Broker())
    for name in ("sine", "ramp", "square", "triangle"):
        assert (first / f"{name}.csv").read_bytes() == (second / f"{name}.csv").read_bytes()
        assert len(read_csv(first / f"{name}.csv")) == 91


@pytest.mark.asyncio
async def test_finished_sweeps_are_stored(tmp_path, storage):
    broker = Broker()
    attach_storage(broker, storage)
    attach_progress_log(broker)

    config = ExperimentConfig(output_csv=tmp_path / "tri.csv",
                              waveform=WaveformSpec(WaveformKind.TRIANGLE, 90), guards=(0, 30, 90))
    report = await run_experiment(config, broker)
    await broker.drain()

    sweeps = await storage.list_sweeps()
    assert [s.label for s in sweeps] == ["triangle"]
    assert sweeps[0].baseline_rms == report.result.baseline_rms
    assert await storage.rows_in_sweep(sweeps[0].sweep_id) == list(report.result.rows)


@pytest.mark.asyncio
async def test_transform_round_trip(tmp_path):
    samples = tmp_path / "levels.txt"
    samples.write_text("\n".join(["0", "1", "3", "2", "0", "1", "2", "3"]) + "\n", encoding="utf-8")

    report = await run_transform(samples, 200, tmp_path / "levels.csv", Broker(), level_step=1.0)
    assert report.transform_points == 8 + 400
    assert report.result.guards() == [0, 200]
    assert report.level_errors == 0


@pytest.mark.asyncio
async def test_transform_rejects_negative_guard(tmp_path):
    with pytest.raises(UsageError):
        await run_transform(tmp_path / "x.txt", -1, tmp_path / "x.csv", Broker())


@pytest.mark.parametrize("value, expected", [(None, None), ("", None), ("0", None), ("3", 3)])
def test_worker_count(monkeypatch, value, expected):
    monkeypatch.setattr(experiment, "DHTGUARD_WORKERS", value)
    assert worker_count() == expected


@pytest.mark.parametrize("value", ["many", "-2", "1.5"])
def test_malformed_worker_count_is_usage_error(monkeypatch, value):
    monkeypatch.setattr(experiment, "DHTGUARD_WORKERS", value)
    with pytest.raises(UsageError):
        run(asyncio.sleep(0))

