import asyncio
from collections.abc import Iterable
from enum import Enum
from typing import Literal, Set, Union
import uuid

from pydantic.dataclasses import dataclass

from dhtguard.sweep import SweepResult, SweepRow


EventType = Enum("EventType", [
    "SWEEP_STARTED",
    "ROW_COMPUTED",
    "SWEEP_FINISHED",
])


@dataclass(frozen=True)
class SweepStartedEvent:
    typ: Literal[EventType.SWEEP_STARTED]
    sweep_id: str
    label: str
    width: int
    baseline_rms: float


@dataclass(frozen=True)
class RowComputedEvent:
    typ: Literal[EventType.ROW_COMPUTED]
    sweep_id: str
    row: SweepRow


@dataclass(frozen=True)
class SweepFinishedEvent:
    typ: Literal[EventType.SWEEP_FINISHED]
    sweep_id: str
    result: SweepResult


Event = Union[
    SweepStartedEvent,
    RowComputedEvent,
    SweepFinishedEvent,
]


class Events:
    @staticmethod
    def sweep_started(sweep_id: str, label: str, width: int, baseline_rms: float):
        return SweepStartedEvent(EventType.SWEEP_STARTED, sweep_id, label, width, baseline_rms)

    @staticmethod
    def row_computed(sweep_id: str, row: SweepRow):
        return RowComputedEvent(EventType.ROW_COMPUTED, sweep_id, row)

    @staticmethod
    def sweep_finished(sweep_id: str, result: SweepResult):
        return SweepFinishedEvent(EventType.SWEEP_FINISHED, sweep_id, result)


class Subscription:
    def __init__(self, channel: str, typs: Iterable[EventType], callback):
        self.channel = channel
        self.typs = set(typs)
        self.callback = callback

    async def accept(self, event: Event):
        if event.typ in self.typs:
            await self.callback(event)


class Broker:
    def __init__(self):
        # Subscriptions per channel.
        # Special key "*" for all.
        self.subscriptions = {}
        self.pending: Set[asyncio.Task] = set()

    def publish(self, channel: str, event: Event):
        subs = list(self.subscriptions.get(channel, {}).values())
        subs += list(self.subscriptions.get("*", {}).values())
        for sub in subs:
            task = asyncio.create_task(sub.accept(event))
            self.pending.add(task)
            task.add_done_callback(self.pending.discard)

    async def drain(self):
        """Wait for every callback scheduled so far, including ones they schedule."""
        while self.pending:
            await asyncio.gather(*list(self.pending))

    def subscribe(self, channel, typs: Iterable[EventType], callback) -> str:
        handle = str(uuid.uuid4())
        sub = Subscription(channel, typs, callback)
        if channel not in self.subscriptions:
            self.subscriptions[channel] = {}

        self.subscriptions[channel][handle] = sub
        return handle

    def unsubscribe(self, handle: str):
        channels = list(self.subscriptions.keys())
        for channel in channels:
            if handle in self.subscriptions[channel]:
                del self.subscriptions[channel][handle]

            if len(self.subscriptions[channel]) == 0:
                del self.subscriptions[channel]
