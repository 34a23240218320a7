from abc import ABC, abstractmethod
from pydantic.dataclasses import dataclass
from typing import List, Sequence

from dhtguard.sweep import SweepRow


@dataclass(frozen=True)
class StoredSweep:
    sweep_id: str
    timestamp: int  # ms since epoch
    label: str
    width: int
    baseline_rms: float


class Storage(ABC):
    @abstractmethod
    async def initialize(self):
        raise NotImplementedError()

    @abstractmethod
    async def store_sweep(self, sweep: StoredSweep, rows: Sequence[SweepRow]):
        raise NotImplementedError()

    @abstractmethod
    async def list_sweeps(self) -> List[StoredSweep]:
        raise NotImplementedError()

    @abstractmethod
    async def get_sweep(self, sweep_id: str) -> StoredSweep:
        raise NotImplementedError()

    @abstractmethod
    async def rows_in_sweep(self, sweep_id: str) -> List[SweepRow]:
        raise NotImplementedError()

    @abstractmethod
    async def delete_sweep(self, sweep_id: str):
        raise NotImplementedError()
