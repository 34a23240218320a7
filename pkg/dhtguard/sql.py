from typing import List, Sequence

from sqlalchemy import (
    delete, insert, select,
    ForeignKey, MetaData, Table, Column,
    Float, Integer, String,
)

from dhtguard.errors import SweepNotFoundError
from dhtguard.storage import Storage, StoredSweep
from dhtguard.sweep import SweepRow


class SqlStorage(Storage):
    def __init__(self, db):
        self.db = db
        self.metadata = MetaData()

        self.sweeps_table = Table(
            "sweeps",
            self.metadata,
            Column("sweep_id", String, primary_key=True),
            Column("timestamp", Integer, nullable=False, index=True),
            Column("label", String, nullable=False, index=True),
            Column("width", Integer, nullable=False),
            Column("baseline_rms", Float, nullable=False),
        )

        self.rows_table = Table(
            "rows",
            self.metadata,
            Column("sweep_id", ForeignKey("sweeps.sweep_id"), primary_key=True),
            Column("guard", Integer, primary_key=True),
            Column("rms_abs", Float, nullable=False),
            Column("ratio_percent", Float, nullable=False),
        )

    async def initialize(self):
        async with self.db.begin() as conn:
            await conn.run_sync(self.metadata.create_all)

    async def store_sweep(self, sweep: StoredSweep, rows: Sequence[SweepRow]):
        async with self.db.begin() as conn:
            await conn.execute(insert(self.sweeps_table).values(**self._store_sweep(sweep)))
            if rows:
                await conn.execute(
                        insert(self.rows_table),
                        [self._store_row(sweep.sweep_id, row) for row in rows])

    async def list_sweeps(self) -> List[StoredSweep]:
        async with self.db.begin() as conn:
            result = await conn.stream(
                    select(self.sweeps_table)
                    .order_by(self.sweeps_table.c.timestamp.desc()))
            return [self._load_sweep(row) async for row in result]

    async def get_sweep(self, sweep_id: str) -> StoredSweep:
        async with self.db.begin() as conn:
            result = await conn.execute(
                    select(self.sweeps_table)
                    .where(self.sweeps_table.c.sweep_id == sweep_id))
            sweeps = [self._load_sweep(row) for row in result]

        if len(sweeps) != 1:
            raise SweepNotFoundError(f"No sweep with ID: {sweep_id}")
        return sweeps[0]

    async def rows_in_sweep(self, sweep_id: str) -> List[SweepRow]:
        async with self.db.begin() as conn:
            result = await conn.stream(
                    select(self.rows_table)
                    .where(self.rows_table.c.sweep_id == sweep_id)
                    .order_by(self.rows_table.c.guard))
            return [self._load_row(row) async for row in result]

    async def delete_sweep(self, sweep_id: str):
        async with self.db.begin() as conn:
            await conn.execute(
                    delete(self.rows_table)
                    .where(self.rows_table.c.sweep_id == sweep_id))
            await conn.execute(
                    delete(self.sweeps_table)
                    .where(self.sweeps_table.c.sweep_id == sweep_id))

    def _load_sweep(self, row):
        return StoredSweep(
            sweep_id=row.sweep_id,
            timestamp=row.timestamp,
            label=row.label,
            width=row.width,
            baseline_rms=row.baseline_rms,
        )

    def _store_sweep(self, sweep):
        return {
            "sweep_id": sweep.sweep_id,
            "timestamp": sweep.timestamp,
            "label": sweep.label,
            "width": sweep.width,
            "baseline_rms": sweep.baseline_rms,
        }

    def _load_row(self, row):
        return SweepRow(
            guard=row.guard,
            rms_abs=row.rms_abs,
            ratio_percent=row.ratio_percent,
        )

    def _store_row(self, sweep_id: str, row: SweepRow):
        return {
            "sweep_id": sweep_id,
            "guard": row.guard,
            "rms_abs": row.rms_abs,
            "ratio_percent": row.ratio_percent,
        }
