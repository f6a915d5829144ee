import json
from pathlib import Path
from typing import Dict, List, Optional, Union

from pydantic import ValidationError

from app.models.memory import StrategyRecord


class MemoryOrderError(ValueError):
    """A record was added with a timestep not above the latest one."""


class MemoryLoadError(ValueError):
    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class MemoryIntegrityError(ValueError):
    """A persisted file whose timesteps are not strictly increasing."""


class MemoryDB:
    """
    Append-only strategy memory of one episode.

    Update means append; the latest record is the current strategy. Records
    are never rewritten or removed.
    """

    def __init__(self, persistence_path: Optional[Union[str, Path]] = None) -> None:
        self._records: List[StrategyRecord] = []
        self.persistence_path = Path(persistence_path) if persistence_path else None

    def __len__(self) -> int:
        return len(self._records)

    @property
    def records(self) -> List[StrategyRecord]:
        return list(self._records)

    def add_memory(self, fragment: Union[StrategyRecord, Dict[str, str]], t: int) -> StrategyRecord:
        latest = self.get_latest()
        if latest is not None and t <= latest.timestep:
            raise MemoryOrderError(
                f"timestep {t} is not greater than latest timestep {latest.timestep}"
            )
        variables = fragment.variables if isinstance(fragment, StrategyRecord) else fragment
        record = StrategyRecord(timestep=t, variables=dict(variables))
        self._records.append(record)
        return record

    def get_latest(self) -> Optional[StrategyRecord]:
        return self._records[-1] if self._records else None

    def to_jsonl(self) -> str:
        return "".join(
            json.dumps({"t": r.timestep, "vars": r.variables}) + "\n" for r in self._records
        )

    def persist(self, path: Optional[Union[str, Path]] = None) -> Path:
        target = Path(path) if path else self.persistence_path
        if target is None:
            raise RuntimeError("no persistence path configured for memory")
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(self.to_jsonl(), encoding="utf-8", newline="\n")
        return target

    @classmethod
    def load(cls, path: Union[str, Path]) -> "MemoryDB":
        db = cls(persistence_path=path)
        for number, raw in enumerate(Path(path).read_bytes().splitlines(), start=1):
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise MemoryLoadError(f"not valid UTF-8: {exc}", number) from exc
            if not line.strip():
                continue
            try:
                payload = json.loads(line)
                record = StrategyRecord(timestep=payload["t"], variables=payload["vars"])
            except (json.JSONDecodeError, KeyError, TypeError, ValidationError) as exc:
                raise MemoryLoadError(f"malformed memory record: {exc}", number) from exc
            try:
                db.add_memory(record, record.timestep)
            except MemoryOrderError as exc:
                raise MemoryIntegrityError(f"line {number}: {exc}") from exc
        return db
