"""Output directory of one simulation run.

series.csv is appended and flushed row by row; the manifest is written last, so
a directory without one holds an interrupted or running simulation.
"""
import csv
import logging
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .exceptions import EkmanError
from .serializers import SERIES_COLUMNS, DiagnosticsRecordSerializer

logger = logging.getLogger(__name__)

LOCK_NAME = '.lock'
SERIES_NAME = 'series.csv'
MANIFEST_NAME = 'manifest.txt'
FINAL_SNAPSHOT_NAME = 'final.pesn'


def timestamp():
    return datetime.now(timezone.utc).isoformat(timespec='seconds')


@dataclass
class RunManifest:
    config: dict
    seed: int
    c_e: float
    c_e_stable: bool
    omega0: float = None
    started_at: str = field(default_factory=timestamp)
    finished_at: str = None
    status: str = 'running'
    failed_step: int = None
    error: str = None
    extra: dict = field(default_factory=dict)
    code_version: str = __version__

    def lines(self):
        entries = {'code_version': self.code_version}
        entries.update(self.config)
        entries.update({
            'seed': self.seed,
            'c_e': format(self.c_e, '.17g'),
            'c_e_stable': str(self.c_e_stable).lower(),
            'omega0': '' if self.omega0 is None else format(self.omega0, '.17g'),
            'started_at': self.started_at,
            'finished_at': self.finished_at or '',
            'status': self.status,
        })
        if self.failed_step is not None:
            entries['failed_step'] = self.failed_step
        if self.error:
            entries['error'] = ' '.join(str(self.error).split())
        entries.update(self.extra)
        return [f"{key}={value}" for key, value in entries.items()]

    def write(self, path):
        """Write atomically: readers see either no manifest or a complete one."""
        path = Path(path)
        partial = path.with_name(path.name + '.part')
        partial.write_text('\n'.join(self.lines()) + '\n', encoding='utf-8')
        os.replace(partial, path)


def read_manifest(path):
    entries = {}
    for raw in Path(path).read_text(encoding='utf-8').splitlines():
        key, _, value = raw.partition('=')
        entries[key] = value
    return entries


class SeriesWriter:
    """Streams DiagnosticsRecord rows to CSV with 17 significant digits."""

    def __init__(self, path):
        self._stream = Path(path).open('w', encoding='utf-8', newline='')
        self._writer = csv.DictWriter(self._stream, fieldnames=SERIES_COLUMNS, lineterminator='\n')
        self._writer.writeheader()
        self._stream.flush()

    def write(self, record):
        self._writer.writerow(DiagnosticsRecordSerializer(record).data)
        self._stream.flush()

    def close(self):
        self._stream.close()


def read_series(path):
    """Parse series.csv back into DiagnosticsRecord objects; a partial last row is dropped."""
    records = []
    with Path(path).open(encoding='utf-8', newline='') as stream:
        for row in csv.DictReader(stream):
            if any(value is None for value in row.values()):
                logger.info("ignoring incomplete row in %s", path)
                break
            serializer = DiagnosticsRecordSerializer(data=row)
            serializer.is_valid(raise_exception=True)
            records.append(serializer.save())
    return records


class RunDirectory:
    """Exclusive ownership of an output directory for the duration of a run."""

    def __init__(self, path):
        self.path = Path(path)
        self._lock = self.path / LOCK_NAME

    def __enter__(self):
        self.path.mkdir(parents=True, exist_ok=True)
        try:
            descriptor = os.open(self._lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError as exc:
            raise EkmanError(f"{self.path} is in use by another run ({LOCK_NAME} exists)") from exc
        os.write(descriptor, str(os.getpid()).encode())
        os.close(descriptor)
        self.manifest_path.unlink(missing_ok=True)
        return self

    def __exit__(self, *exc_info):
        self._lock.unlink(missing_ok=True)
        return False

    @property
    def series_path(self):
        return self.path / SERIES_NAME

    @property
    def manifest_path(self):
        return self.path / MANIFEST_NAME

    @property
    def final_snapshot_path(self):
        return self.path / FINAL_SNAPSHOT_NAME

    def snapshot_path(self, step):
        return self.path / f"snapshot_{step:08d}.pesn"
