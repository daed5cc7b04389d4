"""PESN snapshot files: a little-endian header followed by both velocity components.

Header: magic b"PESN", version (u32), N_x, N_y, N_z (u32), L_x, L_y, h, t (f64).
Each component is stored as physical f64 values in x-major, then y, then z order.
"""
import logging
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import SnapshotError
from .field import Field, Grid, Space

logger = logging.getLogger(__name__)

MAGIC = b'PESN'
VERSION = 1
HEADER = struct.Struct('<4sIIIIdddd')
MAX_VALUES = 1 << 34


@dataclass(frozen=True)
class SnapshotHeader:
    nx: int
    ny: int
    nz: int
    lx: float
    ly: float
    h: float
    t: float

    @property
    def values(self):
        return 2 * self.nx * self.ny * (self.nz + 1)


def write_snapshot(v, t, path):
    grid = v.grid
    header = HEADER.pack(MAGIC, VERSION, grid.nx, grid.ny, grid.nz, grid.lx, grid.ly, grid.h, float(t))
    payload = np.ascontiguousarray(v.physical().data, dtype='<f8').tobytes(order='C')
    path = Path(path)
    with path.open('wb') as stream:
        stream.write(header)
        stream.write(payload)
    logger.debug("wrote snapshot t=%g to %s", t, path)


def _read_header(raw):
    if len(raw) < len(MAGIC) or raw[:len(MAGIC)] != MAGIC:
        raise SnapshotError("not a PESN file")
    if len(raw) < HEADER.size:
        raise SnapshotError("truncated file: incomplete header")
    _, version, nx, ny, nz, lx, ly, h, t = HEADER.unpack_from(raw)
    if version != VERSION:
        raise SnapshotError(f"unsupported version {version}")
    header = SnapshotHeader(nx, ny, nz, lx, ly, h, t)
    if header.values > MAX_VALUES:
        raise SnapshotError(f"dimension overflow: {nx}x{ny}x{nz}")
    return header


def read_snapshot_header(path):
    with Path(path).open('rb') as stream:
        return _read_header(stream.read(HEADER.size))


def read_snapshot(path):
    """Load a snapshot as a physical-space field on the grid it was written with."""
    raw = Path(path).read_bytes()
    header = _read_header(raw)
    expected = header.values * 8
    if len(raw) - HEADER.size < expected:
        raise SnapshotError(f"truncated file: expected {expected} data bytes, found {len(raw) - HEADER.size}")
    try:
        grid = Grid(header.nx, header.ny, header.nz, header.lx, header.ly, header.h)
    except ValueError as exc:
        raise SnapshotError(f"invalid grid in header: {exc}") from exc
    data = np.frombuffer(raw, dtype='<f8', count=header.values, offset=HEADER.size)
    return Field(grid, data.reshape(grid.shape).astype(np.float64), Space.PHYSICAL)
