"""Functions for reading and writing laboratory files."""
import csv
import hashlib
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Any
from typing import Iterable
from typing import Sequence
from typing import TypeAlias

import numpy as np

from lp_tile_lab.carleson import CarlesonSeq
from lp_tile_lab.carleson import ProductCarlesonSeq
from lp_tile_lab.errors import DomainError
from lp_tile_lab.grid import DyadicInterval
from lp_tile_lab.grid import FreqInterval
from lp_tile_lab.grid import IntervalCollection
from lp_tile_lab.grid import TorusSignal
from lp_tile_lab.tiles import SplitResult
from lp_tile_lab.tiles import TileCoefficients
from lp_tile_lab.variation import StepMultiplier


StrPath: TypeAlias = str | os.PathLike[str]
StrOrBytesPath: TypeAlias = str | bytes | os.PathLike[str] | os.PathLike[bytes]

#: Leading bytes of the binary signal format.
SIGNAL_MAGIC = b"LPT1"


def sha256sum(filename: StrOrBytesPath) -> str:
    """Return the SHA256 checksum of the specified file."""
    h = hashlib.sha256()
    b = bytearray(128 * 1024)
    mv = memoryview(b)
    with open(filename, "rb", buffering=0) as f:
        while n := f.readinto(mv):
            h.update(mv[:n])
    return h.hexdigest()


def write_atomic(dst: Path, data: bytes) -> None:
    """Write DATA to DST.

    DST is renamed into place to ensure the operation is atomic, using an
    intermediate temporary file in the same directory.
    """
    with tempfile.NamedTemporaryFile(
        prefix=dst.name + ".", dir=dst.parent, delete=False
    ) as f:
        try:
            f.write(data)
            f.close()
            os.replace(f.name, dst)
        except BaseException:
            os.unlink(f.name)
            raise


def format_cell(value: Any) -> str:
    """CSV text of a value; floats use ``repr`` so they read back exactly."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def csv_bytes(columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> bytes:
    """A header row plus data rows, ``\\n`` terminated."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])
    return buffer.getvalue().encode("utf-8")


def write_csv(dst: Path, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """Write COLUMNS and ROWS to DST atomically."""
    write_atomic(dst, csv_bytes(columns, rows))


def _read_rows(src: Path, columns: Sequence[str]) -> list[dict[str, str]]:
    with open(src, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != list(columns):
            raise DomainError(f"{src}: expected columns {list(columns)}, got {reader.fieldnames}")
        return list(reader)


def write_signal_csv(dst: Path, signal: TorusSignal) -> None:
    """One ``index,re,im`` row per sample."""
    samples = np.asarray(signal.samples, dtype=np.complex128)
    write_csv(
        dst,
        ("index", "re", "im"),
        ((j, float(z.real), float(z.imag)) for j, z in enumerate(samples)),
    )


def read_signal_csv(src: Path) -> TorusSignal:
    """Read a signal written by :func:`write_signal_csv`.

    A signal with no imaginary part comes back real.
    """
    rows = _read_rows(src, ("index", "re", "im"))
    if [int(r["index"]) for r in rows] != list(range(len(rows))):
        raise DomainError(f"{src}: indices must run 0..n-1")
    samples = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
    if not np.any(samples.imag):
        return TorusSignal(samples.real)
    return TorusSignal(samples)


def signal_bytes(signal: TorusSignal) -> bytes:
    """``LPT1``, little-endian u32 ``n``, then ``n`` interleaved f64 pairs."""
    samples = np.asarray(signal.samples, dtype=np.complex128)
    header = SIGNAL_MAGIC + np.uint32(signal.n).astype("<u4").tobytes()
    return header + samples.astype("<c16").tobytes()


def write_signal_binary(dst: Path, signal: TorusSignal) -> None:
    """Write the :func:`signal_bytes` of SIGNAL to DST."""
    write_atomic(dst, signal_bytes(signal))


def read_signal_binary(src: Path) -> TorusSignal:
    """Read a signal written by :func:`write_signal_binary`.

    Raises:
        DomainError: The magic is wrong or the length disagrees with ``n``.
    """
    data = Path(src).read_bytes()
    if data[:4] != SIGNAL_MAGIC:
        raise DomainError(f"{src}: not a signal file")
    n = int(np.frombuffer(data[4:8], dtype="<u4")[0])
    if len(data) != 8 + 16 * n:
        raise DomainError(f"{src}: expected {n} samples, got {(len(data) - 8) / 16:g}")
    return TorusSignal(np.frombuffer(data[8:], dtype="<c16").astype(np.complex128))


def write_collection_csv(dst: Path, omegas: IntervalCollection) -> None:
    """One ``lo,hi`` row per interval."""
    write_csv(dst, ("lo", "hi"), ((w.lo, w.hi) for w in omegas))


def read_collection_csv(src: Path) -> IntervalCollection:
    """Read intervals written by :func:`write_collection_csv`."""
    rows = _read_rows(src, ("lo", "hi"))
    return IntervalCollection(tuple(FreqInterval(int(r["lo"]), int(r["hi"])) for r in rows))


COEFFICIENT_COLUMNS = ("omega_lo", "omega_hi", "level", "offset", "re", "im")


def write_coefficients_csv(dst: Path, coefficients: TileCoefficients) -> None:
    """One row per tile of COEFFICIENTS."""
    write_csv(dst, COEFFICIENT_COLUMNS, coefficients.rows())


def write_split_json(dst: Path, split: SplitResult) -> None:
    """Write SPLIT as sorted, indented JSON."""
    text = json.dumps(split.to_json(), sort_keys=True, indent=2) + "\n"
    write_atomic(dst, text.encode("utf-8"))


def write_carleson_csv(dst: Path, alpha: CarlesonSeq) -> None:
    """One ``level,offset,value`` row per nonzero entry."""
    rows = ((i.level, i.offset, value) for i, value in alpha.entries())
    write_csv(dst, ("level", "offset", "value"), rows)


def read_carleson_csv(src: Path, depth: int | None = None) -> CarlesonSeq:
    """Read a sequence written by :func:`write_carleson_csv`; repeated rows add up."""
    rows = _read_rows(src, ("level", "offset", "value"))
    entries: dict[DyadicInterval, float] = {}
    for r in rows:
        interval = DyadicInterval(int(r["level"]), int(r["offset"]))
        entries[interval] = entries.get(interval, 0.0) + float(r["value"])
    return CarlesonSeq.from_mapping(entries, depth)


PRODUCT_COLUMNS = ("lev1", "off1", "lev2", "off2", "value")


def write_product_carleson_csv(dst: Path, alpha: ProductCarlesonSeq) -> None:
    """One row per nonzero rectangle."""
    rows = ((a.level, a.offset, b.level, b.offset, v) for (a, b), v in alpha.entries())
    write_csv(dst, PRODUCT_COLUMNS, rows)


def read_product_carleson_csv(src: Path, depth: tuple[int, int]) -> ProductCarlesonSeq:
    """Read a sequence written by :func:`write_product_carleson_csv`."""
    rows = _read_rows(src, PRODUCT_COLUMNS)
    entries: dict[tuple[DyadicInterval, DyadicInterval], float] = {}
    for r in rows:
        rect = (
            DyadicInterval(int(r["lev1"]), int(r["off1"])),
            DyadicInterval(int(r["lev2"]), int(r["off2"])),
        )
        entries[rect] = entries.get(rect, 0.0) + float(r["value"])
    return ProductCarlesonSeq.from_mapping(entries, depth)


def write_step_csv(dst: Path, m: StepMultiplier) -> None:
    """One row per cell; a last row with empty values holds the domain end."""
    rows: list[tuple[Any, ...]] = [
        (b, float(v.real), float(v.imag)) for b, v in zip(m.breakpoints, m.values)
    ]
    rows.append((m.domain.hi, "", ""))
    write_csv(dst, ("breakpoint", "re", "im"), rows)


def read_step_csv(src: Path) -> StepMultiplier:
    """Read a multiplier written by :func:`write_step_csv`."""
    rows = _read_rows(src, ("breakpoint", "re", "im"))
    if len(rows) < 2 or rows[-1]["re"] != "":
        raise DomainError(f"{src}: the last row must hold the domain end")
    cells, end = rows[:-1], int(rows[-1]["breakpoint"])
    points = tuple(int(r["breakpoint"]) for r in cells)
    values = np.array([complex(float(r["re"]), float(r["im"])) for r in cells])
    return StepMultiplier(FreqInterval(points[0], end), points, values)
