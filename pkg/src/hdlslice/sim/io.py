"""CSV and run-length file formats for stimuli and traces."""

from __future__ import annotations

import csv
import io
from typing import Iterable, TextIO

import numpy as np

from ..errors import EmptyStimulus, StimulusError
from ..frontend.ir import ElaboratedDesign
from .engine import CoverageTrace, GoldenTrace, Stimulus


def _parse_value(text: str, where: str) -> int:
    text = text.strip()
    try:
        if text.lower().startswith("0x"):
            return int(text, 16)
        return int(text, 10)
    except ValueError:
        raise StimulusError(f"{where}: bad value {text!r}") from None


def read_stimulus(design: ElaboratedDesign, f: TextIO | Iterable[str]) -> Stimulus:
    """Header row of input names, then one row per cycle (decimal or ``0x`` hex)."""
    reader = csv.reader(line for line in f if line.strip() and not line.lstrip().startswith("#"))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise EmptyStimulus("stimulus file is empty") from None
    rows = []
    for lineno, record in enumerate(reader, start=2):
        if len(record) != len(header):
            raise StimulusError(f"row {lineno}: expected {len(header)} values, got {len(record)}")
        rows.append(
            {name: _parse_value(v, f"row {lineno}, column {name}") for name, v in zip(header, record)}
        )
    if not rows:
        raise EmptyStimulus("stimulus has no cycles")
    return Stimulus.from_rows(design, rows)


def load_stimulus(design: ElaboratedDesign, path) -> Stimulus:
    with open(path, newline="") as f:
        return read_stimulus(design, f)


def write_stimulus(design: ElaboratedDesign, stimulus: Stimulus, out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow([design.signals[s].name for s in stimulus.inputs])
    for row in stimulus.rows():
        w.writerow(row)


def write_golden(design: ElaboratedDesign, golden: GoldenTrace, out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["cycle"] + [design.signals[s].name for s in golden.observation])
    for c, row in enumerate(golden.rows()):
        w.writerow([c, *row])


def read_golden(design: ElaboratedDesign, f: TextIO) -> GoldenTrace:
    reader = csv.reader(f)
    header = next(reader)
    obs = tuple(design.signal_id(name) for name in header[1:])
    rows = [[int(v) for v in rec[1:]] for rec in reader if rec]
    return GoldenTrace(obs, np.array(rows, dtype=np.uint64).reshape(len(rows), len(obs)))


def write_coverage(coverage: CoverageTrace, out: TextIO) -> None:
    """Run-length encoded coverage: ``<first>x<count>: <ids...>`` per run of equal sets."""
    n = coverage.n_cycles
    c = 0
    while c < n:
        ids = coverage.executed[c]
        end = c + 1
        while end < n and np.array_equal(coverage.executed[end], ids):
            end += 1
        listed = " ".join(str(i) for i in np.flatnonzero(ids))
        out.write(f"{c}x{end - c}: {listed}".rstrip() + "\n")
        c = end


def read_coverage(f: TextIO | Iterable[str], n_statements: int) -> CoverageTrace:
    runs = []
    for line in f:
        line = line.strip()
        if not line:
            continue
        head, _, rest = line.partition(":")
        first, count = (int(x) for x in head.split("x"))
        ids = [int(x) for x in rest.split()]
        runs.append((first, count, ids))
    n = sum(count for _, count, _ in runs)
    executed = np.zeros((n, n_statements), dtype=bool)
    for first, count, ids in runs:
        if ids:
            executed[first : first + count, ids] = True
    return CoverageTrace(executed)


def coverage_text(coverage: CoverageTrace) -> str:
    buf = io.StringIO()
    write_coverage(coverage, buf)
    return buf.getvalue()
