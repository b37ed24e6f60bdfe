"""Single bit-flip injection and whole-campaign execution."""

from __future__ import annotations

import csv
import enum
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import TextIO

from .errors import FaultOutOfBounds, TraceMismatchHorizon
from .frontend.ir import ElaboratedDesign
from .sim.engine import GoldenTrace, Stimulus, _check_observation, simulate_flip
from .slicer import FaultDescriptor, FaultList, Semantics


class Outcome(str, enum.Enum):
    DETECTED = "Detected"
    UNDETECTED = "Undetected"


@dataclass(frozen=True)
class FaultOutcome:
    classification: Outcome
    detection_cycle: int | None = None
    latency: int | None = None

    @property
    def detected(self) -> bool:
        return self.classification is Outcome.DETECTED


@dataclass(frozen=True)
class CampaignResult:
    faults: tuple[FaultDescriptor, ...]
    outcomes: tuple[FaultOutcome, ...]
    injected: int
    detected: int
    undetected: int
    wall_seconds: float
    cpu_seconds: float

    def detected_set(self) -> frozenset[FaultDescriptor]:
        return frozenset(f for f, o in zip(self.faults, self.outcomes) if o.detected)


def check_fault(design: ElaboratedDesign, fault: FaultDescriptor, n_cycles: int) -> None:
    if not 0 <= fault.signal < len(design.signals):
        raise FaultOutOfBounds(f"no signal with id {fault.signal}")
    sig = design.signals[fault.signal]
    if not sig.is_storage:
        raise FaultOutOfBounds(f"'{sig.name}' is not a register or memory")
    rows = sig.depth if sig.depth else 1
    if not 0 <= fault.row < rows:
        raise FaultOutOfBounds(f"row {fault.row} outside '{sig.name}' (depth {rows})")
    if not 0 <= fault.bit < sig.width:
        raise FaultOutOfBounds(f"bit {fault.bit} outside '{sig.name}' (width {sig.width})")
    if not 0 <= fault.cycle < n_cycles:
        raise FaultOutOfBounds(f"cycle {fault.cycle} outside horizon 0..{n_cycles - 1}")


def _check_golden(design, stimulus: Stimulus, observation, golden: GoldenTrace) -> tuple[int, ...]:
    obs = _check_observation(design, observation)
    if obs != golden.observation:
        raise TraceMismatchHorizon("golden trace was recorded for a different observation list")
    if golden.n_cycles != stimulus.n_cycles:
        raise TraceMismatchHorizon(
            f"golden trace has {golden.n_cycles} cycles, stimulus has {stimulus.n_cycles}"
        )
    return obs


def _outcome(fault: FaultDescriptor, mismatch: int | None) -> FaultOutcome:
    if mismatch is None:
        return FaultOutcome(Outcome.UNDETECTED)
    return FaultOutcome(Outcome.DETECTED, mismatch, mismatch - fault.cycle)


def inject_and_simulate(
    design: ElaboratedDesign,
    stimulus: Stimulus,
    observation,
    fault: FaultDescriptor,
    golden: GoldenTrace,
) -> FaultOutcome:
    """Re-simulate from cycle 0 with ``fault`` injected and classify it."""
    obs = _check_golden(design, stimulus, observation, golden)
    check_fault(design, fault, stimulus.n_cycles)
    mismatch = simulate_flip(
        design,
        stimulus.rows(),
        stimulus.inputs,
        obs,
        golden.rows(),
        fault.signal,
        fault.row,
        fault.bit,
        fault.cycle,
        Semantics(fault.semantics) is Semantics.PERSISTENT,
    )
    return _outcome(fault, mismatch)


# -- campaigns -------------------------------------------------------------------

# Per-process campaign context, set by ``_init_worker`` (or directly when
# running in-process).
_CTX: dict = {}


def _init_worker(design, input_rows, inputs, obs, golden_rows) -> None:
    _CTX.update(
        design=design, input_rows=input_rows, inputs=inputs, obs=obs, golden_rows=golden_rows
    )


def _run_chunk(faults: list[FaultDescriptor]) -> tuple[list[FaultOutcome], float]:
    design = _CTX["design"]
    args = (_CTX["input_rows"], _CTX["inputs"], _CTX["obs"], _CTX["golden_rows"])
    outcomes = []
    busy = 0.0
    for f in faults:
        start = time.perf_counter()
        mismatch = simulate_flip(
            design, *args, f.signal, f.row, f.bit, f.cycle, f.semantics is Semantics.PERSISTENT
        )
        busy += time.perf_counter() - start
        outcomes.append(_outcome(f, mismatch))
    return outcomes, busy


def _chunks(items: list, n: int) -> list[list]:
    size = max(1, -(-len(items) // n))
    return [items[i : i + size] for i in range(0, len(items), size)]


def run_campaign(
    design: ElaboratedDesign,
    stimulus: Stimulus,
    observation,
    faults: FaultList | list[FaultDescriptor],
    golden: GoldenTrace,
    workers: int = 1,
) -> CampaignResult:
    """Inject every fault independently; outcomes follow the fault-list order.

    ``workers > 1`` fans faults out over a process pool. Totals and
    per-fault outcomes do not depend on the worker count.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    fault_seq = list(faults.faults if isinstance(faults, FaultList) else faults)
    obs = _check_golden(design, stimulus, observation, golden)
    for f in fault_seq:
        check_fault(design, f, stimulus.n_cycles)
    context = (design, stimulus.rows(), stimulus.inputs, obs, golden.rows())

    start = time.perf_counter()
    if workers == 1 or len(fault_seq) < 2:
        _init_worker(*context)
        try:
            outcomes, busy = _run_chunk(fault_seq)
        finally:
            _CTX.clear()
    else:
        outcomes, busy = [], 0.0
        # several chunks per worker keeps the pool balanced when costs vary
        chunks = _chunks(fault_seq, workers * 4)
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_init_worker, initargs=context
        ) as pool:
            for chunk_outcomes, chunk_busy in pool.map(_run_chunk, chunks):
                outcomes.extend(chunk_outcomes)
                busy += chunk_busy
    wall = time.perf_counter() - start

    detected = sum(o.detected for o in outcomes)
    return CampaignResult(
        faults=tuple(fault_seq),
        outcomes=tuple(outcomes),
        injected=len(outcomes),
        detected=detected,
        undetected=len(outcomes) - detected,
        wall_seconds=wall,
        cpu_seconds=busy,
    )


RESULT_FIELDS = ("signal", "row", "bit", "cycle", "outcome", "detection_cycle", "latency")


def write_results(design: ElaboratedDesign, result: CampaignResult, out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(RESULT_FIELDS)
    for f, o in zip(result.faults, result.outcomes):
        w.writerow(
            [
                design.signals[f.signal].name,
                f.row,
                f.bit,
                f.cycle,
                o.classification.value,
                "" if o.detection_cycle is None else o.detection_cycle,
                "" if o.latency is None else o.latency,
            ]
        )
