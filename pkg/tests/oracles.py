"""Independent reference implementations used as test oracles.

These walk the IR directly (no code generation) and recompute slices by
brute force, so they share nothing with the production engine except the
parsed, width-annotated design.
"""

from __future__ import annotations

import numpy as np

from hdlslice.frontend.ir import (
    Binary,
    BitSelect,
    Block,
    Case,
    Concat,
    Const,
    ContinuousAssign,
    If,
    Index,
    NonBlockingAssign,
    Ref,
    SignalKind,
    Ternary,
    Unary,
    signals_read,
    walk,
)


class OutOfRange(Exception):
    pass


class RefSim:
    """Tree-walking cycle simulator.

    ``strict`` raises on out-of-range memory access; otherwise reads give 0
    and writes are dropped.
    """

    def __init__(self, design, strict=True):
        self.d = design
        self.strict = strict
        self.val = {}
        self.mem = {}
        for s in design.signals:
            if s.kind is SignalKind.MEMORY:
                self.mem[s.id] = [0] * s.depth
            else:
                self.val[s.id] = 0

    # expressions
    def ev(self, e, reads=None):
        if isinstance(e, Const):
            return e.value
        if isinstance(e, Ref):
            return self.val[e.signal]
        if isinstance(e, Index):
            i = self.ev(e.index, reads)
            rows = self.mem[e.signal]
            if i >= len(rows):
                if self.strict:
                    raise OutOfRange(e.signal, i)
                return 0
            if reads is not None:
                reads.add((e.signal, i))
            return rows[i]
        if isinstance(e, BitSelect):
            return (self.ev(e.base, reads) >> e.lsb) & ((1 << e.width) - 1)
        m = (1 << e.width) - 1
        if isinstance(e, Unary):
            v = self.ev(e.operand, reads)
            return {"~": lambda: ~v & m, "!": lambda: int(v == 0), "-": lambda: -v & m}[e.op]()
        if isinstance(e, Binary):
            if e.op == "&&":
                return int(bool(self.ev(e.left, reads)) and bool(self.ev(e.right, reads)))
            if e.op == "||":
                return int(bool(self.ev(e.left, reads)) or bool(self.ev(e.right, reads)))
            a, b = self.ev(e.left, reads), self.ev(e.right, reads)
            table = {
                "&": lambda: a & b,
                "|": lambda: a | b,
                "^": lambda: a ^ b,
                "+": lambda: (a + b) & m,
                "-": lambda: (a - b) & m,
                "==": lambda: int(a == b),
                "!=": lambda: int(a != b),
                "<": lambda: int(a < b),
                "<=": lambda: int(a <= b),
                ">": lambda: int(a > b),
                ">=": lambda: int(a >= b),
                "<<": lambda: (a << b) & m,
                ">>": lambda: a >> b,
            }
            return table[e.op]()
        if isinstance(e, Ternary):
            c = self.ev(e.cond, reads)
            return self.ev(e.then, reads) if c else self.ev(e.otherwise, reads)
        if isinstance(e, Concat):
            out = 0
            for p in e.parts:
                out = (out << p.width) | self.ev(p, reads)
            return out
        raise TypeError(e)

    # combinational settle by fixpoint iteration, independent of any ordering
    def settle(self):
        for _ in range(len(self.d.assigns) + 2):
            changed = False
            for a in self.d.assigns:
                v = self.ev(a.rhs)
                if self.val[a.target.signal] != v:
                    self.val[a.target.signal] = v
                    changed = True
            if not changed:
                return
        raise AssertionError("combinational logic did not settle")

    def run_stmt(self, s, pend, mpend, executed):
        if s is None:
            return
        if isinstance(s, Block):
            for c in s.body:
                self.run_stmt(c, pend, mpend, executed)
            return
        executed.add(s.id)
        if isinstance(s, NonBlockingAssign):
            t = s.target
            v = self.ev(s.rhs)
            if t.index is not None:
                mpend.append((t.signal, self.ev(t.index), v))
            elif t.is_partial:
                w = t.msb - t.lsb + 1
                mask = ((1 << w) - 1) << t.lsb
                old_v, old_m = pend.get(t.signal, (0, 0))
                pend[t.signal] = ((old_v & ~mask) | ((v << t.lsb) & mask), old_m | mask)
            else:
                pend[t.signal] = (v, self.d.signals[t.signal].mask)
        elif isinstance(s, If):
            if self.ev(s.cond):
                self.run_stmt(s.then, pend, mpend, executed)
            else:
                self.run_stmt(s.otherwise, pend, mpend, executed)
        elif isinstance(s, Case):
            v = self.ev(s.subject)
            chosen = None
            for item in s.items:
                if not item.is_default and any(self.ev(lab) == v for lab in item.labels):
                    chosen = item
                    break
            if chosen is None:
                chosen = next((it for it in s.items if it.is_default), None)
            if chosen is not None:
                self.run_stmt(chosen.body, pend, mpend, executed)

    def step(self, inputs: dict, flip=None, transient=False):
        """One clock cycle; returns the executed statement ids."""
        for name, v in inputs.items():
            self.val[self.d.signal_id(name)] = v
        if flip is not None:
            self.apply_flip(flip)
        self.settle()
        executed = {a.id for a in self.d.assigns}
        pend, mpend = {}, []
        for p in self.d.processes:
            self.run_stmt(p.body, pend, mpend, executed)
        written_rows = set()
        for sig, (v, m) in pend.items():
            self.val[sig] = (self.val[sig] & ~m) | (v & m)
        for mem, row, v in mpend:
            if row >= len(self.mem[mem]):
                if self.strict:
                    raise OutOfRange(mem, row)
                continue
            self.mem[mem][row] = v
            written_rows.add((mem, row))
        if flip is not None and transient:
            sig, row, bit = flip
            if self.d.signals[sig].kind is SignalKind.MEMORY:
                if (sig, row) not in written_rows:
                    self.apply_flip(flip)
            elif not (pend.get(sig, (0, 0))[1] >> bit) & 1:
                self.apply_flip(flip)
        self.settle()
        return executed

    def apply_flip(self, flip):
        sig, row, bit = flip
        if self.d.signals[sig].kind is SignalKind.MEMORY:
            self.mem[sig][row] ^= 1 << bit
        else:
            self.val[sig] ^= 1 << bit

    def sample(self, obs_ids):
        return tuple(self.val[i] for i in obs_ids)


def ref_golden(design, rows: list[dict], observation):
    """(list of sampled tuples, list of executed-id sets) per cycle."""
    obs = sorted({design.signal_id(n) if isinstance(n, str) else n for n in observation})
    sim = RefSim(design)
    samples, executed = [], []
    for r in rows:
        executed.append(sim.step(r))
        samples.append(sim.sample(obs))
    return samples, executed


def ref_inject(design, rows, observation, golden_samples, signal, row, bit, cycle, persistent):
    """First mismatching cycle under a single bit flip, or None."""
    obs = sorted({design.signal_id(n) if isinstance(n, str) else n for n in observation})
    sim = RefSim(design, strict=False)
    for c, r in enumerate(rows):
        flip = (signal, row, bit) if c == cycle else None
        sim.step(r, flip=flip, transient=not persistent)
        if c >= cycle and sim.sample(obs) != golden_samples[c]:
            return c
    return None


# -- slicing ----------------------------------------------------------------


def ref_defuse(design, stmt):
    if isinstance(stmt, (NonBlockingAssign, ContinuousAssign)):
        uses = set(signals_read(stmt.rhs))
        if stmt.target.index is not None:
            uses |= signals_read(stmt.target.index)
        return {stmt.target.signal}, uses
    if isinstance(stmt, If):
        return set(), set(signals_read(stmt.cond))
    if isinstance(stmt, Case):
        uses = set(signals_read(stmt.subject))
        for item in stmt.items:
            for lab in item.labels:
                uses |= signals_read(lab)
        return set(), uses
    return set(), set()


def ref_edges(design):
    """Brute-force pairwise PDG edges as a set of ``(src, dst, kind)``."""
    nodes = [s for s in design.statements if not isinstance(s, Block)]
    du = {s.id: ref_defuse(design, s) for s in nodes}
    edges = set()
    for a in nodes:
        for b in nodes:
            if du[a.id][0] & du[b.id][1]:
                edges.add((a.id, b.id, "data"))
    for h in nodes:
        if isinstance(h, (If, Case)):
            for d in walk(h):
                if d.id != h.id and not isinstance(d, Block):
                    edges.add((h.id, d.id, "control"))
    return edges


def ref_static_slice(design, observation):
    """Backward closure via repeated boolean matrix squaring."""
    n = len(design.statements)
    adj = np.zeros((n, n), dtype=bool)
    for src, dst, _ in ref_edges(design):
        adj[dst, src] = True  # dst depends on src
    reach = adj | np.eye(n, dtype=bool)
    while True:
        nxt = (reach.astype(np.int64) @ reach.astype(np.int64)) > 0
        if np.array_equal(nxt, reach):
            break
        reach = nxt
    obs = {design.signal_id(o) if isinstance(o, str) else o for o in observation}
    seeds = [s.id for s in design.statements if not isinstance(s, Block) and ref_defuse(design, s)[0] & obs]
    out = set()
    for s in seeds:
        out |= set(np.flatnonzero(reach[s]).tolist())
    return out


def csv_rows(text: str) -> list[dict]:
    """Stimulus CSV text to a list of ``{input: value}`` dicts."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = lines[0].split(",")
    return [dict(zip(header, (int(v, 0) for v in ln.split(",")))) for ln in lines[1:]]
