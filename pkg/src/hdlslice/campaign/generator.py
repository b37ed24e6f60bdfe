"""Seeded random MiniRTL designs and stimuli for property testing.

Generated designs always parse, elaborate and simulate: wires only read
lower-numbered wires, every expression fits its target width, and memory
indices are never wider than ``log2(depth)`` bits.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field


@dataclass(frozen=True)
class GeneratorParams:
    max_regs: int = 4
    max_stmts: int = 12
    memory: bool = False
    max_bits: int = 8
    max_cycles: int = 32
    max_inputs: int = 3
    observe_register: bool = True

    def __post_init__(self):
        if not 0 <= self.max_regs <= 16:
            raise ValueError("max_regs must be in 0..16")
        if not 1 <= self.max_stmts <= 200:
            raise ValueError("max_stmts must be in 1..200")
        if not 1 <= self.max_bits <= 64:
            raise ValueError("max_bits must be in 1..64")
        if not 1 <= self.max_cycles <= 10_000:
            raise ValueError("max_cycles must be in 1..10000")
        if not 1 <= self.max_inputs <= 8:
            raise ValueError("max_inputs must be in 1..8")


@dataclass
class _Sig:
    name: str
    width: int
    depth: int = 0


@dataclass
class GeneratedDesign:
    text: str
    stimulus_csv: str
    observation: list[str]
    seed: int
    params: GeneratorParams = field(repr=False, default_factory=GeneratorParams)

    def config_text(self, design_path: str = "design.mrtl", stimulus_path: str = "stimulus.csv") -> str:
        return (
            f"# generated with seed {self.seed}\n"
            f"design = {design_path}\n"
            f"stimulus = {stimulus_path}\n"
            f"observation = {', '.join(self.observation)}\n"
            "target = all\n"
        )


class _Builder:
    def __init__(self, rng: random.Random, params: GeneratorParams):
        self.rng = rng
        self.p = params
        self.inputs: list[_Sig] = []
        self.regs: list[_Sig] = []
        self.mem: _Sig | None = None
        self.wires: list[_Sig] = []
        self.outputs: list[_Sig] = []
        self.stmt_budget = params.max_stmts

    # -- expressions --------------------------------------------------------

    def readable(self, wires_upto: int | None = None) -> list[_Sig]:
        wires = self.wires if wires_upto is None else self.wires[:wires_upto]
        return self.inputs + self.regs + wires

    def const(self, width: int) -> tuple[str, int]:
        w = self.rng.randint(1, width)
        return f"{w}'d{self.rng.randrange(1 << w)}", w

    def leaf(self, width: int, pool: list[_Sig]) -> tuple[str, int]:
        r = self.rng.random()
        if self.mem is not None and r < 0.15 and self.mem.width <= width:
            idx, _ = self.expr(self.mem.depth.bit_length() - 1, pool, 1)
            return f"{self.mem.name}[{idx}]", self.mem.width
        if r < 0.8 and pool:
            sig = self.rng.choice(pool)
            if sig.width <= width and self.rng.random() < 0.7:
                return sig.name, sig.width
            w = self.rng.randint(1, min(width, sig.width))
            lsb = self.rng.randint(0, sig.width - w)
            msb = lsb + w - 1
            sel = f"{msb}" if msb == lsb else f"{msb}:{lsb}"
            return f"{sig.name}[{sel}]", w
        return self.const(width)

    def expr(self, width: int, pool: list[_Sig], depth: int = 2) -> tuple[str, int]:
        if depth <= 0 or self.rng.random() < 0.3:
            return self.leaf(width, pool)
        kind = self.rng.random()
        if kind < 0.4:
            op = self.rng.choice(["&", "|", "^", "+", "-"])
            a, wa = self.expr(width, pool, depth - 1)
            b, wb = self.expr(width, pool, depth - 1)
            return f"({a} {op} {b})", max(wa, wb)
        if kind < 0.6:
            op = self.rng.choice(["==", "!=", "<", ">="])
            a, _ = self.expr(3, pool, depth - 1)
            b, _ = self.expr(3, pool, depth - 1)
            return f"({a} {op} {b})", 1
        if kind < 0.7:
            a, wa = self.expr(width, pool, depth - 1)
            if self.rng.random() < 0.5:
                return f"(~{a})", wa
            return f"(!{a})", 1
        if kind < 0.8:
            c, _ = self.expr(2, pool, depth - 1)
            a, wa = self.expr(width, pool, depth - 1)
            b, wb = self.expr(width, pool, depth - 1)
            return f"({c} ? {a} : {b})", max(wa, wb)
        if kind < 0.9 and width >= 2:
            wa = self.rng.randint(1, width - 1)
            a, wa = self.expr(wa, pool, depth - 1)
            b, wb = self.expr(width - wa, pool, depth - 1)
            return f"{{{a}, {b}}}", wa + wb
        a, wa = self.expr(width, pool, depth - 1)
        op = self.rng.choice(["<<", ">>"])
        return f"({a} {op} 2'd{self.rng.randrange(4)})", wa

    # -- statements ---------------------------------------------------------

    def assignment(self, owned: list[_Sig], pad: str) -> list[str]:
        pool = self.readable()
        target = self.rng.choice(owned)
        if target.depth:
            idx, _ = self.expr(target.depth.bit_length() - 1, pool, 1)
            rhs, _ = self.expr(target.width, pool)
            return [f"{pad}{target.name}[{idx}] <= {rhs};"]
        if target.width > 1 and self.rng.random() < 0.2:
            lsb = self.rng.randrange(target.width)
            msb = self.rng.randint(lsb, target.width - 1)
            sel = f"{msb}" if msb == lsb else f"{msb}:{lsb}"
            rhs, _ = self.expr(msb - lsb + 1, pool)
            return [f"{pad}{target.name}[{sel}] <= {rhs};"]
        rhs, _ = self.expr(target.width, pool)
        return [f"{pad}{target.name} <= {rhs};"]

    def statement(self, owned: list[_Sig], depth: int, pad: str) -> list[str]:
        self.stmt_budget -= 1
        r = self.rng.random()
        if depth > 0 and self.stmt_budget > 2 and r < 0.3:
            cond, _ = self.expr(2, self.readable(), 1)
            lines = [f"{pad}if ({cond})"]
            lines += self.body(owned, depth - 1, pad + "  ")
            if self.rng.random() < 0.6 and self.stmt_budget > 0:
                lines.append(f"{pad}else")
                lines += self.body(owned, depth - 1, pad + "  ")
            return lines
        if depth > 0 and self.stmt_budget > 3 and r < 0.4:
            subj, w = self.expr(2, self.readable(), 1)
            labels = self.rng.sample(range(1 << w), k=min(1 << w, self.rng.randint(1, 2)))
            lines = [f"{pad}case ({subj})"]
            for lab in labels:
                lines.append(f"{pad}  {lab}:")
                lines += self.body(owned, depth - 1, pad + "    ")
            if self.rng.random() < 0.5 and self.stmt_budget > 0:
                lines.append(f"{pad}  default:")
                lines += self.body(owned, depth - 1, pad + "    ")
            lines.append(f"{pad}endcase")
            return lines
        return self.assignment(owned, pad)

    def body(self, owned: list[_Sig], depth: int, pad: str) -> list[str]:
        n = self.rng.randint(1, 2) if self.stmt_budget > 2 else 1
        if n == 1:
            return self.statement(owned, depth, pad)
        lines = [f"{pad}begin"]
        for _ in range(n):
            lines += self.statement(owned, depth, pad + "  ")
        return lines + [f"{pad}end"]

    # -- whole design -------------------------------------------------------

    def build(self) -> tuple[str, list[str]]:
        rng, p = self.rng, self.p
        for i in range(rng.randint(1, p.max_inputs)):
            self.inputs.append(_Sig(f"in{i}", rng.randint(1, 4)))
        budget = p.max_bits
        n_regs = rng.randint(1, p.max_regs) if p.max_regs else 0
        if p.memory and n_regs and budget >= 4:
            width = rng.randint(1, 2)
            depth = rng.choice([d for d in (2, 4) if d * width <= budget // 2] or [2])
            self.mem = _Sig("mem", width, depth)
            budget -= width * depth
            n_regs -= 1
        for i in range(n_regs):
            if budget <= 0:
                break
            w = rng.randint(1, min(3, budget))
            budget -= w
            self.regs.append(_Sig(f"r{i}", w))
        for i in range(rng.randint(0, 2)):
            w = rng.randint(1, 3)
            self.wires.append(_Sig(f"w{i}", w))
        for i in range(rng.randint(1, 2)):
            self.outputs.append(_Sig(f"o{i}", rng.randint(1, 3)))

        ports = ["clk", "rst"] + [s.name for s in self.inputs] + [s.name for s in self.outputs]
        lines = [f"module gen({', '.join(ports)});", "  input clk;", "  input rst;"]
        for s in self.inputs:
            lines.append(f"  input {_rng(s.width)}{s.name};")
        for s in self.outputs:
            lines.append(f"  output {_rng(s.width)}{s.name};")
        for s in self.regs:
            lines.append(f"  reg {_rng(s.width)}{s.name};")
        if self.mem is not None:
            lines.append(f"  reg {_rng(self.mem.width)}mem [0:{self.mem.depth - 1}];")
        for s in self.wires:
            lines.append(f"  wire {_rng(s.width)}{s.name};")
        rst = _Sig("rst", 1)
        self.inputs.insert(0, rst)

        for i, s in enumerate(self.wires):
            rhs, _ = self.expr(s.width, self.readable(wires_upto=i))
            lines.append(f"  assign {s.name} = {rhs};")

        storage = self.regs + ([self.mem] if self.mem is not None else [])
        n_procs = min(len(storage), rng.randint(1, 3)) if storage else 0
        owners: list[list[_Sig]] = [[] for _ in range(n_procs)]
        for s in storage:
            owners[rng.randrange(n_procs)].append(s)
        for owned in owners:
            if not owned:
                continue
            self.stmt_budget = max(1, p.max_stmts // max(1, n_procs))
            lines.append("  always @(posedge clk)")
            if rng.random() < 0.7:
                resets = [s for s in owned if not s.depth]
                lines.append("    if (rst)")
                if len(resets) == 1:
                    lines.append(f"      {resets[0].name} <= 0;")
                elif resets:
                    lines.append("      begin")
                    lines += [f"        {s.name} <= 0;" for s in resets]
                    lines.append("      end")
                else:
                    lines.append("      ;")
                lines.append("    else")
                lines += self.body(owned, 2, "      ")
            else:
                lines += self.body(owned, 2, "    ")

        for s in self.outputs:
            rhs, _ = self.expr(s.width, self.readable())
            lines.append(f"  assign {s.name} = {rhs};")
        lines.append("endmodule")

        observation = [s.name for s in self.outputs]
        if self.regs and p.observe_register and rng.random() < 0.25:
            observation.append(rng.choice(self.regs).name)
        return "\n".join(lines) + "\n", observation

    def stimulus(self) -> str:
        rng = self.rng
        n = rng.randint(2, self.p.max_cycles) if self.p.max_cycles >= 2 else 1
        names = [s.name for s in self.inputs]
        out = [",".join(names)]
        for c in range(n):
            row = []
            for s in self.inputs:
                if s.name == "rst":
                    row.append(1 if c == 0 or rng.random() < 0.08 else 0)
                else:
                    row.append(rng.randrange(1 << s.width))
            out.append(",".join(str(v) for v in row))
        return "\n".join(out) + "\n"


def _rng(width: int) -> str:
    return f"[{width - 1}:0] " if width > 1 else ""


def generate_random_design(seed: int, params: GeneratorParams | None = None, **kwargs) -> GeneratedDesign:
    """Deterministic ``(MiniRTL text, stimulus CSV)`` for ``seed``."""
    params = params or GeneratorParams(**kwargs)
    rng = random.Random(seed)
    builder = _Builder(rng, params)
    text, observation = builder.build()
    stimulus = builder.stimulus()
    return GeneratedDesign(text, stimulus, observation, seed, params)
