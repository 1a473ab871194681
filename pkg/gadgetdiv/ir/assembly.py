"""Assembly listings: linearization of solutions and the ``ADDR: MNEMONIC OPS`` format."""
import logging
import re
from dataclasses import dataclass
from typing import TYPE_CHECKING, List, Sequence, Tuple

from gadgetdiv.errors import IncompleteSolutionError, IRSyntaxError
from gadgetdiv.ir.function import Function
from gadgetdiv.ir.isa import INSTRUCTION_SIZE, IsaTable

if TYPE_CHECKING:
    from gadgetdiv.models.solution import SolutionAssignment

logger = logging.getLogger(__name__)

_LINE_RE = re.compile(r"^\s*(?P<addr>[0-9a-fA-F]{8}):\s+(?P<mnemonic>\S+)\s*(?P<ops>.*)$")


@dataclass(frozen=True)
class AssemblyLine:
    address: int
    mnemonic: str
    operands: Tuple[str, ...] = ()

    @property
    def text(self) -> str:
        ops = ", ".join(self.operands)
        return f"{self.address:08x}: {self.mnemonic}" + (f" {ops}" if ops else "")


@dataclass(frozen=True)
class AssemblyListing:
    lines: Tuple[AssemblyLine, ...]
    base: int = 0

    def __post_init__(self):
        for k, line in enumerate(self.lines):
            if line.address != self.base + INSTRUCTION_SIZE * k:
                raise ValueError(f"line {k} at {line.address:#x} breaks the address sequence")

    def __len__(self) -> int:
        return len(self.lines)

    @property
    def end(self) -> int:
        """First address after the listing."""
        return self.base + INSTRUCTION_SIZE * len(self.lines)

    def to_text(self) -> str:
        return "\n".join(line.text for line in self.lines) + ("\n" if self.lines else "")

    @staticmethod
    def concat(parts: Sequence["AssemblyListing"], base: int = 0) -> "AssemblyListing":
        """Lay several listings out contiguously from ``base``."""
        lines: List[AssemblyLine] = []
        for part in parts:
            for line in part.lines:
                lines.append(AssemblyLine(base + INSTRUCTION_SIZE * len(lines), line.mnemonic, line.operands))
        return AssemblyListing(tuple(lines), base)


def _render(isa: IsaTable, opcode_index: int, defs: List[str], uses: List[str],
            imm, target) -> Tuple[str, Tuple[str, ...]]:
    op = isa.opcode(opcode_index)
    fields = {"imm": imm, "target": target}
    if defs:
        fields["d"] = defs[0]
    for k, reg in enumerate(uses):
        fields[f"u{k}"] = reg
    text = op.syntax.format(**fields)
    parts = text.split(None, 1)
    operands = tuple(t.strip() for t in parts[1].split(",")) if len(parts) > 1 else ()
    return parts[0], operands


def _check_complete(fn: Function, sol: "SolutionAssignment") -> None:
    n_operands = len(fn.operands)
    if len(sol.cycles) != len(fn.instructions) or len(sol.impls) != len(fn.instructions):
        raise IncompleteSolutionError("solution does not cover every instruction", "cycles")
    if len(sol.regs) != n_operands:
        raise IncompleteSolutionError("solution does not cover every operand", "regs")
    if any(v is None for v in (*sol.cycles, *sol.impls, *sol.regs)):
        raise IncompleteSolutionError("solution has unassigned variables")


def linearize(fn: Function, sol: "SolutionAssignment", isa: IsaTable, base: int = 0) -> AssemblyListing:
    """Emit blocks in function order, instructions by cycle, nops in empty slots."""
    _check_complete(fn, sol)
    flat_index = {}
    for k, (ins_id, pos) in enumerate(fn.operands):
        flat_index[(ins_id, pos)] = k
    nop = isa.nop_index

    lines: List[AssemblyLine] = []

    def emit(mnemonic: str, operands: Tuple[str, ...]) -> None:
        lines.append(AssemblyLine(base + INSTRUCTION_SIZE * len(lines), mnemonic, operands))

    for block in fn.blocks:
        by_cycle = {sol.cycles[i]: i for i in block.instructions}
        makespan = sol.cycles[block.branch]
        for cycle in range(makespan + 1):
            ins_id = by_cycle.get(cycle)
            if ins_id is None:
                emit(*_render(isa, nop, [], [], None, None))
                continue
            ins = fn.instructions[ins_id]
            defs: List[str] = []
            uses: List[str] = []
            for pos, operand in enumerate(ins.operands):
                reg = isa.register_name(sol.regs[flat_index[(ins_id, pos)]])
                (defs if operand.role == "def" else uses).append(reg)
            opcode = ins.alternatives[sol.impls[ins_id]]
            emit(*_render(isa, opcode, defs, uses, ins.imm, ins.target))
    return AssemblyListing(tuple(lines), base)


def parse_listing(text: str) -> AssemblyListing:
    """Read a listing written by :meth:`AssemblyListing.to_text`."""
    lines: List[AssemblyLine] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        match = _LINE_RE.match(raw)
        if match is None:
            raise IRSyntaxError("malformed assembly line", lineno, 1)
        ops = match.group("ops").strip()
        operands = tuple(t.strip() for t in ops.split(",")) if ops else ()
        lines.append(AssemblyLine(int(match.group("addr"), 16), match.group("mnemonic"), operands))
    base = lines[0].address if lines else 0
    try:
        return AssemblyListing(tuple(lines), base)
    except ValueError as e:
        raise IRSyntaxError(str(e), 1, 1) from e
