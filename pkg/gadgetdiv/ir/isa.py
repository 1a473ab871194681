"""Toy mini-MIPS instruction set table."""
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from gadgetdiv.errors import IsaError

INSTRUCTION_SIZE = 4  # fixed-width ISA


@dataclass(frozen=True)
class Opcode:
    """One processor instruction.

    ``name`` is the unique id used in IR text; ``mnemonic`` is what the
    assembly listing prints. Two opcodes may share a mnemonic (the two
    implementations of ``copy`` print as ``addi`` and ``or``).
    """
    name: str
    mnemonic: str
    defs: int
    uses: int
    syntax: str
    latency: int = 1
    immediate: bool = False
    target: bool = False
    indirect: bool = False
    direct: bool = False
    nop: bool = False
    memory: str = ""  # "", "load" or "store"
    size: int = INSTRUCTION_SIZE

    @property
    def is_branch(self) -> bool:
        return self.indirect or self.direct

    @property
    def shape(self) -> Tuple[int, int, bool, bool]:
        return (self.defs, self.uses, self.immediate, self.target)


@dataclass(frozen=True)
class LineClass:
    """Control-flow flags of a printed mnemonic."""
    indirect: bool = False
    direct: bool = False
    nop: bool = False

    @property
    def is_branch(self) -> bool:
        return self.indirect or self.direct


@dataclass(frozen=True)
class IsaTable:
    """Opcodes plus the register file of the target."""
    opcodes: Tuple[Opcode, ...]
    allocatable: Tuple[int, ...]
    reserved: FrozenSet[int]
    aliases: Dict[str, Tuple[str, ...]] = field(default_factory=dict)
    zero_register: Optional[int] = 0

    def __post_init__(self):
        names = [op.name for op in self.opcodes]
        if len(set(names)) != len(names):
            raise IsaError("duplicate opcode names in ISA table")
        for op in self.opcodes:
            if op.latency < 1:
                raise IsaError(f"opcode {op.name} has latency {op.latency} < 1")
            if op.size != INSTRUCTION_SIZE:
                raise IsaError(f"opcode {op.name} has size {op.size}, expected {INSTRUCTION_SIZE}")
            if op.indirect and op.direct:
                raise IsaError(f"opcode {op.name} is both a direct and an indirect branch")
            if op.defs > 1:
                raise IsaError(f"opcode {op.name} defines more than one operand")
        if set(self.allocatable) & set(self.reserved):
            raise IsaError("allocatable and reserved registers overlap")
        for alias, targets in self.aliases.items():
            shapes = {self.opcode(t).shape for t in targets}
            if len(shapes) != 1:
                raise IsaError(f"alternatives of {alias} do not share an operand shape")

    def index(self, name: str) -> int:
        for i, op in enumerate(self.opcodes):
            if op.name == name:
                return i
        raise IsaError(f"unknown opcode {name}")

    def opcode(self, ref) -> Opcode:
        """Look an opcode up by index or by name."""
        if isinstance(ref, int):
            return self.opcodes[ref]
        return self.opcodes[self.index(ref)]

    def resolve(self, token: str) -> List[int]:
        """Expand an IR opcode token (``copy``, ``addi|or.mv`` ...) to opcode indices."""
        indices: List[int] = []
        for part in token.split("|"):
            for name in self.aliases.get(part, (part,)):
                idx = self.index(name)
                if idx not in indices:
                    indices.append(idx)
        return indices

    def spell(self, alternatives: Sequence[int]) -> str:
        """Inverse of :meth:`resolve`; prefers alias names."""
        names = tuple(self.opcodes[i].name for i in alternatives)
        for alias, targets in self.aliases.items():
            if tuple(targets) == names:
                return alias
        return "|".join(names)

    def classify(self, mnemonic: str) -> LineClass:
        """Control-flow class of a printed mnemonic (unknown mnemonics are plain)."""
        for op in self.opcodes:
            if op.mnemonic == mnemonic:
                return LineClass(indirect=op.indirect, direct=op.direct, nop=op.nop)
        return LineClass()

    @property
    def nop_index(self) -> int:
        for i, op in enumerate(self.opcodes):
            if op.nop:
                return i
        raise IsaError("ISA table has no nop opcode")

    @property
    def registers(self) -> FrozenSet[int]:
        return frozenset(self.allocatable) | frozenset(self.reserved)

    @staticmethod
    def register_name(reg: int) -> str:
        return f"$r{reg}"


def _alu(name: str, latency: int = 1) -> Opcode:
    return Opcode(name, name, 1, 2, f"{name} {{d}}, {{u0}}, {{u1}}", latency=latency)


def _alu_imm(name: str) -> Opcode:
    return Opcode(name, name, 1, 1, f"{name} {{d}}, {{u0}}, {{imm}}", immediate=True)


def default_isa() -> IsaTable:
    """The mini-MIPS table: 12 allocatable registers, r0 hard-zero, r13 reserved."""
    opcodes = (
        _alu("add"),
        _alu("sub"),
        _alu("and"),
        _alu("or"),
        _alu("xor"),
        _alu("slt"),
        _alu("mul", latency=2),
        _alu_imm("addi"),
        _alu_imm("andi"),
        _alu_imm("ori"),
        _alu_imm("slti"),
        _alu_imm("sll"),
        _alu_imm("srl"),
        _alu_imm("sra"),
        Opcode("li", "li", 1, 0, "li {d}, {imm}", immediate=True),
        Opcode("lw", "lw", 1, 1, "lw {d}, {imm}({u0})", latency=2, immediate=True, memory="load"),
        Opcode("sw", "sw", 0, 2, "sw {u0}, {imm}({u1})", immediate=True, memory="store"),
        # abstract move, two interchangeable implementations
        Opcode("copy.addi", "addi", 1, 1, "addi {d}, {u0}, 0"),
        Opcode("copy.or", "or", 1, 1, "or {d}, {u0}, $r0"),
        Opcode("b", "b", 0, 0, "b {target}", target=True, direct=True),
        Opcode("beq", "beq", 0, 2, "beq {u0}, {u1}, {target}", target=True, direct=True),
        Opcode("bne", "bne", 0, 2, "bne {u0}, {u1}, {target}", target=True, direct=True),
        Opcode("blez", "blez", 0, 1, "blez {u0}, {target}", target=True, direct=True),
        Opcode("bgtz", "bgtz", 0, 1, "bgtz {u0}, {target}", target=True, direct=True),
        Opcode("jr", "jr", 0, 1, "jr {u0}", indirect=True),
        Opcode("jalr", "jalr", 0, 1, "jalr {u0}", indirect=True),
        Opcode("nop", "nop", 0, 0, "nop", nop=True),
    )
    return IsaTable(
        opcodes=opcodes,
        allocatable=tuple(range(1, 13)),
        reserved=frozenset({0, 13}),
        aliases={"copy": ("copy.addi", "copy.or")},
    )
