"""Function, block and instruction types plus the dependency/liveness analysis."""
import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from gadgetdiv.errors import IRSemanticError
from gadgetdiv.ir.isa import IsaTable

logger = logging.getLogger(__name__)

DEF = "def"
USE = "use"

# dependency kinds
DATA = "data"
ANTI = "anti"
OUTPUT = "output"
MEMORY = "memory"


@dataclass(frozen=True)
class Operand:
    """A register operand: a temp, or a fixed register written ``$rN``."""
    role: str
    temp: Optional[str] = None
    precolor: Optional[int] = None

    @property
    def key(self) -> str:
        """Storage location the operand touches, used for dependencies."""
        return self.temp if self.temp is not None else f"$r{self.precolor}"


@dataclass(frozen=True)
class Instruction:
    id: int
    alternatives: Tuple[int, ...]
    operands: Tuple[Operand, ...]
    block: str
    imm: Optional[int] = None
    target: Optional[str] = None
    is_branch: bool = False
    is_indirect: bool = False

    @property
    def defs(self) -> Tuple[Operand, ...]:
        return tuple(o for o in self.operands if o.role == DEF)

    @property
    def uses(self) -> Tuple[Operand, ...]:
        return tuple(o for o in self.operands if o.role == USE)


@dataclass(frozen=True)
class Block:
    id: str
    instructions: Tuple[int, ...]
    frequency: int
    successors: Tuple[str, ...]

    @property
    def branch(self) -> int:
        return self.instructions[-1]


@dataclass(frozen=True)
class Temp:
    id: str
    defs: Tuple[int, ...]
    uses: Tuple[int, ...]
    blocks: Tuple[str, ...]
    is_global: bool


@dataclass(frozen=True)
class Dependency:
    producer: int
    consumer: int
    temp: Optional[str]
    kind: str = DATA


@dataclass(frozen=True)
class Function:
    """A parsed function: CFG, instructions, temps and derived analyses."""
    name: str
    blocks: Tuple[Block, ...]
    instructions: Tuple[Instruction, ...]
    temps: Tuple[Temp, ...]
    dependencies: Tuple[Dependency, ...]
    live_in: Tuple[FrozenSet[str], ...]
    live_out: Tuple[FrozenSet[str], ...]

    @property
    def operands(self) -> Tuple[Tuple[int, int], ...]:
        """Flattened (instruction id, operand position) pairs in instruction order."""
        return tuple((ins.id, k) for ins in self.instructions for k in range(len(ins.operands)))

    def operand(self, flat_index: int) -> Operand:
        ins_id, k = self.operands[flat_index]
        return self.instructions[ins_id].operands[k]

    def block(self, block_id: str) -> Block:
        for b in self.blocks:
            if b.id == block_id:
                return b
        raise KeyError(block_id)

    def block_index(self, block_id: str) -> int:
        for i, b in enumerate(self.blocks):
            if b.id == block_id:
                return i
        raise KeyError(block_id)

    def temp(self, temp_id: str) -> Temp:
        for t in self.temps:
            if t.id == temp_id:
                return t
        raise KeyError(temp_id)

    @property
    def global_temps(self) -> Tuple[Temp, ...]:
        return tuple(t for t in self.temps if t.is_global)

    def local_temps(self, block_id: str) -> Tuple[Temp, ...]:
        return tuple(t for t in self.temps if not t.is_global and t.blocks == (block_id,))

    def live_blocks(self, temp_id: str) -> FrozenSet[str]:
        """Blocks in which a temp occupies its register: live-in, live-out or referenced."""
        blocks = set(self.temp(temp_id).blocks)
        for b, lin, lout in zip(self.blocks, self.live_in, self.live_out):
            if temp_id in lin or temp_id in lout:
                blocks.add(b.id)
        return frozenset(blocks)

    @property
    def fixed_registers(self) -> FrozenSet[int]:
        """Registers named directly by ``$rN`` operands."""
        return frozenset(o.precolor for ins in self.instructions for o in ins.operands
                         if o.precolor is not None)

    @property
    def indirect_branches(self) -> Tuple[int, ...]:
        return tuple(ins.id for ins in self.instructions if ins.is_indirect)

    def __len__(self) -> int:
        return len(self.instructions)


@dataclass(frozen=True)
class RawInstruction:
    """Parser output for one instruction line, before analysis."""
    opcode: str
    operands: Tuple[Operand, ...]
    imm: Optional[int] = None
    target: Optional[str] = None
    line: int = 0


@dataclass(frozen=True)
class RawBlock:
    id: str
    frequency: int
    successors: Tuple[str, ...]
    instructions: Tuple[RawInstruction, ...]
    line: int = 0


def _block_dependencies(block: Block, instructions: Sequence[Instruction],
                        isa: IsaTable) -> List[Dependency]:
    """Data, anti, output and memory dependencies inside one block."""
    deps: List[Dependency] = []
    last_def: Dict[str, int] = {}
    uses_since_def: Dict[str, List[int]] = defaultdict(list)
    last_store: Optional[int] = None
    loads_since_store: List[int] = []
    zero = f"$r{isa.zero_register}" if isa.zero_register is not None else None

    for ins_id in block.instructions:
        ins = instructions[ins_id]
        for op in ins.uses:
            key = op.key
            if key == zero:
                continue
            if key in last_def and last_def[key] != ins_id:
                deps.append(Dependency(last_def[key], ins_id, key, DATA))
            uses_since_def[key].append(ins_id)

        memory = isa.opcode(ins.alternatives[0]).memory
        if memory == "load":
            if last_store is not None:
                deps.append(Dependency(last_store, ins_id, None, MEMORY))
            loads_since_store.append(ins_id)
        elif memory == "store":
            if last_store is not None:
                deps.append(Dependency(last_store, ins_id, None, MEMORY))
            for load in loads_since_store:
                deps.append(Dependency(load, ins_id, None, MEMORY))
            last_store = ins_id
            loads_since_store = []

        for op in ins.defs:
            key = op.key
            for reader in uses_since_def[key]:
                if reader != ins_id:
                    deps.append(Dependency(reader, ins_id, key, ANTI))
            if key in last_def:
                deps.append(Dependency(last_def[key], ins_id, key, OUTPUT))
            last_def[key] = ins_id
            uses_since_def[key] = []
    # one edge per (producer, consumer, kind) is enough
    seen = set()
    unique: List[Dependency] = []
    for dep in deps:
        sig = (dep.producer, dep.consumer, dep.kind)
        if sig not in seen:
            seen.add(sig)
            unique.append(dep)
    return unique


def _liveness(blocks: Sequence[Block], instructions: Sequence[Instruction]
              ) -> Tuple[List[FrozenSet[str]], List[FrozenSet[str]]]:
    """Backward dataflow liveness of temps (fixed registers are not tracked)."""
    use_sets: List[set] = []
    def_sets: List[set] = []
    for b in blocks:
        used, defined = set(), set()
        for ins_id in b.instructions:
            ins = instructions[ins_id]
            for op in ins.uses:
                if op.temp is not None and op.temp not in defined:
                    used.add(op.temp)
            for op in ins.defs:
                if op.temp is not None:
                    defined.add(op.temp)
        use_sets.append(used)
        def_sets.append(defined)

    index = {b.id: i for i, b in enumerate(blocks)}
    live_in = [set() for _ in blocks]
    live_out = [set() for _ in blocks]
    changed = True
    while changed:
        changed = False
        for i in reversed(range(len(blocks))):
            out = set()
            for succ in blocks[i].successors:
                out |= live_in[index[succ]]
            new_in = use_sets[i] | (out - def_sets[i])
            if out != live_out[i] or new_in != live_in[i]:
                live_out[i], live_in[i] = out, new_in
                changed = True
    return [frozenset(s) for s in live_in], [frozenset(s) for s in live_out]


def build_function(name: str, raw_blocks: Sequence[RawBlock], isa: IsaTable) -> Function:
    """Resolve opcodes, number instructions and derive temps, dependencies and liveness."""
    if not raw_blocks:
        raise IRSemanticError(f"function {name} has no blocks")
    block_ids = [rb.id for rb in raw_blocks]
    if len(set(block_ids)) != len(block_ids):
        raise IRSemanticError(f"function {name} has duplicate block ids")

    instructions: List[Instruction] = []
    blocks: List[Block] = []
    for rb in raw_blocks:
        if rb.frequency < 1:
            raise IRSemanticError(f"block {rb.id}: frequency must be >= 1")
        for succ in rb.successors:
            if succ not in block_ids:
                raise IRSemanticError(f"block {rb.id}: unknown successor {succ}")
        if not rb.instructions:
            raise IRSemanticError(f"block {rb.id} is empty")
        ids: List[int] = []
        for raw in rb.instructions:
            alternatives = _resolve_alternatives(raw, isa)
            op = isa.opcode(alternatives[0])
            _check_shape(raw, op, rb.id)
            if raw.target is not None and raw.target not in block_ids:
                raise IRSemanticError(f"line {raw.line}: unknown branch target {raw.target}")
            for operand in raw.operands:
                if operand.precolor is not None and operand.precolor not in isa.registers:
                    raise IRSemanticError(f"line {raw.line}: unknown register $r{operand.precolor}")
            ins = Instruction(
                id=len(instructions),
                alternatives=tuple(alternatives),
                operands=raw.operands,
                block=rb.id,
                imm=raw.imm,
                target=raw.target,
                is_branch=op.is_branch,
                is_indirect=op.indirect,
            )
            ids.append(ins.id)
            instructions.append(ins)
        branches = [i for i in ids if instructions[i].is_branch]
        if len(branches) != 1:
            raise IRSemanticError(f"block {rb.id} must contain exactly one branch, found {len(branches)}")
        if branches[0] != ids[-1]:
            raise IRSemanticError(f"block {rb.id}: branch must be the last instruction")
        blocks.append(Block(rb.id, tuple(ids), rb.frequency, tuple(rb.successors)))

    temps = _collect_temps(blocks, instructions)
    dependencies: List[Dependency] = []
    for b in blocks:
        dependencies.extend(_block_dependencies(b, instructions, isa))
    live_in, live_out = _liveness(blocks, instructions)

    if live_in[0]:
        missing = ", ".join(sorted(live_in[0]))
        raise IRSemanticError(f"function {name}: {missing} may be used before definition")

    fn = Function(
        name=name,
        blocks=tuple(blocks),
        instructions=tuple(instructions),
        temps=tuple(temps),
        dependencies=tuple(dependencies),
        live_in=tuple(live_in),
        live_out=tuple(live_out),
    )
    logger.debug(f"Built function {name}: {len(instructions)} instructions, "
                 f"{len(blocks)} blocks, {len(temps)} temps")
    return fn


def _resolve_alternatives(raw: RawInstruction, isa: IsaTable) -> List[int]:
    try:
        alternatives = isa.resolve(raw.opcode)
    except Exception as e:
        raise IRSemanticError(f"line {raw.line}: {str(e)}") from e
    shapes = {isa.opcode(i).shape for i in alternatives}
    if len(shapes) != 1:
        raise IRSemanticError(f"line {raw.line}: alternatives of {raw.opcode} differ in operand shape")
    return alternatives


def _check_shape(raw: RawInstruction, op, block_id: str) -> None:
    defs = sum(1 for o in raw.operands if o.role == DEF)
    uses = sum(1 for o in raw.operands if o.role == USE)
    if defs != op.defs or uses != op.uses:
        raise IRSemanticError(
            f"line {raw.line}: {op.name} expects {op.defs} def(s) and {op.uses} use(s), "
            f"got {defs} and {uses}")
    if op.immediate != (raw.imm is not None):
        raise IRSemanticError(f"line {raw.line}: immediate mismatch for {op.name}")
    if op.target != (raw.target is not None):
        raise IRSemanticError(f"line {raw.line}: branch target mismatch for {op.name}")


def _collect_temps(blocks: Sequence[Block], instructions: Sequence[Instruction]) -> List[Temp]:
    defs: Dict[str, List[int]] = defaultdict(list)
    uses: Dict[str, List[int]] = defaultdict(list)
    order: List[str] = []
    for ins in instructions:
        for op in ins.operands:
            if op.temp is None:
                continue
            if op.temp not in order:
                order.append(op.temp)
            (defs if op.role == DEF else uses)[op.temp].append(ins.id)

    temps: List[Temp] = []
    for t in order:
        if not defs[t]:
            raise IRSemanticError(f"temp {t} is used but never defined")
        touched: List[str] = []
        for i in defs[t] + uses[t]:
            if instructions[i].block not in touched:
                touched.append(instructions[i].block)
        touched.sort(key=[b.id for b in blocks].index)
        if len(touched) == 1:
            first_def = min(defs[t])
            if any(u <= first_def for u in uses[t]):
                raise IRSemanticError(f"temp {t} is used before its definition in {touched[0]}")
        temps.append(Temp(t, tuple(sorted(set(defs[t]))), tuple(sorted(set(uses[t]))),
                          tuple(touched), len(touched) > 1))
    return temps
