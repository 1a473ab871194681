"""Reader and writer for the textual IR.

Grammar (one function per file)::

    func NAME
    block ID freq=N -> SUCC[,SUCC]
      tK <- OPCODE[|ALT...] operand, operand, ...
      OPCODE operand, ...

Operands are temps (``t3``), fixed registers (``$r4``), decimal immediates or
block ids (branch targets). ``#`` starts a comment.
"""
import logging
import re
from typing import List, Optional, Tuple

from gadgetdiv.errors import IRSyntaxError
from gadgetdiv.ir.function import DEF, USE, Function, Operand, RawBlock, RawInstruction, build_function
from gadgetdiv.ir.isa import IsaTable

logger = logging.getLogger(__name__)

_FUNC_RE = re.compile(r"^func\s+(?P<name>[A-Za-z_][\w.]*)\s*$")
_BLOCK_RE = re.compile(
    r"^block\s+(?P<id>[A-Za-z_][\w.]*)\s+freq\s*=\s*(?P<freq>\S+)\s*(?:->\s*(?P<succ>.*))?$")
_TEMP_RE = re.compile(r"^t\d+$")
_REG_RE = re.compile(r"^\$r(\d+)$")
_IMM_RE = re.compile(r"^-?\d+$")
_LABEL_RE = re.compile(r"^[A-Za-z_][\w.]*$")
_OPCODE_RE = re.compile(r"^[A-Za-z_][\w.|]*$")


def _operand(token: str, role: str, line: int, column: int) -> Operand:
    if _TEMP_RE.match(token):
        return Operand(role, temp=token)
    reg = _REG_RE.match(token)
    if reg:
        return Operand(role, precolor=int(reg.group(1)))
    raise IRSyntaxError(f"expected a temp or register, got '{token}'", line, column)


def _parse_instruction(text: str, line: int, indent: int) -> RawInstruction:
    operands: List[Operand] = []
    body = text
    offset = indent
    if "<-" in text:
        dest, body = text.split("<-", 1)
        operands.append(_operand(dest.strip(), DEF, line, offset + 1))
        offset += len(dest) + 2
    stripped = body.lstrip()
    offset += len(body) - len(stripped)
    parts = stripped.split(None, 1)
    if not parts:
        raise IRSyntaxError("missing opcode", line, offset + 1)
    opcode = parts[0]
    if not _OPCODE_RE.match(opcode):
        raise IRSyntaxError(f"bad opcode '{opcode}'", line, offset + 1)
    imm: Optional[int] = None
    target: Optional[str] = None
    if len(parts) > 1:
        rest_offset = offset + stripped.index(parts[1])
        position = 0
        for raw in parts[1].split(","):
            token = raw.strip()
            column = rest_offset + position + (len(raw) - len(raw.lstrip())) + 1
            position += len(raw) + 1
            if not token:
                raise IRSyntaxError("empty operand", line, column)
            if _TEMP_RE.match(token) or _REG_RE.match(token):
                operands.append(_operand(token, USE, line, column))
            elif _IMM_RE.match(token):
                if imm is not None:
                    raise IRSyntaxError("more than one immediate", line, column)
                imm = int(token)
            elif _LABEL_RE.match(token):
                if target is not None:
                    raise IRSyntaxError("more than one branch target", line, column)
                target = token
            else:
                raise IRSyntaxError(f"cannot read operand '{token}'", line, column)
    return RawInstruction(opcode, tuple(operands), imm, target, line)


def parse_function(text: str, isa: IsaTable) -> Function:
    """Parse IR text into a validated :class:`Function`."""
    name: Optional[str] = None
    blocks: List[RawBlock] = []
    current: Optional[dict] = None

    def close_block():
        if current is not None:
            blocks.append(RawBlock(current["id"], current["freq"], current["succ"],
                                   tuple(current["instrs"]), current["line"]))

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        content = raw_line.split("#", 1)[0].rstrip()
        if not content.strip():
            continue
        indent = len(content) - len(content.lstrip())
        stripped = content.strip()
        if stripped.startswith("func ") or stripped == "func":
            match = _FUNC_RE.match(stripped)
            if match is None:
                raise IRSyntaxError("malformed function header", lineno, indent + 1)
            if name is not None:
                raise IRSyntaxError("only one function per file", lineno, indent + 1)
            name = match.group("name")
            continue
        if name is None:
            raise IRSyntaxError("expected 'func NAME' header", lineno, indent + 1)
        if stripped.startswith("block ") or stripped == "block":
            match = _BLOCK_RE.match(stripped)
            if match is None:
                raise IRSyntaxError("malformed block header", lineno, indent + 1)
            if not _IMM_RE.match(match.group("freq")):
                column = indent + stripped.index("freq") + 1
                raise IRSyntaxError(f"bad frequency '{match.group('freq')}'", lineno, column)
            succ_text = (match.group("succ") or "").strip()
            successors: Tuple[str, ...] = ()
            if succ_text:
                successors = tuple(s.strip() for s in succ_text.split(","))
                for s in successors:
                    if not _LABEL_RE.match(s):
                        raise IRSyntaxError(f"bad successor '{s}'", lineno, indent + 1)
            close_block()
            current = {"id": match.group("id"), "freq": int(match.group("freq")),
                       "succ": successors, "instrs": [], "line": lineno}
            continue
        if current is None:
            raise IRSyntaxError("instruction outside of a block", lineno, indent + 1)
        current["instrs"].append(_parse_instruction(stripped, lineno, indent))
    close_block()

    if name is None:
        raise IRSyntaxError("empty input, expected 'func NAME'", 1, 1)
    return build_function(name, blocks, isa)


def _format_operand(op: Operand) -> str:
    return op.temp if op.temp is not None else f"$r{op.precolor}"


def serialize_function(fn: Function, isa: IsaTable) -> str:
    """Write a function back in IR syntax; ``parse_function`` inverts it."""
    lines = [f"func {fn.name}"]
    for block in fn.blocks:
        header = f"block {block.id} freq={block.frequency}"
        if block.successors:
            header += " -> " + ",".join(block.successors)
        lines.append(header)
        for ins_id in block.instructions:
            ins = fn.instructions[ins_id]
            tokens = [_format_operand(o) for o in ins.uses]
            if ins.imm is not None:
                tokens.append(str(ins.imm))
            if ins.target is not None:
                tokens.append(ins.target)
            text = isa.spell(ins.alternatives)
            if tokens:
                text += " " + ", ".join(tokens)
            if ins.defs:
                text = f"{_format_operand(ins.defs[0])} <- {text}"
            lines.append(f"  {text}")
    return "\n".join(lines) + "\n"
