"""Toy ISA, IR types, parser and linearizer."""
from gadgetdiv.ir.assembly import AssemblyLine, AssemblyListing, linearize, parse_listing
from gadgetdiv.ir.function import Block, Dependency, Function, Instruction, Operand, Temp
from gadgetdiv.ir.isa import IsaTable, Opcode, default_isa
from gadgetdiv.ir.parser import parse_function, serialize_function

__all__ = [
    "AssemblyLine", "AssemblyListing", "Block", "Dependency", "Function", "Instruction",
    "IsaTable", "Opcode", "Operand", "Temp", "default_isa", "linearize", "parse_function",
    "parse_listing", "serialize_function",
]
