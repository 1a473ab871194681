"""The bundled benchmark functions and their index."""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Optional, Sequence

import pandas as pd

from gadgetdiv.errors import ConfigError
from gadgetdiv.ir.function import Function
from gadgetdiv.ir.isa import IsaTable
from gadgetdiv.ir.parser import parse_function

logger = logging.getLogger(__name__)

BENCHMARK_DIR = Path(__file__).resolve().parent.parent / "benchmarks"
SCALES = ("toy", "small", "medium", "large")


@dataclass(frozen=True)
class Benchmark:
    id: str
    path: Path
    description: str
    scale: str

    def load(self, isa: IsaTable) -> Function:
        return load_function(self.path, isa)


class BenchmarkSuite:
    """Benchmarks listed in a ``suite.csv`` (id, file, description, scale)."""

    def __init__(self, table: pd.DataFrame, root: Path):
        missing = {"id", "file", "description", "scale"} - set(table.columns)
        if missing:
            raise ConfigError(f"suite index lacks columns {sorted(missing)}")
        if table["id"].duplicated().any():
            dupes = sorted(table.loc[table["id"].duplicated(), "id"])
            raise ConfigError(f"duplicate benchmark ids: {dupes}")
        self.table = table.reset_index(drop=True)
        self.root = Path(root)

    @classmethod
    def load(cls, index: Optional[Path] = None) -> "BenchmarkSuite":
        index = Path(index) if index is not None else BENCHMARK_DIR / "suite.csv"
        try:
            table = pd.read_csv(index, dtype=str).fillna("")
        except (OSError, pd.errors.ParserError) as e:
            raise ConfigError(f"cannot read benchmark index {index}: {str(e)}") from e
        return cls(table, index.parent)

    @property
    def benchmarks(self) -> List[Benchmark]:
        return [Benchmark(row.id, self.root / row.file, row.description, row.scale)
                for row in self.table.itertuples(index=False)]

    @property
    def ids(self) -> List[str]:
        return list(self.table["id"])

    def filter(self, scales: Optional[Sequence[str]] = None,
               ids: Optional[Sequence[str]] = None) -> "BenchmarkSuite":
        table = self.table
        if scales:
            unknown = set(scales) - set(SCALES)
            if unknown:
                raise ConfigError(f"unknown scales {sorted(unknown)}")
            table = table[table["scale"].isin(scales)]
        if ids:
            unknown = set(ids) - set(self.ids)
            if unknown:
                raise ConfigError(f"unknown benchmarks {sorted(unknown)}")
            table = table[table["id"].isin(ids)]
        return BenchmarkSuite(table, self.root)

    def get(self, bench_id: str) -> Benchmark:
        for bench in self.benchmarks:
            if bench.id == bench_id:
                return bench
        raise ConfigError(f"unknown benchmark {bench_id!r}")

    def __iter__(self) -> Iterator[Benchmark]:
        return iter(self.benchmarks)

    def __len__(self) -> int:
        return len(self.table)


def load_function(path: Path, isa: IsaTable) -> Function:
    """Parse one IR file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read IR file {path}: {str(e)}") from e
    fn = parse_function(text, isa)
    logger.info(f"Parsed {fn.name} from {path.name}: {len(fn)} instructions, {len(fn.blocks)} blocks")
    return fn


def resolve_function(name_or_path: str, isa: IsaTable, suite: Optional[BenchmarkSuite] = None) -> Function:
    """A bundled benchmark id or a path to an IR file."""
    path = Path(name_or_path)
    if path.suffix == ".ir" or path.exists():
        return load_function(path, isa)
    suite = suite or BenchmarkSuite.load()
    return suite.get(name_or_path).load(isa)
