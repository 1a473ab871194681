"""Harness configuration: defaults, flat ``key = value`` files and CLI overrides."""
import configparser
import logging
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from gadgetdiv.analysis.distances import DistanceKind, DistanceSpec
from gadgetdiv.diversify.base_diversifier import Algorithm, DiversifyConfig
from gadgetdiv.errors import ConfigError
from gadgetdiv.solver.search import SearchParams

logger = logging.getLogger(__name__)

SHUFFLES = ("nfs", "fs")
_SECTION = "gadgetdiv"


def parse_address(text: Any) -> int:
    """Base address written as hex (``0x400000``) or decimal."""
    if isinstance(text, int):
        return text
    try:
        return int(str(text), 0)
    except ValueError as e:
        raise ConfigError(f"bad address {text!r}") from e


@dataclass(frozen=True)
class HarnessConfig:
    algo: str = "lns"
    distance: str = "hd"
    nr: int = 0
    nc: int = 8
    gap: float = 0.10
    h: int = 1
    k: int = 200
    seed: int = 0
    relax_rate: float = 0.6
    fail_limit: int = 1000
    time_limit: float = 60.0
    base_addr: int = 0
    window: int = 8
    shuffle: str = "nfs"
    out: str = "runs"
    global_relax_rate: float = 0.5
    locals_per_block: int = 10
    workers: int = 1
    timing: bool = True

    def __post_init__(self):
        if self.algo not in {a.value for a in Algorithm}:
            raise ConfigError(f"unknown algorithm {self.algo!r}")
        if self.distance not in {d.value for d in DistanceKind}:
            raise ConfigError(f"unknown distance {self.distance!r}")
        if self.shuffle not in SHUFFLES:
            raise ConfigError(f"shuffle must be one of {SHUFFLES}, got {self.shuffle!r}")
        if self.window < 1:
            raise ConfigError(f"window must be >= 1, got {self.window}")
        if self.base_addr < 0 or self.base_addr % 4:
            raise ConfigError(f"base address must be a non-negative multiple of 4, got {self.base_addr:#x}")
        # the typed objects below validate the rest
        self.diversify_config()

    def distance_spec(self) -> DistanceSpec:
        return DistanceSpec(DistanceKind(self.distance), self.h, self.nr, self.nc)

    def run_name(self) -> str:
        """Run directory name: algorithm, distance and optimality gap."""
        spec = self.distance_spec()
        distance = f"gd{spec.n_r}-{spec.n_c}" if spec.kind is DistanceKind.GD else spec.kind.value
        return f"{self.algo}_{distance}_p{self.gap:g}"

    def search_params(self) -> SearchParams:
        return SearchParams(failure_limit=self.fail_limit, relax_rate=self.relax_rate,
                            seed=self.seed, time_limit=self.time_limit)

    def diversify_config(self) -> DiversifyConfig:
        return DiversifyConfig(
            algorithm=Algorithm(self.algo),
            k=self.k,
            p=self.gap,
            spec=self.distance_spec(),
            search=self.search_params(),
            global_relax_rate=self.global_relax_rate,
            locals_per_block=self.locals_per_block,
            workers=self.workers,
        )

    def with_overrides(self, values: Mapping[str, Any]) -> "HarnessConfig":
        return replace(self, **_convert(values))

    def echo(self) -> Dict[str, Any]:
        """Configuration columns copied into every report row."""
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name not in ("out", "timing")}


def _convert(values: Mapping[str, Any]) -> Dict[str, Any]:
    types = {f.name: f.type for f in fields(HarnessConfig)}
    converted: Dict[str, Any] = {}
    for raw_key, value in values.items():
        key = raw_key.strip().replace("-", "_")
        if key == "no_timing":
            key, value = "timing", not _to_bool(value)
        if key not in types:
            raise ConfigError(f"unknown configuration key {raw_key!r}")
        kind = types[key]
        try:
            if key == "base_addr":
                converted[key] = parse_address(value)
            elif kind in (bool, "bool"):
                converted[key] = _to_bool(value)
            elif kind in (int, "int"):
                converted[key] = int(value)
            elif kind in (float, "float"):
                converted[key] = float(value)
            else:
                converted[key] = str(value).strip().lower() if key != "out" else str(value).strip()
        except ValueError as e:
            raise ConfigError(f"bad value {value!r} for {raw_key}") from e
    return converted


def _to_bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError(text)


def read_config_file(path: Path) -> Dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    parser = configparser.ConfigParser(comment_prefixes=("#",), inline_comment_prefixes=("#",))
    try:
        text = Path(path).read_text()
        parser.read_string(f"[{_SECTION}]\n{text}")
    except (OSError, configparser.Error) as e:
        raise ConfigError(f"cannot read config file {path}: {str(e)}") from e
    return dict(parser[_SECTION])


def load_config(path: Optional[Path] = None, overrides: Optional[Mapping[str, Any]] = None) -> HarnessConfig:
    """Defaults, then the file, then explicit overrides (CLI flags)."""
    cfg = HarnessConfig()
    if path is not None:
        cfg = cfg.with_overrides(read_config_file(path))
        logger.info(f"Loaded configuration from {path}")
    if overrides:
        cfg = cfg.with_overrides(overrides)
    return cfg
