"""Experiment configuration files."""
import configparser
import math
from dataclasses import dataclass
from dataclasses import field
from fractions import Fraction
from pathlib import Path
from typing import Any
from typing import Callable
from typing import Mapping
from typing import Sequence
from typing import TypeVar

from lp_tile_lab.errors import ConfigError


T = TypeVar("T")

#: Section applied to every experiment before its own section.
DEFAULTS_SECTION = "defaults"

MAX_SEED = 2**64 - 1


def parse_float(text: str) -> float:
    """A float, ``inf`` or a fraction such as ``4/3``."""
    text = text.strip()
    if text.lower() in ("inf", "+inf", "infinity"):
        return math.inf
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a number: {text!r}") from exc


def parse_int(text: str) -> int:
    """A decimal, hex or binary integer."""
    try:
        return int(text.strip(), 0)
    except ValueError as exc:
        raise ConfigError(f"not an integer: {text!r}") from exc


def _split(text: str) -> list[str]:
    return [item.strip() for item in text.split(",") if item.strip()]


@dataclass(frozen=True)
class ExperimentConfig:
    """The flat parameters of one experiment with typed getters.

    Every value read through a getter, default or not, is echoed in ``used``.
    """

    experiment: str
    values: Mapping[str, str] = field(default_factory=dict)
    seed: int = 0
    n: int | None = None
    used: dict[str, Any] = field(default_factory=dict, compare=False)

    def _get(self, key: str, default: T, parse: Callable[[str], T]) -> T:
        if key == "n" and self.n is not None:
            value: Any = self.n
        elif key in self.values:
            try:
                value = parse(self.values[key])
            except ConfigError as exc:
                raise ConfigError(f"[{self.experiment}] {key}: {exc}") from exc
        else:
            value = default
        self.used[key] = list(value) if isinstance(value, tuple) else value
        return value  # type: ignore[no-any-return]

    def get_str(self, key: str, default: str) -> str:
        """The stripped string at KEY, or DEFAULT."""
        return self._get(key, default, str.strip)

    def get_int(self, key: str, default: int) -> int:
        """The integer at KEY, or DEFAULT."""
        return self._get(key, default, parse_int)

    def get_float(self, key: str, default: float) -> float:
        """The number at KEY, or DEFAULT; see :func:`parse_float`."""
        return self._get(key, default, parse_float)

    def get_ints(self, key: str, default: Sequence[int]) -> tuple[int, ...]:
        """A comma-separated list of integers."""
        return self._get(key, tuple(default), lambda s: tuple(parse_int(x) for x in _split(s)))

    def get_floats(self, key: str, default: Sequence[float]) -> tuple[float, ...]:
        """A comma-separated list of numbers."""
        return self._get(
            key, tuple(default), lambda s: tuple(parse_float(x) for x in _split(s))
        )


def load_config(
    experiment: str,
    path: Path | None = None,
    seed: int | None = None,
    n: int | None = None,
) -> ExperimentConfig:
    """Read the ``[defaults]`` and ``[<experiment>]`` sections of an INI file.

    ``seed`` and ``n`` given here override the file.
    """
    values: dict[str, str] = {}
    if path is not None:
        parser = configparser.ConfigParser(interpolation=None)
        try:
            with open(path, encoding="utf-8") as f:
                parser.read_file(f)
        except configparser.Error as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        for section in (DEFAULTS_SECTION, experiment):
            if parser.has_section(section):
                values.update(parser.items(section))
    if seed is None:
        seed = parse_int(values.pop("seed", "0"))
    else:
        values.pop("seed", None)
    if not 0 <= seed <= MAX_SEED:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return ExperimentConfig(experiment, values, seed, n)
