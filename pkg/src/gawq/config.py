"""Flat key-value run configuration: parsing, validation, canonical dump.

Format: one `key = value` per line, `#` starts a comment, keys are dotted
(section.name).  Unknown keys are hard errors; every constraint violation
names the offending key and line.  `dump` emits a canonical ordering with
shortest-roundtrip float formatting, so parse -> dump -> parse is the
identity and dumps are byte-stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .dynamics import EDGE_GUARD_DEFAULT, GaussianPacketSpec
from .errors import ConfigError
from .model import SystemParams
from .spectral import DEFAULT_POLE_BOX

_SYSTEM_KEYS = {"omega_a", "omega_c", "gamma", "J", "g", "N"}
_PACKET_KEYS = {"alpha", "j_c", "k_c"}
_LATTICE_KEYS = {"sites"}
_EVOLVE_KEYS = {"t_end", "tol", "snapshots", "edge_guard", "start_at_arrival"}
_GRID_KEYS = {"k_start", "k_stop", "k_count"}
_SWEEP_KEYS = {"gamma_start", "gamma_stop", "gamma_count"}
_BOX_KEYS = {"re_min", "re_max", "im_min", "im_max"}
_OUT_KEYS = {"dir"}
_TOP_KEYS = {"determinism"}


@dataclass
class KGrid:
    k_start: float
    k_stop: float
    k_count: int

    def points(self) -> list[float]:
        if self.k_count == 1:
            return [self.k_start]
        step = (self.k_stop - self.k_start) / (self.k_count - 1)
        return [self.k_start + i * step for i in range(self.k_count)]


@dataclass
class GammaGrid:
    gamma_start: float
    gamma_stop: float
    gamma_count: int

    def points(self) -> list[float]:
        if self.gamma_count == 1:
            return [self.gamma_start]
        step = (self.gamma_stop - self.gamma_start) / (self.gamma_count - 1)
        return [self.gamma_start + i * step for i in range(self.gamma_count)]


@dataclass
class EvolveConfig:
    t_end: float
    tol: float = 1e-9
    snapshots: list[float] = field(default_factory=list)
    edge_guard: float = EDGE_GUARD_DEFAULT
    start_at_arrival: bool = False


@dataclass
class RunConfig:
    system: SystemParams
    packet: GaussianPacketSpec | None = None
    lattice_sites: int | None = None
    evolve: EvolveConfig | None = None
    grid: KGrid | None = None
    sweep: GammaGrid | None = None
    box: tuple[float, float, float, float] | None = None
    out_dir: Path = Path("out")


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_float(key: str, raw: str, line_no: int) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"line {line_no}: key `{key}` expects a number, got {raw!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"line {line_no}: key `{key}` must be finite, got {raw!r}")
    return value


def _parse_int(key: str, raw: str, line_no: int) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"line {line_no}: key `{key}` expects an integer, got {raw!r}") from None


def _parse_bool(key: str, raw: str, line_no: int) -> bool:
    low = raw.strip().lower()
    if low in ("true", "on", "yes", "1"):
        return True
    if low in ("false", "off", "no", "0"):
        return False
    raise ConfigError(f"line {line_no}: key `{key}` expects a boolean, got {raw!r}")


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a flat key-value configuration."""
    entries: dict[str, tuple[str, int]] = {}
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected `key = value`, got {raw_line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {line_no}: expected `key = value`, got {raw_line!r}")
        if key in entries:
            raise ConfigError(f"line {line_no}: duplicate key `{key}`")
        entries[key] = (value, line_no)

    known = (
        {f"system.{k}" for k in _SYSTEM_KEYS}
        | {f"packet.{k}" for k in _PACKET_KEYS}
        | {f"lattice.{k}" for k in _LATTICE_KEYS}
        | {f"evolve.{k}" for k in _EVOLVE_KEYS}
        | {f"grid.{k}" for k in _GRID_KEYS}
        | {f"sweep.{k}" for k in _SWEEP_KEYS}
        | {f"box.{k}" for k in _BOX_KEYS}
        | {f"out.{k}" for k in _OUT_KEYS}
        | _TOP_KEYS
    )
    for key, (_, line_no) in entries.items():
        if key not in known:
            raise ConfigError(f"line {line_no}: unknown key `{key}`")

    def take(key: str) -> tuple[str, int] | None:
        return entries.get(key)

    # system block (g and N required, the rest default)
    def system_float(name: str, default: float) -> float:
        item = take(f"system.{name}")
        return default if item is None else _parse_float(f"system.{name}", *item)

    g_item = take("system.g")
    n_item = take("system.N")
    if g_item is None:
        raise ConfigError("missing required key `system.g`")
    if n_item is None:
        raise ConfigError("missing required key `system.N`")
    g = _parse_float("system.g", *g_item)
    N = _parse_int("system.N", *n_item)
    try:
        system = SystemParams(
            omega_a=system_float("omega_a", 0.0),
            omega_c=system_float("omega_c", 0.0),
            gamma=system_float("gamma", 0.0),
            J=system_float("J", 1.0),
            g=g,
            N=N,
        )
    except ValueError as exc:
        raise ConfigError(
            f"invalid system block: {str(exc).replace('SystemParams.', 'system.')}"
        ) from None

    # packet block (all three keys or none)
    packet = None
    packet_present = [k for k in _PACKET_KEYS if take(f"packet.{k}") is not None]
    if packet_present:
        missing = sorted(_PACKET_KEYS - set(packet_present))
        if missing:
            raise ConfigError(f"packet block incomplete: missing `packet.{missing[0]}`")
        try:
            packet = GaussianPacketSpec(
                alpha=_parse_float("packet.alpha", *take("packet.alpha")),
                j_c=_parse_int("packet.j_c", *take("packet.j_c")),
                k_c=_parse_float("packet.k_c", *take("packet.k_c")),
            )
        except ValueError as exc:
            raise ConfigError(
                f"invalid packet block: {str(exc).replace('packet ', 'packet.')}"
            ) from None

    lattice_sites = None
    item = take("lattice.sites")
    if item is not None:
        lattice_sites = _parse_int("lattice.sites", *item)
        if lattice_sites < system.N + 3:
            raise ConfigError(
                f"line {item[1]}: `lattice.sites` = {lattice_sites} cannot hold sites 0..{system.N}"
            )

    evolve = None
    if take("evolve.t_end") is not None:
        t_end = _parse_float("evolve.t_end", *take("evolve.t_end"))
        tol_item = take("evolve.tol")
        tol = 1e-9 if tol_item is None else _parse_float("evolve.tol", *tol_item)
        if tol <= 0:
            raise ConfigError("`evolve.tol` must be positive")
        snaps: list[float] = []
        snap_item = take("evolve.snapshots")
        if snap_item is not None:
            raw, line_no = snap_item
            try:
                snaps = [float(s) for s in raw.split(",") if s.strip()]
            except ValueError:
                raise ConfigError(
                    f"line {line_no}: `evolve.snapshots` expects comma-separated numbers"
                ) from None
            if sorted(snaps) != snaps:
                raise ConfigError(f"line {line_no}: `evolve.snapshots` must be sorted ascending")
        guard_item = take("evolve.edge_guard")
        guard = EDGE_GUARD_DEFAULT if guard_item is None else _parse_float("evolve.edge_guard", *guard_item)
        if guard <= 0:
            raise ConfigError("`evolve.edge_guard` must be positive")
        arr_item = take("evolve.start_at_arrival")
        arrival = False if arr_item is None else _parse_bool("evolve.start_at_arrival", *arr_item)
        evolve = EvolveConfig(t_end=t_end, tol=tol, snapshots=snaps,
                              edge_guard=guard, start_at_arrival=arrival)
    else:
        for k in sorted(_EVOLVE_KEYS - {"t_end"}):
            if take(f"evolve.{k}") is not None:
                raise ConfigError(f"`evolve.{k}` given without `evolve.t_end`")

    grid = None
    if any(take(f"grid.{k}") is not None for k in _GRID_KEYS):
        for k in sorted(_GRID_KEYS):
            if take(f"grid.{k}") is None:
                raise ConfigError(f"grid block incomplete: missing `grid.{k}`")
        grid = KGrid(
            k_start=_parse_float("grid.k_start", *take("grid.k_start")),
            k_stop=_parse_float("grid.k_stop", *take("grid.k_stop")),
            k_count=_parse_int("grid.k_count", *take("grid.k_count")),
        )
        if grid.k_count < 1:
            raise ConfigError("`grid.k_count` must be >= 1")
        if not (0.0 < grid.k_start <= grid.k_stop < math.pi):
            raise ConfigError("`grid.k_start`..`grid.k_stop` must lie inside (0, pi)")

    sweep = None
    if any(take(f"sweep.{k}") is not None for k in _SWEEP_KEYS):
        for k in sorted(_SWEEP_KEYS):
            if take(f"sweep.{k}") is None:
                raise ConfigError(f"sweep block incomplete: missing `sweep.{k}`")
        sweep = GammaGrid(
            gamma_start=_parse_float("sweep.gamma_start", *take("sweep.gamma_start")),
            gamma_stop=_parse_float("sweep.gamma_stop", *take("sweep.gamma_stop")),
            gamma_count=_parse_int("sweep.gamma_count", *take("sweep.gamma_count")),
        )
        if sweep.gamma_count < 1:
            raise ConfigError("`sweep.gamma_count` must be >= 1")
        if sweep.gamma_stop < sweep.gamma_start:
            raise ConfigError("`sweep.gamma_stop` must be >= `sweep.gamma_start`")

    box = None
    if any(take(f"box.{k}") is not None for k in _BOX_KEYS):
        for k in sorted(_BOX_KEYS):
            if take(f"box.{k}") is None:
                raise ConfigError(f"box block incomplete: missing `box.{k}`")
        box = (
            _parse_float("box.re_min", *take("box.re_min")),
            _parse_float("box.re_max", *take("box.re_max")),
            _parse_float("box.im_min", *take("box.im_min")),
            _parse_float("box.im_max", *take("box.im_max")),
        )
        if not (0.0 <= box[0] < box[1] <= math.pi) or not (box[2] < box[3]):
            raise ConfigError("`box.*` must satisfy 0 <= re_min < re_max <= pi and im_min < im_max")

    out_dir = Path("out")
    item = take("out.dir")
    if item is not None:
        out_dir = Path(item[0])

    item = take("determinism")
    if item is not None and not _parse_bool("determinism", *item):
        raise ConfigError("`determinism` cannot be disabled; runs are always seedless-deterministic")

    return RunConfig(
        system=system, packet=packet, lattice_sites=lattice_sites,
        evolve=evolve, grid=grid, sweep=sweep, box=box, out_dir=out_dir,
    )


def parse_config_file(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def dump_config(cfg: RunConfig) -> str:
    """Canonical text form; `parse_config(dump_config(c))` reproduces `c`."""
    lines: list[str] = []
    s = cfg.system
    for name in ("omega_a", "omega_c", "gamma", "J", "g"):
        lines.append(f"system.{name} = {_fmt(getattr(s, name))}")
    lines.append(f"system.N = {s.N}")
    if cfg.packet is not None:
        lines.append(f"packet.alpha = {_fmt(cfg.packet.alpha)}")
        lines.append(f"packet.j_c = {cfg.packet.j_c}")
        lines.append(f"packet.k_c = {_fmt(cfg.packet.k_c)}")
    if cfg.lattice_sites is not None:
        lines.append(f"lattice.sites = {cfg.lattice_sites}")
    if cfg.evolve is not None:
        ev = cfg.evolve
        lines.append(f"evolve.t_end = {_fmt(ev.t_end)}")
        lines.append(f"evolve.tol = {_fmt(ev.tol)}")
        if ev.snapshots:
            lines.append("evolve.snapshots = " + ",".join(_fmt(t) for t in ev.snapshots))
        lines.append(f"evolve.edge_guard = {_fmt(ev.edge_guard)}")
        lines.append(f"evolve.start_at_arrival = {_fmt(ev.start_at_arrival)}")
    if cfg.grid is not None:
        lines.append(f"grid.k_start = {_fmt(cfg.grid.k_start)}")
        lines.append(f"grid.k_stop = {_fmt(cfg.grid.k_stop)}")
        lines.append(f"grid.k_count = {cfg.grid.k_count}")
    if cfg.sweep is not None:
        lines.append(f"sweep.gamma_start = {_fmt(cfg.sweep.gamma_start)}")
        lines.append(f"sweep.gamma_stop = {_fmt(cfg.sweep.gamma_stop)}")
        lines.append(f"sweep.gamma_count = {cfg.sweep.gamma_count}")
    if cfg.box is not None:
        for name, value in zip(("re_min", "re_max", "im_min", "im_max"), cfg.box):
            lines.append(f"box.{name} = {_fmt(value)}")
    lines.append(f"out.dir = {cfg.out_dir}")
    return "\n".join(lines) + "\n"


def pole_box(cfg: RunConfig) -> tuple[float, float, float, float]:
    return cfg.box if cfg.box is not None else DEFAULT_POLE_BOX
