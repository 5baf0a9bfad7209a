"""Strict flat key = value scenario configuration.

One assignment per line; blank lines and `#` comments are ignored.  Every
key must be known for the declared family, every required key must be
present, and unknown keys are rejected with their line number.  A parsed
config serializes back to canonical text whose re-parse is identical
(round-trip identity), which is what makes configs usable as regression
artifacts.

Sweep axes are declared as `sweep1 = <name> <start> <stop> <count>` (and
optionally `sweep2 = ...`); the axis name must be one of the sweepable
scalar parameters of the family, and at most two axes are allowed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

KINDS = ("qubit", "fock")
FAMILIES = ("rotations", "u2", "displacements", "disp_squeeze")
KIND_FOR_FAMILY = {
    "rotations": "qubit",
    "u2": "qubit",
    "displacements": "fock",
    "disp_squeeze": "fock",
}
FAMILY_PARAMS: dict[str, tuple[str, ...]] = {
    "rotations": ("alpha_x", "alpha_y"),
    "u2": (
        "u1_alpha",
        "u1_lam",
        "u1_gamma",
        "u1_delta",
        "u2_alpha",
        "u2_lam",
        "u2_gamma",
        "u2_delta",
    ),
    "displacements": ("alpha1_abs", "alpha1_phase", "alpha2_abs", "alpha2_phase"),
    "disp_squeeze": ("alpha_abs", "alpha_phase", "z_abs", "z_phase"),
}
COMMON_PARAMS = ("omega", "beta", "t_abs", "t_phase", "control_theta", "control_phi")
MEASURE_PARAMS = ("measure_theta", "measure_phi")


class ConfigError(ValueError):
    """Config validation failure; the message carries line/field context."""


@dataclass(frozen=True)
class SweepAxis:
    name: str
    start: float
    stop: float
    count: int

    def values(self) -> list[float]:
        if self.count == 1:
            return [self.start]
        step = (self.stop - self.start) / (self.count - 1)
        return [self.start + k * step for k in range(self.count)]


@dataclass(frozen=True)
class ScenarioConfig:
    kind: str
    family: str
    scalars: tuple[tuple[str, float], ...]
    axes: tuple[SweepAxis, ...] = ()
    seed: int = 0
    n_max: int | None = None
    budget: int = 32000

    def scalar(self, name: str) -> float:
        for key, value in self.scalars:
            if key == name:
                return value
        raise KeyError(name)

    @property
    def has_measurement(self) -> bool:
        names = {k for k, _ in self.scalars}
        return "measure_theta" in names

    def sweepable_names(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self.scalars)


def _scalar_order(family: str, with_measure: bool) -> tuple[str, ...]:
    names = COMMON_PARAMS[:2] + FAMILY_PARAMS[family] + COMMON_PARAMS[2:]
    if with_measure:
        names = names + MEASURE_PARAMS
    return names


def _parse_float(raw: str, key: str, line_no: int) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"line {line_no}: field {key}: not a number: {raw!r}") from None
    if math.isnan(value):
        raise ConfigError(f"line {line_no}: field {key}: NaN is not allowed")
    return value


def _parse_int(raw: str, key: str, line_no: int) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"line {line_no}: field {key}: not an integer: {raw!r}") from None


def parse_config(text: str) -> ScenarioConfig:
    """Parse config text; raises ConfigError with line/field references."""
    assignments: dict[str, tuple[str, int]] = {}
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {line!r}")
        if key in assignments:
            raise ConfigError(f"line {line_no}: field {key}: duplicate assignment")
        assignments[key] = (value, line_no)

    def take(key: str) -> tuple[str, int] | None:
        return assignments.pop(key, None)

    got = take("kind")
    if got is None:
        raise ConfigError("missing required field: kind")
    kind, kind_line = got
    if kind not in KINDS:
        raise ConfigError(f"line {kind_line}: field kind: must be one of {KINDS}, got {kind!r}")

    got = take("family")
    if got is None:
        raise ConfigError("missing required field: family")
    family, family_line = got
    if family not in FAMILIES:
        raise ConfigError(
            f"line {family_line}: field family: must be one of {FAMILIES}, got {family!r}"
        )
    if KIND_FOR_FAMILY[family] != kind:
        raise ConfigError(
            f"line {family_line}: field family: {family!r} requires kind = "
            f"{KIND_FOR_FAMILY[family]!r}, got {kind!r}"
        )

    measure_present = [k for k in MEASURE_PARAMS if k in assignments]
    if len(measure_present) == 1:
        raise ConfigError(
            f"field {measure_present[0]}: measure_theta and measure_phi must "
            "be given together"
        )
    with_measure = bool(measure_present)

    scalars: list[tuple[str, float]] = []
    for key in _scalar_order(family, with_measure):
        got = take(key)
        if got is None:
            raise ConfigError(f"missing required field: {key}")
        raw, line_no = got
        scalars.append((key, _parse_float(raw, key, line_no)))

    seed = 0
    got = take("seed")
    if got is not None:
        seed = _parse_int(got[0], "seed", got[1])

    budget = 32000
    got = take("budget")
    if got is not None:
        budget = _parse_int(got[0], "budget", got[1])
        if budget < 1000:
            raise ConfigError(f"line {got[1]}: field budget: must be >= 1000, got {budget}")

    n_max: int | None = None
    got = take("n_max")
    if got is not None:
        if kind != "fock":
            raise ConfigError(f"line {got[1]}: field n_max: only valid for kind = fock")
        n_max = _parse_int(got[0], "n_max", got[1])
        if n_max < 1:
            raise ConfigError(f"line {got[1]}: field n_max: must be >= 1, got {n_max}")

    sweepable = tuple(k for k, _ in scalars)
    axes: list[SweepAxis] = []
    for axis_key in ("sweep1", "sweep2"):
        got = take(axis_key)
        if got is None:
            continue
        raw, line_no = got
        parts = raw.split()
        if len(parts) != 4:
            raise ConfigError(
                f"line {line_no}: field {axis_key}: expected '<name> <start> "
                f"<stop> <count>', got {raw!r}"
            )
        name = parts[0]
        if name not in sweepable:
            raise ConfigError(
                f"line {line_no}: field {axis_key}: {name!r} is not a parameter "
                f"of family {family!r} (choose from {', '.join(sweepable)})"
            )
        if any(a.name == name for a in axes):
            raise ConfigError(f"line {line_no}: field {axis_key}: duplicate axis {name!r}")
        start = _parse_float(parts[1], axis_key, line_no)
        stop = _parse_float(parts[2], axis_key, line_no)
        count = _parse_int(parts[3], axis_key, line_no)
        if count < 1:
            raise ConfigError(f"line {line_no}: field {axis_key}: count must be >= 1")
        axes.append(SweepAxis(name, start, stop, count))
        if axis_key == "sweep2" and len(axes) == 1:
            raise ConfigError(f"line {line_no}: field sweep2: requires sweep1")

    if assignments:
        leftover = sorted(assignments.items(), key=lambda kv: kv[1][1])
        key, (_, line_no) = leftover[0]
        raise ConfigError(f"line {line_no}: unknown field: {key}")

    return ScenarioConfig(
        kind=kind,
        family=family,
        scalars=tuple(scalars),
        axes=tuple(axes),
        seed=seed,
        n_max=n_max,
        budget=budget,
    )


def load_config(path: str | Path) -> ScenarioConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def _fmt(value: float) -> str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, ".17g")


def serialize_config(cfg: ScenarioConfig) -> str:
    """Canonical text whose parse equals cfg (round-trip identity)."""
    lines = [f"kind = {cfg.kind}", f"family = {cfg.family}"]
    for key, value in cfg.scalars:
        lines.append(f"{key} = {_fmt(value)}")
    if cfg.n_max is not None:
        lines.append(f"n_max = {cfg.n_max}")
    if cfg.budget != 32000:
        lines.append(f"budget = {cfg.budget}")
    if cfg.seed != 0:
        lines.append(f"seed = {cfg.seed}")
    for i, axis in enumerate(cfg.axes, start=1):
        lines.append(
            f"sweep{i} = {axis.name} {_fmt(axis.start)} {_fmt(axis.stop)} {axis.count}"
        )
    return "\n".join(lines) + "\n"


def grid_points(cfg: ScenarioConfig) -> list[dict[str, float]]:
    """Row-major grid over the sweep axes applied to the base scalars:
    the first axis is the outer loop."""
    base = dict(cfg.scalars)
    if not cfg.axes:
        return [base]
    rows: list[dict[str, float]] = []
    if len(cfg.axes) == 1:
        for v in cfg.axes[0].values():
            point = dict(base)
            point[cfg.axes[0].name] = v
            rows.append(point)
        return rows
    outer, inner = cfg.axes
    for vo in outer.values():
        for vi in inner.values():
            point = dict(base)
            point[outer.name] = vo
            point[inner.name] = vi
            rows.append(point)
    return rows
