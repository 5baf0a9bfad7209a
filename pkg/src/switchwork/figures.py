"""Deterministic plot-ready CSV datasets for the nine reference figures.

No plotting happens here: each figure id maps to a dataset with exactly
the axes of the corresponding plot, emitted as comma-separated UTF-8 text
with LF line endings, unit-annotated headers, floats at 17 significant
digits, and complex values split into _re/_im columns.  Grid points in a
divergence regime (post-selection probability below the near-zero
threshold) are tagged in the `divergent[flag]` column and their value
cells are left empty — they are never emitted as numbers.  Where the
reference plot draws a zero contour, a `zero_crossing[flag]` column marks
the grid cells straddling it.

The datasets (natural units, hbar = 1):

fig1  rotation-pair energy difference vs inverse temperature for several
      control-coherence strengths |t|.
fig2  measured rotation pair at beta -> 0: minimizing measurement phase
      vs rotation angle (left panel) and the energy difference vs
      measurement phase (right panel).
fig3  minimized energy difference for generic qubit unitary pairs vs
      |t| for several (beta, theta); includes the implied slope
      diagnostic epsilon = 16 min / (cos(theta) |t|) + 12.
fig4  minimized post-measurement energy difference vs measurement phase
      for several beta (the plateau dataset).
fig5  symmetric displacement-pair slice vs |alpha| for several |t|.
fig6  displacement-pair energy difference over the (|alpha_1|,
      |alpha_2|) grid for several |t|, with the zero contour tagged.
fig7  displacement+squeeze energy difference over the (|alpha|, |z|)
      grid for |t| in {0, 20, 30}, with the zero contour tagged.
fig8  post-measurement displacement+squeeze energy difference over the
      (|alpha|, |z|) grid, slices xi-2phi in {0, pi} by measurement
      phase in {0, pi/2, pi, 3pi/2}.
fig9  ground-state limit of fig8 along the diagonal |alpha| = |z|.

Everything is seeded and deterministic: identical inputs produce
byte-identical CSV.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .cvcase import (
    DisplacementParams,
    SqueezeParams,
    delta_qs_disp_squeeze,
    delta_qs_displacements,
    delta_qs_displacements_symmetric,
    delta_sm_xi0,
    delta_sm_xipi,
)
from .qubitcase import (
    RotationParams,
    delta_qs_rotations,
    delta_sm_rotations_beta0,
    implied_epsilon,
    minimize_delta_qs_u2,
    minimize_delta_sm_u2,
)
from .states import BlochState
from .switchcore import NearZeroPostSelectionError

DEFAULT_FIGURE_SEED = 11
FIGURE_BUDGET = 8000
FIGURE_IDS = tuple(f"fig{k}" for k in range(1, 10))

_PLUS = BlochState(math.pi / 2.0, 0.0)


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    out_path: Path | None = None

    def __post_init__(self) -> None:
        if self.figure_id not in FIGURE_IDS:
            raise ValueError(
                f"unknown figure id {self.figure_id!r}; known: {', '.join(FIGURE_IDS)}"
            )


def format_cell(value) -> str:
    """One CSV cell: '' for missing, integer text for flags, %.17g floats."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    if isinstance(value, str):
        if "," in value or "\n" in value:
            raise ValueError(f"cell text may not contain separators: {value!r}")
        return value
    raise TypeError(f"unsupported cell type {type(value).__name__}")


def render_csv(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    width = len(header)
    for row in rows:
        if len(row) != width:
            raise ValueError(f"row width {len(row)} != header width {width}")
        lines.append(",".join(format_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _grid(step: float, count: int) -> list[float]:
    return [step * k for k in range(count)]


def _zero_crossing_flags(values: list[list[float | None]]) -> list[list[int]]:
    """1 where a cell sits on or adjacent (left/down neighbor straddling)
    to the zero level; divergent cells (None) never flag."""
    rows = len(values)
    cols = len(values[0])
    flags = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        for j in range(cols):
            v = values[i][j]
            if v is None:
                continue
            if v == 0.0:
                flags[i][j] = 1
                continue
            for ni, nj in ((i - 1, j), (i, j - 1)):
                if ni < 0 or nj < 0:
                    continue
                w = values[ni][nj]
                if w is None:
                    continue
                if v * w < 0.0:
                    flags[i][j] = 1
                    flags[ni][nj] = 1
    return flags


def _fig1() -> tuple[list[str], list[list]]:
    header = ["t_abs[energy]", "beta[1/energy]", "delta_qs[energy]"]
    r = RotationParams(math.pi / 2.0, math.pi)
    rows: list[list] = []
    for t_abs in (0.0, 0.5, 1.0, 2.0):
        for beta in _grid(0.1, 51):
            value = delta_qs_rotations(1.0, beta, t_abs, 0.0, r, _PLUS, cross_check=False)
            rows.append([t_abs, beta, value])
    return header, rows


def _fig2() -> tuple[list[str], list[list]]:
    header = ["panel[tag]", "alpha[rad]", "phi_m[rad]", "delta_sm[energy]"]
    rows: list[list] = []
    theta_m = math.pi / 2.0
    scan = [2.0 * math.pi * k / 3600 for k in range(3600)]
    for k in range(1, 63):
        alpha = 0.05 * k
        best_phi, best_val = 0.0, math.inf
        for phi_m in scan:
            v = delta_sm_rotations_beta0(1.0, alpha, theta_m, phi_m, cross_check=False)
            if v < best_val:
                best_phi, best_val = phi_m, v
        rows.append(["left", alpha, best_phi, best_val])
    for alpha in (math.pi / 4.0, math.pi / 2.0, 3.0 * math.pi / 4.0):
        for k in range(180):
            phi_m = 2.0 * math.pi * k / 180
            v = delta_sm_rotations_beta0(1.0, alpha, theta_m, phi_m, cross_check=False)
            rows.append(["right", alpha, phi_m, v])
    return header, rows


def _fig3(seed: int) -> tuple[list[str], list[list]]:
    header = [
        "beta[1/energy]",
        "theta[rad]",
        "t_abs[energy]",
        "min_delta_qs[energy]",
        "epsilon[1]",
        "evaluations[1]",
    ]
    rows: list[list] = []
    for beta in (0.0, 0.1, 0.2):
        for theta in (0.0, math.pi / 4.0, math.pi / 3.0):
            for k in range(1, 9):
                t_abs = 0.25 * k
                res = minimize_delta_qs_u2(
                    1.0, beta, t_abs, theta, _PLUS, budget=FIGURE_BUDGET, seed=seed
                )
                rows.append(
                    [
                        beta,
                        theta,
                        t_abs,
                        res.value,
                        implied_epsilon(res.value, theta, t_abs),
                        res.evaluations,
                    ]
                )
    return header, rows


def _fig4(seed: int) -> tuple[list[str], list[list]]:
    header = [
        "beta[1/energy]",
        "phi_m[rad]",
        "min_delta_sm[energy]",
        "evaluations[1]",
    ]
    rows: list[list] = []
    for beta in (0.0, 0.5, 1.0):
        for k in range(8):
            phi_m = k * math.pi / 4.0
            m = BlochState(math.pi / 2.0, phi_m)
            res = minimize_delta_sm_u2(1.0, beta, _PLUS, m, budget=FIGURE_BUDGET, seed=seed)
            rows.append([beta, phi_m, res.value, res.evaluations])
    return header, rows


def _fig5() -> tuple[list[str], list[list]]:
    header = ["t_abs[energy]", "alpha_abs[1]", "delta_qs[energy]"]
    rows: list[list] = []
    for t_abs in (0.5, 1.0, 2.0, 3.0):
        for alpha_abs in _grid(0.02, 111):
            rows.append(
                [t_abs, alpha_abs, delta_qs_displacements_symmetric(1.0, t_abs, alpha_abs)]
            )
    return header, rows


def _fig6() -> tuple[list[str], list[list]]:
    header = [
        "t_abs[energy]",
        "alpha1_abs[1]",
        "alpha2_abs[1]",
        "delta_qs[energy]",
        "zero_crossing[flag]",
    ]
    a1_grid = _grid(0.05, 41)
    a2_grid = _grid(0.05, 41)
    rows: list[list] = []
    for t_abs in (0.0, 2.0, 4.0):
        values: list[list[float | None]] = []
        for a1 in a1_grid:
            line: list[float | None] = []
            for a2 in a2_grid:
                line.append(
                    delta_qs_displacements(
                        1.0,
                        t_abs,
                        0.0,
                        DisplacementParams(a1, math.pi / 2.0),
                        DisplacementParams(a2, 0.0),
                        _PLUS,
                    )
                )
            values.append(line)
        flags = _zero_crossing_flags(values)
        for i, a1 in enumerate(a1_grid):
            for j, a2 in enumerate(a2_grid):
                rows.append([t_abs, a1, a2, values[i][j], flags[i][j]])
    return header, rows


def _fig7() -> tuple[list[str], list[list]]:
    header = [
        "t_abs[energy]",
        "alpha_abs[1]",
        "z_abs[1]",
        "delta_qs[energy]",
        "zero_crossing[flag]",
    ]
    a_grid = _grid(0.05, 31)
    z_grid = _grid(0.05, 17)
    rows: list[list] = []
    for t_abs in (0.0, 20.0, 30.0):
        values: list[list[float | None]] = []
        for alpha_abs in a_grid:
            line: list[float | None] = []
            for z_abs in z_grid:
                line.append(
                    delta_qs_disp_squeeze(
                        1.0,
                        1.0,
                        t_abs,
                        0.0,
                        DisplacementParams(alpha_abs, 0.0),
                        SqueezeParams(z_abs, 0.0),
                        _PLUS,
                    )
                )
            values.append(line)
        flags = _zero_crossing_flags(values)
        for i, alpha_abs in enumerate(a_grid):
            for j, z_abs in enumerate(z_grid):
                rows.append([t_abs, alpha_abs, z_abs, values[i][j], flags[i][j]])
    return header, rows


_SLICES = ((0.0, delta_sm_xi0), (math.pi, delta_sm_xipi))
_PHI_M_SET = (0.0, math.pi / 2.0, math.pi, 3.0 * math.pi / 2.0)


def _fig8() -> tuple[list[str], list[list]]:
    header = [
        "xi_minus_2phi[rad]",
        "phi_m[rad]",
        "alpha_abs[1]",
        "z_abs[1]",
        "delta_sm[energy]",
        "divergent[flag]",
        "zero_crossing[flag]",
    ]
    a_grid = _grid(0.05, 31)
    z_grid = _grid(0.05, 17)
    rows: list[list] = []
    for slice_angle, slice_fn in _SLICES:
        for phi_m in _PHI_M_SET:
            m = BlochState(math.pi / 2.0, phi_m)
            values: list[list[float | None]] = []
            for alpha_abs in a_grid:
                line: list[float | None] = []
                for z_abs in z_grid:
                    try:
                        line.append(slice_fn(1.0, 1.0, alpha_abs, z_abs, _PLUS, m))
                    except NearZeroPostSelectionError:
                        line.append(None)
                values.append(line)
            flags = _zero_crossing_flags(values)
            for i, alpha_abs in enumerate(a_grid):
                for j, z_abs in enumerate(z_grid):
                    v = values[i][j]
                    rows.append(
                        [
                            slice_angle,
                            phi_m,
                            alpha_abs,
                            z_abs,
                            v,
                            0 if v is not None else 1,
                            flags[i][j],
                        ]
                    )
    return header, rows


def _fig9() -> tuple[list[str], list[list]]:
    header = [
        "xi_minus_2phi[rad]",
        "phi_m[rad]",
        "alpha_abs[1]",
        "delta_sm[energy]",
        "divergent[flag]",
    ]
    rows: list[list] = []
    for slice_angle, slice_fn in _SLICES:
        for phi_m in _PHI_M_SET:
            m = BlochState(math.pi / 2.0, phi_m)
            for x in _grid(0.02, 61):
                try:
                    value: float | None = slice_fn(1.0, math.inf, x, x, _PLUS, m)
                    divergent = 0
                except NearZeroPostSelectionError:
                    value, divergent = None, 1
                rows.append([slice_angle, phi_m, x, value, divergent])
    return header, rows


def figure_dataset(
    figure_id: str, seed: int = DEFAULT_FIGURE_SEED
) -> tuple[list[str], list[list]]:
    """Header and rows for one figure id (deterministic for a given seed)."""
    builders = {
        "fig1": _fig1,
        "fig2": _fig2,
        "fig3": lambda: _fig3(seed),
        "fig4": lambda: _fig4(seed),
        "fig5": _fig5,
        "fig6": _fig6,
        "fig7": _fig7,
        "fig8": _fig8,
        "fig9": _fig9,
    }
    if figure_id not in builders:
        raise ValueError(f"unknown figure id {figure_id!r}")
    return builders[figure_id]()


def emit_figure(spec: FigureSpec, seed: int = DEFAULT_FIGURE_SEED) -> Path:
    """Write the figure dataset as CSV (UTF-8, LF); returns the path."""
    header, rows = figure_dataset(spec.figure_id, seed)
    out = spec.out_path if spec.out_path is not None else Path(f"{spec.figure_id}.csv")
    out = Path(out)
    text = render_csv(header, rows)
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return out


def baseline_path(figure_id: str) -> Path:
    """Packaged regression baseline CSV for one figure id."""
    if figure_id not in FIGURE_IDS:
        raise ValueError(f"unknown figure id {figure_id!r}")
    return Path(__file__).parent / "_baselines" / f"{figure_id}.csv"
