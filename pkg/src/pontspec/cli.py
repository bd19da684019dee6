"""Command-line front end: sweeps, tables, deterministic CSV/JSON.

Every command assembles a Table (columns, rows, meta) and emits it
through one writer, so the byte-level guarantees live in one place:
shortest-roundtrip float formatting, LF line endings, a header row
always present, JSON with sorted keys mirroring the same records.
Missing values (a ratio with no successor, an absent branch) are None,
written as nan in CSV and null in JSON.

Config files are flat key = value text mirroring the long flags;
values given on the command line win. Flag and file values go through
the same converters, so a bad value is reported identically (and with
the file line number when it came from a file). Exit status: 0 on
success, 1 when the numerics raise, 2 for configuration mistakes.

Sweep commands fan out over a thread pool when PONTSPEC_THREADS asks
for more than one worker; chunks are reassembled in grid order, so the
output bytes do not depend on the worker count.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .bo import BOConfig, bo_levels
from .efimov import PiecewisePotential, analytic_levels, numeric_levels
from .errors import ConfigError, PontspecError
from .gamma import CenterConfig
from .local import local_eigenvalues, symmetric_pair_eigenvalues
from .special import OMEGA
from .twocenter import epsilon0, epsilon1, epsilon0_curve, scattering_length_theta

__all__ = ["main", "parallel_map", "GridSpec"]


@dataclass(frozen=True)
class GridSpec:
    """Sweep grid: start:stop:count with linear or log spacing."""

    start: float
    stop: float
    count: int
    spacing: str = "linear"

    def points(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)

    def text(self) -> str:
        return f"{self.start!r}:{self.stop!r}:{self.count}:{self.spacing}"


def _parse_grid(text: str) -> GridSpec:
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise ConfigError(
            f"grid: expected start:stop:count[:linear|log], got {text!r}"
        )
    try:
        start, stop = float(parts[0]), float(parts[1])
    except ValueError:
        raise ConfigError(f"grid: bad endpoint in {text!r}") from None
    try:
        count = int(parts[2])
    except ValueError:
        raise ConfigError(f"grid: count must be an integer, got {parts[2]!r}") from None
    spacing = parts[3] if len(parts) == 4 else "linear"
    if spacing not in ("linear", "log"):
        raise ConfigError(f"grid: spacing must be linear or log, got {spacing!r}")
    if count < 1:
        raise ConfigError(f"grid: need at least one point, got {count}")
    if not (math.isfinite(start) and math.isfinite(stop)) or start >= stop:
        raise ConfigError(f"grid: need finite start < stop, got {text!r}")
    if spacing == "log" and start <= 0.0:
        raise ConfigError("grid: log spacing needs start > 0")
    return GridSpec(start, stop, count, spacing)


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _parse_float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"expected a number, got {text!r}") from None


def _parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}") from None


def _parse_method(text: str) -> str:
    if text not in ("analytic", "numeric", "both"):
        raise ConfigError(f"method must be analytic, numeric or both, got {text!r}")
    return text


# per-command parameter tables: name -> (converter, default); None
# defaults mark parameters that must come from a flag or the config file
_PARAMS: dict[str, dict[str, tuple[Callable[[str], object], object]]] = {
    "potential": {
        "t_theta": (_parse_float, 1.0),
        "grid": (_parse_grid, GridSpec(0.5, 20.0, 400)),
        "figure1": (_parse_bool, False),
    },
    "spectrum-local": {
        "alpha": (_parse_float, None),
        "r": (_parse_float, None),
        "positions_file": (str, None),
        "panels": (_parse_int, 20000),
    },
    "spectrum-nonlocal": {
        "t_theta": (_parse_float, 1.0),
        "r": (_parse_float, None),
    },
    "efimov": {
        "k": (_parse_float, 5.0),
        "r0": (_parse_float, 1.0),
        "levels": (_parse_int, 6),
        "method": (_parse_method, "analytic"),
    },
    "bo": {
        "m_light": (_parse_float, 1.0),
        "m_heavy": (_parse_float, None),
        "t_theta": (_parse_float, 1.0),
        "levels": (_parse_int, 6),
    },
    "scattering": {
        "t_theta": (_parse_float, None),
        "r": (_parse_float, None),
    },
}

_REQUIRED = {
    "spectrum-nonlocal": ("r",),
    "bo": ("m_heavy",),
    "scattering": ("t_theta", "r"),
}


def _read_config_file(path: str) -> dict[str, str]:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from None
    values: dict[str, str] = {}
    for i, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{i}: expected key = value, got {line!r}")
        key, _, val = line.partition("=")
        key = key.strip().replace("-", "_")
        val = val.strip()
        if not key or not val:
            raise ConfigError(f"{path}:{i}: expected key = value, got {line!r}")
        if key in values:
            raise ConfigError(f"{path}:{i}: duplicate key {key!r}")
        values[key] = val
    return values


def _merge_options(
    command: str, flags: argparse.Namespace, file_values: dict[str, str], path: str
) -> dict[str, object]:
    """File values fill parameters the command line left unset.

    Consumes the file keys it recognizes; the caller rejects leftovers."""
    opts: dict[str, object] = {}
    for name, (convert, default) in _PARAMS[command].items():
        flag_val = getattr(flags, name)
        file_val = file_values.pop(name, None)
        if flag_val is not None:
            opts[name] = convert(flag_val) if isinstance(flag_val, str) else flag_val
        elif file_val is not None:
            try:
                opts[name] = convert(file_val)
            except ConfigError as exc:
                raise ConfigError(f"{path}: key {name!r}: {exc}") from None
        else:
            opts[name] = default
    for name in _REQUIRED.get(command, ()):
        if opts[name] is None:
            raise ConfigError(f"{command}: parameter {name!r} is required")
    return opts


def _worker_count() -> int:
    raw = os.environ.get("PONTSPEC_THREADS")
    if raw is None:
        return 1
    try:
        workers = int(raw)
    except ValueError:
        raise ConfigError(f"PONTSPEC_THREADS must be an integer, got {raw!r}") from None
    if workers < 1:
        raise ConfigError(f"PONTSPEC_THREADS must be >= 1, got {workers}")
    return workers


def parallel_map(func: Callable, items: Sequence) -> list:
    """Ordered map, fanned out when PONTSPEC_THREADS asks for workers."""
    workers = _worker_count()
    if workers == 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(func, items))


@dataclass(frozen=True)
class Table:
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]
    meta: dict


def _cell(value) -> str:
    if value is None:
        return "nan"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _render_csv(table: Table) -> str:
    lines = [",".join(table.columns)]
    for row in table.rows:
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _render_json(command: str, table: Table) -> str:
    payload = {
        "command": command,
        "meta": table.meta,
        "columns": list(table.columns),
        "rows": [dict(zip(table.columns, row)) for row in table.rows],
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _emit(command: str, table: Table, fmt: str, path: str | None) -> None:
    text = _render_csv(table) if fmt == "csv" else _render_json(command, table)
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _run_potential(opts: dict) -> Table:
    t = opts["t_theta"]
    grid: GridSpec = opts["grid"]
    points = grid.points()
    # fan out in contiguous chunks; epsilon0_curve is pointwise, so the
    # assembled values do not depend on the chunking
    chunks = max(1, min(_worker_count(), len(points)))
    values = np.concatenate(
        parallel_map(lambda c: epsilon0_curve(t, c), np.array_split(points, chunks))
    )
    meta = {"t_theta": t, "grid": grid.text(), "figure1": opts["figure1"]}
    if opts["figure1"]:
        columns = ("r", "epsilon0", "inverse_square_envelope")
        rows = tuple(
            (float(r), float(e), -OMEGA * OMEGA / float(r) ** 2)
            for r, e in zip(points, values)
        )
    else:
        columns = ("r", "epsilon0")
        rows = tuple((float(r), float(e)) for r, e in zip(points, values))
    return Table(columns, rows, meta)


def _read_positions_file(path: str) -> CenterConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read positions file {path!r}: {exc}") from None
    positions, alphas = [], []
    for i, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ConfigError(
                f"{path}:{i}: expected 'x y z alpha' (4 numbers), got {len(parts)}"
            )
        try:
            nums = [float(p) for p in parts]
        except ValueError:
            raise ConfigError(f"{path}:{i}: non-numeric entry in {line!r}") from None
        positions.append(nums[:3])
        alphas.append(nums[3])
    if not positions:
        raise ConfigError(f"{path}: no centers found")
    return CenterConfig(np.array(positions), np.array(alphas))


def _run_spectrum_local(opts: dict) -> Table:
    pair = opts["alpha"] is not None and opts["r"] is not None
    if pair == (opts["positions_file"] is not None):
        raise ConfigError(
            "spectrum-local: give either --alpha with --r, or --positions-file"
        )
    if pair:
        spec = symmetric_pair_eigenvalues(opts["alpha"], opts["r"])
        meta = {"alpha": opts["alpha"], "r": opts["r"]}
    else:
        config = _read_positions_file(opts["positions_file"])
        spec = local_eigenvalues(config, panels=opts["panels"])
        meta = {"positions_file": opts["positions_file"], "n_centers": config.n}
    meta.update({"method": spec.method, "panels": spec.panels})
    rows = tuple(
        (i + 1, e, lam) for i, (e, lam) in enumerate(zip(spec.energies, spec.lambdas))
    )
    return Table(("n", "energy", "lam"), rows, meta)


def _run_spectrum_nonlocal(opts: dict) -> Table:
    t, r = opts["t_theta"], opts["r"]
    rows = []
    for name, record in (("even", epsilon0(t, r)), ("odd", epsilon1(t, r))):
        rows.append((name, record.exists, record.value, record.decay_rate))
    return Table(
        ("branch", "exists", "energy", "decay_rate"),
        tuple(rows),
        {"t_theta": t, "r": r},
    )


def _run_efimov(opts: dict) -> Table:
    k, r0, n, method = opts["k"], opts["r0"], opts["levels"], opts["method"]
    spectra = {}
    if method in ("analytic", "both"):
        spectra["analytic"] = analytic_levels(k, r0, n)
    if method in ("numeric", "both"):
        pot = PiecewisePotential(
            inner=lambda r: np.zeros_like(np.asarray(r, dtype=float)), r0=r0, k=k
        )
        spectra["numeric"] = numeric_levels(pot, n)
    primary = spectra.get("analytic") or spectra["numeric"]
    delivered = min(s.delivered for s in spectra.values())
    columns = ["n"]
    columns += [f"E_{name}" for name in spectra]
    columns += ["E_asymptotic", "ratio"]
    rows = []
    for i in range(delivered):
        row: list = [i + 1]
        row += [spectra[name].levels[i] for name in spectra]
        row.append(primary.asymptotic_reference[i])
        row.append(primary.ratios[i] if i < len(primary.ratios) else None)
        rows.append(tuple(row))
    meta = {"k": k, "r0": r0, "method": method, "requested": n,
            "delivered": delivered}
    return Table(tuple(columns), tuple(rows), meta)


def _run_bo(opts: dict) -> Table:
    config = BOConfig(opts["m_light"], opts["m_heavy"], opts["t_theta"])
    spec = bo_levels(config, opts["levels"])
    meta = {
        "m_light": config.m_light,
        "m_heavy": config.M_heavy,
        "t_theta": config.t_theta,
        "nu": config.nu,
        "mu": config.mu,
        "effective_k": spec.effective_k,
        "bare_k": spec.bare_k,
        "efimov_regime": spec.efimov_regime,
        "continuum_edge": spec.continuum_edge,
        "requested": spec.requested,
        "delivered": spec.delivered,
    }
    rows = []
    for i, energy in enumerate(spec.levels):
        rows.append(
            (
                i + 1,
                energy,
                spec.ratios[i] if i < len(spec.ratios) else None,
                spec.nodes[i] if spec.nodes is not None else None,
            )
        )
    return Table(("n", "energy", "ratio", "nodes"), tuple(rows), meta)


def _run_scattering(opts: dict) -> Table:
    t, r = opts["t_theta"], opts["r"]
    record = scattering_length_theta(t, r)
    return Table(
        ("r", "t_theta", "a_theta", "diverged", "small_r_limit"),
        ((r, t, record.value, record.diverged, record.small_r_limit),),
        {"t_theta": t, "r": r},
    )


_RUNNERS = {
    "potential": _run_potential,
    "spectrum-local": _run_spectrum_local,
    "spectrum-nonlocal": _run_spectrum_nonlocal,
    "efimov": _run_efimov,
    "bo": _run_bo,
    "scattering": _run_scattering,
}

_FLAG_HELP = {
    "t_theta": "interaction phase parameter (t_theta <= 1)",
    "grid": "sweep grid start:stop:count[:linear|log]",
    "figure1": "emit epsilon0 next to its inverse-square envelope",
    "alpha": "boundary parameter of the local centers",
    "r": "separation between the two centers",
    "positions_file": "file of centers, one 'x y z alpha' row each",
    "panels": "determinant scan resolution",
    "k": "inverse-square tail strength (k > 1/4)",
    "r0": "matching radius of the inverse-square tail",
    "levels": "how many levels to deliver",
    "method": "analytic, numeric or both",
    "m_light": "light mass",
    "m_heavy": "heavy mass",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pontspec",
        description="Spectra, scattering and effective potentials of "
        "point-interaction Hamiltonians.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for command, table in _PARAMS.items():
        p = sub.add_parser(command)
        for name in table:
            flag = "--" + name.replace("_", "-")
            if name == "figure1":
                p.add_argument(flag, action="store_const", const="true",
                               help=_FLAG_HELP[name])
            else:
                p.add_argument(flag, help=_FLAG_HELP[name])
        p.add_argument("--config", help="flat key = value file mirroring the flags")
        p.add_argument("--output", help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"),
                       help="output format (default: csv)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    flags = _build_parser().parse_args(argv)
    try:
        file_values = (
            _read_config_file(flags.config) if flags.config is not None else {}
        )
        opts = _merge_options(flags.command, flags, file_values, flags.config or "")
        fmt = flags.format or file_values.pop("format", None) or "csv"
        if fmt not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {fmt!r}")
        out = flags.output or file_values.pop("output", None)
        if file_values:
            bad = ", ".join(repr(k) for k in sorted(file_values))
            raise ConfigError(
                f"{flags.config}: unknown key(s) {bad} for command {flags.command!r}"
            )
        table = _RUNNERS[flags.command](opts)
        _emit(flags.command, table, fmt, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except PontspecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
