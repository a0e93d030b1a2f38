"""File formats: data/chain/forecast CSV, summary JSON, run manifests.

CSV uses a header row, period decimal separator, UTF-8.  Floats are written
with repr (shortest round-trip), so identical inputs and seeds give
byte-identical files.  All writers go through an atomic write-then-rename;
commands stage every output and rename at the end, so failures leave no
partial files.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ar import TimeSeries
from .diagnostics import PosteriorSummary
from .samplers import SampleChain


class DataFormatError(ValueError):
    """Malformed input file; carries the 1-based offending line number."""

    def __init__(self, path, line_no: int, message: str):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{path}: line {line_no}: {message}")


def _fmt(x: float) -> str:
    return repr(float(x))


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def write_json(path, obj) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def sha256_file(path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


# ---------------------------------------------------------------------------
# data series


def read_series(path) -> TimeSeries:
    """Read a one-value-per-row CSV; an optional single header row is skipped."""
    path = Path(path)
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if "," in line:
                raise DataFormatError(path, line_no, "expected one value per row")
            try:
                values.append(float(line))
            except ValueError:
                if line_no == 1:
                    continue  # header
                raise DataFormatError(path, line_no, f"could not parse {line!r} as a number") from None
    if not values:
        raise DataFormatError(path, 1, "no numeric rows found")
    return TimeSeries(np.asarray(values))


def write_series(path, values) -> None:
    values = np.asarray(values, dtype=float)
    lines = ["value"] + [_fmt(v) for v in values]
    atomic_write_text(path, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# chains


def chain_to_csv_text(chain: SampleChain) -> str:
    lines = [",".join(chain.param_names)]
    for row in chain.draws:
        lines.append(",".join(_fmt(x) for x in row))
    return "\n".join(lines) + "\n"


def chain_sidecar(chain: SampleChain) -> dict:
    return {
        "sampler": chain.sampler_tag,
        "config": chain.config,
        "seed": chain.seed,
        "acceptance_rate": chain.acceptance_rate,
        "divergences": chain.divergences,
        "retained": int(len(chain)),
        "params": list(chain.param_names),
    }


def write_chain(chain: SampleChain, csv_path, sidecar_path=None) -> None:
    """Write the retained draws as CSV plus a JSON sidecar of run metadata."""
    atomic_write_text(csv_path, chain_to_csv_text(chain))
    if sidecar_path is None:
        sidecar_path = Path(csv_path).with_suffix(".json")
    write_json(sidecar_path, chain_sidecar(chain))


def read_chain(path) -> tuple:
    """Read a chain CSV; returns (param_names, draws)."""
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise DataFormatError(path, 1, "empty chain file")
    names = tuple(s.strip() for s in lines[0].split(","))
    rows = []
    for line_no, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != len(names):
            raise DataFormatError(path, line_no, f"expected {len(names)} columns, got {len(parts)}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise DataFormatError(path, line_no, "could not parse row as numbers") from None
    if not rows:
        raise DataFormatError(path, 2, "chain has no draws")
    return names, np.asarray(rows)


# ---------------------------------------------------------------------------
# summaries and forecasts


def summary_to_dict(summary: PosteriorSummary) -> dict:
    return {
        "mean": summary.mean,
        "sd": summary.sd,
        "mode": summary.mode,
        "median": summary.median,
        "credible_interval": list(summary.credible_interval),
        "interval_prob": summary.interval_prob,
    }


def summaries_to_csv_text(summaries: dict) -> str:
    """Fixed-column CSV, one parameter per column, rows mean/sd/mode/median/lo/hi."""
    names = list(summaries)
    lines = ["statistic," + ",".join(names)]
    rows = [
        ("mean", lambda s: s.mean),
        ("sd", lambda s: s.sd),
        ("mode", lambda s: s.mode if s.mode is not None else float("nan")),
        ("median", lambda s: s.median),
        ("interval_lo", lambda s: s.credible_interval[0]),
        ("interval_hi", lambda s: s.credible_interval[1]),
    ]
    for label, get in rows:
        lines.append(label + "," + ",".join(_fmt(get(summaries[n])) for n in names))
    return "\n".join(lines) + "\n"


def forecasts_to_csv_text(forecasts) -> str:
    lines = ["step,point,lo,hi"]
    for j, (point, (lo, hi)) in enumerate(forecasts, start=1):
        lines.append(f"{j},{_fmt(point)},{_fmt(lo)},{_fmt(hi)}")
    return "\n".join(lines) + "\n"


def acf_to_csv_text(acf_values) -> str:
    lines = ["lag,acf"]
    for k, v in enumerate(np.asarray(acf_values, dtype=float)):
        lines.append(f"{k},{_fmt(v)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# run manifests


@dataclass
class RunManifest:
    """Reproducibility record written alongside every command's outputs."""

    command: str
    config: dict
    seed: int | None
    inputs: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)

    def to_dict(self) -> dict:
        import scipy

        return {
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "inputs": self.inputs,
            "outputs": sorted(self.outputs),
            "versions": {
                "gevhmc": _package_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
            },
        }


def _package_version() -> str:
    from . import __version__

    return __version__


class OutputStager:
    """Collects output texts and writes them all atomically at the end."""

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self._texts: dict = {}

    def add_text(self, name: str, text: str) -> None:
        self._texts[name] = text

    def add_json(self, name: str, obj) -> None:
        self._texts[name] = json.dumps(obj, indent=2, sort_keys=True) + "\n"

    def names(self) -> list:
        return sorted(self._texts)

    def commit(self) -> list:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        for name in sorted(self._texts):
            path = self.out_dir / name
            atomic_write_text(path, self._texts[name])
            written.append(str(path))
        return written
