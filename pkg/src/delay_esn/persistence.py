"""Series CSV files and the versioned JSON model file."""

from __future__ import annotations

import base64
import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .embedding import TimeSeries
from .errors import FormatError
from .linalg import SparseMatrix
from .reservoir import EsnConfig, Reservoir
from .training import Scaler, TrainedEsn

MODEL_FORMAT = "delay-esn-model"
MODEL_VERSION = 1


def _fmt(x: float) -> str:
    return repr(float(x))


def format_series_csv(columns: dict[str, np.ndarray], comments: dict | None = None) -> str:
    """Render columns as CSV preceded by ``# key: value`` provenance lines."""
    buf = io.StringIO()
    for key, value in (comments or {}).items():
        buf.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
    names = list(columns)
    buf.write(",".join(names) + "\n")
    arrays = [np.asarray(columns[k], dtype=float) for k in names]
    for row in zip(*arrays):
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def write_text(path, text: str) -> None:
    # newline="" keeps \n on every platform so files are byte-identical
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def write_series_csv(path, series: TimeSeries, comments: dict | None = None, start_index: int = 0) -> None:
    t = (start_index + np.arange(len(series))) * series.dt
    write_text(path, format_series_csv({"t": t, "value": series.samples}, comments))


def read_csv_table(path) -> tuple[dict, list[str], list[tuple[int, list[str]]]]:
    """Split a CSV into comment metadata plus a header and its numbered data rows."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError:
        raise
    except UnicodeDecodeError as exc:
        raise FormatError(f"{path} is not UTF-8 text") from exc
    meta: dict = {}
    header: list[str] | None = None
    rows: list[tuple[int, list[str]]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            key, sep, value = stripped[1:].partition(":")
            if sep:
                try:
                    meta[key.strip()] = json.loads(value)
                except json.JSONDecodeError:
                    meta[key.strip()] = value.strip()
            continue
        cells = next(csv.reader([stripped]))
        if header is None:
            header = [c.strip() for c in cells]
            continue
        rows.append((lineno, cells))
    if header is None:
        raise FormatError(f"{path} has no header row", row=None)
    return meta, header, rows


def ingest_csv(path, spacing_tol: float = 1e-6, label: str | None = None) -> TimeSeries:
    """Load a ``t,value`` or single ``value`` column file as a series.

    Row numbers in errors count physical lines of the file, header and
    comments included.
    """
    meta, header, rows = read_csv_table(path)
    if header == ["t", "value"]:
        has_t = True
    elif header == ["value"]:
        has_t = False
    else:
        raise FormatError(f"expected header 't,value' or 'value', got {','.join(header)!r}", row=None)
    if not rows:
        raise FormatError(f"{path} contains no data rows")
    width = 2 if has_t else 1
    ts, values = [], []
    for lineno, cells in rows:
        if len(cells) != width or any(not c.strip() for c in cells):
            raise FormatError("missing or extra cell", row=lineno)
        try:
            nums = [float(c) for c in cells]
        except ValueError:
            raise FormatError(f"non-numeric value in {cells!r}", row=lineno) from None
        if not all(math.isfinite(v) for v in nums):
            raise FormatError("non-finite value", row=lineno)
        if has_t:
            ts.append(nums[0])
        values.append(nums[-1])
    dt = float(meta.get("dt", 1.0)) if not isinstance(meta.get("dt"), str) else 1.0
    if has_t and len(ts) > 1:
        steps = np.diff(ts)
        first = float(steps[0])
        if first <= 0:
            raise FormatError("time column must increase", row=rows[1][0])
        # the first step is the reference, so the row where spacing breaks is reported
        bad = np.nonzero(np.abs(steps - first) > spacing_tol * first)[0]
        if bad.size:
            step = float(steps[bad[0]])
            raise FormatError(f"non-uniform sampling (step {step!r}, expected {first!r})", row=rows[bad[0] + 1][0])
        dt = float(np.mean(steps))
        if "dt" in meta and not isinstance(meta["dt"], str) and abs(meta["dt"] - dt) <= spacing_tol * abs(dt):
            dt = float(meta["dt"])
    return TimeSeries(np.array(values), dt, label or str(meta.get("label", Path(path).stem)), meta)


def _pack(a: np.ndarray, dtype: str) -> dict:
    a = np.ascontiguousarray(a, dtype=np.dtype(dtype).newbyteorder("<"))
    return {"dtype": dtype, "shape": list(a.shape), "data": base64.b64encode(a.tobytes()).decode("ascii")}


def _unpack(d: dict) -> np.ndarray:
    try:
        dt = np.dtype(d["dtype"]).newbyteorder("<")
        raw = base64.b64decode(d["data"], validate=True)
        return np.frombuffer(raw, dtype=dt).astype(d["dtype"]).reshape(d["shape"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad array payload: {exc}") from exc


def model_to_dict(model: TrainedEsn) -> dict:
    w = model.reservoir.W.csr
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "config": model.config.to_dict(),
        "seed": model.config.seed,
        "W": {
            "rows": w.shape[0],
            "cols": w.shape[1],
            "indptr": _pack(w.indptr, "int64"),
            "indices": _pack(w.indices, "int64"),
            "data": _pack(w.data, "float64"),
        },
        "W_in": _pack(model.reservoir.W_in, "float64"),
        "W_out": _pack(model.W_out, "float64"),
        "scaler": {"kind": model.scaler.kind, "shift": model.scaler.shift, "scale": model.scaler.scale},
        "last_window": _pack(model.last_window, "float64"),
        "state": _pack(model.reservoir.state, "float64"),
        "train_meta": model.train_meta,
    }


def model_from_dict(d: dict) -> TrainedEsn:
    if not isinstance(d, dict) or d.get("format") != MODEL_FORMAT:
        raise FormatError("not a delay-esn model file")
    if d.get("version") != MODEL_VERSION:
        raise FormatError(f"unsupported model version {d.get('version')!r}")
    try:
        config = EsnConfig.from_dict(d["config"])
        wd = d["W"]
        W = SparseMatrix.from_csr_arrays(
            wd["rows"], wd["cols"], _unpack(wd["indptr"]), _unpack(wd["indices"]), _unpack(wd["data"])
        )
        res = Reservoir(W, _unpack(d["W_in"]), config, _unpack(d["state"]).copy())
        sc = d["scaler"]
        return TrainedEsn(
            res, _unpack(d["W_out"]).copy(), Scaler(sc["kind"], sc["shift"], sc["scale"]),
            _unpack(d["last_window"]).copy(), dict(d.get("train_meta", {})),
        )
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"corrupt model file: {exc}") from exc


def dumps_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, allow_nan=True) + "\n"


def save_model(model: TrainedEsn, path) -> None:
    write_text(path, dumps_json(model_to_dict(model)))


def load_model(path) -> TrainedEsn:
    try:
        d = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc
    return model_from_dict(d)
