"""
JSON and CSV formats.

Every JSON document carries ``format`` and ``version`` keys.  Complex numbers
are ``[re, im]`` pairs and floats are written with 17 significant digits, so
the same objects always serialize to the same bytes.  Writes go to a temporary
file in the target directory that is renamed into place.
"""

import csv
import hashlib
import io
import json
import math
import os
import tempfile
from importlib import resources

import numpy as np

from .bands import SisModel
from .grid import FiberField, FiberizedSignal, GridConfig
from .paley_wiener import MultiTile, TranslationAssignment
from .sampling import MeasurementSet, SamplingKernel

VERSION = 1


class InputError(ValueError):
    """Malformed or inconsistent input file."""


# -- serialization ---------------------------------------------------------


def _encode(o, indent, level):
    if isinstance(o, (bool, np.bool_)):
        return "true" if o else "false"
    if o is None:
        return "null"
    if isinstance(o, (int, np.integer)):
        return str(int(o))
    if isinstance(o, (float, np.floating)):
        x = float(o)
        if not math.isfinite(x):
            raise ValueError("cannot serialize non-finite float")
        s = format(x, ".17g")
        if s == "-0":
            s = "0"
        return s
    if isinstance(o, str):
        return json.dumps(o)
    if isinstance(o, (complex, np.complexfloating)):
        return _encode([o.real, o.imag], indent, level)
    if isinstance(o, np.ndarray):
        return _encode(o.tolist(), indent, level)
    if isinstance(o, (list, tuple)):
        return "[" + ",".join(_encode(v, indent, level) for v in o) + "]"
    if isinstance(o, dict):
        if not o:
            return "{}"
        pad = "\n" + " " * (indent * (level + 1))
        items = [pad + json.dumps(str(k)) + ": " + _encode(v, indent, level + 1) for k, v in o.items()]
        return "{" + ",".join(items) + "\n" + " " * (indent * level) + "}"
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dumps(obj, indent=1):
    """Deterministic JSON text (17 significant digits, fixed key order)."""
    return _encode(obj, indent, 0) + "\n"


def atomic_write(path, text):
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, obj):
    atomic_write(path, dumps(obj))


def sha256_text(text):
    return hashlib.sha256(text.encode()).hexdigest()


def sha256_file(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def read_json(path, expected_format=None):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{path}:{e.lineno}: invalid JSON ({e.msg})") from None
    if not isinstance(doc, dict):
        raise InputError(f"{path}: top level must be an object")
    if expected_format is not None:
        fmt = doc.get("format")
        ok = fmt in expected_format if isinstance(expected_format, tuple) else fmt == expected_format
        if not ok:
            raise InputError(f"{path}: expected format {expected_format!r}, found {fmt!r}")
    if doc.get("version") != VERSION:
        raise InputError(f"{path}: unsupported version {doc.get('version')!r}")
    return doc


# -- complex arrays --------------------------------------------------------


def complex_to_json(a):
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1)


def complex_from_json(rows, where="rows"):
    try:
        arr = np.asarray(rows, dtype=float)
    except (TypeError, ValueError):
        raise InputError(f"{where}: expected nested [re, im] pairs") from None
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise InputError(f"{where}: complex entries must be [re, im] pairs")
    if not np.isfinite(arr).all():
        raise InputError(f"{where}: non-finite entries")
    return arr[..., 0] + 1j * arr[..., 1]


def _config(doc, where):
    try:
        return GridConfig.from_dict(doc["config"])
    except KeyError as e:
        raise InputError(f"{where}: missing config key {e}") from None
    except (TypeError, ValueError) as e:
        raise InputError(f"{where}: invalid config ({e})") from None


def _rows(doc, shape, where):
    if "rows" not in doc:
        raise InputError(f"{where}: missing rows")
    arr = complex_from_json(doc["rows"], where)
    if arr.shape != shape:
        raise InputError(f"{where}: rows have shape {arr.shape}, expected {shape}")
    return arr


# -- kernels, signals, fields -----------------------------------------------


def kernel_to_dict(g):
    return {
        "format": "sisfit-kernel",
        "version": VERSION,
        "config": g.config.to_dict(),
        "bound_M": g.bound_M,
        "rows": complex_to_json(g.fibers),
    }


def kernel_from_dict(doc, where="kernel"):
    cfg = _config(doc, where)
    return SamplingKernel(cfg, _rows(doc, (cfg.T, cfg.width), where))


def load_kernel(path):
    return kernel_from_dict(read_json(path, "sisfit-kernel"), str(path))


def example_kernel_path():
    return resources.files("sisfit") / "data" / "example_kernel.json"


def signal_to_dict(f):
    return {
        "format": "sisfit-signal",
        "version": VERSION,
        "config": f.config.to_dict(),
        "rows": complex_to_json(f.fibers),
    }


def signal_from_dict(doc, where="signal"):
    cfg = _config(doc, where)
    return FiberizedSignal(cfg, _rows(doc, (cfg.T, cfg.width), where))


def field_to_dict(fld):
    return {
        "format": "sisfit-field",
        "version": VERSION,
        "config": fld.config.to_dict(),
        "rows": complex_to_json(fld.points),
    }


def field_from_dict(doc, where="field"):
    cfg = _config(doc, where)
    return FiberField(cfg, _rows(doc, (cfg.T, cfg.dim), where))


# -- models and tiles -------------------------------------------------------


def model_to_dict(model):
    c = model.config
    per_point = [
        {"t": t, "band": int(c.band_of(t)), "basis": complex_to_json(b)}
        for t, b in enumerate(model.bases)
        if b.shape[0]
    ]
    return {
        "format": "sisfit-model",
        "version": VERSION,
        "config": c.to_dict(),
        "class_tag": model.class_tag,
        "per_point": per_point,
    }


def model_from_dict(doc, where="model"):
    """Rebuild a model; spanning sets are re-orthonormalized on the way in."""
    cfg = _config(doc, where)
    sets = [np.zeros((0, cfg.dim), complex) for _ in range(cfg.T)]
    for i, entry in enumerate(doc.get("per_point", [])):
        try:
            t = int(entry["t"])
            basis = entry["basis"]
        except (KeyError, TypeError, ValueError):
            raise InputError(f"{where}: per_point[{i}] needs integer t and basis") from None
        if not 0 <= t < cfg.T:
            raise InputError(f"{where}: per_point[{i}] has t={t} outside [0, {cfg.T})")
        if "band" in entry and int(entry["band"]) != int(cfg.band_of(t)):
            raise InputError(f"{where}: per_point[{i}] band does not match t")
        b = complex_from_json(basis, f"{where}: per_point[{i}].basis") if len(basis) else np.zeros((0, cfg.dim))
        if b.ndim != 2 or b.shape[1] != cfg.dim:
            raise InputError(f"{where}: per_point[{i}] basis vectors must have length {cfg.dim}")
        sets[t] = b
    try:
        return SisModel.from_spanning_sets(cfg, sets, doc.get("class_tag", "generic"))
    except ValueError as e:
        raise InputError(f"{where}: {e}") from None


def tile_to_dict(result, l):
    tile = result.tile
    return {
        "format": "sisfit-tile",
        "version": VERSION,
        "config": tile.config.to_dict(),
        "N": tile.N,
        "l": l,
        "per_point": [{"t": t, "cells": list(a.cells)} for t, a in enumerate(tile.assignments)],
        "captured": result.captured,
        "residual": result.residual,
    }


def tile_from_dict(doc, where="tile"):
    cfg = _config(doc, where)
    try:
        N = int(doc["N"])
        entries = sorted(doc["per_point"], key=lambda e: int(e["t"]))
        if [int(e["t"]) for e in entries] != list(range(cfg.G)):
            raise InputError(f"{where}: need one entry per base point 0..{cfg.G - 1}")
        assignments = tuple(
            TranslationAssignment(tuple(sorted(int(j) for j in e["cells"])), cfg.n0, N) for e in entries
        )
    except (KeyError, TypeError) as e:
        raise InputError(f"{where}: malformed tile ({e})") from None
    except ValueError as e:
        raise InputError(f"{where}: {e}") from None
    return MultiTile(cfg, N, assignments)


# -- measurements ------------------------------------------------------------


def measurements_to_csv(Y):
    """CSV text with header j,k,re,im; j is 1-based, zero samples omitted."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["j", "k", "re", "im"])
    K = Y.config.K
    for j, seq in enumerate(Y.sequences, start=1):
        nz = np.flatnonzero(seq)
        if nz.size == 0:
            # keep the sequence count recoverable
            nz = np.array([K])
        for i in nz:
            w.writerow([j, int(i) - K, format(seq[i].real, ".17g"), format(seq[i].imag, ".17g")])
    return buf.getvalue()


def write_measurements(path, Y):
    atomic_write(path, measurements_to_csv(Y))


def read_measurements(path, config):
    """Parse a j,k,re,im CSV into a MeasurementSet on ``config``."""
    try:
        fh = open(path, newline="")
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    entries = {}
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["j", "k", "re", "im"]:
            raise InputError(f"{path}:1: header must be j,k,re,im")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 4:
                raise InputError(f"{path}:{lineno}: expected 4 fields, found {len(row)}")
            try:
                j, k = int(row[0]), int(row[1])
                re_, im_ = float(row[2]), float(row[3])
            except ValueError:
                raise InputError(f"{path}:{lineno}: cannot parse {row}") from None
            if j < 1:
                raise InputError(f"{path}:{lineno}: j must be >= 1")
            if abs(k) > config.K:
                raise InputError(f"{path}:{lineno}: k={k} outside [-{config.K}, {config.K}]")
            if not (math.isfinite(re_) and math.isfinite(im_)):
                raise InputError(f"{path}:{lineno}: non-finite sample")
            if (j, k) in entries:
                raise InputError(f"{path}:{lineno}: duplicate sample j={j}, k={k}")
            entries[(j, k)] = complex(re_, im_)
    if not entries:
        raise InputError(f"{path}: no measurements")
    m = max(j for j, _ in entries)
    seq = np.zeros((m, 2 * config.K + 1), complex)
    for (j, k), v in entries.items():
        seq[j - 1, k + config.K] = v
    return MeasurementSet(config, seq)


def rows_to_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format(v, ".17g") if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()
