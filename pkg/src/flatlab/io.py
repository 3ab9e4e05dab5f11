"""JSON and CSV persistence, atomic writes, run manifests and the canonical-form cache."""

from __future__ import annotations

import csv
import hashlib
import io as _io
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

from . import __version__
from .exactfield import QuadNum
from .surface import TranslationSurface

DEFAULT_SEED = 42


def num_to_json(x: Any) -> Any:
    if isinstance(x, QuadNum):
        return x.to_json()
    if isinstance(x, float):
        return x
    return QuadNum.coerce(x).to_json()


def num_from_json(obj: Any) -> Any:
    if isinstance(obj, dict):
        return QuadNum.from_json(obj)
    if isinstance(obj, float):
        return obj
    if isinstance(obj, int):
        return QuadNum(obj)
    raise ValueError(f"not a number encoding: {obj!r}")


def surface_to_json(S: TranslationSurface) -> dict:
    seen = set()
    gluing = []
    for (p, e), (p2, e2) in sorted(S.gluing.items()):
        if (p, e) in seen:
            continue
        seen.add((p2, e2))
        gluing.append([p, e, p2, e2])
    return {
        "d": S.d,
        "polygons": [[[num_to_json(c) for c in v] for v in poly] for poly in S.polygons],
        "gluing": gluing,
        "label": S.label or "",
    }


def surface_from_json(obj: dict) -> TranslationSurface:
    polys = [[tuple(num_from_json(c) for c in v) for v in poly] for poly in obj["polygons"]]
    gluing = [tuple(g) for g in obj["gluing"]]
    return TranslationSurface(polys, gluing, obj.get("label") or None)


def dumps(obj: Any) -> str:
    """Deterministic JSON text (sorted keys, fixed separators, trailing newline)."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def atomic_write(path: Any, data: Any) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: Any, obj: Any) -> None:
    atomic_write(path, dumps(obj))


def read_json(path: Any) -> Any:
    with open(path) as fh:
        return json.load(fh)


def save_surface(path: Any, S: TranslationSurface) -> None:
    write_json(path, surface_to_json(S))


def load_surface(path: Any) -> TranslationSurface:
    return surface_from_json(read_json(path))


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in r])
    return buf.getvalue()


def write_csv(path: Any, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    atomic_write(path, csv_text(header, rows))


def file_hash(path: Any) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    command: str
    params: dict
    inputs: dict = field(default_factory=dict)  # path -> sha256
    outputs: dict = field(default_factory=dict)  # path -> sha256
    version: str = __version__
    seed: int = DEFAULT_SEED
    exact: bool = True
    tolerance: Optional[float] = None
    wall_time: float = 0.0

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj: dict) -> RunManifest:
        return cls(**obj)

    def save(self, path: Any) -> None:
        write_json(path, self.to_json())

    @classmethod
    def load(cls, path: Any) -> RunManifest:
        return cls.from_json(read_json(path))


def manifest_path_for(output: Any) -> Path:
    p = Path(output)
    return p.with_name(p.name + ".manifest.json")


def cache_dir() -> Optional[Path]:
    """Directory for canonical-form results, from ``FLATLAB_CACHE`` (unset disables caching)."""
    root = os.environ.get("FLATLAB_CACHE")
    if not root:
        return None
    p = Path(root)
    p.mkdir(parents=True, exist_ok=True)
    return p


def cached_canonical(S: TranslationSurface) -> TranslationSurface:
    """``delaunay_canonicalize`` memoized on disk by the hash of the input presentation."""
    from .surface import delaunay_canonicalize

    root = cache_dir()
    if root is None or not S.exact:
        return delaunay_canonicalize(S)
    key = hashlib.sha256(dumps(surface_to_json(S)).encode()).hexdigest()
    path = root / f"{key}.json"
    if path.exists():
        try:
            return load_surface(path)
        except (ValueError, KeyError, json.JSONDecodeError):
            pass
    out = delaunay_canonicalize(S)
    save_surface(path, out)
    return out
