import csv
import json
import os
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from flatlab.constructions import ZTableParams, regular_2n_gon, z_table
from flatlab.io import (
    RunManifest,
    atomic_write,
    cached_canonical,
    csv_text,
    dumps,
    file_hash,
    load_surface,
    manifest_path_for,
    num_from_json,
    num_to_json,
    save_surface,
    surface_from_json,
    surface_to_json,
)
from flatlab.surface import delaunay_canonicalize, same_geometry

from conftest import R2


def test_surface_round_trip_is_bit_exact(lm_surface, tmp_path):
    text = dumps(surface_to_json(lm_surface))
    back = surface_from_json(json.loads(text))
    assert back.polygons == lm_surface.polygons
    assert back.gluing == lm_surface.gluing
    assert dumps(surface_to_json(back)) == text
    path = tmp_path / "s.json"
    save_surface(path, lm_surface)
    assert path.read_text() == text
    assert load_surface(path).polygons == lm_surface.polygons


def test_float_surface_round_trip():
    S = regular_2n_gon(4)
    back = surface_from_json(json.loads(dumps(surface_to_json(S))))
    assert back.polygons == S.polygons  # floats survive repr exactly
    assert not back.exact


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_numbers_round_trip(x):
    assert num_from_json(json.loads(json.dumps(num_to_json(x)))) == x


def test_exact_numbers_round_trip():
    for x in (F(1, 3), 7, 2 - 3 * R2 / 5):
        assert num_from_json(json.loads(json.dumps(num_to_json(x)))) == x
    with pytest.raises(ValueError):
        num_from_json("1/2")


def test_atomic_write_keeps_old_file_on_failure(tmp_path, monkeypatch):
    path = tmp_path / "out.txt"
    atomic_write(path, "old\n")

    def boom(src, dst):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(OSError):
        atomic_write(path, "new\n")
    assert path.read_text() == "old\n"
    assert [p.name for p in tmp_path.iterdir()] == ["out.txt"]


def test_csv_floats_round_trip():
    vals = [0.1, 1 / 3, 1e-300, 2.5]
    text = csv_text(["k", "v"], [(i, v) for i, v in enumerate(vals)])
    rows = list(csv.reader(text.splitlines()))
    assert rows[0] == ["k", "v"]
    assert [float(r[1]) for r in rows[1:]] == vals


def test_manifest_round_trip(tmp_path):
    m = RunManifest("check-lm", {"surface": "s.json"}, {"s.json": "ab"}, {"o.json": "cd"}, exact=True)
    p = manifest_path_for(tmp_path / "o.json")
    assert p.name == "o.json.manifest.json"
    m.save(p)
    assert RunManifest.load(p) == m
    assert m.seed == 42


def test_file_hash(tmp_path):
    p = tmp_path / "x"
    p.write_bytes(b"abc")
    assert file_hash(p) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"


def test_canonical_cache(tmp_path, monkeypatch, unit_z):
    monkeypatch.setenv("FLATLAB_CACHE", str(tmp_path / "cache"))
    S = z_table(ZTableParams(1, 2, F(1, 2), 1, F(1, 3), F(1, 4)))
    first = cached_canonical(S)
    files = list((tmp_path / "cache").iterdir())
    assert len(files) == 1
    assert cached_canonical(S).polygons == first.polygons
    assert first.polygons == delaunay_canonicalize(S).polygons
    # a damaged entry is recomputed
    files[0].write_text("{not json")
    assert cached_canonical(S).polygons == first.polygons
    assert same_geometry(first, S)


def test_cache_disabled(monkeypatch, unit_z):
    monkeypatch.delenv("FLATLAB_CACHE", raising=False)
    assert cached_canonical(unit_z).polygons == delaunay_canonicalize(unit_z).polygons
