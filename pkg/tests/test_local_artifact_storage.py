"""Tests for LocalArtifactStorage with and without base_dir."""
from __future__ import annotations

import os

from kernel_control.files import LocalArtifactStorage


def test_save_text_no_basedir(tmp_path):
    storage = LocalArtifactStorage()
    dest = str(tmp_path / "file.txt")
    result = storage.save_text(dest, "hello")
    assert result == dest
    assert open(dest, encoding="utf-8").read() == "hello"


def test_save_text_with_basedir(tmp_path):
    base = str(tmp_path / "base")
    storage = LocalArtifactStorage(base_dir=base)
    result = storage.save_text("sub/file.txt", "world")
    expected = os.path.join(base, "sub", "file.txt")
    assert result == expected
    assert open(expected, encoding="utf-8").read() == "world"


def test_read_text_and_exists(tmp_path):
    storage = LocalArtifactStorage(base_dir=str(tmp_path))
    assert not storage.exists("grids/certify.csv")
    storage.save_text("grids/certify.csv", "x1,x2\n")
    assert storage.exists("grids/certify.csv")
    assert storage.read_text("grids/certify.csv") == "x1,x2\n"


def test_build_path_joins_parts(tmp_path):
    storage = LocalArtifactStorage(base_dir=str(tmp_path))
    assert storage.build_path("a", "b", "c") == os.path.join("a", "b", "c")
    assert storage.build_path() == ""
