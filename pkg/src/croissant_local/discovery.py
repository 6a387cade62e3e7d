"""Recursive file discovery with streaming SHA-256 hashing."""

from __future__ import annotations

import hashlib
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .errors import UsageError

__all__ = ["DiscoveredFile", "discover_files", "hash_file", "walk_paths"]

log = logging.getLogger(__name__)

CHUNK_SIZE = 1 << 20


@dataclass(frozen=True)
class DiscoveredFile:
    relative_path: str
    byte_size: int
    sha256: str
    absolute_path: Path

    @property
    def name(self) -> str:
        return self.relative_path.rsplit("/", 1)[-1]

    @property
    def parent(self) -> str:
        head, sep, _ = self.relative_path.rpartition("/")
        return head if sep else ""


def hash_file(path: str | os.PathLike[str], chunk_size: int = CHUNK_SIZE) -> tuple[str, int]:
    """Return ``(sha256 hex digest, byte count)`` over the raw stored bytes.

    Compressed files are hashed as-is, never decompressed.
    """
    digest = hashlib.sha256()
    size = 0
    with open(path, "rb") as fh:
        while chunk := fh.read(chunk_size):
            digest.update(chunk)
            size += len(chunk)
    return digest.hexdigest(), size


def _inside(path: Path, root: Path) -> bool:
    try:
        path.relative_to(root)
    except ValueError:
        return False
    return True


def walk_paths(root: str | os.PathLike[str], warnings: list[str] | None = None) -> list[tuple[str, Path]]:
    """Sorted ``(relative posix path, absolute path)`` pairs for every regular file.

    Symbolic links are followed only when their target resolves inside
    ``root``; each real directory is visited once.
    """
    warnings = warnings if warnings is not None else []
    root_path = Path(root)
    if not root_path.is_dir():
        raise UsageError(f"input directory does not exist: {root}")
    real_root = root_path.resolve()
    if not os.access(real_root, os.R_OK | os.X_OK):
        raise UsageError(f"input directory is not readable: {root}")

    found: list[tuple[str, Path]] = []
    visited: set[Path] = set()
    stack: list[tuple[Path, str]] = [(root_path, "")]
    while stack:
        directory, rel_dir = stack.pop()
        real_dir = directory.resolve()
        if real_dir in visited:
            continue
        visited.add(real_dir)
        try:
            entries = list(os.scandir(directory))
        except OSError as exc:
            if rel_dir == "":
                raise UsageError(f"cannot read input directory {root}: {exc}") from exc
            warnings.append(f"skipped unreadable directory {rel_dir}: {exc.strerror or exc}")
            continue
        for entry in entries:
            rel = f"{rel_dir}/{entry.name}" if rel_dir else entry.name
            path = Path(entry.path)
            if entry.is_symlink():
                target = path.resolve()
                if not _inside(target, real_root):
                    warnings.append(f"skipped symlink pointing outside the input directory: {rel}")
                    continue
                if target.is_dir():
                    stack.append((path, rel))
                elif target.is_file():
                    found.append((rel, path))
                continue
            if entry.is_dir(follow_symlinks=False):
                stack.append((path, rel))
            elif entry.is_file(follow_symlinks=False):
                found.append((rel, path))
    found.sort(key=lambda item: item[0])
    return found


def _hash_entry(item: tuple[str, Path]) -> DiscoveredFile | str:
    rel, path = item
    try:
        digest, size = hash_file(path)
    except OSError as exc:
        return f"skipped unreadable file {rel}: {exc.strerror or exc}"
    return DiscoveredFile(rel, size, digest, path)


def discover_files(
    root: str | os.PathLike[str],
    warnings: list[str] | None = None,
    workers: int | None = None,
) -> list[DiscoveredFile]:
    """Enumerate and hash every file under ``root``, sorted by relative path.

    Hidden files are included. Unreadable files are reported in ``warnings``
    and left out of the result.
    """
    warnings = warnings if warnings is not None else []
    paths = walk_paths(root, warnings)
    if workers is None:
        workers = min(8, os.cpu_count() or 1)
    if workers > 1 and len(paths) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hashed = list(pool.map(_hash_entry, paths, chunksize=64))
    else:
        hashed = [_hash_entry(p) for p in paths]

    files: list[DiscoveredFile] = []
    for item in hashed:
        if isinstance(item, str):
            log.warning(item)
            warnings.append(item)
        else:
            files.append(item)
    return files
