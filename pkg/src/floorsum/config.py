"""Process-wide run configuration (memory cap, threads, output format)."""

from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass, replace
from typing import Iterator

from .errors import CapacityError, DomainError

THREADS_ENV = "FLOORSUM_THREADS"
MIN_MEMORY_CAP = 2**24
OUTPUT_FORMATS = ("json", "csv", "plain")


def _default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


@dataclass(frozen=True)
class RunConfig:
    threads: int = 1
    memory_cap_bytes: int = 2**33
    output_format: str = "json"
    segment_size: int = 2**22
    naive_guard: int = 10**9

    def __post_init__(self) -> None:
        if self.threads < 1:
            raise DomainError(f"threads must be >= 1, got {self.threads}")
        if self.memory_cap_bytes < MIN_MEMORY_CAP:
            raise DomainError(f"memory cap must be >= 2^24 bytes, got {self.memory_cap_bytes}")
        if self.output_format not in OUTPUT_FORMATS:
            raise DomainError(f"unknown output format {self.output_format!r}")
        if self.segment_size < 1:
            raise DomainError("segment size must be positive")

    def require_bytes(self, nbytes: int, what: str) -> None:
        if nbytes > self.memory_cap_bytes:
            raise CapacityError(
                f"{what} needs {nbytes} bytes, above the memory cap of {self.memory_cap_bytes}"
            )


_active = RunConfig(threads=_default_threads())


def get_config() -> RunConfig:
    return _active


def set_config(config: RunConfig | None = None, **changes) -> RunConfig:
    """Replace the active configuration; keyword changes apply on top."""
    global _active
    base = config if config is not None else _active
    _active = replace(base, **changes) if changes else base
    return _active


@contextmanager
def configured(**changes) -> Iterator[RunConfig]:
    global _active
    saved = _active
    try:
        yield set_config(**changes)
    finally:
        _active = saved
