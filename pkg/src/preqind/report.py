"""Check records and the sample-parallel map shared by report runners."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Any, Callable, Iterable


@dataclass
class Check:
    name: str
    status: str  # "pass" | "fail" | "skip"
    residual_max: float | None = None
    expected: Any = None
    observed: Any = None

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def passed(self) -> bool:
        return self.status != "fail"


def check(name: str, ok: bool, residual_max: float | None = None, expected=None, observed=None) -> Check:
    return Check(name, "pass" if ok else "fail", None if residual_max is None else float(residual_max),
                 expected, observed)


def thread_count() -> int:
    try:
        n = int(os.environ.get("THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def parallel_map(fn: Callable, items: Iterable) -> list:
    """Order-preserving map over independent items; the result does not depend on THREADS."""
    items = list(items)
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
