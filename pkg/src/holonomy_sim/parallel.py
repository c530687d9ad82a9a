"""Order-preserving parallel map over independent scan points."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor


def default_jobs() -> int:
    env = os.environ.get("HOLONOMY_SIM_JOBS", "").strip()
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def parallel_map(fn, items, jobs: int | None = None, progress=None) -> list:
    """``[fn(x) for x in items]`` evaluated on up to ``jobs`` processes.

    Results come back in input order regardless of completion order, so
    output built from them is identical for any ``jobs``.
    """
    items = list(items)
    jobs = default_jobs() if jobs is None else max(1, int(jobs))
    jobs = min(jobs, len(items)) if items else 1
    if jobs == 1:
        out = []
        for k, x in enumerate(items):
            out.append(fn(x))
            if progress is not None:
                progress(k + 1, len(items))
        return out
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(fn, x) for x in items]
        out = []
        for k, f in enumerate(futures):
            out.append(f.result())
            if progress is not None:
                progress(k + 1, len(items))
        return out
