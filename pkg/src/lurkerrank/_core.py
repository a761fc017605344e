"""Kernel backend selection.

The compiled extension is used when it imports; setting ``LURKERRANK_BACKEND=python``
forces the scipy fallback.
"""
import os

_forced = os.environ.get("LURKERRANK_BACKEND", "").strip().lower()

if _forced == "python":
    from . import _pykernels as kernels
else:
    try:
        from . import _kernels as kernels
    except ImportError:
        if _forced == "cython":
            raise
        from . import _pykernels as kernels

BACKEND = kernels.BACKEND

_threads = None


def get_threads():
    global _threads
    if _threads is None:
        env = os.environ.get("LURKERRANK_THREADS")
        _threads = int(env) if env else (os.cpu_count() or 1)
    return _threads


def set_threads(n):
    global _threads
    if n is not None and int(n) < 1:
        raise ValueError("thread count must be >= 1")
    _threads = None if n is None else int(n)
