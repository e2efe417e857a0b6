"""Backend selection for the hot kernels.

The compiled extension ``cleanring._kernels`` is used when importable;
otherwise the pure-Python module ``cleanring._kernels_py`` is used.  Both
expose identical functions, so callers simply go through this module.
"""
from __future__ import annotations

import importlib
from types import ModuleType

from . import _kernels_py

_FUNCTIONS = ("rref_modp", "matmul_table", "inner_inverses", "right_ideal", "idempotents", "units",
              "monomial_nf")


def _load_compiled() -> ModuleType | None:
    try:
        return importlib.import_module("cleanring._kernels")
    except ImportError:
        return None


_compiled = _load_compiled()
_active: ModuleType = _compiled or _kernels_py


def available_backends() -> list[str]:
    return (["cython"] if _compiled is not None else []) + ["python"]


def backend() -> str:
    return _active.BACKEND


def use_backend(name: str) -> None:
    """Switch between ``'cython'`` and ``'python'`` at runtime."""
    global _active
    if name == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built; run `pip install -e .`")
        _active = _compiled
    elif name == "python":
        _active = _kernels_py
    else:
        raise ValueError(f"unknown backend {name!r}")


def get_backend(name: str) -> ModuleType:
    if name == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        return _compiled
    if name == "python":
        return _kernels_py
    raise ValueError(f"unknown backend {name!r}")


def rref_modp(rows, p):
    return _active.rref_modp(rows, p)


def matmul_table(n, p):
    return _active.matmul_table(n, p)


def inner_inverses(table, N, a):
    return _active.inner_inverses(table, N, a)


def right_ideal(table, N, a):
    return _active.right_ideal(table, N, a)


def idempotents(table, N):
    return _active.idempotents(table, N)


def units(table, N, one):
    return _active.units(table, N, one)


def monomial_nf(word, lhs, rhs, rank):
    # the compiled signature wants tuples; tuple() of a tuple is free
    return _active.monomial_nf(bytes(word), tuple(lhs), tuple(rhs), tuple(rank))
