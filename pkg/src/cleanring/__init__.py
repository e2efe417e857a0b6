"""Exact computations with regular, unit-regular and clean ring elements."""

__version__ = "0.1.0"

from .kernels import available_backends, backend, use_backend  # noqa: E402

__all__ = ["__version__", "available_backends", "backend", "use_backend"]
