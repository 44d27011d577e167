"""L2 torsion, Fuglede-Kadison determinants and L2 Betti numbers.

Documents may be given as dicts/lists, JSON text, file paths, or
``"fixture:<name>"`` strings. Every pipeline returns the report envelope
``{"format_version", "kind", "result"}`` as a dict.
"""

from __future__ import annotations

import json
import os
from typing import Any, Optional, Sequence

from . import _core
from ._core import (
    L2TError,
    MathematicalRefusal,
    ValidationError,
    fk_det_blocks,
    format_version,
    mahler_measure,
)

__all__ = [
    "L2TError",
    "MathematicalRefusal",
    "ValidationError",
    "betti",
    "classcheck",
    "det",
    "fixture_suite",
    "fk_det_blocks",
    "format_version",
    "invariance",
    "mahler_measure",
    "run",
    "torsion",
    "zeta",
]


def _text(doc: Any) -> str:
    if isinstance(doc, (dict, list)):
        return json.dumps(doc)
    if isinstance(doc, os.PathLike):
        return _core.load_document(os.fspath(doc))
    if isinstance(doc, str):
        if doc.startswith("fixture:"):
            return json.dumps(doc)
        if doc.lstrip().startswith(("{", "[")):
            return doc
        return _core.load_document(doc)
    raise TypeError(f"cannot use {type(doc).__name__} as a document")


def run(
    name: str,
    documents: Sequence[Any],
    *,
    method: str = "spectral",
    grid: int = 0,
    kernel_tol: float = 0.0,
    convention: str = "",
) -> dict:
    """Runs one of det, betti, torsion, invariance, zeta, classcheck."""
    texts = [_text(d) for d in documents]
    return json.loads(_core.run(name, texts, method, grid, kernel_tol, convention))


def det(module: Any, operator: Any = None, **options: Any) -> dict:
    """FK determinant of an operator over a module, or of a symbol alone."""
    docs = [module] if operator is None else [module, operator]
    return run("det", docs, **options)


def _with_rep(complex_doc: Any, representation: Optional[Any]) -> list:
    return [complex_doc] if representation is None else [complex_doc, representation]


def betti(complex_doc: Any, representation: Optional[Any] = None, **options: Any) -> dict:
    return run("betti", _with_rep(complex_doc, representation), **options)


def torsion(complex_doc: Any, representation: Optional[Any] = None, **options: Any) -> dict:
    return run("torsion", _with_rep(complex_doc, representation), **options)


def zeta(complex_doc: Any, representation: Optional[Any] = None, **options: Any) -> dict:
    return run("zeta", _with_rep(complex_doc, representation), **options)


def classcheck(complex_doc: Any, representation: Optional[Any] = None, **options: Any) -> dict:
    return run("classcheck", _with_rep(complex_doc, representation), **options)


def invariance(cell_complex: Any, representation: Any, subdivision: Optional[Any] = None, **options: Any) -> dict:
    docs = [cell_complex, representation] + ([] if subdivision is None else [subdivision])
    return run("invariance", docs, **options)


def fixture_suite(grid: int = 0) -> dict:
    return json.loads(_core.fixture_suite(grid))
