"""On-disk cache of flat ancestor polynomials, keyed by (genus_max, chi_max).

The directory comes from ``CATALAN_FROBENIUS_CACHE`` unless given explicitly.
Files are JSON with exact-rational strings, so a cached run produces the same
reports as a fresh one.
"""

from __future__ import annotations

import json
import os
from fractions import Fraction
from pathlib import Path

from .givental import DescendentPotential
from .scalars import Rational

CACHE_ENV = "CATALAN_FROBENIUS_CACHE"
_FORMAT = 1


def cache_dir(explicit: str | os.PathLike | None = None) -> Path | None:
    raw = explicit if explicit is not None else os.environ.get(CACHE_ENV)
    if not raw:
        return None
    path = Path(raw)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _file(directory: Path, genus_max: int, chi_max: int) -> Path:
    return directory / f"flat_ancestor_g{genus_max}_chi{chi_max}.json"


def load_potential(genus_max: int, chi_max: int, psi: Rational | None,
                   directory: str | os.PathLike | None = None) -> DescendentPotential:
    """DescendentPotential whose flat ancestor is read from, or written to, the cache."""
    D = DescendentPotential(genus_max, chi_max, psi)
    where = cache_dir(directory)
    if where is None:
        return D
    path = _file(where, genus_max, chi_max)
    if path.exists():
        data = json.loads(path.read_text())
        if data.get("format") == _FORMAT:
            D.__dict__["flat"] = {(g, tuple(mono)): Fraction(c) for g, mono, c in data["terms"]}
            return D
    rows = sorted([g, list(mono), str(c)] for (g, mono), c in D.flat.items())
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps({"format": _FORMAT, "genus_max": genus_max, "chi_max": chi_max, "terms": rows}))
    tmp.replace(path)
    return D
