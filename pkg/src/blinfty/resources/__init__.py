# -*- coding: utf-8 -*-
"""
Model files shipped with the package
"""
from __future__ import annotations

from importlib.resources import files

__all__ = ["model_text", "shipped_models"]

SUFFIX = ".model"


def shipped_models() -> list[str]:
    """Names of all shipped models, sorted"""
    return sorted(
        entry.name[: -len(SUFFIX)]
        for entry in files(__name__).iterdir()
        if entry.name.endswith(SUFFIX)
    )


def model_text(name: str) -> str:
    """
    Reads a shipped model.

    :param name: Model name with or without the ``.model`` suffix.
    :raises FileNotFoundError: if no such model is shipped.
    """
    filename = name if name.endswith(SUFFIX) else name + SUFFIX
    resource = files(__name__) / filename
    if not resource.is_file():
        raise FileNotFoundError(f"no model file or shipped model named '{name}'")
    return resource.read_text(encoding="utf-8")
