"""JSON schemas for CLI outputs and the model / ball files."""

import json
from importlib import resources

NAMES = ("balls", "benchmark", "eval", "granulate", "model", "noise", "predict", "stats",
         "synth", "train", "vtub")


def load(name):
    """Parsed schema for ``name`` (one of ``NAMES``)."""
    if name not in NAMES:
        raise KeyError(f"no schema named {name!r}")
    return json.loads(resources.files(__name__).joinpath(f"{name}.schema.json").read_text())
