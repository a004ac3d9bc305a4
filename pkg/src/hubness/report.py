"""JSON run reports.

Every CLI run emits one report object with the keys ``tool``, ``command``,
``parameters``, ``dataset``, ``results`` and ``timings``. Serialization is
canonical (sorted keys, fixed indentation), so two runs on the same input
with the same ``--seed`` differ only inside ``timings``.
"""
from __future__ import annotations

import json
from importlib import resources

from . import __version__

__all__ = ["TOOL_NAME", "make_report", "dumps_report", "strip_timings", "report_schema"]

TOOL_NAME = "hubness"


def make_report(command, parameters, dataset, results, timings) -> dict:
    return {
        "tool": {"name": TOOL_NAME, "version": __version__},
        "command": command,
        "parameters": parameters,
        "dataset": dataset,
        "results": results,
        "timings": timings,
    }


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def strip_timings(report: dict) -> dict:
    """Copy of ``report`` without its run-dependent part."""
    return {k: v for k, v in report.items() if k != "timings"}


def report_schema() -> dict:
    """The JSON Schema (draft 2020-12) that every report validates against."""
    text = resources.files("hubness").joinpath("schemas/report.schema.json").read_text()
    return json.loads(text)
