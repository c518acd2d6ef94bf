"""
Report rendering for every torelli command.

Public API:
    render_report(report, fmt) -> str
        JSON (sorted keys, two-space indent) or an aligned text block.
        The JSON form is a pure function of the report, so identical inputs
        give byte-identical output.

    summary_table(report) -> str
        Fixed-width table of selftest suites.
"""
import json
from typing import Any

from pydantic import BaseModel

from torelli.schemas import SelftestReport

_INDENT: str = "  "


def render_report(report: BaseModel, fmt: str = "json") -> str:
    data = report.model_dump(mode="json", exclude_none=True)
    if fmt == "json":
        return json.dumps(data, sort_keys=True, indent=2)
    return "\n".join(_text_lines(data, 0))


def _is_complex(value: Any) -> bool:
    return isinstance(value, dict) and set(value) == {"re", "im"}


def _scalar(value: Any) -> str:
    if _is_complex(value):
        return f"{value['re']} + {value['im']}i"
    if isinstance(value, bool):
        return "yes" if value else "no"
    return str(value)


def _text_lines(data: dict[str, Any], depth: int) -> list[str]:
    pad = _INDENT * depth
    width = max((len(k) for k in data), default=0)
    lines: list[str] = []
    for key in sorted(data):
        value = data[key]
        if isinstance(value, dict) and not _is_complex(value):
            lines.append(f"{pad}{key}:")
            lines.extend(_text_lines(value, depth + 1))
        elif isinstance(value, list) and value and all(isinstance(v, dict) and not _is_complex(v) for v in value):
            lines.append(f"{pad}{key}:")
            for i, item in enumerate(value, start=1):
                lines.append(f"{pad}{_INDENT}[{i}]")
                lines.extend(_text_lines(item, depth + 2))
        elif isinstance(value, list):
            lines.append(f"{pad}{key:<{width}}  {', '.join(_scalar(v) for v in value)}")
        else:
            lines.append(f"{pad}{key:<{width}}  {_scalar(value)}")
    return lines


def summary_table(report: SelftestReport) -> str:
    header = f"{'Suite':<12} {'Checks':<8} {'Passed':<8} {'Failed':<8} {'First failure'}"
    sep = "-" * len(header)
    lines = [sep, header, sep]
    for suite in report.suites:
        first = next((c for c in suite.checks if not c.passed), None)
        failure = f"{first.name}: {first.detail}" if first else ""
        lines.append(
            f"{suite.name:<12} {len(suite.checks):<8} {suite.passed:<8} {suite.failed:<8} {failure}"
        )
    lines.append(sep)
    total = sum(len(s.checks) for s in report.suites)
    passed = sum(s.passed for s in report.suites)
    lines.append(f"Summary: {passed}/{total} checks passed  |  precision: {report.precision}  |  seed: {report.seed}")
    return "\n".join(lines)
