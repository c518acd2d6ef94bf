"""
Two-stage loading of JSON inputs (files or inline text).

Stage 1: json.loads() → Pydantic validation
Stage 2: json_repair.repair_json() → Pydantic validation
Anything else raises InputFormatError with the raw text preserved.

[WARN] is always logged to stderr when stage 2 is needed: a repaired file is
a hand-editing mistake the user should hear about.
"""
import json
import re
import sys
from pathlib import Path
from typing import Any, TypeVar

import json_repair
from mpmath import mp
from pydantic import BaseModel, ValidationError

from torelli.errors import InputFormatError
from torelli.theta import GUARD_BITS

T = TypeVar("T", bound=BaseModel)

_NUMBER = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX = re.compile(
    rf"^(?P<re>[+-]?{_NUMBER})?(?:(?P<sign>[+-])?(?P<im>{_NUMBER})?(?P<unit>[ij]))?$"
)


def read_source(source: str | Path) -> str:
    """Contents of `source` when it names an existing file, else `source` itself."""
    text = str(source)
    if "\n" not in text and len(text) < 4096:
        path = Path(text)
        if path.is_file():
            return path.read_text(encoding="utf-8")
    return text


def load_payload(source: str | Path, schema: type[T]) -> T:
    raw = read_source(source)

    result = _try_parse(raw, schema)
    if result is not None:
        return result

    try:
        repaired = json_repair.repair_json(raw)
        result = _try_parse(repaired, schema)
        if result is not None:
            print(f"[WARN] input for {schema.__name__} was malformed JSON and has been repaired", file=sys.stderr)
            return result
    except Exception:
        # json_repair can raise on extreme inputs
        pass

    raise InputFormatError(
        f"could not read {schema.__name__}: {_get_failure_reason(raw, schema)}",
        raw_input=raw,
    )


def _try_parse(raw: str, schema: type[T]) -> T | None:
    """json.loads + validation; None on any failure. Never raises."""
    try:
        data = json.loads(raw)
        return schema.model_validate(data)
    except Exception:
        return None


def _get_failure_reason(raw: str, schema: type[BaseModel]) -> str:
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        return f"Invalid JSON: {exc}"

    try:
        schema.model_validate(data)
        return "Unknown validation error"
    except ValidationError as exc:
        errors = exc.errors()
        if errors:
            first = errors[0]
            loc = " -> ".join(str(p) for p in first["loc"])
            return f"Validation error on '{loc}': {first['msg']}"
        return "Pydantic validation failed with no details"


# ---------------------------------------------------------------------------
# Inline complex numbers
# ---------------------------------------------------------------------------

def parse_complex(text: str, precision: int = 256) -> Any:
    """'0.8i', '1+2i', '-0.5+1.1i', '2', 'i' (j is accepted for i)."""
    compact = text.replace(" ", "")
    match = _COMPLEX.match(compact)
    if not compact or match is None or (match.group("sign") and not match.group("unit")):
        raise InputFormatError(f"not a complex number: {text!r}", raw_input=text)
    with mp.workprec(precision + GUARD_BITS):
        real = mp.mpf(match.group("re")) if match.group("re") else mp.mpf(0)
        imag = mp.mpf(0)
        if match.group("unit"):
            imag = mp.mpf(match.group("im")) if match.group("im") else mp.mpf(1)
            if match.group("sign") == "-":
                imag = -imag
            if match.group("re") and not match.group("sign") and match.group("im") is None:
                # "2i": the regex read the digits as the real part
                imag, real = real, mp.mpf(0)
            elif match.group("re") and not match.group("sign"):
                raise InputFormatError(f"not a complex number: {text!r}", raw_input=text)
        return mp.mpc(real, imag)


def parse_tau_list(text: str, precision: int = 256) -> list[Any]:
    """Comma-separated complex numbers, e.g. '0.8i,1.1i,1.3i'."""
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise InputFormatError("no tau values given", raw_input=text)
    return [parse_complex(p, precision) for p in parts]
