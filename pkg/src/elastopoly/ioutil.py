"""Small serialization helpers shared by the report writers and the CLI."""

from __future__ import annotations


def fmt17(x: float) -> str:
    """Format a float with 17 significant digits (round-trip exact)."""
    return f"{float(x):.17g}"


def json_dumps(obj) -> str:
    """Serialize nested dict/list/scalar data to JSON with 17-digit floats.

    The standard json module offers no hook for float formatting, so this is
    a tiny recursive writer.  Dict keys must be strings; insertion order is
    preserved, which keeps output byte-identical across runs.
    """
    out: list[str] = []
    _write(obj, out)
    return "".join(out)


def _write(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_json_float(obj))
    elif isinstance(obj, str):
        out.append(_json_str(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for n, (key, value) in enumerate(obj.items()):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {key!r}")
            if n:
                out.append(", ")
            out.append(_json_str(key))
            out.append(": ")
            _write(value, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for n, value in enumerate(obj):
            if n:
                out.append(", ")
            _write(value, out)
        out.append("]")
    else:
        try:
            _write(obj.item(), out)  # numpy scalars
        except AttributeError:
            raise TypeError(f"cannot serialize {type(obj).__name__} to JSON") from None


def _json_float(x: float) -> str:
    if x != x:
        return '"nan"'
    if x == float("inf"):
        return '"inf"'
    if x == float("-inf"):
        return '"-inf"'
    return fmt17(x)


def _json_str(s: str) -> str:
    escaped = s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{escaped}"'
