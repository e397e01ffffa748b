"""Deterministic CSV/JSON emission.

CSV layout: ``# key=value`` comment lines recording the run configuration,
one header row, data rows, and for some commands a final
``# footer: {json}`` line. Floats are written with 17 significant digits,
enough to round-trip any IEEE double exactly.
"""

import io
import json

FOOTER_PREFIX = "# footer: "


def format_value(v):
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def parse_value(text):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def render_csv(columns, rows, config=None, footer=None):
    out = io.StringIO()
    for key in sorted(config or {}):
        out.write(f"# {key}={config[key]}\n")
    out.write(",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(format_value(v) for v in row) + "\n")
    if footer is not None:
        out.write(FOOTER_PREFIX + json.dumps(footer, sort_keys=True) + "\n")
    return out.getvalue()


def render_json(columns, rows, config=None, footer=None):
    doc = {"config": config or {}, "columns": list(columns), "rows": [list(r) for r in rows]}
    if footer is not None:
        doc["footer"] = footer
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def parse_csv(text):
    """Inverse of :func:`render_csv`: ``(config, columns, rows, footer)``."""
    config, rows, footer, columns = {}, [], None, None
    for line in text.splitlines():
        if line.startswith(FOOTER_PREFIX):
            footer = json.loads(line[len(FOOTER_PREFIX):])
        elif line.startswith("# "):
            key, _, value = line[2:].partition("=")
            config[key] = value
        elif columns is None:
            columns = line.split(",")
        elif line:
            rows.append([parse_value(t) for t in line.split(",")])
    return config, columns, rows, footer
