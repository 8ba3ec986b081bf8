"""Shared helpers: dataclass configs exposed as command-line flags."""

from __future__ import annotations

import argparse
import dataclasses
import json
from pathlib import Path

from jetcalc.exactla import GF, QQ


def parse_config(cls, description: str | None = None):
    """Build ``cls`` from defaults, overridden by ``--field-name value`` flags.

    Tuple fields take comma-separated values.
    """
    parser = argparse.ArgumentParser(description=description)
    for f in dataclasses.fields(cls):
        default = f.default if f.default is not dataclasses.MISSING else f.default_factory()
        flag = "--" + f.name.replace("_", "-")
        if isinstance(default, bool):
            parser.add_argument(flag, action=argparse.BooleanOptionalAction, default=default)
        elif isinstance(default, tuple):
            parser.add_argument(flag, default=",".join(map(str, default)))
        else:
            parser.add_argument(flag, type=type(default) if default is not None else str,
                                default=default)
    ns = vars(parser.parse_args())
    kwargs = {}
    for f in dataclasses.fields(cls):
        val = ns[f.name]
        default = f.default if f.default is not dataclasses.MISSING else f.default_factory()
        if isinstance(default, tuple) and isinstance(val, str):
            conv = type(default[0]) if default else str
            val = tuple(conv(v) for v in val.split(",") if v)
        kwargs[f.name] = val
    return cls(**kwargs)


def field_of(tag: str):
    if tag.upper() in ("Q", "QQ"):
        return QQ
    return GF(int(tag.split(":")[-1]))


def print_table(header: list[str], rows: list[list]) -> None:
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    print(fmt.format(*header))
    print(fmt.format(*("-" * w for w in widths)))
    for r in rows:
        print(fmt.format(*map(str, r)))


def save_json(path: str, doc) -> None:
    if path:
        Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        print(f"wrote {path}")
