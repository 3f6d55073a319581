"""Packaged seed data: published table rows, derived count data, fixtures.

Three tiers, tagged per entry:

* published presentation strings (with the twist parameter d symbolic),
* derived base counts (GW / Welschinger numbers inverted from the rows),
* fixtures (clearly tagged values that only exercise engine mechanics).

The data directory can be overridden with the GWENUM_DATA_DIR environment
variable; files are plain JSON.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from .fields import BaseField
from .gw import GWElement, parse_gw
from .wallcross import InvariantTable, blowup_general, quadric_general


def data_dir() -> Path:
    override = os.environ.get("GWENUM_DATA_DIR")
    if override:
        return Path(override)
    return Path(__file__).parent / "data"


def load_json(name: str) -> dict:
    with open(data_dir() / name, encoding="utf-8") as fh:
        return json.load(fh)


def quadric_rows() -> list[dict]:
    return load_json("quadric_invariants.json")["rows"]


def blowup_rows() -> list[dict]:
    return load_json("blowup_invariants.json")["rows"]


def quadric_row_value(field: BaseField, row: dict, d) -> GWElement:
    c = row["counts"]
    return quadric_general(field, c["gw"], c["w_plus"], c["w_minus"], d)


def blowup_row_value(field: BaseField, row: dict, d) -> GWElement:
    c = row["counts"]
    return blowup_general(field, c["gw"], c["w_real"], c["w_conj"], d)


def row_presentations(field: BaseField, row: dict, d) -> list[GWElement]:
    return [parse_gw(s, field, d=d) for s in row["presentations"]]


def load_table(name: str) -> InvariantTable:
    return InvariantTable.from_json(load_json(name))


def quadric_base_table() -> InvariantTable:
    """Split-constraint values on the untwisted quadric, bidegrees a+b <= 6."""
    return load_table("quadric_q1_base.json")


def welschinger_table() -> InvariantTable:
    """Plane / one-point blow-up entries feeding the point-trade reduction."""
    return load_table("blowup1_point_trade.json")


def cubic_dehn_table() -> InvariantTable:
    """Six-points-on-a-conic model entries for the Dehn reflection chain."""
    return load_table("cubic_dehn.json")


def blowup2_dehn_table() -> InvariantTable:
    """Two-point blow-up entries with reflection-symmetric classes."""
    return load_table("blowup2_dehn.json")
