"""Reader for the simulator's sweep result CSVs.

Expected schema (one row per setup/scheme/user):
setup, scheme, K, l, k, sinr, se, product_sinr_setup, iters, max_slack
"""

import csv

REQUIRED_FIELDS = ("setup", "scheme", "K", "l", "k", "se")
_INT_FIELDS = ("setup", "K", "l", "k")


class SchemaError(ValueError):
    """CSV does not conform to the sweep result schema."""


def read_result_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [f for f in REQUIRED_FIELDS if f not in header]
        if missing:
            raise SchemaError(f"{path}: missing columns {missing}")
        rows = []
        for i, raw in enumerate(reader):
            try:
                row = {"scheme": raw["scheme"]}
                for f in _INT_FIELDS:
                    row[f] = int(raw[f])
                row["se"] = float(raw["se"])
            except (TypeError, ValueError) as exc:
                raise SchemaError(f"{path}: bad row {i + 2}: {exc}") from exc
            rows.append(row)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def schemes_in(rows: list[dict]) -> list[str]:
    """Schemes in first-appearance order."""
    seen = []
    for row in rows:
        if row["scheme"] not in seen:
            seen.append(row["scheme"])
    return seen
