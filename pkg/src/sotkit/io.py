"""Shared JSON instance schema and result serialization.

Instance keys: `d`, `X`/`Y` (arrays of {label, coords?}), `mu`/`nu`
(d weight arrays, rationals as "p/q" strings or numbers), optional `eta`
(defaults to the source average) and `cost` (n x m array). Rational
strings parse exactly; numbers are expanded from their decimal literal.

Source points with zero average mass are dropped on parse: they carry no
reference weight and no coverage. Target points are kept even when empty,
because zero-demand destinations are legitimate in unbalanced problems.
"""

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import InputError
from .measures import DiscreteVectorMeasure, ReferenceMeasure, make_support
from .rational import parse_rational, render
from .solver import CostMatrix

SCHEMA = "sot/1"


@dataclass
class Instance:
    mu: DiscreteVectorMeasure
    nu: DiscreteVectorMeasure
    eta: Optional[ReferenceMeasure]
    cost: Optional[CostMatrix]

    def require_cost(self) -> CostMatrix:
        if self.cost is None:
            raise InputError("instance has no cost matrix")
        return self.cost


def load_instance_file(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh, parse_float=parse_rational, parse_int=int)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _points(raw, side):
    if not isinstance(raw, list) or not raw:
        raise InputError(f"{side} must be a nonempty array of points")
    labels, coords = [], []
    for entry in raw:
        if isinstance(entry, dict):
            if "label" not in entry:
                raise InputError(f"{side} point missing label: {entry!r}")
            labels.append(entry["label"])
            coords.append(entry.get("coords"))
        else:
            labels.append(entry)
            coords.append(None)
    if all(c is None for c in coords):
        coords = None
    return make_support(labels, coords)


def parse_instance(data: dict, trim_source: bool = True) -> Instance:
    try:
        d = int(data["d"])
        x_raw, y_raw = data["X"], data["Y"]
        mu_raw, nu_raw = data["mu"], data["nu"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"instance missing or malformed key: {exc}") from exc
    if not (isinstance(mu_raw, list) and len(mu_raw) == d):
        raise InputError("mu must hold exactly d weight arrays")
    if not (isinstance(nu_raw, list) and len(nu_raw) == d):
        raise InputError("nu must hold exactly d weight arrays")
    X = _points(x_raw, "X")
    Y = _points(y_raw, "Y")
    mu = DiscreteVectorMeasure(X, mu_raw)
    nu = DiscreteVectorMeasure(Y, nu_raw)
    eta_raw = data.get("eta")
    cost_raw = data.get("cost")
    if trim_source:
        kept = mu.trim_indices()
        if len(kept) != mu.n:
            mu = mu.trim()
            if eta_raw is not None:
                dropped = set(range(len(eta_raw))) - set(kept)
                if any(parse_rational(eta_raw[i]) != 0 for i in dropped):
                    raise InputError(
                        "reference weight on a zero-mass source point violates absolute continuity"
                    )
                eta_raw = [eta_raw[i] for i in kept]
            if cost_raw is not None:
                cost_raw = [cost_raw[i] for i in kept]
    eta = ReferenceMeasure.from_weights(eta_raw, mu) if eta_raw is not None else None
    cost = None
    if cost_raw is not None:
        cost = CostMatrix(cost_raw)
        if cost.n != mu.n or cost.m != nu.n:
            raise InputError("cost matrix shape does not match supports")
    return Instance(mu, nu, eta, cost)


def ser(value, mode="exact"):
    """Recursively serialize Fractions inside plain containers."""
    if isinstance(value, Fraction):
        return render(value, mode)
    if isinstance(value, (list, tuple)):
        return [ser(v, mode) for v in value]
    if isinstance(value, dict):
        return {k: ser(v, mode) for k, v in value.items()}
    return value


def dumps(payload: dict) -> str:
    """Deterministic rendering: identical payloads give identical bytes."""
    return json.dumps(payload, indent=2, sort_keys=True)
