"""Named coefficient sets for the estimation formulas.

Each estimator kind owns a fixed set of coefficient names. The shipped
default registry carries the published constants exactly as printed
(decimal strings, parsed to working precision on use); a refit registry
produced by the fitting pipelines can be swapped in through the same
JSON format:

    {"kind": "rh1", "provenance": "paper",
     "coefficients": {"a1": "-0.02651010067", ...}}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from importlib import resources

from mpmath import mpf

from .errors import ConfigError
from .precision import real


class EstimatorKind(str, Enum):
    RH = "rh"
    RH1 = "rh1"
    RH2 = "rh2"
    RD3 = "rd3"
    F3 = "f3"
    RH3 = "rh3"
    RH4 = "rh4"
    RH0 = "rh0"


# Coefficient names each kind must carry, in canonical order.
COEFFICIENT_NAMES: dict[EstimatorKind, tuple[str, ...]] = {
    EstimatorKind.RH: (),
    EstimatorKind.RH1: ("a1", "b1", "c1"),
    EstimatorKind.RH2: ("a2", "b2", "c2"),
    EstimatorKind.RD3: ("a3", "b3"),
    EstimatorKind.F3: ("a1", "b1", "c1", "d1"),
    EstimatorKind.RH3: ("t0", "a2", "b2", "c2", "d2"),
    EstimatorKind.RH4: ("a3", "b3", "c3", "d3"),
    EstimatorKind.RH0: ("odd_a", "odd_c", "odd_b", "even_a", "even_c", "even_b"),
}


@dataclass(frozen=True)
class CoefficientSet:
    kind: EstimatorKind
    values: dict[str, mpf]
    provenance: str = "paper"

    def __post_init__(self):
        expected = COEFFICIENT_NAMES[self.kind]
        got = tuple(sorted(self.values))
        if got != tuple(sorted(expected)):
            raise ConfigError(
                f"{self.kind.value} needs coefficients {expected}, got {got}"
            )

    def __getitem__(self, name: str) -> mpf:
        return self.values[name]


Registry = dict[EstimatorKind, CoefficientSet]


def _coeff_set(kind: EstimatorKind, provenance: str, **decimal_strings) -> CoefficientSet:
    values = {name: real(s) for name, s in decimal_strings.items()}
    return CoefficientSet(kind=kind, values=values, provenance=provenance)


def registry_from_dicts(entries, provenance_default: str = "refit") -> Registry:
    """Build a registry from parsed JSON entries."""
    registry: Registry = {}
    for entry in entries:
        try:
            kind = EstimatorKind(entry["kind"])
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad registry entry: {entry!r}") from exc
        provenance = entry.get("provenance", provenance_default)
        coeffs = entry.get("coefficients", {})
        registry[kind] = _coeff_set(kind, provenance, **coeffs)
    return registry


def load_registry(path) -> Registry:
    """Read a coefficient registry JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return registry_from_dicts(doc["estimators"])


def save_registry(registry: Registry, path, digits: int = 30) -> None:
    """Write a registry in the interchange format (decimal strings)."""
    from mpmath import mp

    entries = []
    for kind in EstimatorKind:
        if kind not in registry:
            continue
        cs = registry[kind]
        entries.append(
            {
                "kind": kind.value,
                "provenance": cs.provenance,
                "coefficients": {
                    name: mp.nstr(cs.values[name], digits)
                    for name in COEFFICIENT_NAMES[kind]
                },
            }
        )
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"estimators": entries}, fh, indent=2)
        fh.write("\n")


def paper_registry() -> Registry:
    """The shipped registry: published constants, verbatim."""
    with resources.files("partnum.data").joinpath("paper_coefficients.json").open(
        "r", encoding="utf-8"
    ) as fh:
        doc = json.load(fh)
    return registry_from_dicts(doc["estimators"], provenance_default="paper")
