"""Population files: durable, human-readable key:value storage.

Format "capop/1" is a JSON document.  Each individual maps every 9-character
binary key "000000000".."111111111" to its 0/1 rule state; the key read as a
binary number (most significant bit first) is the neighborhood code, i.e.
key "100010001" is rule-table entry 273.  A metadata block records the
format version, RNG seed, generation counter, grid dimensions of record, and
an echo of the evolution config, which is what makes runs resumable and
reproducible.

Serialization is canonical: keys ascend, field order is fixed, and files are
written atomically (temp file + rename), so two saves of the same population
are byte-identical.
"""

from __future__ import annotations

import dataclasses
import json
import os
import tempfile
from typing import NamedTuple

import numpy as np

from .ca import RuleTable, TABLE_SIZE
from .fitness import FitnessValue
from .ga import EvolutionConfig, Individual, Population

FORMAT_VERSION = "capop/1"

_KEYS = [format(code, "09b") for code in range(TABLE_SIZE)]
_KEY_SET = frozenset(_KEYS)


class PopulationFormatError(ValueError):
    """Raised for structurally invalid population files."""


class LoadedPopulation(NamedTuple):
    population: Population
    config: EvolutionConfig | None
    width: int | None
    height: int | None


def _individual_doc(ind: Individual) -> dict:
    doc: dict = {}
    if ind.fitness is not None:
        doc["fitness"] = {
            "distance": ind.fitness.distance,
            "normalized": ind.fitness.normalized,
        }
    entries = ind.genome.entries
    doc["rules"] = {key: int(entries[code]) for code, key in enumerate(_KEYS)}
    return doc


def save_population(
    pop: Population,
    config: EvolutionConfig | None,
    path,
    *,
    width: int | None = None,
    height: int | None = None,
) -> None:
    """Write the population atomically in canonical capop/1 form."""
    doc = {
        "format": FORMAT_VERSION,
        "seed": pop.seed,
        "generation": pop.generation,
        "width": width,
        "height": height,
        "config": None if config is None else dataclasses.asdict(config),
        "individuals": [_individual_doc(ind) for ind in pop.members],
    }
    text = json.dumps(doc, indent=2) + "\n"
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".capop-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _reject_duplicate_keys(pairs):
    seen = set()
    out = {}
    for key, value in pairs:
        if key in seen:
            raise PopulationFormatError(f"duplicate key {key!r}")
        seen.add(key)
        out[key] = value
    return out


def _parse_individual(doc: dict, position: int) -> Individual:
    where = f"individual {position}"
    if not isinstance(doc, dict) or "rules" not in doc:
        raise PopulationFormatError(f"{where}: missing 'rules' object")
    rules = doc["rules"]
    if not isinstance(rules, dict):
        raise PopulationFormatError(f"{where}: 'rules' must be an object")

    unknown = sorted(set(rules) - _KEY_SET)
    if unknown:
        sample = unknown[0]
        hint = ""
        if len(sample) == 8 and set(sample) <= {"0", "1"}:
            hint = " (keys must be 9 bits: a 3x3 window encodes to 9 binary digits)"
        raise PopulationFormatError(f"{where}: invalid rule key {sample!r}{hint}")
    missing = sorted(_KEY_SET - set(rules))
    if missing:
        shown = ", ".join(repr(k) for k in missing[:5])
        more = "" if len(missing) <= 5 else f" and {len(missing) - 5} more"
        raise PopulationFormatError(f"{where}: missing rule keys {shown}{more}")

    entries = np.zeros(TABLE_SIZE, dtype=np.uint8)
    for key, value in rules.items():
        if value is True or value is False or value not in (0, 1):
            raise PopulationFormatError(
                f"{where}: rule {key!r} has non-binary value {value!r}"
            )
        entries[int(key, 2)] = value

    fitness = None
    if doc.get("fitness") is not None:
        fd = doc["fitness"]
        try:
            fitness = FitnessValue(int(fd["distance"]), float(fd["normalized"]))
        except (TypeError, KeyError, ValueError) as exc:
            raise PopulationFormatError(f"{where}: malformed fitness block") from exc
    return Individual(RuleTable(entries), fitness)


def load_population(path) -> LoadedPopulation:
    """Read a capop/1 file back into a population.

    Cached fitness values are loaded as hints only; anything that consumes
    them for real work should re-verify against the images of record.
    """
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh, object_pairs_hook=_reject_duplicate_keys)
        except json.JSONDecodeError as exc:
            raise PopulationFormatError(f"not a valid JSON document: {exc}") from exc

    if not isinstance(doc, dict):
        raise PopulationFormatError("top level must be an object")
    version = doc.get("format")
    if version != FORMAT_VERSION:
        raise PopulationFormatError(
            f"version mismatch: expected {FORMAT_VERSION!r}, found {version!r}"
        )
    individuals = doc.get("individuals")
    if not isinstance(individuals, list) or not individuals:
        raise PopulationFormatError("'individuals' must be a non-empty list")

    members = [_parse_individual(d, i) for i, d in enumerate(individuals)]
    config = None
    if doc.get("config") is not None:
        try:
            config = EvolutionConfig(**doc["config"])
        except (TypeError, ValueError) as exc:
            raise PopulationFormatError(f"malformed config echo: {exc}") from exc
    population = Population(
        members,
        generation=int(doc.get("generation", 0)),
        seed=int(doc.get("seed", 0)),
    )
    width = doc.get("width")
    height = doc.get("height")
    return LoadedPopulation(
        population,
        config,
        None if width is None else int(width),
        None if height is None else int(height),
    )
