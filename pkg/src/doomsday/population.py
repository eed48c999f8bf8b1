"""Empirical group-population tables: median group versus median individual.

Real tables of named groups (countries, cities) make the gap between the
two medians concrete: the middle group by count is far smaller than the
group of the middle individual whenever sizes vary, and the share of
individuals living between those benchmarks is what a claim of total
neutrality would force to zero.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .errors import TableFormatError

__all__ = [
    "PopulationTable",
    "load_table",
    "bundled_country_table",
    "empirical_medians",
    "fraction_between",
    "neutrality_report",
]

BUNDLED_COUNTRY_FILE = "country_populations_2016.csv"


@dataclass(frozen=True)
class PopulationTable:
    """Ordered list of (name, population) rows with a positive total."""

    names: tuple[str, ...]
    populations: tuple[int, ...]

    def __post_init__(self):
        if len(self.names) != len(self.populations):
            raise ValueError("names and populations must align")
        if len(self.names) == 0:
            raise ValueError("a table needs at least one entry")
        if any(p < 0 for p in self.populations):
            raise ValueError("populations must be nonnegative")
        if sum(self.populations) <= 0:
            raise ValueError("total population must be positive")

    def __len__(self):
        return len(self.names)

    @property
    def total(self) -> int:
        return sum(self.populations)


def load_table(source) -> PopulationTable:
    """Read a `name,population` CSV; '#' lines are comments.

    ``source`` may be a path or an open text stream. Malformed rows are
    collected and reported together with their 1-based line numbers.
    """
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source.read()

    names, populations, problems = [], [], []
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            row = next(csv.reader(io.StringIO(line)))
        except csv.Error as exc:
            problems.append((lineno, str(exc)))
            continue
        if not header_seen:
            if [c.strip().lower() for c in row] != ["name", "population"]:
                raise TableFormatError(
                    f"line {lineno}: expected header 'name,population', got {line!r}",
                    lines=[lineno],
                )
            header_seen = True
            continue
        if len(row) != 2:
            problems.append((lineno, f"expected 2 columns, got {len(row)}"))
            continue
        name, pop_text = row[0].strip(), row[1].strip()
        if not name:
            problems.append((lineno, "empty name"))
            continue
        try:
            population = int(pop_text)
        except ValueError:
            problems.append((lineno, f"population {pop_text!r} is not an integer"))
            continue
        if population < 0:
            problems.append((lineno, f"population {population} is negative"))
            continue
        names.append(name)
        populations.append(population)

    if problems:
        detail = "; ".join(f"line {n}: {msg}" for n, msg in problems)
        raise TableFormatError(
            f"{len(problems)} malformed row(s): {detail}",
            lines=[n for n, _ in problems],
        )
    if not header_seen:
        raise TableFormatError("no header line found", lines=[])
    if not names:
        raise TableFormatError("table holds no data rows", lines=[])
    return PopulationTable(names=tuple(names), populations=tuple(populations))


def bundled_country_table() -> PopulationTable:
    """The frozen mid-2016 country snapshot shipped with the package."""
    ref = resources.files("doomsday").joinpath("data", BUNDLED_COUNTRY_FILE)
    with ref.open("r", encoding="utf-8") as fh:
        return load_table(fh)


def empirical_medians(table) -> dict:
    """Median group size and the median individual's group size.

    The median group is the middle entry when groups are ranked by size
    (lower median for even counts). The median individual's group is the
    smallest size P such that groups of size <= P hold at least half of
    all individuals.
    """
    ranked = sorted(table.populations)
    m_group = ranked[(len(ranked) - 1) // 2]
    total = table.total
    running = 0
    m_individual = ranked[-1]
    for pop in ranked:
        running += pop
        if 2 * running >= total:
            m_individual = pop
            break
    return {"m_group": m_group, "m_individual": m_individual}


def fraction_between(table, low, high) -> Fraction:
    """Share of individuals in groups with low < population <= high.

    Exact ratio of integer population sums.
    """
    if not low < high:
        raise ValueError("need low < high")
    selected = sum(p for p in table.populations if low < p <= high)
    return Fraction(selected, table.total)


def neutrality_report(table) -> dict:
    """Individual-perspective shares of the three benchmark bins.

    Bins: at or below the median group, strictly between the two medians,
    and above the median individual's group. The shares are exact and sum
    to one; the central share vanishes only when all groups are equal.
    """
    medians = empirical_medians(table)
    m_g, m_i = medians["m_group"], medians["m_individual"]
    below = Fraction(sum(p for p in table.populations if p <= m_g), table.total)
    central = fraction_between(table, m_g, m_i) if m_g < m_i else Fraction(0)
    above = Fraction(sum(p for p in table.populations if p > m_i), table.total)
    return {
        "m_group": m_g,
        "m_individual": m_i,
        "below": below,
        "central": central,
        "above": above,
    }
