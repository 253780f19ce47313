"""Country and submarine-cable datasets, plus the adjacency relation used for routing.

The bundled reference files live in ``afronet/data``:

``countries.csv``  ``id,name,sub_region,lat,lon,population,dc_count``
``cables.csv``     ``name,countries`` (semicolon separated ids)
``landings.csv``   ``id,landings`` (published independent-landing counts)
``borders.csv``    ``a,b`` land borders, one undirected edge per row
``maritime.csv``   ``a,b`` declared sea links for island nations
"""

from __future__ import annotations

import csv
import io
import logging
import math
from collections import Counter, deque
from dataclasses import dataclass, field, replace
from importlib import resources
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence, TextIO

from .errors import ParseError, ValidationError

log = logging.getLogger(__name__)

SUB_REGIONS = ("Central", "Eastern", "Northern", "Southern", "Western")
COUNTRY_COLUMNS = ("id", "name", "sub_region", "lat", "lon", "population", "dc_count")


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float

    def __post_init__(self):
        if not (math.isfinite(self.lat) and math.isfinite(self.lon)):
            raise ValidationError(f"non-finite coordinate ({self.lat}, {self.lon})")
        if not -90.0 <= self.lat <= 90.0:
            raise ValidationError(f"latitude {self.lat} outside [-90, 90]")
        if not -180.0 <= self.lon <= 180.0:
            raise ValidationError(f"longitude {self.lon} outside [-180, 180]")


@dataclass(frozen=True)
class Country:
    id: str
    name: str
    sub_region: str
    centroid: GeoPoint
    population: int
    dc_count: int
    landings: int = 0

    def __post_init__(self):
        if not self.id:
            raise ValidationError("empty country id")
        if self.sub_region not in SUB_REGIONS:
            raise ValidationError(f"{self.id}: unknown sub-region {self.sub_region!r}")
        for attr in ("population", "dc_count", "landings"):
            if getattr(self, attr) < 0:
                raise ValidationError(f"{self.id}: negative {attr}")


class CountryDataset(Sequence[Country]):
    """Ordered, immutable collection of countries with unique ids."""

    def __init__(self, countries: Iterable[Country] = ()):
        self._countries = tuple(countries)
        self._index = {}
        for i, c in enumerate(self._countries):
            if c.id in self._index:
                raise ValidationError(f"duplicate country id {c.id!r}")
            self._index[c.id] = i

    def __getitem__(self, item):
        if isinstance(item, str):
            try:
                return self._countries[self._index[item]]
            except KeyError:
                raise KeyError(f"unknown country id {item!r}") from None
        return self._countries[item]

    def __len__(self):
        return len(self._countries)

    def __iter__(self) -> Iterator[Country]:
        return iter(self._countries)

    def __contains__(self, item):
        if isinstance(item, str):
            return item in self._index
        return item in self._countries

    def __repr__(self):
        return f"CountryDataset({len(self)} countries)"

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self._countries)

    def index(self, country_id, *args) -> int:
        return self._index[country_id]

    def subset(self, ids: Iterable[str]) -> "CountryDataset":
        wanted = set(ids)
        return CountryDataset(c for c in self._countries if c.id in wanted)

    def with_landings(self, counts: Mapping[str, int]) -> "CountryDataset":
        """Return a copy whose ``landings`` fields come from ``counts`` (missing ids -> 0)."""
        return CountryDataset(replace(c, landings=int(counts.get(c.id, 0))) for c in self._countries)


@dataclass(frozen=True)
class CableRecord:
    name: str
    countries_touched: tuple[str, ...]
    unknown: tuple[str, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class AdjacencyGraph:
    nodes: frozenset
    edges: frozenset  # of (a, b) tuples with a < b
    mode: str = "borders"

    def __post_init__(self):
        for a, b in self.edges:
            if a == b:
                raise ValidationError(f"self-loop on {a!r}")
            if a not in self.nodes or b not in self.nodes:
                raise ValidationError(f"edge ({a}, {b}) has an endpoint outside the node set")

    def neighbors(self, node: str) -> set[str]:
        out = set()
        for a, b in self.edges:
            if a == node:
                out.add(b)
            elif b == node:
                out.add(a)
        return out

    def adjacency(self) -> dict[str, set[str]]:
        adj = {n: set() for n in self.nodes}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def has_edge(self, a: str, b: str) -> bool:
        return _edge(a, b) in self.edges

    def subgraph(self, nodes: Iterable[str]) -> "AdjacencyGraph":
        keep = frozenset(nodes)
        missing = keep - self.nodes
        if missing:
            raise ValidationError(f"unknown nodes {sorted(missing)}")
        return AdjacencyGraph(keep, frozenset(e for e in self.edges if e[0] in keep and e[1] in keep), self.mode)

    def components(self) -> list[frozenset]:
        adj = self.adjacency()
        seen = set()
        comps = []
        for start in sorted(self.nodes):
            if start in seen:
                continue
            comp = {start}
            queue = deque([start])
            while queue:
                u = queue.popleft()
                for v in adj[u]:
                    if v not in comp:
                        comp.add(v)
                        queue.append(v)
            seen |= comp
            comps.append(frozenset(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def with_edges(self, extra: Iterable[tuple[str, str]]) -> "AdjacencyGraph":
        return AdjacencyGraph(self.nodes, self.edges | {_edge(a, b) for a, b in extra}, self.mode)


def _edge(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a < b else (b, a)


def _reader(source: TextIO, expected: Sequence[str]) -> csv.DictReader:
    reader = csv.DictReader(source, skipinitialspace=True)
    if reader.fieldnames is None:
        return reader
    header = [h.strip() for h in reader.fieldnames]
    if header != list(expected):
        raise ParseError(f"expected header {','.join(expected)!r}, got {','.join(header)!r}", row=1)
    reader.fieldnames = header
    return reader


def load_countries(source: TextIO) -> CountryDataset:
    """Parse a ``countries.csv`` stream. Row numbers in errors count the header as row 1."""
    out = []
    reader = _reader(source, COUNTRY_COLUMNS)
    for rowno, row in enumerate(reader, start=2):
        if None in row or any(row.get(k) is None for k in COUNTRY_COLUMNS):
            raise ParseError("wrong number of fields", row=rowno)
        try:
            lat = float(row["lat"])
            lon = float(row["lon"])
            population = int(row["population"].strip())
            dc_count = int(row["dc_count"].strip())
        except ValueError as exc:
            raise ParseError(str(exc), row=rowno) from None
        try:
            out.append(
                Country(
                    id=row["id"].strip(),
                    name=row["name"].strip(),
                    sub_region=row["sub_region"].strip(),
                    centroid=GeoPoint(lat, lon),
                    population=population,
                    dc_count=dc_count,
                )
            )
        except ValidationError as exc:
            raise ValidationError(f"row {rowno}: {exc}") from None
    return CountryDataset(out)


def dump_countries(dataset: CountryDataset, sink: TextIO) -> None:
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(COUNTRY_COLUMNS)
    for c in dataset:
        writer.writerow(
            [c.id, c.name, c.sub_region, repr(c.centroid.lat), repr(c.centroid.lon), c.population, c.dc_count]
        )


def _split_ids(text: str) -> list[str]:
    return [t.strip() for t in text.split(";") if t.strip()]


def load_cables(source: TextIO, known_ids: Iterable[str] | None = None) -> list[CableRecord]:
    """Parse a ``cables.csv`` stream.

    Ids not in ``known_ids`` (non-African landings, typos) are moved to
    ``CableRecord.unknown`` and logged; they never count as landings.
    """
    known = set(known_ids) if known_ids is not None else None
    records = []
    reader = _reader(source, ("name", "countries"))
    for rowno, row in enumerate(reader, start=2):
        if None in row or row.get("countries") is None or not (row.get("name") or "").strip():
            raise ParseError("expected 2 fields: name,countries", row=rowno)
        touched = _split_ids(row["countries"])
        unknown = ()
        if known is not None:
            unknown = tuple(t for t in touched if t not in known)
            if unknown:
                log.warning("cable %r: ignoring unknown country ids %s", row["name"], unknown)
            touched = [t for t in touched if t in known]
        records.append(CableRecord(row["name"].strip(), tuple(dict.fromkeys(touched)), unknown))
    return records


def landings_per_country(cables: Iterable[CableRecord]) -> dict[str, int]:
    """Number of distinct cable records touching each country."""
    counts = Counter()
    for rec in cables:
        counts.update(set(rec.countries_touched))
    return dict(sorted(counts.items()))


def load_landings(source: TextIO) -> dict[str, int]:
    counts = {}
    for rowno, row in enumerate(_reader(source, ("id", "landings")), start=2):
        try:
            value = int(row["landings"])
        except (TypeError, ValueError):
            raise ParseError(f"bad landing count {row.get('landings')!r}", row=rowno) from None
        if value < 0:
            raise ParseError("negative landing count", row=rowno)
        counts[row["id"].strip()] = value
    return counts


def load_edges(source: TextIO) -> list[tuple[str, str]]:
    edges = []
    for rowno, row in enumerate(_reader(source, ("a", "b")), start=2):
        a, b = (row.get("a") or "").strip(), (row.get("b") or "").strip()
        if not a or not b:
            raise ParseError("expected 2 fields: a,b", row=rowno)
        edges.append((a, b))
    return edges


def build_adjacency(
    dataset: CountryDataset,
    mode: str = "borders",
    maritime_links: Iterable[tuple[str, str]] = (),
    borders: Iterable[tuple[str, str]] | None = None,
) -> AdjacencyGraph:
    """Build the graph of directly linkable country pairs.

    ``borders`` defaults to the bundled land-border table. Border edges whose
    endpoints are not in ``dataset`` are dropped (so subsets work); maritime
    links must resolve.
    """
    nodes = frozenset(dataset.ids)
    if mode == "complete":
        return AdjacencyGraph(nodes, frozenset(_edge(a, b) for a, b in combinations(sorted(nodes), 2)), mode)
    if mode != "borders":
        raise ValidationError(f"unknown adjacency mode {mode!r}")
    if borders is None:
        borders = reference_borders()
    edges = {_edge(a, b) for a, b in borders if a in nodes and b in nodes}
    for a, b in maritime_links:
        if a not in nodes or b not in nodes:
            raise ValidationError(f"maritime link ({a}, {b}) does not resolve against the dataset")
        edges.add(_edge(a, b))
    return AdjacencyGraph(nodes, frozenset(edges), mode)


def _data_text(name: str) -> io.StringIO:
    return io.StringIO(resources.files("afronet.data").joinpath(name).read_text(encoding="utf-8"))


def reference_borders() -> list[tuple[str, str]]:
    return load_edges(_data_text("borders.csv"))


def reference_maritime() -> list[tuple[str, str]]:
    return load_edges(_data_text("maritime.csv"))


def reference_cables() -> list[CableRecord]:
    return load_cables(_data_text("cables.csv"), known_ids=load_countries(_data_text("countries.csv")).ids)


def reference_landings() -> dict[str, int]:
    """Independent landing counts: cable-table counts, overridden by the published per-country figures."""
    counts = landings_per_country(reference_cables())
    counts.update(load_landings(_data_text("landings.csv")))
    return dict(sorted(counts.items()))


def reference_dataset() -> CountryDataset:
    """The bundled 55-country dataset with landing counts attached."""
    return load_countries(_data_text("countries.csv")).with_landings(reference_landings())


def reference_graph(mode: str = "borders", dataset: CountryDataset | None = None) -> AdjacencyGraph:
    dataset = reference_dataset() if dataset is None else dataset
    maritime = [(a, b) for a, b in reference_maritime() if a in dataset and b in dataset]
    return build_adjacency(dataset, mode, maritime)
