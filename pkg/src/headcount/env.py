"""Domain model of a sensorized environment.

An environment is a list of features of interest (FoIs): real-world elements
(a couch, a bed, the presence field of a room) whose binary sensors report
active or idle. Each FoI carries an arity ``[min, max]``, the number of
persons that can activate it at once; ``max`` may be unbounded (written
``inf``) and is capped at ``omega``, the bound on simultaneous occupants,
for all computation. A co-activation graph connects FoIs that a single
person can activate at the same time. Exactly one FoI is the entry point
through which persons enter and leave one at a time.

Environment config format (line oriented, ``#`` starts a comment)::

    omega <int>
    foi <id> <min> <max|inf> [entry]
    edge <id> <id>

Dataset format: one record per tick, whitespace separated, one ``0``/``1``
field per FoI in declaration order, optionally followed by an integer
ground-truth person count.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import ConfigError, DatasetError


@dataclass(frozen=True)
class Arity:
    """Declared person interval of a FoI. ``max_count=None`` means unbounded."""

    min_count: int
    max_count: int | None

    def __post_init__(self) -> None:
        if self.min_count < 1:
            raise ValueError("arity minimum must be at least 1")
        if self.max_count is not None and self.max_count < self.min_count:
            raise ValueError("arity maximum is below its minimum")


@dataclass(frozen=True)
class FoI:
    id: str
    arity: Arity
    is_entry: bool = False


@dataclass(frozen=True)
class CoActivationGraph:
    """Undirected graph over FoI ids; an edge means one person can activate both."""

    nodes: frozenset[str]
    edges: frozenset[tuple[str, str]]  # each pair stored sorted

    def neighbors(self, foi_id: str) -> frozenset[str]:
        if foi_id not in self.nodes:
            raise KeyError(f"unknown FoI id {foi_id!r}")
        out = set()
        for a, b in self.edges:
            if a == foi_id:
                out.add(b)
            elif b == foi_id:
                out.add(a)
        return frozenset(out)

    def has_edge(self, a: str, b: str) -> bool:
        return tuple(sorted((a, b))) in self.edges


def neighbors(cg: CoActivationGraph, foi_id: str) -> frozenset[str]:
    return cg.neighbors(foi_id)


@dataclass(frozen=True)
class EnvironmentModel:
    fois: tuple[FoI, ...]
    cg: CoActivationGraph
    omega: int

    def __post_init__(self) -> None:
        if self.omega < 1:
            raise ValueError("omega must be at least 1")
        entries = [f for f in self.fois if f.is_entry]
        if len(entries) != 1:
            raise ValueError("environment needs exactly one entry FoI")

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(f.id for f in self.fois)

    @property
    def entry(self) -> FoI:
        return next(f for f in self.fois if f.is_entry)

    @property
    def entry_index(self) -> int:
        return next(i for i, f in enumerate(self.fois) if f.is_entry)

    def foi(self, foi_id: str) -> FoI:
        for f in self.fois:
            if f.id == foi_id:
                return f
        raise KeyError(f"unknown FoI id {foi_id!r}")

    def index_of(self, foi_id: str) -> int:
        for i, f in enumerate(self.fois):
            if f.id == foi_id:
                return i
        raise KeyError(f"unknown FoI id {foi_id!r}")

    def effective_arity(self, foi_id: str) -> tuple[int, int]:
        """Arity with the unbounded or too-large maximum capped at omega."""
        a = self.foi(foi_id).arity
        cap = self.omega if a.max_count is None else min(a.max_count, self.omega)
        return a.min_count, cap

    def with_omega(self, omega: int) -> EnvironmentModel:
        """Same environment under a different occupant bound."""
        model = replace(self, omega=omega)
        _check_arities_fit(model)
        return model


@dataclass(frozen=True)
class ActivationLine:
    """All FoI states at one tick, in declaration order; label is the true count."""

    states: tuple[bool, ...]
    label: int | None = None


def _check_arities_fit(model: EnvironmentModel) -> None:
    for f in model.fois:
        if f.arity.min_count > model.omega:
            raise ConfigError(
                f"FoI {f.id!r}: arity minimum {f.arity.min_count} exceeds omega {model.omega}"
            )


def _strip(raw: str) -> str:
    return raw.split("#", 1)[0].strip()


def parse_environment(text: str) -> EnvironmentModel:
    omega: int | None = None
    fois: list[FoI] = []
    seen: dict[str, int] = {}
    edges: set[tuple[str, str]] = set()
    edge_lines: list[tuple[str, str, int]] = []

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "omega":
            if len(parts) != 2:
                raise ConfigError(f"line {lineno}: expected 'omega <int>'")
            if omega is not None:
                raise ConfigError(f"line {lineno}: omega declared twice")
            try:
                omega = int(parts[1])
            except ValueError:
                raise ConfigError(f"line {lineno}: omega must be an integer") from None
            if omega < 1:
                raise ConfigError(f"line {lineno}: omega must be at least 1")
        elif kind == "foi":
            if len(parts) not in (4, 5) or (len(parts) == 5 and parts[4] != "entry"):
                raise ConfigError(
                    f"line {lineno}: expected 'foi <id> <min> <max|inf> [entry]'"
                )
            foi_id = parts[1]
            if foi_id in seen:
                raise ConfigError(
                    f"line {lineno}: duplicate FoI id {foi_id!r} "
                    f"(first declared on line {seen[foi_id]})"
                )
            try:
                min_count = int(parts[2])
                max_count = None if parts[3] == "inf" else int(parts[3])
            except ValueError:
                raise ConfigError(f"line {lineno}: arity bounds must be integers or 'inf'") from None
            try:
                arity = Arity(min_count, max_count)
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: {exc}") from None
            seen[foi_id] = lineno
            fois.append(FoI(foi_id, arity, is_entry=len(parts) == 5))
        elif kind == "edge":
            if len(parts) != 3:
                raise ConfigError(f"line {lineno}: expected 'edge <id> <id>'")
            if parts[1] == parts[2]:
                raise ConfigError(f"line {lineno}: self-loop edge on {parts[1]!r}")
            edge_lines.append((parts[1], parts[2], lineno))
        else:
            raise ConfigError(f"line {lineno}: unknown directive {kind!r}")

    if omega is None:
        raise ConfigError("missing 'omega' declaration")
    if not fois:
        raise ConfigError("no FoI declared")
    entries = [f for f in fois if f.is_entry]
    if not entries:
        raise ConfigError("no entry point declared")
    if len(entries) > 1:
        raise ConfigError("multiple entry points declared")

    for a, b, lineno in edge_lines:
        for end in (a, b):
            if end not in seen:
                raise ConfigError(f"line {lineno}: edge references unknown FoI {end!r}")
        edges.add(tuple(sorted((a, b))))

    cg = CoActivationGraph(frozenset(seen), frozenset(edges))
    model = EnvironmentModel(tuple(fois), cg, omega)
    _check_arities_fit(model)
    return model


def serialize_environment(model: EnvironmentModel) -> str:
    lines = [f"omega {model.omega}"]
    for f in model.fois:
        mx = "inf" if f.arity.max_count is None else str(f.arity.max_count)
        suffix = " entry" if f.is_entry else ""
        lines.append(f"foi {f.id} {f.arity.min_count} {mx}{suffix}")
    for a, b in sorted(model.cg.edges):
        lines.append(f"edge {a} {b}")
    return "\n".join(lines) + "\n"


def parse_activation_line(
    record: str, env: EnvironmentModel, lineno: int | None = None
) -> ActivationLine:
    where = f"line {lineno}: " if lineno is not None else ""
    fields = record.split()
    n = len(env.fois)
    if len(fields) == n:
        label = None
    elif len(fields) == n + 1:
        try:
            label = int(fields[-1])
        except ValueError:
            raise DatasetError(f"{where}label must be an integer") from None
        if not 0 <= label <= env.omega:
            raise DatasetError(
                f"{where}label {label} outside [0, {env.omega}]"
            )
        fields = fields[:-1]
    else:
        raise DatasetError(
            f"{where}expected {n} sensor fields (plus optional label), got {len(fields)}"
        )
    states = []
    for i, field in enumerate(fields):
        if field == "0":
            states.append(False)
        elif field == "1":
            states.append(True)
        else:
            raise DatasetError(
                f"{where}non-binary sensor field {field!r} in column {i + 1}"
            )
    return ActivationLine(tuple(states), label)


def parse_activation_lines(text: str, env: EnvironmentModel) -> list[ActivationLine]:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        record = _strip(raw)
        if not record:
            continue
        lines.append(parse_activation_line(record, env, lineno))
    return lines


def serialize_dataset(lines: list[ActivationLine]) -> str:
    rows = []
    for line in lines:
        row = " ".join("1" if s else "0" for s in line.states)
        if line.label is not None:
            row += f" {line.label}"
        rows.append(row)
    return "\n".join(rows) + "\n" if rows else ""


def load_aras_dataset(text: str, env: EnvironmentModel) -> list[ActivationLine]:
    """Ingest raw ARAS day files: per-second records with one 0/1 field per
    sensor followed by two activity-label columns, which are dropped. The
    environment must declare one FoI per sensor column, in column order.
    Returns unlabeled lines (the raw files carry no occupant count).
    """
    n = len(env.fois)
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        record = _strip(raw)
        if not record:
            continue
        fields = record.split()
        if len(fields) != n + 2:
            raise DatasetError(
                f"line {lineno}: expected {n} sensor fields plus 2 activity columns, "
                f"got {len(fields)}"
            )
        lines.append(parse_activation_line(" ".join(fields[:n]), env, lineno))
    return lines


def project_line(
    line: ActivationLine, src: EnvironmentModel, dst: EnvironmentModel
) -> ActivationLine:
    """Restrict a line to a sub-environment: the same tick as seen by the
    subset of sensors that ``dst`` declares. Labels carry over unchanged."""
    indices = [src.index_of(f.id) for f in dst.fois]
    if line.label is not None and line.label > dst.omega:
        raise DatasetError(f"label {line.label} outside [0, {dst.omega}]")
    return ActivationLine(tuple(line.states[i] for i in indices), line.label)


def project_dataset(
    lines: list[ActivationLine], src: EnvironmentModel, dst: EnvironmentModel
) -> list[ActivationLine]:
    for f in dst.fois:
        if f.id not in src.cg.nodes:
            raise ConfigError(f"FoI {f.id!r} not present in the source environment")
    return [project_line(line, src, dst) for line in lines]
