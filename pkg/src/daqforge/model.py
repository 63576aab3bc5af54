"""Domain types for two-level data-architecture models.

An architecture is a set of data nodes joined by directed connections
between ports.  At the high level (HLA) only structure is described; at
the low level (LLA) every node additionally carries a behavior graph of
actions and events ordered by links.  All types are plain values: no
interior mutation is expected after construction, and cross-references
(connection endpoints, quality-rule sources) are held by name so that
frontends can build models before resolution.

Source spans are attached by the frontends for diagnostics only and are
excluded from equality.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from daqforge.diagnostics import Span


class Level(Enum):
    HLA = "HLA"
    LLA = "LLA"


class FormatCategory(Enum):
    STRUCTURED = "structured"
    SEMI_STRUCTURED = "semistructured"
    UNSTRUCTURED = "unstructured"


class DataFormat(Enum):
    """Data format kinds; the category is derived, so it cannot disagree."""

    RELATIONAL_DB = "relationaldb"
    EMAIL = "email"
    SMS = "sms"
    CSV = "csv"
    JSON = "json"
    XML = "xml"
    GPS = "gps"
    MULTIMEDIA = "multimedia"
    OFFICE_FILES = "officefiles"

    @property
    def category(self) -> FormatCategory:
        if self is DataFormat.RELATIONAL_DB:
            return FormatCategory.STRUCTURED
        if self in (DataFormat.GPS, DataFormat.MULTIMEDIA, DataFormat.OFFICE_FILES):
            return FormatCategory.UNSTRUCTURED
        return FormatCategory.SEMI_STRUCTURED


class StorageFamily(Enum):
    NOSQL = "nosql"
    NEWSQL = "newsql"
    FILESYSTEM = "filesystem"


class StorageTech(Enum):
    """Storage technology kinds; every kind belongs to exactly one family."""

    DOCUMENT = "document"
    KEY_VALUE = "keyvalue"
    GRAPH = "graph"
    COLUMN = "column"
    HISTORICAL = "historical"
    REAL_TIME = "realtime"
    STREAM = "stream"
    TIMESTAMP = "timestamp"
    HDF = "hdf"
    GFS = "gfs"
    AFS = "afs"
    GPFS = "gpfs"
    BLOBSEER = "blobseer"

    @property
    def family(self) -> StorageFamily:
        if self in (StorageTech.DOCUMENT, StorageTech.KEY_VALUE,
                    StorageTech.GRAPH, StorageTech.COLUMN):
            return StorageFamily.NOSQL
        if self in (StorageTech.HISTORICAL, StorageTech.REAL_TIME,
                    StorageTech.STREAM, StorageTech.TIMESTAMP):
            return StorageFamily.NEWSQL
        return StorageFamily.FILESYSTEM


class Location(Enum):
    CLOUD = "cloud"
    ON_PREMISE = "onpremise"


class Processing(Enum):
    BATCH = "batch"
    REAL_TIME = "realtime"


class Direction(Enum):
    IN = "in"
    OUT = "out"


class MessagePattern(Enum):
    SEND_RECEIVE = "send_receive"
    REQUEST_RESPONSE = "request_response"
    PUBLISH_SUBSCRIBE = "publish_subscribe"


class TransferMode(Enum):
    SYNC = "sync"
    ASYNC = "async"


class ActionKind(Enum):
    GENERATION = "generation"
    INGESTION = "ingestion"
    PROCESS = "process"
    STORE = "store"
    ANALYZE = "analyze"
    CONSUME = "consume"
    SEND_DATA = "send"
    VERIFY_DATA = "verify"


# Closed sub-kind vocabularies; kinds absent here take no sub-kind.
SUB_KINDS: dict[ActionKind, tuple[str, ...]] = {
    ActionKind.INGESTION: ("identify", "validate", "compress"),
    ActionKind.PROCESS: ("classify", "filter", "sort", "transform",
                         "clean", "validate", "reduce"),
    ActionKind.STORE: ("save", "retrieve", "archive", "govern"),
    ActionKind.ANALYZE: ("describe", "diagnose", "predict", "prescribe"),
    ActionKind.CONSUME: ("visualize", "report", "api", "share"),
}


class Dimension(Enum):
    UNIQUENESS = "uniqueness"
    COMPLETENESS = "completeness"
    VALIDITY = "validity"
    CONSISTENCY = "consistency"
    TIMELINESS = "timeliness"
    ACCURACY = "accuracy"


class SourceKind(Enum):
    MYSQL = "mysql"
    CSVFILE = "csvfile"
    JSONFILE = "jsonfile"


class ColumnType(Enum):
    STRING = "string"
    INTEGER = "integer"
    NUMBER = "number"
    BOOLEAN = "boolean"
    DATE = "date"


ParamScalar = Union[str, int, float, bool]
ParamValue = Union[ParamScalar, list]


@dataclass
class DataRepresentation:
    """How a node holds its data: formats, processing, storage, location."""

    formats: list[DataFormat] = field(default_factory=list)
    processing: list[Processing] = field(default_factory=list)
    storage: Optional[StorageTech] = None
    location: Optional[Location] = None

    def attribute_count(self) -> int:
        return (len(self.formats) + len(self.processing)
                + (1 if self.storage is not None else 0)
                + (1 if self.location is not None else 0))

    def is_empty(self) -> bool:
        return self.attribute_count() == 0


@dataclass
class Port:
    name: str
    direction: Direction
    owner: str = ""
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass
class QualityRule:
    """One dimension/expectation check bound to a source column.

    ``params`` keeps the author's keyword spellings; canonicalization to
    the expectation signature happens during rule resolution.
    """

    column: str
    dimension: Dimension
    expectation: str
    params: dict[str, ParamValue] = field(default_factory=dict)
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass
class QualitySpec:
    source: str
    rules: list[QualityRule] = field(default_factory=list)


@dataclass
class Action:
    name: str
    kind: ActionKind
    sub_kind: Optional[str] = None
    port: Optional[str] = None
    quality: Optional[QualitySpec] = None
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass
class ReceiveEvent:
    """Externally triggered stimulus: data arriving on an In-port."""

    name: str
    port: str
    span: Optional[Span] = field(default=None, compare=False, repr=False)


BehaviorElement = Union[Action, ReceiveEvent]


@dataclass
class Link:
    src: str
    dst: str
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass
class NodeBehavior:
    elements: list[BehaviorElement] = field(default_factory=list)
    links: list[Link] = field(default_factory=list)

    def element_names(self) -> list[str]:
        return [e.name for e in self.elements]


@dataclass
class DataNode:
    name: str
    representation: DataRepresentation = field(default_factory=DataRepresentation)
    ports: list[Port] = field(default_factory=list)
    behavior: Optional[NodeBehavior] = None
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    def port(self, name: str) -> Optional[Port]:
        for p in self.ports:
            if p.name == name:
                return p
        return None


@dataclass
class Connection:
    id: str
    from_node: str
    from_port: str
    to_node: str
    to_port: str
    pattern: MessagePattern = MessagePattern.SEND_RECEIVE
    mode: TransferMode = TransferMode.ASYNC
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass
class ColumnMeta:
    name: str
    type: ColumnType


@dataclass
class SourceBinding:
    """Connection details plus column metadata for one data source."""

    name: str
    kind: SourceKind
    connection: dict[str, str] = field(default_factory=dict)
    columns: list[ColumnMeta] = field(default_factory=list)
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    def column(self, name: str) -> Optional[ColumnMeta]:
        for c in self.columns:
            if c.name == name:
                return c
        return None


# Connection keys a source of each kind must declare.
REQUIRED_CONNECTION_KEYS: dict[SourceKind, tuple[str, ...]] = {
    SourceKind.MYSQL: ("host", "database", "table"),
    SourceKind.CSVFILE: ("path",),
    SourceKind.JSONFILE: ("path",),
}


@dataclass
class ArchitectureModel:
    name: str
    level: Level
    nodes: list[DataNode] = field(default_factory=list)
    connections: list[Connection] = field(default_factory=list)
    sources: list[SourceBinding] = field(default_factory=list)

    def node(self, name: str) -> Optional[DataNode]:
        for n in self.nodes:
            if n.name == name:
                return n
        return None

    def source(self, name: str) -> Optional[SourceBinding]:
        for s in self.sources:
            if s.name == name:
                return s
        return None


def complexity(model: ArchitectureModel) -> tuple[int, int]:
    """Structural size of a model: (node count, internal element count).

    Every declared artifact contributes to the internal count: ports,
    behavior elements, links, and set representation attributes (each
    format, each processing type, storage if set, location if set).
    The result is invariant under node reordering.
    """
    internal = 0
    for node in model.nodes:
        internal += len(node.ports)
        if node.behavior is not None:
            internal += len(node.behavior.elements) + len(node.behavior.links)
        internal += node.representation.attribute_count()
    return len(model.nodes), internal


class CycleError(Exception):
    """Raised when behavior links form a cycle; names the cycle members."""

    def __init__(self, cycle: list[str]):
        self.cycle = list(cycle)
        super().__init__("behavior links form a cycle: " + " -> ".join(self.cycle))


def behavior_order(behavior: NodeBehavior) -> list[str]:
    """Topological order of behavior elements, declaration order on ties.

    Raises CycleError listing the elements on a cycle, or ValueError if a
    link names an undeclared element.
    """
    names = behavior.element_names()
    index = {n: i for i, n in enumerate(names)}
    succ: dict[str, list[str]] = {n: [] for n in names}
    indeg = {n: 0 for n in names}
    for link in behavior.links:
        if link.src not in index or link.dst not in index:
            raise ValueError(
                f"link {link.src} -> {link.dst} references an undeclared element")
        succ[link.src].append(link.dst)
        indeg[link.dst] += 1

    ready = [index[n] for n in names if indeg[n] == 0]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        name = names[heapq.heappop(ready)]
        order.append(name)
        for nxt in succ[name]:
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                heapq.heappush(ready, index[nxt])

    if len(order) < len(names):
        raise CycleError(_find_cycle(names, succ, set(order)))
    return order


def _find_cycle(names: list[str], succ: dict[str, list[str]],
                done: set[str]) -> list[str]:
    # DFS over the leftover subgraph; the first back edge closes a cycle.
    state: dict[str, int] = {}  # 1 = on stack, 2 = finished
    stack: list[str] = []

    def visit(name: str) -> Optional[list[str]]:
        state[name] = 1
        stack.append(name)
        for nxt in succ[name]:
            if nxt in done:
                continue
            if state.get(nxt) == 1:
                return stack[stack.index(nxt):]
            if nxt not in state:
                found = visit(nxt)
                if found is not None:
                    return found
        state[name] = 2
        stack.pop()
        return None

    for name in names:
        if name in done or name in state:
            continue
        cycle = visit(name)
        if cycle is not None:
            return cycle
    raise AssertionError("unordered elements but no cycle found")
