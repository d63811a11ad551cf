"""Generation engine: run a composed generator's schedule over an input model.

The run is phased. Front-end behaviors restrict the input (context
conditions), transform behaviors may rewrite it, declare behaviors claim
artifact paths and publish facts on the blackboard, emit behaviors fill
artifact containers. Nothing touches the filesystem until every container has
passed syntax validation and every required hook is resolved; then all files
are written in one atomic stage-and-swap. Incremental runs reuse artifacts
whose cache key (input element, component, options, consumed facts) is
unchanged, with outputs byte-identical to a cold run.
"""

from __future__ import annotations

import hashlib
import shutil
import tempfile
import uuid
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import ootl
from .classdiagram import ClassDiagram, ContextCondition, check_context_conditions
from .components import (
    FACT_TOPICS,
    GeneratorComponent,
    VariantSpec,
    check_bindings,
    effective_configuration,
    effective_variation_points,
)
from .composition import ComposedGenerator, schedule
from .report import ValidationReport, Violation

GEN_CLAIM = "GEN-CLAIM"
GEN_EMIT = "GEN-EMIT"
GEN_SYNTAX = "GEN-SYNTAX"
GEN_HOOK = "GEN-HOOK"

CORE_FEATURE = "core"

TRACE_FILE = "trace.map"
CACHE_FILE = "gencache.map"


class BlackboardError(RuntimeError):
    """A component broke the fact-exchange discipline."""


class ClaimConflictError(Exception):
    """Two components claimed the same artifact path."""

    def __init__(self, path: str, holder: str, claimant: str):
        super().__init__(
            f"artifact {path!r} claimed by both {holder!r} and {claimant!r}"
        )
        self.path = path
        self.holder = holder
        self.claimant = claimant


class GenerationIOError(Exception):
    """Writing the staged outputs failed; distinct from validation failures."""


class EngineError(RuntimeError):
    """A behavior used the engine context outside its phase or ownership."""


# ---------------------------------------------------------------------------
# Blackboard

@dataclass(frozen=True)
class Fact:
    topic: str
    producer: str  # component id
    subject: str
    payload: tuple[tuple[str, str], ...] = ()

    @staticmethod
    def make(topic: str, producer: str, subject: str, payload: Mapping[str, str] | None = None) -> "Fact":
        items = tuple(sorted((payload or {}).items()))
        return Fact(topic=topic, producer=producer, subject=subject, payload=items)


class Blackboard:
    """Shared fact store plus artifact claims for one generation run."""

    def __init__(self) -> None:
        self.facts: list[Fact] = []
        self.claims: dict[str, str] = {}  # artifact path -> component id
        self._keys: dict[tuple[str, str, str], Fact] = {}

    def publish(self, fact: Fact, producer: GeneratorComponent | None = None) -> None:
        if fact.topic not in FACT_TOPICS:
            raise BlackboardError(f"fact topic {fact.topic!r} is outside the ontology")
        if producer is not None and fact.topic != "artifact.claimed":
            if fact.topic not in producer.interface.produces:
                raise BlackboardError(
                    f"component {producer.id!r} does not declare producing {fact.topic!r}"
                )
        key = (fact.topic, fact.producer, fact.subject)
        existing = self._keys.get(key)
        if existing is not None:
            if existing.payload != fact.payload:
                raise BlackboardError(
                    f"conflicting facts for {key}: {existing.payload!r} vs {fact.payload!r}"
                )
            return
        self._keys[key] = fact
        self.facts.append(fact)

    def query(
        self,
        topic: str,
        subject: str | None = None,
        consumer: GeneratorComponent | None = None,
    ) -> tuple[Fact, ...]:
        if topic not in FACT_TOPICS:
            raise BlackboardError(f"fact topic {topic!r} is outside the ontology")
        if consumer is not None and topic not in consumer.interface.consumes:
            raise BlackboardError(
                f"component {consumer.id!r} does not declare consuming {topic!r}"
            )
        found = [
            f
            for f in self.facts
            if f.topic == topic and (subject is None or f.subject == subject)
        ]
        found.sort(key=lambda f: (f.subject, f.producer))
        return tuple(found)


def claim_artifact(board: Blackboard, path: str, component: str) -> None:
    """Record that ``component`` will write ``path``; idempotent per pair.

    Raises ClaimConflictError naming both components if the path is already
    claimed by someone else. Publishes an artifact.claimed fact.
    """
    holder = board.claims.get(path)
    if holder is not None:
        if holder == component:
            return
        raise ClaimConflictError(path, holder, component)
    board.claims[path] = component
    board.publish(Fact.make("artifact.claimed", component, path))


# ---------------------------------------------------------------------------
# Artifact containers

@dataclass(frozen=True)
class SyntaxStatus:
    state: str  # "unchecked" | "valid" | "invalid"
    message: str = ""
    line: int = 0
    column: int = 0

    @property
    def is_valid(self) -> bool:
        return self.state == "valid"


UNCHECKED = SyntaxStatus("unchecked")
VALID = SyntaxStatus("valid")


@dataclass(frozen=True)
class Region:
    text: str
    features: tuple[str, ...]  # sorted, non-empty ("core" sentinel when none apply)
    component: str
    start_line: int  # 1-based


class ArtifactContainer:
    """In-memory buffer for one output artifact, built region by region."""

    def __init__(self, path: str, component: str):
        self.path = path
        self.component = component
        self.regions: list[Region] = []
        self.syntax_status: SyntaxStatus = UNCHECKED
        self._next_line = 1

    def append(self, text: str, features: Iterable[str] = ()) -> None:
        """Add whole lines attributed to the given features (default "core")."""
        if not text.endswith("\n"):
            raise ValueError(f"region text must end with a newline: {text!r}")
        feats = tuple(sorted(set(features))) or (CORE_FEATURE,)
        lines = text.count("\n")
        if self.regions:
            last = self.regions[-1]
            if last.features == feats:
                self.regions[-1] = replace(last, text=last.text + text)
                self._next_line += lines
                return
        self.regions.append(
            Region(text=text, features=feats, component=self.component, start_line=self._next_line)
        )
        self._next_line += lines

    def content(self) -> str:
        return "".join(r.text for r in self.regions)

    def line_count(self) -> int:
        return self._next_line - 1


def validate_syntax(container: ArtifactContainer) -> SyntaxStatus:
    """Check the container content against the target-language grammar."""
    error = ootl.check_unit(container.content())
    if error is None:
        container.syntax_status = VALID
    else:
        message, line, column = error
        container.syntax_status = SyntaxStatus("invalid", message, line, column)
    return container.syntax_status


# ---------------------------------------------------------------------------
# Traceability

@dataclass(frozen=True)
class TraceRegion:
    start: int
    end: int  # inclusive
    features: tuple[str, ...]
    component: str


class TraceIndex:
    """Feature-to-lines and artifact-to-regions views of one generated variant."""

    def __init__(self, regions_by_artifact: Mapping[str, Sequence[TraceRegion]]):
        self.by_artifact: dict[str, tuple[TraceRegion, ...]] = {
            path: tuple(sorted(regions, key=lambda r: r.start))
            for path, regions in sorted(regions_by_artifact.items())
        }
        by_feature: dict[str, list[tuple[str, tuple[int, int]]]] = {}
        for path, regions in self.by_artifact.items():
            for region in regions:
                for feat in region.features:
                    ranges = by_feature.setdefault(feat, [])
                    if ranges and ranges[-1][0] == path and ranges[-1][1][1] + 1 == region.start:
                        ranges[-1] = (path, (ranges[-1][1][0], region.end))
                    else:
                        ranges.append((path, (region.start, region.end)))
        self.by_feature: dict[str, tuple[tuple[str, tuple[int, int]], ...]] = {
            feat: tuple(ranges) for feat, ranges in sorted(by_feature.items())
        }

    @staticmethod
    def from_containers(containers: Iterable[ArtifactContainer]) -> "TraceIndex":
        regions: dict[str, list[TraceRegion]] = {}
        for container in containers:
            out = regions.setdefault(container.path, [])
            for region in container.regions:
                lines = region.text.count("\n")
                out.append(
                    TraceRegion(
                        start=region.start_line,
                        end=region.start_line + lines - 1,
                        features=region.features,
                        component=region.component,
                    )
                )
        return TraceIndex(regions)

    def to_lines(self) -> list[str]:
        lines = []
        for path, regions in self.by_artifact.items():
            for region in regions:
                feats = ",".join(region.features)
                lines.append(f"{path}:{region.start}-{region.end} {region.component} {feats}")
        return lines

    def to_text(self) -> str:
        return "".join(line + "\n" for line in self.to_lines())

    @staticmethod
    def from_text(text: str) -> "TraceIndex":
        """Parse trace lines; malformed lines are skipped, never fatal."""
        regions: dict[str, list[TraceRegion]] = {}
        for raw in text.splitlines():
            parts = raw.split()
            if len(parts) != 3 or ":" not in parts[0]:
                continue
            location, component, feats = parts
            path, _, span = location.rpartition(":")
            bounds = span.split("-")
            if len(bounds) != 2 or not all(b.isdigit() for b in bounds):
                continue
            start, end = int(bounds[0]), int(bounds[1])
            if not path or start < 1 or end < start:
                continue
            features = tuple(sorted(set(f for f in feats.split(",") if f)))
            if not features:
                continue
            regions.setdefault(path, []).append(
                TraceRegion(start=start, end=end, features=features, component=component)
            )
        return TraceIndex(regions)


@dataclass(frozen=True)
class TraceQueryResult:
    kind: str  # "feature" | "artifact" | "unknown"
    query: str
    feature_ranges: tuple[tuple[str, tuple[int, int]], ...] = ()
    artifact_regions: tuple[TraceRegion, ...] = ()


def trace_query(trace: TraceIndex, query: str, kind: str | None = None) -> TraceQueryResult:
    """Look up a feature id or an artifact path in a trace index.

    With kind=None the query is matched against artifacts first, then
    features. Unknown names produce an empty "unknown" result, not an error.
    """
    if kind not in (None, "feature", "artifact"):
        raise ValueError(f"unknown query kind {kind!r}")
    if kind in (None, "artifact") and query in trace.by_artifact:
        return TraceQueryResult("artifact", query, artifact_regions=trace.by_artifact[query])
    if kind in (None, "feature") and query in trace.by_feature:
        return TraceQueryResult("feature", query, feature_ranges=trace.by_feature[query])
    return TraceQueryResult("unknown", query)


# ---------------------------------------------------------------------------
# Incremental cache

def _digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class GenCache:
    """Per-artifact (key digest, content digest) pairs from a previous run."""

    def __init__(self, entries: Mapping[str, tuple[str, str]] | None = None):
        self.entries: dict[str, tuple[str, str]] = dict(entries or {})

    def to_text(self) -> str:
        lines = [
            f"{path} {key} {content}"
            for path, (key, content) in sorted(self.entries.items())
        ]
        return "".join(line + "\n" for line in lines)

    @staticmethod
    def from_text(text: str) -> "GenCache":
        """Parse cache lines; a corrupt line is dropped (treated as a miss)."""
        entries: dict[str, tuple[str, str]] = {}
        for raw in text.splitlines():
            parts = raw.split()
            if len(parts) != 3:
                continue
            path, key, content = parts
            if len(key) != 64 or len(content) != 64:
                continue
            try:
                int(key, 16)
                int(content, 16)
            except ValueError:
                continue
            entries[path] = (key, content)
        return GenCache(entries)


# ---------------------------------------------------------------------------
# Reports and context

@dataclass(frozen=True)
class GenerationReport:
    written: tuple[str, ...]
    skipped_cache_hits: tuple[str, ...]
    facts_count: int
    violations: ValidationReport
    trace: TraceIndex
    failed_stage: str | None = None  # "restrict"|"declare"|"emit"|"syntax"|"hooks"|None

    @property
    def ok(self) -> bool:
        return self.failed_stage is None and self.violations.valid


@dataclass
class _ClaimMeta:
    component: str
    element_key: str
    fact_subjects: tuple[str, ...] | None  # None = all consumed facts matter


class GenContext:
    """The engine-side API handed to behaviors, one instance per run."""

    def __init__(
        self,
        composed: ComposedGenerator,
        diagram: ClassDiagram,
        spec: VariantSpec,
        board: Blackboard,
    ):
        self.spec = spec
        self.mode = spec.mode
        self.selected = spec.configuration.selected
        self.diagram = diagram
        self.board = board
        self.phase = ""
        self.conditions: list[ContextCondition] = []
        self.containers: dict[str, ArtifactContainer] = {}
        self.claim_meta: dict[str, _ClaimMeta] = {}
        self._hits: frozenset[str] = frozenset()
        self._options = {
            c.id: effective_configuration(c, spec) for c in composed.components
        }
        self._vps = {
            c.id: effective_variation_points(c, spec) for c in composed.components
        }

    # -- variant views ------------------------------------------------------

    def options(self, component: GeneratorComponent) -> dict[str, object]:
        return dict(self._options[component.id])

    def vps(self, component: GeneratorComponent) -> dict[str, str]:
        return dict(self._vps[component.id])

    # -- restrict phase ------------------------------------------------------

    def add_condition(self, component: GeneratorComponent, condition: ContextCondition) -> None:
        self._require_phase("restrict", "add_condition")
        self.conditions.append(condition)

    # -- transform phase -----------------------------------------------------

    def replace_diagram(self, component: GeneratorComponent, diagram: ClassDiagram) -> None:
        self._require_phase("transform", "replace_diagram")
        self.diagram = diagram

    # -- declare phase -------------------------------------------------------

    def claim(
        self,
        component: GeneratorComponent,
        path: str,
        element_key: str,
        fact_subjects: Iterable[str] | None = None,
    ) -> None:
        self._require_phase("declare", "claim")
        claim_artifact(self.board, path, component.id)
        subjects = None if fact_subjects is None else tuple(sorted(set(fact_subjects)))
        self.claim_meta[path] = _ClaimMeta(component.id, element_key, subjects)

    def publish(
        self,
        component: GeneratorComponent,
        topic: str,
        subject: str,
        payload: Mapping[str, str] | None = None,
    ) -> None:
        self._require_phase("declare", "publish")
        self.board.publish(Fact.make(topic, component.id, subject, payload), producer=component)

    # -- declare and emit phases ----------------------------------------------

    def facts(
        self, component: GeneratorComponent, topic: str, subject: str | None = None
    ) -> tuple[Fact, ...]:
        return self.board.query(topic, subject, consumer=component)

    # -- emit phase ------------------------------------------------------------

    def should_emit(self, path: str) -> bool:
        return path not in self._hits

    def container(self, component: GeneratorComponent, path: str) -> ArtifactContainer:
        self._require_phase("emit", "container")
        self._check_ownership(component, path)
        container = self.containers.get(path)
        if container is None:
            container = ArtifactContainer(path, component.id)
            self.containers[path] = container
        return container

    def adopt(self, component: GeneratorComponent, container: ArtifactContainer) -> None:
        """Register a fully built container for the component's claimed path."""
        self._require_phase("emit", "adopt")
        self._check_ownership(component, container.path)
        if container.component != component.id:
            raise EngineError(
                f"container for {container.path!r} was built for {container.component!r}, "
                f"not {component.id!r}"
            )
        if container.path in self.containers:
            raise EngineError(f"artifact {container.path!r} emitted twice")
        self.containers[container.path] = container

    def _check_ownership(self, component: GeneratorComponent, path: str) -> None:
        holder = self.board.claims.get(path)
        if holder != component.id:
            raise EngineError(
                f"component {component.id!r} emits {path!r} "
                + ("without a claim" if holder is None else f"claimed by {holder!r}")
            )

    def _require_phase(self, phase: str, what: str) -> None:
        if self.phase != phase:
            raise EngineError(f"{what} is only allowed in the {phase} phase, not {self.phase!r}")


# ---------------------------------------------------------------------------
# Hook resolution

def resolve_hooks(board: Blackboard, mode: str) -> ValidationReport:
    """Match hook.required facts against hook.provided subjects.

    Generation-time binding uses no hooks, so the check is vacuous there.
    """
    if mode == "generation_time":
        return ValidationReport()
    provided = {f.subject for f in board.query("hook.provided")}
    violations = [
        Violation(
            GEN_HOOK,
            (fact.subject,),
            f"hook {fact.subject!r} required by {fact.producer!r} is unresolved",
        )
        for fact in board.query("hook.required")
        if fact.subject not in provided
    ]
    return ValidationReport(tuple(violations))


# ---------------------------------------------------------------------------
# Engine

def _empty_trace() -> TraceIndex:
    return TraceIndex({})


def _aborted(
    stage: str, violations: ValidationReport, board: Blackboard
) -> GenerationReport:
    return GenerationReport(
        written=(),
        skipped_cache_hits=(),
        facts_count=len(board.facts),
        violations=violations,
        trace=_empty_trace(),
        failed_stage=stage,
    )


def _cache_key(
    meta: _ClaimMeta,
    composed: ComposedGenerator,
    ctx: GenContext,
    board: Blackboard,
) -> str:
    comp = composed.component(meta.component)
    consumed: list[str] = []
    for fact in sorted(board.facts, key=lambda f: (f.topic, f.subject, f.producer)):
        if fact.topic not in comp.interface.consumes:
            continue
        if meta.fact_subjects is not None and fact.subject not in meta.fact_subjects:
            continue
        payload = ";".join(f"{k}={v}" for k, v in fact.payload)
        consumed.append(f"{fact.topic}|{fact.producer}|{fact.subject}|{payload}")
    options = ctx.options(comp)
    vps = ctx.vps(comp)
    material = "\n".join(
        [
            "element=" + meta.element_key,
            "component=" + f"{comp.id}@{comp.version}",
            "mode=" + ctx.mode,
            "options=" + repr(sorted(options.items())),
            "vps=" + repr(sorted(vps.items())),
            "facts=" + repr(consumed),
        ]
    )
    return _digest(material)


def _run_engine(
    composed: ComposedGenerator,
    diagram: ClassDiagram,
    spec: VariantSpec,
    cache: GenCache | None,
) -> tuple[GenerationReport, GenCache]:
    check_bindings(spec, composed.components)
    steps = schedule(composed, spec)
    board = Blackboard()
    ctx = GenContext(composed, diagram, spec, board)
    out_dir = Path(spec.output_path)

    ctx.phase = "restrict"
    for step in (s for s in steps if s.phase == "restrict"):
        comp, beh = composed.behavior(step)
        beh.run(ctx, comp)
    cc_report = check_context_conditions(ctx.diagram, ctx.conditions)
    if not cc_report.valid:
        return _aborted("restrict", cc_report, board), cache if cache is not None else GenCache()

    ctx.phase = "transform"
    for step in (s for s in steps if s.phase == "transform"):
        comp, beh = composed.behavior(step)
        beh.run(ctx, comp)

    ctx.phase = "declare"
    for step in (s for s in steps if s.phase == "declare"):
        comp, beh = composed.behavior(step)
        try:
            beh.run(ctx, comp)
        except ClaimConflictError as exc:
            violation = Violation(
                GEN_CLAIM, (exc.holder, exc.claimant), str(exc)
            )
            return _aborted("declare", ValidationReport((violation,)), board), cache if cache is not None else GenCache()

    keys = {
        path: _cache_key(meta, composed, ctx, board)
        for path, meta in ctx.claim_meta.items()
    }
    hits: set[str] = set()
    old_trace: TraceIndex | None = None
    if cache is not None:
        trace_path = out_dir / TRACE_FILE
        if trace_path.is_file():
            old_trace = TraceIndex.from_text(trace_path.read_text(encoding="utf-8"))
        for path, key in keys.items():
            entry = cache.entries.get(path)
            if entry is None or entry[0] != key:
                continue
            existing = out_dir / path
            if not existing.is_file():
                continue
            if _digest(existing.read_text(encoding="utf-8")) != entry[1]:
                continue
            if old_trace is None or path not in old_trace.by_artifact:
                continue
            hits.add(path)
    ctx._hits = frozenset(hits)

    ctx.phase = "emit"
    for step in (s for s in steps if s.phase == "emit"):
        comp, beh = composed.behavior(step)
        beh.run(ctx, comp)
    ctx.phase = "done"

    missing = sorted(
        path for path in ctx.claim_meta if path not in hits and path not in ctx.containers
    )
    if missing:
        violations = tuple(
            Violation(
                GEN_EMIT,
                (ctx.claim_meta[path].component, path),
                f"artifact {path!r} was claimed by {ctx.claim_meta[path].component!r} "
                "but never emitted",
            )
            for path in missing
        )
        return _aborted("emit", ValidationReport(violations), board), cache if cache is not None else GenCache()

    syntax_violations: list[Violation] = []
    for path in sorted(ctx.containers):
        container = ctx.containers[path]
        status = validate_syntax(container)
        if not status.is_valid:
            syntax_violations.append(
                Violation(
                    GEN_SYNTAX,
                    (path,),
                    f"artifact {path!r} is not syntactically valid: {status.message} "
                    f"(line {status.line}, column {status.column})",
                )
            )
    if syntax_violations:
        return (
            _aborted("syntax", ValidationReport(tuple(syntax_violations)), board),
            cache if cache is not None else GenCache(),
        )

    hook_report = resolve_hooks(board, spec.mode)
    if not hook_report.valid:
        return _aborted("hooks", hook_report, board), cache if cache is not None else GenCache()

    # Assemble every output byte in memory before touching the filesystem.
    fresh = {path: ctx.containers[path] for path in ctx.containers if path not in hits}
    files: dict[str, str] = {path: c.content() for path, c in fresh.items()}
    trace_regions: dict[str, Sequence[TraceRegion]] = dict(
        TraceIndex.from_containers(fresh.values()).by_artifact
    )
    for path in sorted(hits):
        files[path] = (out_dir / path).read_text(encoding="utf-8")
        assert old_trace is not None
        trace_regions[path] = old_trace.by_artifact[path]
    trace = TraceIndex(trace_regions)
    files[TRACE_FILE] = trace.to_text()

    _atomic_swap(out_dir, files)

    new_cache = GenCache(
        {path: (keys[path], _digest(files[path])) for path in keys}
    )
    report = GenerationReport(
        written=tuple(sorted(set(files) - hits - {TRACE_FILE})),
        skipped_cache_hits=tuple(sorted(hits)),
        facts_count=len(board.facts),
        violations=ValidationReport(),
        trace=trace,
    )
    return report, new_cache


def _atomic_swap(out_dir: Path, files: Mapping[str, str]) -> None:
    parent = out_dir.resolve().parent
    try:
        parent.mkdir(parents=True, exist_ok=True)
        stage = Path(tempfile.mkdtemp(prefix=f".{out_dir.name}.stage-", dir=parent))
    except OSError as exc:
        raise GenerationIOError(f"cannot stage outputs: {exc}") from exc
    backup = parent / f".{out_dir.name}.old-{uuid.uuid4().hex}"
    try:
        for rel, text in files.items():
            target = stage / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(text, encoding="utf-8")
        resolved = parent / out_dir.name
        if resolved.exists():
            resolved.rename(backup)
        stage.rename(resolved)
    except OSError as exc:
        shutil.rmtree(stage, ignore_errors=True)
        if backup.exists() and not (parent / out_dir.name).exists():
            backup.rename(parent / out_dir.name)
        raise GenerationIOError(f"cannot write outputs: {exc}") from exc
    shutil.rmtree(backup, ignore_errors=True)


def generate(
    composed: ComposedGenerator, diagram: ClassDiagram, spec: VariantSpec
) -> GenerationReport:
    """Run the full pipeline and write all artifacts atomically."""
    report, _ = _run_engine(composed, diagram, spec, cache=None)
    return report


def incremental_generate(
    composed: ComposedGenerator,
    diagram: ClassDiagram,
    spec: VariantSpec,
    cache: GenCache,
) -> tuple[GenerationReport, GenCache]:
    """Like generate, but skip emitting artifacts whose cache key is unchanged.

    Outputs are byte-identical to a cold run; the returned cache reflects the
    new state. On an aborted run the input cache is returned unchanged.
    """
    return _run_engine(composed, diagram, spec, cache=cache)
