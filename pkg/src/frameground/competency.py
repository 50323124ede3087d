"""Competency registry, restriction checking, and plan instantiation.

Competencies abstract the agent's sensors and actuators.  Execution is
simulated: each step reports the first declared result label of its
competency (or a handler override), so tests and the UI can observe
step ordering without real-world effects.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Dict, List, Optional, Tuple

from .memory import MemoryStore
from .model import (
    CompetencyDescriptor,
    ExecutionStrategy,
    Frame,
    Restriction,
    RestrictionKind,
    StrategyAssociation,
    content_hash,
)

if TYPE_CHECKING:
    from .interpreter import MeaningTree


class UnboundRole(KeyError):
    """A plan template names a role the meaning never bound."""

    def __init__(self, role: str):
        super().__init__(role)
        self.role = role


class CompetencyUnavailable(RuntimeError):
    def __init__(self, competency_id: str):
        super().__init__(f"competency {competency_id!r} is not available")
        self.competency_id = competency_id


@dataclass(frozen=True)
class ValidationResult:
    valid: bool
    failed_restriction: Optional[Tuple[Restriction, str]] = None


@dataclass(frozen=True)
class PlanStep:
    competency: str
    action: str
    bindings: Tuple[Tuple[str, str], ...]  # (role, node id), sorted by role

    def binding_map(self) -> Dict[str, str]:
        return dict(self.bindings)


@dataclass(frozen=True)
class Plan:
    id: str
    strategy: str
    meaning: "MeaningTree"
    steps: Tuple[PlanStep, ...]


@dataclass(frozen=True)
class TraceEntry:
    competency: str
    action: str
    bindings: Tuple[Tuple[str, str], ...]
    result: str


@dataclass(frozen=True)
class ExecutionTrace:
    plan: str
    entries: Tuple[TraceEntry, ...]


class CompetencyEnvironment:
    """Thread-safe registry of the agent's competencies."""

    def __init__(self) -> None:
        self._descriptors: Dict[str, CompetencyDescriptor] = {}
        self._handlers: Dict[str, Callable[[PlanStep], str]] = {}
        self._lock = threading.RLock()

    @classmethod
    def from_store(cls, store: MemoryStore) -> "CompetencyEnvironment":
        env = cls()
        for descriptor in store.competencies():
            env.register_competency(descriptor)
        return env

    def register_competency(self, descriptor: CompetencyDescriptor) -> None:
        names = [a.name for a in descriptor.actions]
        if len(set(names)) != len(names):
            raise ValueError(
                f"competency {descriptor.id!r} has duplicate action names"
            )
        with self._lock:
            self._descriptors[descriptor.id] = descriptor

    def deregister(self, competency_id: str) -> None:
        with self._lock:
            self._descriptors.pop(competency_id, None)
            self._handlers.pop(competency_id, None)

    def set_available(self, competency_id: str, available: bool) -> None:
        with self._lock:
            descriptor = self._descriptors.get(competency_id)
            if descriptor is not None:
                self._descriptors[competency_id] = CompetencyDescriptor(
                    id=descriptor.id,
                    name=descriptor.name,
                    actions=descriptor.actions,
                    results=descriptor.results,
                    available=available,
                )

    def set_handler(
        self, competency_id: str, handler: Callable[[PlanStep], str]
    ) -> None:
        with self._lock:
            self._handlers[competency_id] = handler

    def descriptor(self, competency_id: str) -> Optional[CompetencyDescriptor]:
        return self._descriptors.get(competency_id)

    def is_available(self, competency_id: str) -> bool:
        descriptor = self._descriptors.get(competency_id)
        return descriptor is not None and descriptor.available


def strategies_for(
    association: StrategyAssociation, frame: Frame, store: MemoryStore
) -> List[ExecutionStrategy]:
    """The association's strategies usable with this frame: every role a
    strategy binds in its plan template must exist among the frame's
    semantic roles.  Declaration order is preserved."""
    roles = set(frame.semantic_roles)
    out = []
    for strategy_id in association.strategies:
        strategy = store.strategy(strategy_id)
        if strategy is None:
            continue
        needed = {
            role for step in strategy.plan_template for role in step.roles()
        }
        if needed <= roles:
            out.append(strategy)
    return out


def valid(
    strategy: ExecutionStrategy,
    meaning: "MeaningTree",
    env: CompetencyEnvironment,
    store: MemoryStore,
) -> ValidationResult:
    """Check every restriction (conjunction); report the first failure."""
    for restriction in strategy.restrictions:
        reason = _check(restriction, meaning, env, store)
        if reason is not None:
            return ValidationResult(
                valid=False, failed_restriction=(restriction, reason)
            )
    return ValidationResult(valid=True)


def _check(
    restriction: Restriction,
    meaning: "MeaningTree",
    env: CompetencyEnvironment,
    store: MemoryStore,
) -> Optional[str]:
    """None if the restriction holds, else a reason string."""
    if restriction.kind is RestrictionKind.COMPETENCY_AVAILABLE:
        if env.is_available(restriction.target):
            return None
        return f"competency {restriction.target!r} is not available"
    node_id = meaning.node_for_role(restriction.role)
    if node_id is None:
        return f"role {restriction.role!r} is not bound"
    label = store.node_label(node_id)
    target_label = store.node_label(restriction.target)
    if restriction.kind is RestrictionKind.IS_A:
        if store.isa_descendant(node_id, restriction.target):
            return None
        return f"'{label}' is not a '{target_label}'"
    # HasRelation: direct O-layer relation of the bound node.
    node = store.node(node_id)
    if node is not None:
        for relation in node.o_layer.relations:
            if (relation.kind == restriction.relation
                    and relation.target == restriction.target):
                return None
    return (
        f"'{label}' has no {restriction.relation!r} relation "
        f"to '{target_label}'"
    )


def instantiate(strategy: ExecutionStrategy, meaning: "MeaningTree") -> Plan:
    """Substitute the meaning's bound concepts into the plan template.

    The plan id is derived from the strategy and the meaning content, so
    identical interpretations always produce identical ids.
    """
    steps = []
    for template_step in strategy.plan_template:
        bindings = {}
        for _param, role in template_step.bindings:
            node_id = meaning.node_for_role(role)
            if node_id is None:
                raise UnboundRole(role)
            bindings[role] = node_id
        steps.append(PlanStep(
            competency=template_step.competency,
            action=template_step.action,
            bindings=tuple(sorted(bindings.items())),
        ))
    plan_id = "plan:" + content_hash(
        {"strategy": strategy.id, "meaning": meaning.content()}
    )
    return Plan(
        id=plan_id,
        strategy=strategy.id,
        meaning=meaning,
        steps=tuple(steps),
    )


def execute_plan(plan: Plan, env: CompetencyEnvironment) -> ExecutionTrace:
    """Run the plan through stub handlers, producing one entry per step."""
    entries = []
    for step in plan.steps:
        descriptor = env.descriptor(step.competency)
        if descriptor is None or not descriptor.available:
            raise CompetencyUnavailable(step.competency)
        handler = env._handlers.get(step.competency)
        if handler is not None:
            result = handler(step)
        elif descriptor.results:
            result = descriptor.results[0]
        else:
            result = "ok"
        entries.append(TraceEntry(
            competency=step.competency,
            action=step.action,
            bindings=step.bindings,
            result=result,
        ))
    return ExecutionTrace(plan=plan.id, entries=tuple(entries))
