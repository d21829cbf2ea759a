"""Registry of intensional operations.

An operation ``f`` maps closed terms of type ``A`` to closed terms of type
``B`` and may be partial.  It is exposed as the constant ``~f : []A -> []B``
with the rule ``~f (box M) --> box f(M)`` for closed ``M`` on which ``f`` is
defined.  An operation marked ``boxed=False`` has type ``[]A -> B`` and
rewrites to ``f(M)`` directly; ``~done?`` is the one built-in of this kind.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .syntax import App, BOOL, Box, Arrow, NAT, Term, Type, boolean, is_closed


class DuplicateOp(ValueError):
    pass


class OpResultError(AssertionError):
    """An operation returned a term outside its declared codomain."""


@dataclass(frozen=True)
class IntensionalOp:
    name: str
    domain: Type
    codomain: Type
    apply: Callable[[Term, "Registry"], Optional[Term]]
    boxed: bool = True
    doc: str = ""

    @property
    def type(self) -> Type:
        cod = Box(self.codomain) if self.boxed else self.codomain
        return Arrow(Box(self.domain), cod)

    def invoke(self, body: Term, registry: "Registry") -> Optional[Term]:
        if not is_closed(body):
            return None
        result = self.apply(body, registry)
        if result is not None and registry.validate:
            from .checker import TypeCheckError, check
            from .syntax import EMPTY
            try:
                check(EMPTY, result, self.codomain, registry)
            except TypeCheckError as e:
                raise OpResultError(f"~{self.name} returned {result}: {e}") from e
        return result


class Registry:
    """Immutable name -> op table; ``register`` returns an extended copy."""

    def __init__(self, ops: Iterable[IntensionalOp] = (), retract: bool = True,
                 validate: bool = False):
        self._ops: dict[str, IntensionalOp] = {}
        for op in ops:
            if op.name in self._ops:
                raise DuplicateOp(op.name)
            self._ops[op.name] = op
        self.retract = retract
        self.validate = validate

    def register(self, op: IntensionalOp) -> Registry:
        if op.name in self._ops:
            raise DuplicateOp(f"operation ~{op.name} is already registered")
        return Registry([*self._ops.values(), op], self.retract, self.validate)

    def get(self, name: str) -> Optional[IntensionalOp]:
        return self._ops.get(name)

    def __contains__(self, name):
        return name in self._ops

    def __iter__(self):
        return iter(self._ops.values())

    def __len__(self):
        return len(self._ops)

    def names(self) -> list[str]:
        return list(self._ops)

    def describe(self) -> list[str]:
        lines = [f"~{op.name} : {op.type}" for op in self]
        if self.retract:
            lines += ["in : [](F -> F) -> F", "out : F -> [](F -> F)"]
        return lines


# ---------------------------------------------------------------------------
# Built-ins

def tick(m: Term, registry: Registry) -> Optional[Term]:
    """One strategy step of ``m``; undefined when ``m`` is normal."""
    from .reduction import IllTypedStuck, strategy_step
    try:
        s = strategy_step(m, registry)
    except IllTypedStuck:
        return None
    return None if s is None else s.term


def done(m: Term, registry: Registry) -> Term:
    return boolean(tick(m, registry) is None)


def is_app(m: Term, registry: Registry) -> Term:
    return boolean(isinstance(m, App))


TICK = IntensionalOp("tick", BOOL, BOOL, tick, doc="one reduction step")
DONE = IntensionalOp("done?", BOOL, BOOL, done, boxed=False, doc="is the code normal?")
IS_APP = IntensionalOp("is-app", NAT, BOOL, is_app, doc="is the code an application?")
IS_APP_BOOL = IntensionalOp("is-app-bool", BOOL, BOOL, is_app, doc="is the code an application?")

BUILTINS = {
    "tick": [TICK],
    "done": [DONE],
    "is-app": [IS_APP, IS_APP_BOOL],
}
ALL_OPS = ("tick", "done", "is-app", "retract")


def make_registry(enabled: Iterable[str] = ALL_OPS, validate: bool = False) -> Registry:
    """Registry for a CLI-style selection like ``["tick", "done", "retract"]``."""
    enabled = list(enabled)
    unknown = set(enabled) - set(ALL_OPS)
    if unknown:
        raise ValueError(f"unknown ops: {', '.join(sorted(unknown))}")
    ops = [op for key in enabled if key != "retract" for op in BUILTINS[key]]
    return Registry(ops, retract="retract" in enabled, validate=validate)


_DEFAULT: Optional[Registry] = None


def default_registry() -> Registry:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = make_registry()
    return _DEFAULT
