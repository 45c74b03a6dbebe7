"""Meta-strategy files: JSON with stem/loop arrays of unit plans."""
from __future__ import annotations

import json

from .strategies import MetaStrategy, UnitPlan


class StrategyFormatError(ValueError):
    pass


def _plan_from(obj, controllable: frozenset[str], where: str) -> UnitPlan:
    if not isinstance(obj, dict) or set(obj) - {"point", "interval"}:
        raise StrategyFormatError(f"{where}: plan must have point/interval fields")
    point = obj.get("point", [])
    interval = obj.get("interval", [])
    if not isinstance(interval, list) or not interval:
        raise StrategyFormatError(f"{where}: interval must be a nonempty list")
    def check(names, ctx):
        for n in names:
            if n not in controllable:
                raise StrategyFormatError(
                    f"{where}: {ctx}: {n!r} is not a controllable action"
                )
        return frozenset(names)
    return UnitPlan(
        check(point, "point"),
        tuple(check(part, "interval") for part in interval),
    )


def parse(text: str, controllable: frozenset[str]) -> MetaStrategy:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StrategyFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise StrategyFormatError("top level must be an object")
    stem = [
        _plan_from(p, controllable, f"stem[{i}]")
        for i, p in enumerate(doc.get("stem", []))
    ]
    loop = [
        _plan_from(p, controllable, f"loop[{i}]")
        for i, p in enumerate(doc.get("loop", []))
    ]
    if not loop:
        raise StrategyFormatError("loop must be nonempty")
    return MetaStrategy(tuple(stem), tuple(loop))


def dump(phi: MetaStrategy) -> str:
    def plan_obj(p: UnitPlan) -> dict:
        return {
            "point": sorted(p.at_point),
            "interval": [sorted(part) for part in p.in_interval],
        }
    doc = {
        "stem": [plan_obj(p) for p in phi.stem],
        "loop": [plan_obj(p) for p in phi.loop],
    }
    return json.dumps(doc, indent=2) + "\n"


def load(path: str, controllable: frozenset[str]) -> MetaStrategy:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), controllable)


def save(phi: MetaStrategy, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump(phi))
