"""Mission events, in the order the agent produces them."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Union


@dataclass(frozen=True)
class Move:
    src: int
    dst: int

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "move", "from": self.src, "to": self.dst}


@dataclass(frozen=True)
class Sense:
    at: int
    target: int
    blocked: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "sense", "at": self.at, "target": self.target, "result": self.blocked}


@dataclass(frozen=True)
class Abort:
    target: int

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "abort", "target": self.target}


@dataclass(frozen=True)
class Visit:
    waypoint: int

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "visit", "waypoint": self.waypoint}


@dataclass(frozen=True)
class Terminate:
    reason: str

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "terminate", "reason": self.reason}


Event = Union[Move, Sense, Abort, Visit, Terminate]


def event_from_dict(record: Dict[str, Any]) -> Event:
    """Inverse of ``Event.to_dict``; extra keys such as ``t`` are ignored."""
    kind = record.get("type")
    if kind == "move":
        return Move(int(record["from"]), int(record["to"]))
    if kind == "sense":
        return Sense(int(record["at"]), int(record["target"]), bool(record["result"]))
    if kind == "abort":
        return Abort(int(record["target"]))
    if kind == "visit":
        return Visit(int(record["waypoint"]))
    if kind == "terminate":
        return Terminate(str(record["reason"]))
    raise ValueError(f"unknown event type {kind!r}")

