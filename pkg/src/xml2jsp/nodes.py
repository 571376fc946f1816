"""Per-element trees built lazily from the event stream.

Both analysis and code generation walk the document one top-level element
at a time; memory is bounded by the largest single element, not by the
document.
"""

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .reader import EventKind, SourcePosition, XmlEvent


@dataclass
class Node:
    name: str
    position: SourcePosition
    children: list["Node"] = field(default_factory=list)
    text_parts: list[str] = field(default_factory=list)
    attributes: tuple[str, ...] = ()

    @property
    def text(self) -> str:
        return "".join(self.text_parts)

    def find(self, name: str) -> "Node | None":
        for child in self.children:
            if child.name == name:
                return child
        return None

    def find_all(self, name: str) -> list["Node"]:
        return [child for child in self.children if child.name == name]


def build_node(start: XmlEvent, events: Iterator[XmlEvent]) -> Node:
    """Consume events through the matching end tag and return the subtree."""
    node = Node(start.name, start.position, attributes=start.attributes)
    for event in events:
        if event.kind is EventKind.START_ELEMENT:
            node.children.append(build_node(event, events))
        elif event.kind is EventKind.CHARACTERS:
            node.text_parts.append(event.text)
        elif event.kind is EventKind.END_ELEMENT:
            return node
    return node


def iter_top_level(events: Iterable[XmlEvent]) -> Iterator[Node]:
    """Yield the document element's children as nodes, one at a time."""
    it = iter(events)
    for event in it:
        if event.kind is EventKind.START_ELEMENT:
            break
    else:
        return
    for event in it:
        if event.kind is EventKind.START_ELEMENT:
            yield build_node(event, it)
        elif event.kind is EventKind.END_ELEMENT:
            return
