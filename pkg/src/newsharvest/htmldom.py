"""Tolerant HTML document tree built on the stdlib tokenizer.

Real-world news markup is rarely well-formed, so parsing never raises:
stray end tags are dropped, paragraphs and list items are auto-closed the
way browsers close them, and unknown constructs are kept as opaque nodes.
The tree is the input for the CSS/XPath selector engine in
:mod:`newsharvest.selectors`.
"""

from __future__ import annotations

import re
from html.parser import HTMLParser
from typing import Iterator

from .articles import normalize_text

VOID_ELEMENTS = frozenset(
    "area base br col embed hr img input link meta param source track wbr".split()
)

# Start tags that implicitly terminate an open <p>, per the HTML living standard.
_P_CLOSERS = frozenset(
    "address article aside blockquote details div dl fieldset figcaption figure "
    "footer form h1 h2 h3 h4 h5 h6 header hr main menu nav ol p pre section "
    "table ul".split()
)

_SELF_CLOSERS = {
    "li": frozenset(["li"]),
    "dt": frozenset(["dt", "dd"]),
    "dd": frozenset(["dt", "dd"]),
    "tr": frozenset(["tr"]),
    "td": frozenset(["td", "th"]),
    "th": frozenset(["td", "th"]),
    "option": frozenset(["option"]),
}

_NON_TEXT_TAGS = frozenset(["script", "style", "template", "noscript"])


class Node:
    """One element. ``children`` interleaves child nodes and text chunks."""

    __slots__ = ("tag", "attrs", "children", "parent", "order")

    def __init__(self, tag: str, attrs: dict[str, str], parent: "Node | None", order: int):
        self.tag = tag
        self.attrs = attrs
        self.children: list[Node | str] = []
        self.parent = parent
        self.order = order

    @property
    def classes(self) -> frozenset[str]:
        return frozenset(self.attrs.get("class", "").split())

    def get(self, name: str, default: str | None = None) -> str | None:
        return self.attrs.get(name, default)

    def iter(self) -> Iterator["Node"]:
        """This node and all element descendants, in document order."""
        yield self
        for child in self.children:
            if isinstance(child, Node):
                yield from child.iter()

    def iter_children(self) -> Iterator["Node"]:
        for child in self.children:
            if isinstance(child, Node):
                yield child

    def text(self) -> str:
        """Normalized visible text: inline markup flattened, ``<br>`` as a
        space, script/style/template content excluded."""
        return normalize_text("".join(self._text_chunks()))

    def _text_chunks(self) -> Iterator[str]:
        if self.tag in _NON_TEXT_TAGS:
            return
        for child in self.children:
            if isinstance(child, str):
                yield child
            elif child.tag == "br":
                yield " "
            else:
                yield from child._text_chunks()

    def raw_text(self) -> str:
        """Concatenated text children without normalization (script bodies)."""
        return "".join(c for c in self.children if isinstance(c, str))

    def __repr__(self) -> str:  # pragma: no cover
        return f"<Node {self.tag} order={self.order}>"


class _TreeBuilder(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self._counter = 0
        self.root = Node("#document", {}, None, self._counter)
        self._stack = [self.root]

    def _open_tags(self) -> list[str]:
        return [n.tag for n in self._stack]

    def _auto_close(self, tag: str) -> None:
        top = self._stack[-1].tag
        if tag in _P_CLOSERS and top == "p":
            self._stack.pop()
        elif top in _SELF_CLOSERS and tag in _SELF_CLOSERS[top]:
            self._stack.pop()

    def handle_starttag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        tag = tag.lower()
        self._auto_close(tag)
        attr_map: dict[str, str] = {}
        for name, value in attrs:
            name = name.lower()
            if name not in attr_map:  # first occurrence wins
                attr_map[name] = value if value is not None else ""
        self._counter += 1
        node = Node(tag, attr_map, self._stack[-1], self._counter)
        self._stack[-1].children.append(node)
        if tag not in VOID_ELEMENTS:
            self._stack.append(node)

    def handle_startendtag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        self.handle_starttag(tag, attrs)
        if tag.lower() not in VOID_ELEMENTS:
            self._stack.pop()

    def handle_endtag(self, tag: str) -> None:
        tag = tag.lower()
        if tag in VOID_ELEMENTS:
            return
        open_tags = self._open_tags()
        if tag not in open_tags:
            return  # stray end tag
        while self._stack[-1].tag != tag:
            self._stack.pop()
        self._stack.pop()

    def handle_data(self, data: str) -> None:
        if data:
            self._stack[-1].children.append(data)


def parse_html(text: str) -> Node:
    """Parse HTML into a document tree. Never raises on malformed markup."""
    builder = _TreeBuilder()
    try:
        builder.feed(text)
        builder.close()
    except Exception:
        # html.parser is tolerant by design; belt and braces for exotic input.
        pass
    return builder.root


_META_CHARSET = re.compile(
    rb"""<meta[^>]+charset\s*=\s*["']?\s*([a-zA-Z0-9_\-]+)""", re.IGNORECASE
)


def sniff_charset(payload: bytes, declared: str | None = None) -> str:
    """Pick a charset: transport declaration, then a ``<meta>`` sniff of the
    first 2048 bytes, then UTF-8."""
    if declared:
        try:
            b"".decode(declared)
            return declared
        except (LookupError, ValueError):
            pass
    match = _META_CHARSET.search(payload[:2048])
    if match:
        candidate = match.group(1).decode("ascii", "replace")
        try:
            b"".decode(candidate)
            return candidate
        except (LookupError, ValueError):
            pass
    return "utf-8"


def decode_html(payload: str | bytes, declared_charset: str | None = None) -> str:
    """Decode an HTML payload to text, replacing undecodable bytes."""
    if isinstance(payload, str):
        return payload
    return payload.decode(sniff_charset(payload, declared_charset), errors="replace")
