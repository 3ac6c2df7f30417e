"""Compiled CSS and XPath selectors over the :mod:`newsharvest.htmldom` tree.

Publisher rules only ever need simple selectors, so both engines implement a
documented subset and reject everything else at compile time (which is what
makes registry validation meaningful):

CSS      tag, ``*``, ``.class``, ``#id``, ``[attr]``, ``[attr=v]`` plus the
         ``~= ^= $= *= |=`` attribute operators, combinators ``'space' > + ~``
         and comma groups.
XPath    absolute paths of ``/`` and ``//`` steps with element names or ``*``,
         predicates ``[@attr]``, ``[@attr='v']``, ``[n]``,
         ``[contains(@attr,'v')]``, ``[starts-with(@attr,'v')]`` and a final
         ``/@attr`` or ``/text()`` step.

An expression is routed to the XPath engine when written with an ``xpath:``
prefix or starting with ``/``; everything else is CSS (an explicit ``css:``
prefix is also accepted).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .articles import normalize_text
from .htmldom import Node


class SelectorError(ValueError):
    """Raised at compile time for syntax outside the supported subset."""


# --------------------------------------------------------------------------
# CSS engine
# --------------------------------------------------------------------------

_CSS_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*")
_CSS_STRING = re.compile(r"'([^']*)'|\"([^\"]*)\"")
_ATTR_OPS = ("~=", "^=", "$=", "*=", "|=", "=")


@dataclass(frozen=True)
class _Compound:
    tag: str | None  # None means '*'
    classes: tuple[str, ...]
    ids: tuple[str, ...]
    attrs: tuple[tuple[str, str | None, str], ...]  # (name, op, value)

    def matches(self, node: Node) -> bool:
        if node.tag.startswith("#"):
            return False
        if self.tag is not None and node.tag != self.tag:
            return False
        if self.classes and not all(c in node.classes for c in self.classes):
            return False
        if self.ids and not all(node.attrs.get("id") == i for i in self.ids):
            return False
        for name, op, value in self.attrs:
            actual = node.attrs.get(name)
            if actual is None:
                return False
            if op is None:
                continue
            if op == "=" and actual != value:
                return False
            if op == "~=" and value not in actual.split():
                return False
            if op == "^=" and not actual.startswith(value):
                return False
            if op == "$=" and not actual.endswith(value):
                return False
            if op == "*=" and value not in actual:
                return False
            if op == "|=" and not (actual == value or actual.startswith(value + "-")):
                return False
        return True


class _CssParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str) -> SelectorError:
        return SelectorError(f"invalid CSS selector at position {self.pos}: {message} in {self.text!r}")

    def eof(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if not self.eof() else ""

    def skip_ws(self) -> bool:
        start = self.pos
        while not self.eof() and self.text[self.pos].isspace():
            self.pos += 1
        return self.pos > start

    def ident(self) -> str:
        match = _CSS_IDENT.match(self.text, self.pos)
        if not match:
            raise self.error("expected identifier")
        self.pos = match.end()
        return match.group(0)

    def attr_value(self) -> str:
        match = _CSS_STRING.match(self.text, self.pos)
        if match:
            self.pos = match.end()
            return match.group(1) if match.group(1) is not None else match.group(2)
        return self.ident()

    def compound(self) -> _Compound:
        tag: str | None = None
        classes: list[str] = []
        ids: list[str] = []
        attrs: list[tuple[str, str | None, str]] = []
        matched = False
        if self.peek() == "*":
            self.pos += 1
            matched = True
        elif _CSS_IDENT.match(self.text, self.pos):
            tag = self.ident().lower()
            matched = True
        while not self.eof():
            ch = self.peek()
            if ch == ".":
                self.pos += 1
                classes.append(self.ident())
            elif ch == "#":
                self.pos += 1
                ids.append(self.ident())
            elif ch == "[":
                self.pos += 1
                self.skip_ws()
                name = self.ident().lower()
                self.skip_ws()
                op = None
                value = ""
                for candidate in _ATTR_OPS:
                    if self.text.startswith(candidate, self.pos):
                        op = candidate
                        self.pos += len(candidate)
                        break
                if op is not None:
                    self.skip_ws()
                    value = self.attr_value()
                self.skip_ws()
                if self.peek() != "]":
                    raise self.error("expected ']'")
                self.pos += 1
                attrs.append((name, op, value))
            elif ch == ":":
                raise self.error("pseudo-classes are not supported")
            else:
                break
            matched = True
        if not matched:
            raise self.error("expected a compound selector")
        return _Compound(tag, tuple(classes), tuple(ids), tuple(attrs))

    def selector(self) -> list[tuple[str | None, _Compound]]:
        parts: list[tuple[str | None, _Compound]] = [(None, self.compound())]
        while True:
            had_ws = self.skip_ws()
            if self.eof() or self.peek() == ",":
                return parts
            if self.peek() in "><+~":
                ch = self.peek()
                if ch == "<":
                    raise self.error("unknown combinator '<'")
                self.pos += 1
                self.skip_ws()
                combinator = {">": "child", "+": "adjacent", "~": "sibling"}[ch]
            elif had_ws:
                combinator = "descendant"
            else:
                raise self.error("unexpected character")
            parts.append((combinator, self.compound()))

    def group(self) -> list[list[tuple[str | None, _Compound]]]:
        self.skip_ws()
        selectors = [self.selector()]
        while not self.eof():
            if self.peek() != ",":
                raise self.error("unexpected trailing input")
            self.pos += 1
            self.skip_ws()
            selectors.append(self.selector())
        return selectors


def _prev_element(node: Node) -> Node | None:
    if node.parent is None:
        return None
    prev = None
    for child in node.parent.iter_children():
        if child is node:
            return prev
        prev = child
    return None


class CssSelector:
    """A compiled CSS selector group."""

    def __init__(self, expression: str):
        self.expression = expression
        self._selectors = _CssParser(expression).group()
        if not self._selectors:
            raise SelectorError(f"empty selector: {expression!r}")

    def _match_chain(self, node: Node, parts: list[tuple[str | None, _Compound]], idx: int) -> bool:
        if not parts[idx][1].matches(node):
            return False
        if idx == 0:
            return True
        combinator = parts[idx][0]
        if combinator == "descendant":
            parent = node.parent
            while parent is not None:
                if self._match_chain(parent, parts, idx - 1):
                    return True
                parent = parent.parent
            return False
        if combinator == "child":
            return node.parent is not None and self._match_chain(node.parent, parts, idx - 1)
        if combinator == "adjacent":
            prev = _prev_element(node)
            return prev is not None and self._match_chain(prev, parts, idx - 1)
        # general sibling
        prev = _prev_element(node)
        while prev is not None:
            if self._match_chain(prev, parts, idx - 1):
                return True
            prev = _prev_element(prev)
        return False

    def matches(self, node: Node) -> bool:
        return any(self._match_chain(node, parts, len(parts) - 1) for parts in self._selectors)

    def select(self, root: Node) -> list[Node]:
        return [node for node in root.iter() if self.matches(node)]


# --------------------------------------------------------------------------
# XPath engine
# --------------------------------------------------------------------------

_XPATH_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*")
_XPATH_STRING = re.compile(r"'([^']*)'|\"([^\"]*)\"")


@dataclass(frozen=True)
class _Predicate:
    kind: str  # attr_present | attr_equals | contains | starts_with | position
    name: str = ""
    value: str = ""
    position: int = 0

    def test(self, node: Node) -> bool:
        actual = node.attrs.get(self.name)
        if self.kind == "attr_present":
            return actual is not None
        if self.kind == "attr_equals":
            return actual == self.value
        if self.kind == "contains":
            return actual is not None and self.value in actual
        if self.kind == "starts_with":
            return actual is not None and actual.startswith(self.value)
        raise AssertionError(self.kind)


@dataclass(frozen=True)
class _Step:
    axis: str  # child | descendant
    kind: str  # element | attribute | text
    name: str = ""
    predicates: tuple[_Predicate, ...] = ()


class _XPathParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str) -> SelectorError:
        return SelectorError(f"invalid XPath at position {self.pos}: {message} in {self.text!r}")

    def eof(self) -> bool:
        return self.pos >= len(self.text)

    def string(self) -> str:
        match = _XPATH_STRING.match(self.text, self.pos)
        if not match:
            raise self.error("expected quoted string")
        self.pos = match.end()
        return match.group(1) if match.group(1) is not None else match.group(2)

    def name(self) -> str:
        match = _XPATH_NAME.match(self.text, self.pos)
        if not match:
            raise self.error("expected name")
        self.pos = match.end()
        return match.group(0)

    def predicate(self) -> _Predicate:
        text = self.text
        if text.startswith("@", self.pos):
            self.pos += 1
            name = self.name().lower()
            if text.startswith("=", self.pos):
                self.pos += 1
                return _Predicate("attr_equals", name=name, value=self.string())
            return _Predicate("attr_present", name=name)
        for func, kind in (("contains(", "contains"), ("starts-with(", "starts_with")):
            if text.startswith(func, self.pos):
                self.pos += len(func)
                if not text.startswith("@", self.pos):
                    raise self.error(f"{func} requires an @attribute argument")
                self.pos += 1
                name = self.name().lower()
                if not text.startswith(",", self.pos):
                    raise self.error("expected ','")
                self.pos += 1
                while text.startswith(" ", self.pos):
                    self.pos += 1
                value = self.string()
                if not text.startswith(")", self.pos):
                    raise self.error("expected ')'")
                self.pos += 1
                return _Predicate(kind, name=name, value=value)
        match = re.match(r"\d+", text[self.pos:])
        if match:
            self.pos += match.end()
            return _Predicate("position", position=int(match.group(0)))
        raise self.error("unsupported predicate")

    def steps(self) -> list[_Step]:
        if not self.text.startswith("/"):
            raise self.error("path must start with '/' or '//'")
        steps: list[_Step] = []
        while not self.eof():
            if self.text.startswith("//", self.pos):
                axis = "descendant"
                self.pos += 2
            elif self.text.startswith("/", self.pos):
                axis = "child"
                self.pos += 1
            else:
                raise self.error("expected '/' or '//'")
            if self.text.startswith("@", self.pos):
                self.pos += 1
                steps.append(_Step(axis, "attribute", self.name().lower()))
                continue
            if self.text.startswith("text()", self.pos):
                self.pos += len("text()")
                steps.append(_Step(axis, "text"))
                continue
            if self.text.startswith("*", self.pos):
                self.pos += 1
                name = ""
            else:
                name = self.name().lower()
            predicates: list[_Predicate] = []
            while self.text.startswith("[", self.pos):
                self.pos += 1
                predicates.append(self.predicate())
                if not self.text.startswith("]", self.pos):
                    raise self.error("expected ']'")
                self.pos += 1
            steps.append(_Step(axis, "element", name, tuple(predicates)))
        for step in steps[:-1]:
            if step.kind != "element":
                raise SelectorError(f"@attribute/text() must be the final step: {self.text!r}")
        if not steps:
            raise self.error("empty path")
        return steps


def _descendants(node: Node) -> list[Node]:
    return [n for n in node.iter() if n is not node]


class XPathSelector:
    """A compiled XPath expression from the supported subset."""

    def __init__(self, expression: str):
        self.expression = expression
        self._steps = _XPathParser(expression).steps()
        self.returns_text = self._steps[-1].kind in ("attribute", "text")

    def select(self, root: Node) -> list[Node] | list[str]:
        contexts: list[Node] = [root]
        for step in self._steps:
            if step.kind == "attribute":
                owners = self._axis_nodes(contexts, step.axis, include_self=True)
                return [n.attrs[step.name] for n in owners if step.name in n.attrs]
            if step.kind == "text":
                owners = self._axis_nodes(contexts, step.axis, include_self=True)
                chunks = []
                for owner in owners:
                    for child in owner.children:
                        if isinstance(child, str):
                            text = normalize_text(child)
                            if text:
                                chunks.append(text)
                return chunks
            next_contexts: list[Node] = []
            seen: set[int] = set()
            for context in contexts:
                pool = _descendants(context) if step.axis == "descendant" else list(context.iter_children())
                group = [n for n in pool if not step.name or n.tag == step.name]
                for predicate in step.predicates:
                    if predicate.kind == "position":
                        group = [group[predicate.position - 1]] if len(group) >= predicate.position else []
                    else:
                        group = [n for n in group if predicate.test(n)]
                for node in group:
                    if id(node) not in seen:
                        seen.add(id(node))
                        next_contexts.append(node)
            contexts = sorted(next_contexts, key=lambda n: n.order)
        return contexts

    def _axis_nodes(self, contexts: list[Node], axis: str, include_self: bool) -> list[Node]:
        if axis == "child":
            return contexts
        seen: set[int] = set()
        out: list[Node] = []
        for context in contexts:
            nodes = context.iter() if include_self else _descendants(context)
            for node in nodes:
                if id(node) not in seen:
                    seen.add(id(node))
                    out.append(node)
        return sorted(out, key=lambda n: n.order)


Selector = CssSelector | XPathSelector


def compile_selector(expression: str, strategy: str | None = None) -> Selector:
    """Compile a selector expression, auto-detecting CSS vs XPath.

    ``strategy`` forces the engine ("css_selector" / "xpath_selector");
    otherwise a ``css:``/``xpath:`` prefix or a leading ``/`` decides.
    """
    expr = expression.strip()
    if strategy == "xpath_selector":
        return XPathSelector(expr)
    if strategy == "css_selector":
        return CssSelector(expr)
    if expr.startswith("xpath:"):
        return XPathSelector(expr[len("xpath:"):].strip())
    if expr.startswith("css:"):
        return CssSelector(expr[len("css:"):].strip())
    if expr.startswith("/"):
        return XPathSelector(expr)
    return CssSelector(expr)
