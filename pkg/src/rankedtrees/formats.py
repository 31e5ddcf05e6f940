"""Text formats for trees.

Newick dialect::

    tree    := subtree ";"
    subtree := "x" | "(" subtree ("," subtree)* ")" label
    label   := [1-9][0-9]*

Leaves are the literal ``x``; the internal label follows the closing
parenthesis.  No whitespace is allowed inside a tree; surrounding whitespace
is ignored.  Example: ``((x,x)2,x)1;``.

JSON schema::

    {"root": NODE}    NODE := "leaf" | {"label": int, "children": [NODE, ...]}

Printers emit the canonical (left-to-right preorder) form.  Printers and the
Newick parser are iterative, so deep trees do not hit the recursion limit
(JSON reading goes through the stdlib decoder, which does).
"""

from __future__ import annotations

import json
from typing import Callable

from .tree import LabeledTree


class NewickError(ValueError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} at position {position}")


class SchemaError(ValueError):
    def __init__(self, message: str, path: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def _render(tree: LabeledTree, leaf: str, open_: Callable[[int], str], sep: str,
            close: Callable[[int], str]) -> str:
    t = tree.canonical()
    labels = t.labels.tolist()
    arity = t.arity.tolist()
    parts: list[str] = []
    stack: list[list[int]] = []  # [label, children left to print]
    for v in range(len(labels)):
        if arity[v]:
            parts.append(open_(labels[v]))
            stack.append([labels[v], arity[v]])
            continue
        parts.append(leaf)
        while stack:
            top = stack[-1]
            top[1] -= 1
            if top[1]:
                parts.append(sep)
                break
            stack.pop()
            parts.append(close(top[0]))
    return "".join(parts)


def to_newick(tree: LabeledTree) -> str:
    return _render(tree, "x", lambda _: "(", ",", lambda lab: f"){lab}") + ";"


def parse_newick(text: str) -> LabeledTree:
    s = text.strip()
    offset = len(text) - len(text.lstrip())
    labels: list[int] = []
    arity: list[int] = []
    stack: list[int] = []  # preorder index of open internal nodes
    i = 0
    n = len(s)
    done = False

    def fail(msg: str, pos: int):
        raise NewickError(msg, offset + pos)

    expect_subtree = True
    while i < n:
        ch = s[i]
        if done:
            fail("trailing characters after ';'", i)
        if expect_subtree:
            if ch == "x":
                if stack:
                    arity[stack[-1]] += 1
                elif labels:
                    fail("second top-level subtree", i)
                labels.append(0)
                arity.append(0)
                expect_subtree = False
                i += 1
            elif ch == "(":
                if stack:
                    arity[stack[-1]] += 1
                elif labels:
                    fail("second top-level subtree", i)
                stack.append(len(labels))
                labels.append(0)
                arity.append(0)
                i += 1
            else:
                fail(f"expected 'x' or '(' but found {ch!r}", i)
            continue
        if ch == ",":
            if not stack:
                fail("',' outside parentheses", i)
            expect_subtree = True
            i += 1
        elif ch == ")":
            if not stack:
                fail("unbalanced ')'", i)
            j = i + 1
            while j < n and s[j].isdigit():
                j += 1
            if j == i + 1:
                fail("missing label after ')'", j)
            if s[i + 1] == "0":
                fail("label must be a positive integer without leading zeros", i + 1)
            node = stack.pop()
            if arity[node] < 2:
                fail("internal node needs at least two children", i)
            labels[node] = int(s[i + 1:j])
            i = j
        elif ch == ";":
            if stack:
                fail("unclosed '('", i)
            done = True
            i += 1
        else:
            fail(f"unexpected character {ch!r}", i)
    if expect_subtree:
        fail("unexpected end of input", n)
    if not done:
        fail("missing terminating ';'", n)
    return LabeledTree.from_preorder(labels, arity)


def to_json(tree: LabeledTree) -> str:
    return ('{"root":'
            + _render(tree, '"leaf"', lambda lab: f'{{"label":{lab},"children":[', ",", lambda _: "]}")
            + "}")


def load_json(text: str):
    """``json.loads`` with decoder failures mapped to :class:`SchemaError`.

    The stdlib decoder recurses per nesting level, so documents nested
    deeper than the interpreter recursion limit are refused here; Newick
    has no such limit.
    """
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON ({exc.msg}, char {exc.pos})", "$") from None
    except RecursionError:
        raise SchemaError("JSON nesting too deep for the decoder; use Newick", "$") from None


def from_json(text: str) -> LabeledTree:
    return tree_from_obj(load_json(text))


def tree_from_obj(doc) -> LabeledTree:
    """Decode an already-parsed JSON document."""
    if not isinstance(doc, dict) or "root" not in doc:
        raise SchemaError('expected an object with key "root"', "$")
    extra = set(doc) - {"root"}
    if extra:
        raise SchemaError(f"unexpected keys {sorted(extra)}", "$")
    labels: list[int] = []
    arity: list[int] = []
    stack = [(doc["root"], "$.root")]
    while stack:
        node, path = stack.pop()
        if node == "leaf":
            labels.append(0)
            arity.append(0)
            continue
        if not isinstance(node, dict):
            raise SchemaError('expected "leaf" or a node object', path)
        if set(node) != {"label", "children"}:
            raise SchemaError('node object needs exactly "label" and "children"', path)
        lab = node["label"]
        if not isinstance(lab, int) or isinstance(lab, bool):
            raise SchemaError("label must be an integer", path + ".label")
        kids = node["children"]
        if not isinstance(kids, list) or len(kids) < 2:
            raise SchemaError("children must be a list of at least two nodes", path + ".children")
        labels.append(lab)
        arity.append(len(kids))
        for j in range(len(kids) - 1, -1, -1):
            stack.append((kids[j], f"{path}.children[{j}]"))
    return LabeledTree.from_preorder(labels, arity)
