"""Text grammar for forests.

::

    forest := item ("," item)*
    item   := tree | "(" tree ("," tree)* ")"
    tree   := ("b" | "x" | INT) ("[" tree ("," tree)* "]")?

An integer token is a liana end; both ends of a liana share the integer.
A parenthesised group is an aroma whose roots form the directed cycle
``t1 -> t2 -> ... -> tk -> t1``; ``(t)`` is a self-loop on the root of ``t``.
The empty string is the empty forest.  Whitespace is ignored on input.
"""

from __future__ import annotations

from collections import Counter
from typing import List, Optional, Tuple

from .forest import EMPTY, Forest, ForestError, LianaMultiplicityNot2, is_liana, validate


class ForestSyntaxError(ForestError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class _Parser:
    def __init__(self, text: str):
        self.s = "".join(text.split())
        self.i = 0
        self.deco: List = []
        self.edges: List[Tuple[int, int]] = []

    def peek(self) -> Optional[str]:
        return self.s[self.i] if self.i < len(self.s) else None

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            found = self.peek() or "end of input"
            raise ForestSyntaxError(f"expected {ch!r}, found {found!r}", self.i)
        self.i += 1

    def forest(self) -> None:
        if not self.s:
            return
        self.item()
        while self.peek() == ",":
            self.i += 1
            self.item()
        if self.peek() is not None:
            raise ForestSyntaxError(f"unexpected {self.peek()!r}", self.i)

    def item(self) -> None:
        if self.peek() != "(":
            self.tree()
            return
        self.i += 1
        roots = [self.tree()]
        while self.peek() == ",":
            self.i += 1
            roots.append(self.tree())
        self.expect(")")
        for a, b in zip(roots, roots[1:] + roots[:1]):
            self.edges.append((a, b))

    def tree(self) -> int:
        ch = self.peek()
        if ch in ("b", "x"):
            self.i += 1
            tok = ch
        elif ch is not None and ch.isdigit():
            j = self.i
            while self.peek() is not None and self.peek().isdigit():  # type: ignore[union-attr]
                self.i += 1
            tok = int(self.s[j:self.i])
        else:
            raise ForestSyntaxError(f"expected vertex token, found {ch or 'end of input'!r}", self.i)
        v = len(self.deco)
        self.deco.append(tok)
        if self.peek() == "[":
            self.i += 1
            self.edges.append((self.tree(), v))
            while self.peek() == ",":
                self.i += 1
                self.edges.append((self.tree(), v))
            self.expect("]")
        return v


def parse(text: str) -> Forest:
    """Parse and validate a forest; liana labels (including ``0``) are renumbered."""
    p = _Parser(text)
    p.forest()
    if not p.deco:
        return EMPTY
    counts = Counter(d for d in p.deco if is_liana(d))
    for k, m in counts.items():
        if m != 2:
            raise LianaMultiplicityNot2(f"liana label {k} occurs {m} times")
    # label 0 is legal on input; shift so that all labels are positive
    deco = [d + 1 if is_liana(d) else d for d in p.deco]
    return validate(deco, p.edges)


def print_canonical(forest: Forest) -> str:
    return forest.key


def print_latex(forest: Forest) -> str:
    """LaTeX using the ``\\forest{...}`` tree macro vocabulary."""
    if forest.n == 0:
        return r"\mathbf{1}"
    return r"\forest{" + forest.key + "}"


def to_forest(obj) -> Forest:
    """Accept either a Forest or its text."""
    return obj if isinstance(obj, Forest) else parse(obj)
