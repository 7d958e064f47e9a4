"""Text formats: the .alg algebra format, terms, identities, partitions.

The algebra grammar is line oriented:

    algebra NAME
    size N
    op NAME ARITY
    <n^ARITY entries, whitespace/newline separated, last argument fastest>
    derive NAME ARITY = TERM
    # comment

Terms are identifiers with parentheses and commas; element literals are
written @k.  Variables are identifiers bound by first use and mapped to
indices in order of appearance.
"""

from __future__ import annotations

import re
from typing import List, Tuple

from .core import (AlgebraError, App, Const, FiniteAlgebra, Identity,
                   OperationTable, Quasiidentity, Term, Var, materialize_term)


class ParseError(ValueError):
    def __init__(self, line: int, col: int, reason: str):
        self.line = line
        self.col = col
        self.reason = reason
        super().__init__(f"line {line}, column {col}: {reason}")


_TOKEN_RE = re.compile(r"\s*(->|[A-Za-z_][A-Za-z0-9_]*|@?\d+|[(),=&|])")


def _tokenize(text: str, line: int = 1):
    """(kind, value, line, col) tuples; kinds: name, int, const, punct."""
    tokens = []
    for lineno, raw in enumerate(text.splitlines() or [""], start=line):
        body = raw.split("#", 1)[0]
        pos = 0
        while pos < len(body):
            if body[pos].isspace():
                pos += 1
                continue
            m = _TOKEN_RE.match(body, pos)
            if not m or m.start(1) != pos:
                raise ParseError(lineno, pos + 1, f"unexpected character {body[pos]!r}")
            tok = m.group(1)
            col = pos + 1
            if tok.startswith("@"):
                tokens.append(("const", int(tok[1:]), lineno, col))
            elif tok.isdigit():
                tokens.append(("int", int(tok), lineno, col))
            elif tok[0].isalpha() or tok[0] == "_":
                tokens.append(("name", tok, lineno, col))
            else:
                tokens.append(("punct", tok, lineno, col))
            pos = m.end(1)
    return tokens


class _TermParser:
    """Recursive-descent term parser over a token list, with variables
    bound by first use across the whole expression."""

    def __init__(self, tokens, signature=None):
        self.tokens = tokens
        self.pos = 0
        self.signature = signature
        self.variables: dict = {}

    def _peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _next(self, expected=None):
        tok = self._peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else (None, None, 1, 1)
            raise ParseError(last[2], last[3], "unexpected end of input")
        if expected is not None and (tok[0], tok[1]) != expected:
            raise ParseError(tok[2], tok[3],
                             f"expected {expected[1]!r}, found {tok[1]!r}")
        self.pos += 1
        return tok

    def term(self) -> Term:
        tok = self._next()
        kind, value, lineno, col = tok
        if kind == "const":
            return Const(value)
        if kind != "name":
            raise ParseError(lineno, col, f"expected a term, found {value!r}")
        nxt = self._peek()
        if nxt is not None and nxt[:2] == ("punct", "("):
            self._next()
            args = [self.term()]
            while True:
                sep = self._next()
                if sep[:2] == ("punct", ")"):
                    break
                if sep[:2] != ("punct", ","):
                    raise ParseError(sep[2], sep[3],
                                     f"expected ',' or ')', found {sep[1]!r}")
                args.append(self.term())
            if self.signature is not None:
                if value not in self.signature:
                    raise ParseError(lineno, col, f"unknown operation '{value}'")
                if self.signature[value] != len(args):
                    raise ParseError(
                        lineno, col,
                        f"operation '{value}' has arity {self.signature[value]}, "
                        f"applied to {len(args)} arguments")
            return App(value, tuple(args))
        if value not in self.variables:
            self.variables[value] = len(self.variables)
        return Var(self.variables[value])

    def identity(self) -> Identity:
        lhs = self.term()
        self._next(("punct", "="))
        return Identity(lhs, self.term())

    def quasiidentity(self) -> Quasiidentity:
        idents = [self.identity()]
        while True:
            tok = self._peek()
            if tok is None:
                return Quasiidentity((), idents[0]) if len(idents) == 1 \
                    else self._fail_arrow()
            if tok[:2] == ("punct", "&"):
                self._next()
                idents.append(self.identity())
            elif tok[:2] == ("punct", "->"):
                self._next()
                conclusion = self.identity()
                self._expect_end()
                return Quasiidentity(tuple(idents), conclusion)
            else:
                raise ParseError(tok[2], tok[3],
                                 f"expected '&' or '->', found {tok[1]!r}")

    def _fail_arrow(self):
        last = self.tokens[-1]
        raise ParseError(last[2], last[3], "expected '->' before the conclusion")

    def _expect_end(self):
        tok = self._peek()
        if tok is not None:
            raise ParseError(tok[2], tok[3], f"unexpected trailing {tok[1]!r}")


def parse_term(text: str, signature=None) -> Term:
    parser = _TermParser(_tokenize(text), signature)
    term = parser.term()
    parser._expect_end()
    return term


def parse_identity(text: str, signature=None) -> Identity:
    parser = _TermParser(_tokenize(text), signature)
    ident = parser.identity()
    parser._expect_end()
    return ident


def parse_quasiidentity(text: str, signature=None) -> Quasiidentity:
    return _TermParser(_tokenize(text), signature).quasiidentity()


_VAR_NAMES = ("x", "y", "z", "u", "v", "w")


def var_name(index: int) -> str:
    return _VAR_NAMES[index] if index < len(_VAR_NAMES) else f"x{index}"


def format_term(term: Term) -> str:
    if isinstance(term, Var):
        return var_name(term.index)
    if isinstance(term, Const):
        return f"@{term.value}"
    return f"{term.symbol}({', '.join(format_term(a) for a in term.args)})"


# ---------------------------------------------------------------------------
# Algebra files

def parse_algebra(text: str) -> FiniteAlgebra:
    lines = text.splitlines()
    name = None
    size = None
    ops: List[Tuple[str, OperationTable]] = []
    symbols = set()

    # pending table entries being collected
    collecting = None   # (symbol, arity, entries, header_line)
    i = 0
    while i < len(lines):
        lineno = i + 1
        body = lines[i].split("#", 1)[0]
        tokens = body.split()
        i += 1
        if not tokens:
            continue
        head = tokens[0]

        if collecting is not None:
            sym, arity, entries, header_line = collecting
            need = size ** arity
            if all(t.isdigit() for t in tokens):
                for col, t in enumerate(tokens):
                    v = int(t)
                    if v >= size:
                        raise ParseError(lineno, col + 1,
                                         f"entry {v} out of range 0..{size - 1}")
                    entries.append(v)
                if len(entries) > need:
                    raise ParseError(lineno, 1,
                                     f"expected {need} entries, got {len(entries)}")
                if len(entries) == need:
                    ops.append((sym, OperationTable(arity, size, entries)))
                    collecting = None
                continue
            raise ParseError(header_line, 1,
                             f"expected {need} entries, got {len(entries)}")

        if head == "algebra":
            if name is not None:
                raise ParseError(lineno, 1, "duplicate 'algebra' line")
            if len(tokens) != 2:
                raise ParseError(lineno, 1, "usage: algebra NAME")
            name = tokens[1]
        elif head == "size":
            if name is None:
                raise ParseError(lineno, 1, "'size' before 'algebra'")
            if size is not None:
                raise ParseError(lineno, 1, "duplicate 'size' line")
            if len(tokens) != 2 or not tokens[1].isdigit() or int(tokens[1]) < 1:
                raise ParseError(lineno, 1, "usage: size N with N >= 1")
            size = int(tokens[1])
        elif head == "op":
            if size is None:
                raise ParseError(lineno, 1, "'op' before 'size'")
            if len(tokens) != 3 or not tokens[2].isdigit():
                raise ParseError(lineno, 1, "usage: op NAME ARITY")
            sym, arity = tokens[1], int(tokens[2])
            if arity < 1:
                raise ParseError(lineno, 1, f"arity must be >= 1, got {arity}")
            if sym in symbols:
                raise ParseError(lineno, 1, f"duplicate operation symbol '{sym}'")
            symbols.add(sym)
            collecting = (sym, arity, [], lineno)
        elif head == "derive":
            if size is None:
                raise ParseError(lineno, 1, "'derive' before 'size'")
            rest = body.split(None, 1)[1] if len(tokens) > 1 else ""
            m = re.match(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s+(\d+)\s*=\s*(.+)$", rest)
            if not m:
                raise ParseError(lineno, 1, "usage: derive NAME ARITY = TERM")
            sym, arity, term_text = m.group(1), int(m.group(2)), m.group(3)
            if arity < 1:
                raise ParseError(lineno, 1, f"arity must be >= 1, got {arity}")
            if sym in symbols:
                raise ParseError(lineno, 1, f"duplicate operation symbol '{sym}'")
            signature = {s: t.arity for s, t in ops}
            try:
                term = _TermParser(_tokenize(term_text, lineno), signature).term()
            except ParseError:
                raise
            partial = FiniteAlgebra(name or "partial", size, ops)
            try:
                table = materialize_term(partial, term, arity)
            except AlgebraError as exc:
                raise ParseError(lineno, 1, f"bad derive term: {exc}") from None
            symbols.add(sym)
            ops.append((sym, table))
        else:
            raise ParseError(lineno, 1, f"unknown directive '{head}'")

    if collecting is not None:
        sym, arity, entries, header_line = collecting
        raise ParseError(header_line, 1,
                         f"expected {size ** arity} entries, got {len(entries)}")
    if name is None:
        raise ParseError(1, 1, "missing 'algebra NAME' line")
    if size is None:
        raise ParseError(1, 1, "missing 'size N' line")
    if not ops:
        raise ParseError(1, 1, "an algebra needs at least one operation")
    return FiniteAlgebra(name, size, ops)


def format_algebra(alg: FiniteAlgebra) -> str:
    lines = [f"algebra {alg.name}", f"size {alg.size}"]
    for sym, table in alg.operations.items():
        lines.append(f"op {sym} {table.arity}")
        for row in table.rows():
            lines.append(" ".join(str(v) for v in row))
    return "\n".join(lines) + "\n"
