"""Recursive-descent parser for the NPT expression language.

Grammar (EBNF):

    expr      := dist | wmean | ifexpr | partition | arith
    dist      := NAME "(" expr {"," expr} ")"
    wmean     := "wmean(" (number "," expr) {"," number "," expr} ")"
    ifexpr    := "if(" arith CMP arith "," expr "," expr ")"
    CMP       := "<" | "<=" | ">" | ">=" | "=="
    partition := "partition(" nodeid ")" "{" state ":" expr {"," state ":" expr} "}"
    arith     := standard precedence (* / over + -), parentheses,
                 decimal/scientific literals, node identifiers

Function names are case-insensitive; node identifiers are snake_case;
state labels are quoted strings or bare words.
"""

from __future__ import annotations

from dataclasses import dataclass

from riskbn.errors import ArityError, ExpressionSyntaxError, UnknownFunctionError
from riskbn.nptlang.ast import (
    COMPARISON_OPS,
    DIST_ARITY,
    BinOp,
    DistCall,
    Expr,
    If,
    Num,
    Partitioned,
    Ref,
    StateLabel,
    Wmean,
)

_RESERVED = {"wmean", "if", "partition"}


@dataclass(frozen=True)
class _Token:
    kind: str  # num | name | str | op | eof
    text: str
    pos: int  # 1-based character position
    value: float = 0.0


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        pos = i + 1
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            lit = text[i:j]
            try:
                value = float(lit)
            except ValueError:
                raise ExpressionSyntaxError(f"bad number literal {lit!r}", pos)
            tokens.append(_Token("num", lit, pos, value))
            i = j
        elif c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("name", text[i:j], pos))
            i = j
        elif c == '"':
            j = text.find('"', i + 1)
            if j < 0:
                raise ExpressionSyntaxError("unterminated string literal", pos)
            tokens.append(_Token("str", text[i + 1 : j], pos))
            i = j + 1
        elif c in "<>=!":
            two = text[i : i + 2]
            if two in ("<=", ">=", "=="):
                tokens.append(_Token("op", two, pos))
                i += 2
            elif c in "<>":
                tokens.append(_Token("op", c, pos))
                i += 1
            else:
                raise ExpressionSyntaxError(f"unexpected character {c!r}", pos)
        elif c in "+-*/(),{}:":
            tokens.append(_Token("op", c, pos))
            i += 1
        else:
            raise ExpressionSyntaxError(f"unexpected character {c!r}", pos)
    tokens.append(_Token("eof", "", max(n, 1)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def cur(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.cur
        if tok.kind != "eof":
            self.i += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.cur
        if tok.kind == "op" and tok.text == text:
            return self.advance()
        raise ExpressionSyntaxError(
            f"expected {text!r}, found {tok.text or 'end of input'!r}", tok.pos
        )

    def at(self, text: str) -> bool:
        return self.cur.kind == "op" and self.cur.text == text

    # --- grammar ------------------------------------------------------------

    def parse_expr(self) -> Expr:
        tok = self.cur
        if tok.kind == "name" and self.tokens[self.i + 1].text == "(":
            low = tok.text.lower()
            if low == "wmean":
                return self.parse_wmean()
            if low == "if":
                return self.parse_if()
            if low == "partition":
                return self.parse_partition()
        if tok.kind == "str":
            self.advance()
            return StateLabel(tok.text)
        return self.parse_additive()

    def parse_wmean(self) -> Expr:
        self.advance()
        self.expect("(")
        terms: list[tuple[float, Expr]] = []
        while True:
            wtok = self.cur
            neg = False
            if self.at("-"):
                self.advance()
                neg = True
                wtok = self.cur
            if wtok.kind != "num":
                raise ExpressionSyntaxError(
                    "wmean weight must be a number literal", wtok.pos
                )
            self.advance()
            weight = -wtok.value if neg else wtok.value
            if weight <= 0:
                raise ExpressionSyntaxError(
                    "wmean weight must be strictly positive", wtok.pos
                )
            self.expect(",")
            terms.append((weight, self.parse_expr()))
            if self.at(","):
                self.advance()
                continue
            self.expect(")")
            break
        return Wmean(tuple(terms))

    def parse_if(self) -> Expr:
        self.advance()
        self.expect("(")
        left = self.parse_additive()
        op_tok = self.cur
        if op_tok.kind != "op" or op_tok.text not in COMPARISON_OPS:
            raise ExpressionSyntaxError("expected comparison operator", op_tok.pos)
        self.advance()
        right = self.parse_additive()
        self.expect(",")
        then = self.parse_expr()
        self.expect(",")
        orelse = self.parse_expr()
        self.expect(")")
        return If(left, op_tok.text, right, then, orelse)

    def parse_partition(self) -> Expr:
        self.advance()
        self.expect("(")
        name_tok = self.cur
        if name_tok.kind != "name":
            raise ExpressionSyntaxError("expected node identifier", name_tok.pos)
        self.advance()
        self.expect(")")
        self.expect("{")
        cases: list[tuple[str, Expr]] = []
        seen: set[str] = set()
        while True:
            state_tok = self.cur
            if state_tok.kind not in ("name", "str"):
                raise ExpressionSyntaxError("expected state label", state_tok.pos)
            self.advance()
            if state_tok.text in seen:
                raise ExpressionSyntaxError(
                    f"duplicate partition state {state_tok.text!r}", state_tok.pos
                )
            seen.add(state_tok.text)
            self.expect(":")
            cases.append((state_tok.text, self.parse_expr()))
            if self.at(","):
                self.advance()
                continue
            self.expect("}")
            break
        return Partitioned(name_tok.text, tuple(cases))

    def parse_additive(self) -> Expr:
        left = self.parse_term()
        while self.cur.kind == "op" and self.cur.text in "+-":
            op = self.advance().text
            left = BinOp(op, left, self.parse_term())
        return left

    def parse_term(self) -> Expr:
        left = self.parse_unary()
        while self.cur.kind == "op" and self.cur.text in "*/":
            op = self.advance().text
            left = BinOp(op, left, self.parse_unary())
        return left

    def parse_unary(self) -> Expr:
        if self.at("-"):
            pos_tok = self.advance()
            inner = self.parse_unary()
            if isinstance(inner, Num):
                return Num(-inner.value)
            return BinOp("-", Num(0.0), inner)
        del_pos = self.cur.pos  # noqa: F841  (kept for symmetry with '-')
        if self.at("+"):
            self.advance()
            return self.parse_unary()
        return self.parse_atom()

    def parse_atom(self) -> Expr:
        tok = self.cur
        if tok.kind == "num":
            self.advance()
            return Num(tok.value)
        if tok.kind == "str":
            self.advance()
            return StateLabel(tok.text)
        if tok.kind == "name":
            self.advance()
            if self.at("("):
                return self.finish_call(tok)
            return Ref(tok.text)
        if self.at("("):
            self.advance()
            inner = self.parse_expr()
            self.expect(")")
            return inner
        raise ExpressionSyntaxError(
            f"unexpected {tok.text or 'end of input'!r}", tok.pos
        )

    def finish_call(self, name_tok: _Token) -> Expr:
        low = name_tok.text.lower()
        if low == "wmean":
            self.i -= 1
            return self.parse_wmean()
        if low == "if":
            self.i -= 1
            return self.parse_if()
        if low == "partition":
            self.i -= 1
            return self.parse_partition()
        if low not in DIST_ARITY:
            raise UnknownFunctionError(name_tok.text, name_tok.pos)
        self.expect("(")
        args: list[Expr] = [self.parse_expr()]
        while self.at(","):
            self.advance()
            args.append(self.parse_expr())
        self.expect(")")
        if len(args) != DIST_ARITY[low]:
            raise ArityError(
                f"{name_tok.text} takes {DIST_ARITY[low]} argument(s), "
                f"got {len(args)}"
            )
        return DistCall(low, tuple(args))


def parse(text: str) -> Expr:
    """Parse an NPT expression, raising parse errors with 1-based positions."""
    parser = _Parser(text)
    expr = parser.parse_expr()
    tok = parser.cur
    if tok.kind != "eof":
        raise ExpressionSyntaxError(f"unexpected trailing input {tok.text!r}", tok.pos)
    return expr
