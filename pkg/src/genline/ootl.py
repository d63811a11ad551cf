"""Syntax checker for the generated object-oriented target language.

One compilation unit per artifact:

    unit   := "package" IDENT ";" typedecl
    typedecl := classd | ifaced | enumd
    classd := "class" IDENT ["extends" IDENT] ["implements" IDENT {"," IDENT}]
              "{" {member} "}"
    member := type IDENT ";"
            | IDENT "(" [params] ")" block
            | type IDENT "(" [params] ")" (block | ";")
    ifaced := "interface" IDENT "{" { type IDENT "(" [params] ")" ";" } "}"
    enumd  := "enum" IDENT "{" IDENT {"," IDENT} "}"
    params := type IDENT {"," type IDENT}
    block  := "{" {stmt} "}"
    stmt   := type IDENT "=" expr ";" | lval "=" expr ";"
            | "return" [expr] ";" | expr ";"
    expr   := "new" IDENT "(" ")" | "this" | lval | lval "(" [expr {"," expr}] ")"
    lval   := IDENT {"." IDENT}
    type   := "int" | "boolean" | "string" | "void" | IDENT

The checker recognizes the language; it does not build a tree or resolve
names. Checking happens on in-memory containers before anything is written.
"""

from __future__ import annotations

from .lexing import TextSyntaxError, Token, TokenStream, tokenize

_PUNCTS = ("{", "}", "(", ")", ";", ",", ".", "=")

_KEYWORDS = frozenset(
    {"package", "class", "interface", "enum", "extends", "implements", "return", "new", "this"}
)


def check_unit(text: str) -> tuple[str, int, int] | None:
    """Return None when the text is a valid unit, else (message, line, column)."""
    try:
        ts = TokenStream(tokenize(text, _PUNCTS))
        _unit(ts)
    except TextSyntaxError as exc:
        return exc.message, exc.line, exc.column
    return None


def _name(ts: TokenStream, what: str) -> Token:
    tok = ts.expect_ident(what)
    if tok.value in _KEYWORDS:
        raise TextSyntaxError(f"expected {what}, found keyword {tok.value!r}", tok.line, tok.column)
    return tok


def _unit(ts: TokenStream) -> None:
    ts.expect_keyword("package")
    _name(ts, "package name")
    ts.expect_punct(";")
    if ts.accept_ident("class"):
        _classd(ts)
    elif ts.accept_ident("interface"):
        _ifaced(ts)
    elif ts.accept_ident("enum"):
        _enumd(ts)
    else:
        tok = ts.peek()
        found = "end of input" if tok.kind == "eof" else repr(tok.value)
        raise TextSyntaxError(
            f"expected 'class', 'interface' or 'enum', found {found}", tok.line, tok.column
        )
    if not ts.at_end():
        ts.error("unexpected trailing input")


def _classd(ts: TokenStream) -> None:
    _name(ts, "class name")
    if ts.accept_ident("extends"):
        _name(ts, "superclass name")
    if ts.accept_ident("implements"):
        _name(ts, "interface name")
        while ts.accept_punct(","):
            _name(ts, "interface name")
    ts.expect_punct("{")
    while not ts.at_punct("}"):
        _member(ts)
    ts.expect_punct("}")


def _member(ts: TokenStream) -> None:
    _name(ts, "member type or constructor name")
    if ts.at_punct("("):
        # constructor: IDENT "(" [params] ")" block
        ts.expect_punct("(")
        _params(ts)
        ts.expect_punct(")")
        _block(ts)
        return
    _name(ts, "member name")
    if ts.accept_punct(";"):
        return  # field
    if not ts.at_punct("("):
        ts.error("expected ';' or '(' after member name")
    ts.expect_punct("(")
    _params(ts)
    ts.expect_punct(")")
    if ts.accept_punct(";"):
        return  # bodyless method
    _block(ts)


def _ifaced(ts: TokenStream) -> None:
    _name(ts, "interface name")
    ts.expect_punct("{")
    while not ts.at_punct("}"):
        _name(ts, "return type")
        _name(ts, "operation name")
        ts.expect_punct("(")
        _params(ts)
        ts.expect_punct(")")
        ts.expect_punct(";")
    ts.expect_punct("}")


def _enumd(ts: TokenStream) -> None:
    _name(ts, "enum name")
    ts.expect_punct("{")
    _name(ts, "enum constant")
    while ts.accept_punct(","):
        _name(ts, "enum constant")
    ts.expect_punct("}")


def _params(ts: TokenStream) -> None:
    if ts.at_punct(")"):
        return
    _name(ts, "parameter type")
    _name(ts, "parameter name")
    while ts.accept_punct(","):
        _name(ts, "parameter type")
        _name(ts, "parameter name")


def _block(ts: TokenStream) -> None:
    ts.expect_punct("{")
    while not ts.at_punct("}"):
        _stmt(ts)
    ts.expect_punct("}")


def _stmt(ts: TokenStream) -> None:
    if ts.accept_ident("return"):
        if not ts.at_punct(";"):
            _expr(ts)
        ts.expect_punct(";")
        return
    tok = ts.peek()
    if tok.kind == "ident" and tok.value in ("new", "this"):
        _expr(ts)
        ts.expect_punct(";")
        return
    _name(ts, "statement")
    nxt = ts.peek()
    if nxt.kind == "ident" and nxt.value not in _KEYWORDS:
        # local declaration: type IDENT "=" expr ";"
        _name(ts, "variable name")
        ts.expect_punct("=")
        _expr(ts)
        ts.expect_punct(";")
        return
    while ts.accept_punct("."):
        _name(ts, "member name")
    if ts.accept_punct("="):
        _expr(ts)
        ts.expect_punct(";")
        return
    if ts.at_punct("("):
        _call_args(ts)
    ts.expect_punct(";")


def _expr(ts: TokenStream) -> None:
    if ts.accept_ident("new"):
        _name(ts, "class name")
        ts.expect_punct("(")
        ts.expect_punct(")")
        return
    if ts.accept_ident("this"):
        return
    _name(ts, "expression")
    while ts.accept_punct("."):
        _name(ts, "member name")
    if ts.at_punct("("):
        _call_args(ts)


def _call_args(ts: TokenStream) -> None:
    ts.expect_punct("(")
    if not ts.at_punct(")"):
        _expr(ts)
        while ts.accept_punct(","):
            _expr(ts)
    ts.expect_punct(")")
