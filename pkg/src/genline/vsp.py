"""Variant spec files: the batch input for deriving and generating a product.

    variant IDENT "{"
      "model:" path ";"
      "features:" "[" IDENT {"," IDENT} "]" ";"
      { "option" IDENT "." IDENT "=" value ";" }
      { "bind" IDENT "." IDENT "=" quoted-text ";" }
      "mode:" ("generation_time" | "run_time" | "hybrid") ";"
      "out:" path ";"
    "}"

Option values are true, false, a bare word, or quoted text. Paths run to the
closing semicolon and may be quoted; relative paths are resolved against the
spec file's directory when a base directory is supplied.
"""

from __future__ import annotations

import os

from .components import BINDING_MODES, VariantSpec
from .featuremodel import Configuration
from .lexing import TextSyntaxError

VspSyntaxError = TextSyntaxError

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_CONT = _IDENT_START | set("0123456789")


class _Cursor:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str, pos: int | None = None) -> None:
        at = self.pos if pos is None else pos
        before = self.text[:at]
        line = before.count("\n") + 1
        column = at - (before.rfind("\n") + 1) + 1
        raise VspSyntaxError(message, line, column)

    def skip_ws(self) -> None:
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch in " \t\r\n":
                self.pos += 1
            elif self.text.startswith("//", self.pos):
                end = self.text.find("\n", self.pos)
                self.pos = len(self.text) if end < 0 else end + 1
            else:
                return

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def accept(self, literal: str) -> bool:
        self.skip_ws()
        if not self.text.startswith(literal, self.pos):
            return False
        end = self.pos + len(literal)
        if literal[-1] in _IDENT_CONT and end < len(self.text) and self.text[end] in _IDENT_CONT:
            return False  # keyword is a prefix of a longer word
        self.pos = end
        return True

    def expect(self, literal: str, what: str | None = None) -> None:
        if not self.accept(literal):
            found = self.text[self.pos:self.pos + 12] or "end of input"
            self.error(f"expected {what or literal!r}, found {found!r}")

    def read_ident(self, what: str) -> str:
        self.skip_ws()
        start = self.pos
        if start >= len(self.text) or self.text[start] not in _IDENT_START:
            self.error(f"expected {what}")
        end = start + 1
        while end < len(self.text) and self.text[end] in _IDENT_CONT:
            end += 1
        self.pos = end
        return self.text[start:end]

    def read_quoted(self, what: str) -> str:
        self.skip_ws()
        if self.pos >= len(self.text) or self.text[self.pos] != '"':
            self.error(f"expected quoted {what}")
        start = self.pos
        self.pos += 1
        out: list[str] = []
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "\\" and self.pos + 1 < len(self.text):
                out.append(self.text[self.pos + 1])
                self.pos += 2
                continue
            if ch == '"':
                self.pos += 1
                return "".join(out)
            if ch == "\n":
                break
            out.append(ch)
            self.pos += 1
        self.error(f"unterminated quoted {what}", start)
        return ""  # unreachable

    def read_path(self, what: str) -> str:
        self.skip_ws()
        if self.pos < len(self.text) and self.text[self.pos] == '"':
            return self.read_quoted(what)
        start = self.pos
        end = self.text.find(";", start)
        if end < 0:
            self.error(f"expected {what} ending with ';'")
        raw = self.text[start:end].strip()
        if not raw or "\n" in raw:
            self.error(f"expected {what} before ';'", start)
        self.pos = end
        return raw

    def read_value(self) -> object:
        self.skip_ws()
        if self.pos < len(self.text) and self.text[self.pos] == '"':
            return self.read_quoted("value")
        word = self.read_ident("option value")
        if word == "true":
            return True
        if word == "false":
            return False
        return word


def parse_variant_spec(source: str, base_dir: str | None = None) -> VariantSpec:
    """Parse VSP text; with base_dir, resolve relative model and out paths."""
    cur = _Cursor(source)
    cur.expect("variant", "'variant'")
    name = cur.read_ident("variant name")
    cur.expect("{")
    cur.expect("model", "'model:'")
    cur.expect(":")
    model_path = cur.read_path("model path")
    cur.expect(";")
    cur.expect("features", "'features:'")
    cur.expect(":")
    cur.expect("[")
    features = [cur.read_ident("feature id")]
    while cur.accept(","):
        features.append(cur.read_ident("feature id"))
    cur.expect("]")
    cur.expect(";")

    options: dict[str, object] = {}
    while cur.accept("option"):
        comp = cur.read_ident("component id")
        cur.expect(".")
        opt = cur.read_ident("option name")
        cur.expect("=")
        value = cur.read_value()
        cur.expect(";")
        key = f"{comp}.{opt}"
        if key in options:
            cur.error(f"option {key!r} bound twice")
        options[key] = value

    binds: dict[str, str] = {}
    while cur.accept("bind"):
        comp = cur.read_ident("component id")
        cur.expect(".")
        point = cur.read_ident("variation point name")
        cur.expect("=")
        value = cur.read_quoted("binding text")
        cur.expect(";")
        key = f"{comp}.{point}"
        if key in binds:
            cur.error(f"variation point {key!r} bound twice")
        binds[key] = value

    cur.expect("mode", "'mode:'")
    cur.expect(":")
    mode = cur.read_ident("binding mode")
    if mode not in BINDING_MODES:
        cur.error(f"unknown binding mode {mode!r}")
    cur.expect(";")
    cur.expect("out", "'out:'")
    cur.expect(":")
    out_path = cur.read_path("output path")
    cur.expect(";")
    cur.expect("}")
    if not cur.at_end():
        cur.error("unexpected trailing input")

    if base_dir:
        if not os.path.isabs(model_path):
            model_path = os.path.join(base_dir, model_path)
        if not os.path.isabs(out_path):
            out_path = os.path.join(base_dir, out_path)

    return VariantSpec(
        name=name,
        configuration=Configuration.of(*features),
        option_bindings=options,
        vp_bindings=binds,
        mode=mode,
        output_path=out_path,
        model_path=model_path,
    )


def format_variant_spec(spec: VariantSpec) -> str:
    """Render a spec back to VSP text (paths as given, options sorted)."""
    lines = [f"variant {spec.name} {{"]
    lines.append(f"  model: {spec.model_path};")
    lines.append("  features: [" + ", ".join(sorted(spec.configuration.selected)) + "];")
    for key in sorted(spec.option_bindings):
        value = spec.option_bindings[key]
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, str) and value.isidentifier():
            text = value
        else:
            text = '"' + str(value).replace("\\", "\\\\").replace('"', '\\"') + '"'
        lines.append(f"  option {key} = {text};")
    for key in sorted(spec.vp_bindings):
        value = spec.vp_bindings[key].replace("\\", "\\\\").replace('"', '\\"')
        lines.append(f'  bind {key} = "{value}";')
    lines.append(f"  mode: {spec.mode};")
    lines.append(f"  out: {spec.output_path};")
    lines.append("}")
    return "\n".join(lines) + "\n"
