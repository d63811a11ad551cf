from __future__ import annotations

import pytest

from genline.vsp import VspSyntaxError, format_variant_spec, parse_variant_spec

FULL_VSP = """\
// sample variant
variant demo {
  model: diagrams/shop.cdl;
  features: [CD2Java, Types, Class, DefaultConstructor, Factory];
  option Types.default_constructor = true;
  option Factory.some_choice = fancy;
  bind Factory.factory_method_prefix = "make%s";
  bind Types.constructor_body = " x = \\"quoted\\";";
  mode: generation_time;
  out: build/shop;
}
"""


def test_parse_full_spec():
    spec = parse_variant_spec(FULL_VSP)
    assert spec.name == "demo"
    assert spec.model_path == "diagrams/shop.cdl"
    assert spec.configuration.selected == frozenset(
        {"CD2Java", "Types", "Class", "DefaultConstructor", "Factory"}
    )
    assert spec.option_bindings == {
        "Types.default_constructor": True,
        "Factory.some_choice": "fancy",
    }
    assert spec.vp_bindings == {
        "Factory.factory_method_prefix": "make%s",
        "Types.constructor_body": ' x = "quoted";',
    }
    assert spec.mode == "generation_time"
    assert spec.output_path == "build/shop"


def test_relative_paths_resolve_against_base_dir():
    spec = parse_variant_spec(FULL_VSP, base_dir="/work/specs")
    assert spec.model_path == "/work/specs/diagrams/shop.cdl"
    assert spec.output_path == "/work/specs/build/shop"
    absolute = FULL_VSP.replace("diagrams/shop.cdl", "/abs/shop.cdl")
    assert parse_variant_spec(absolute, base_dir="/work").model_path == "/abs/shop.cdl"


def test_quoted_paths_and_values():
    source = (
        'variant q {\n'
        '  model: "with space/shop.cdl";\n'
        '  features: [CD2Java];\n'
        '  option C.text = "hello world";\n'
        '  mode: run_time;\n'
        '  out: "o u t";\n'
        '}\n'
    )
    spec = parse_variant_spec(source)
    assert spec.model_path == "with space/shop.cdl"
    assert spec.option_bindings == {"C.text": "hello world"}
    assert spec.output_path == "o u t"
    assert spec.mode == "run_time"


def test_option_value_words():
    source = (
        "variant v {\n"
        "  model: m.cdl;\n"
        "  features: [CD2Java];\n"
        "  option A.a = true;\n"
        "  option A.b = false;\n"
        "  option A.c = word;\n"
        "  mode: hybrid;\n"
        "  out: o;\n"
        "}\n"
    )
    spec = parse_variant_spec(source)
    assert spec.option_bindings == {"A.a": True, "A.b": False, "A.c": "word"}


def test_parse_errors():
    with pytest.raises(VspSyntaxError, match="'variant'"):
        parse_variant_spec("product x { }")
    with pytest.raises(VspSyntaxError, match="'model:'"):
        parse_variant_spec("variant v { features: [A]; }")
    with pytest.raises(VspSyntaxError, match="bound twice"):
        parse_variant_spec(
            "variant v { model: m; features: [A];\n"
            "option C.x = true; option C.x = false;\n"
            "mode: hybrid; out: o; }"
        )
    with pytest.raises(VspSyntaxError, match="unknown binding mode 'lazy'"):
        parse_variant_spec("variant v { model: m; features: [A]; mode: lazy; out: o; }")
    with pytest.raises(VspSyntaxError, match="trailing input"):
        parse_variant_spec("variant v { model: m; features: [A]; mode: hybrid; out: o; } more")
    with pytest.raises(VspSyntaxError, match="quoted binding text"):
        parse_variant_spec(
            "variant v { model: m; features: [A]; bind C.p = bare; mode: hybrid; out: o; }"
        )
    with pytest.raises(VspSyntaxError, match="unterminated"):
        parse_variant_spec('variant v { model: m; features: [A]; option C.x = "oops\n')


def test_error_positions_are_line_and_column():
    with pytest.raises(VspSyntaxError) as err:
        parse_variant_spec("variant v {\n  model: m;\n  features: (A);\n}\n")
    assert err.value.line == 3
    assert err.value.column == 13


def test_format_round_trip():
    spec = parse_variant_spec(FULL_VSP)
    text = format_variant_spec(spec)
    again = parse_variant_spec(text)
    assert again == spec


def test_sections_must_appear_in_order():
    out_before_mode = (
        "variant v { model: m; features: [A]; out: o; mode: hybrid; }"
    )
    with pytest.raises(VspSyntaxError, match="'mode:'"):
        parse_variant_spec(out_before_mode)
    option_after_bind = (
        'variant v { model: m; features: [A];\n'
        'bind C.p = "%s";\n'
        'option C.x = true;\n'
        'mode: hybrid; out: o; }'
    )
    with pytest.raises(VspSyntaxError, match="'mode:'"):
        parse_variant_spec(option_after_bind)
