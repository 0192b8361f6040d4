"""Render sections of the pairvar configuration definitions

Usage
-----
The directive

   .. include_definition:: model

lists all keys of the configuration section [model] with their
default values, parse functions, and descriptions.
"""
from docutils import nodes
from docutils.statemachine import ViewList
from sphinx.util.docutils import SphinxDirective
from sphinx.util.nodes import nested_parse_with_titles

from pairvar.cli.definitions import config

BUILTIN_TYPES = ["float", "int", "str"]


def format_default(value):
    if isinstance(value, (list, tuple)):
        return ", ".join(str(v) for v in value)
    return str(value)


def format_type(func):
    name = func.__name__
    if name in BUILTIN_TYPES:
        return ":class:`{}`".format(name)
    return ":func:`{0} <pairvar.cli.parse_funcs.{0}>`".format(name)


def definition_lines(section):
    """reST bullet list describing a configuration section"""
    rst = []
    for key, entry in config[section].items():
        default, func, doc = entry[:3]
        rst.append("* | **{}** = {} ({}) -- {}".format(
            key, format_default(default), format_type(func), doc))
        if len(entry) > 3:
            rst.append("  | {}".format(entry[3].strip()))
        rst.append("")
    return rst


class IncludeDefinition(SphinxDirective):
    required_arguments = 1
    optional_arguments = 0

    def run(self):
        section = self.arguments[0]
        if section not in config:
            raise self.error("Unknown configuration section "
                             + "'{}'".format(section))
        vl = ViewList(definition_lines(section),
                      "definitions_{}.rst".format(section))
        node = nodes.section()
        node.document = self.state.document
        nested_parse_with_titles(self.state, vl, node)
        return node.children


def setup(app):
    app.add_directive("include_definition", IncludeDefinition)
    return {"version": "0.2", "parallel_read_safe": True}
