"""Access to the data files packaged under qfano/fixtures."""

from importlib import resources


def fixture_text(name):
    return resources.files("qfano").joinpath("fixtures", name).read_text()


def fixture_lines(name):
    return fixture_text(name).splitlines()


def load_named_expressions(lines):
    """Parse `name = expression` lines (# comments) into an ordered dict."""
    out = {}
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, eq, expr = line.partition("=")
        if not eq or not name.strip() or not expr.strip():
            raise ValueError("expected `name = expression`, got %r" % raw)
        out[name.strip()] = expr.strip()
    return out
