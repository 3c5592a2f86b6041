"""Register-automaton input specification toolkit.

Thin wrapper over the native module: specs travel as canonical JSON strings
(or the tag format, auto-detected), inputs as bytes.
"""

try:
    from ._islkit import (
        __version__,
        check,
        compile_spec,
        enumerate_paths,
        generate,
        parse_spec,
        smtlib,
        state_count,
        to_dot,
        validate_spec,
    )
except ImportError:  # development layout: extension built next to the package
    from _islkit import (
        __version__,
        check,
        compile_spec,
        enumerate_paths,
        generate,
        parse_spec,
        smtlib,
        state_count,
        to_dot,
        validate_spec,
    )

__all__ = [
    "__version__",
    "check",
    "compile_spec",
    "enumerate_paths",
    "generate",
    "parse_spec",
    "smtlib",
    "state_count",
    "to_dot",
    "validate_spec",
]
