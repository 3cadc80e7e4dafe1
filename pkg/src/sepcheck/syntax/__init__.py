"""ASTs, parser and printer for the heap language and its assertions."""

from .ast import *  # noqa: F401,F403
from .parser import (  # noqa: F401
    ParseError,
    parse_aexp,
    parse_assertion,
    parse_bexp,
    parse_command,
    parse_entailment,
    parse_program,
    parse_seq,
)
from .printer import render  # noqa: F401
