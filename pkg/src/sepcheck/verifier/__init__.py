"""Forward symbolic execution, backward rules and outline checking."""

from .checker import CheckReport, Obligation, Result, check_outline, check_triple  # noqa: F401
from .subst import free_assertion_vars, modified_vars, subst  # noqa: F401
from .symexec import Fault, sym_exec  # noqa: F401
from .wp import wp  # noqa: F401
