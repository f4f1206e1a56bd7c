"""Action symbols and the communication table.

Plain action symbols are strings over the alphabet.  A communication symbol
is the canonical string ``rho(a,b)`` with the pair stored in lexicographic
order, so ``rho(a,b)`` and ``rho(b,a)`` are literally the same object.  A
communication symbol may only be formed for pairs the active communication
table defines.
"""

import re
from contextlib import contextmanager

from .errors import CommTableError, ParseError

_RHO_RE = re.compile(r"rho\(([A-Za-z_][A-Za-z0-9_]*),([A-Za-z_][A-Za-z0-9_]*)\)\Z")


def is_rho(sym):
    return isinstance(sym, str) and sym.startswith("rho(")


def rho_parts(sym):
    """The (canonically ordered) pair merged by a communication symbol."""
    m = _RHO_RE.match(sym)
    if not m:
        raise ValueError("not a communication symbol: %r" % (sym,))
    return m.group(1), m.group(2)


class CommTable:
    """Partial symmetric map from action pairs to a result action.

    The table decides which ``rho(a,b)`` symbols exist; the stored result
    name is informational (symbols always print as ``rho(a,b)``).
    """

    def __init__(self, entries=()):
        self._map = {}
        for a, b, result in entries:
            self._map[self._key(a, b)] = result

    @staticmethod
    def _key(a, b):
        return (a, b) if a <= b else (b, a)

    def defined(self, a, b):
        return self._key(a, b) in self._map

    def result(self, a, b):
        try:
            return self._map[self._key(a, b)]
        except KeyError:
            raise CommTableError("rho(%s,%s) is not defined" % (a, b)) from None

    def rho(self, a, b):
        """The canonical communication symbol for the pair, or raise."""
        a, b = self._key(a, b)
        if not self.defined(a, b):
            raise CommTableError("rho(%s,%s) is not defined" % (a, b))
        return "rho(%s,%s)" % (a, b)

    def pairs(self):
        return sorted(self._map)

    def __len__(self):
        return len(self._map)

    @classmethod
    def full(cls, alphabet):
        """A table defining every pair over ``alphabet`` (handy in tests)."""
        alphabet = sorted(set(alphabet))
        entries = []
        for i, a in enumerate(alphabet):
            for b in alphabet[i:]:
                entries.append((a, b, "rho(%s,%s)" % (a, b)))
        return cls(entries)

    @classmethod
    def load(cls, path):
        """Parse a table file: one ``a b result`` entry per line.

        Blank lines and ``#`` comments are skipped; the symmetric closure is
        applied on load (storage is canonical-pair keyed, so this is free).
        """
        entries = []
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                fields = line.split()
                if len(fields) != 3:
                    raise ParseError(
                        "%s:%d: expected 'a b result', got %r" % (path, lineno, line)
                    )
                entries.append(tuple(fields))
        return cls(entries)


EMPTY_TABLE = CommTable()
_active = EMPTY_TABLE


def set_comm_table(table):
    global _active
    _active = table if table is not None else EMPTY_TABLE


def active_comm_table():
    return _active


@contextmanager
def using_comm_table(table):
    prev = _active
    set_comm_table(table)
    try:
        yield table
    finally:
        set_comm_table(prev)
