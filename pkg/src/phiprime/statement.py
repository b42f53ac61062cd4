"""Statement language: AST, parser, printer, negation and Gödel numbering.

Concrete syntax::

    stmt   := unary ( '=>' stmt )?          # right-associative
    unary  := '!' unary | '(' stmt ')' | 'T' | 'F'
            | 'unprov' '(' NAT ')' | 'deg' '(' NAT ')' '=' NAT | ATOM
    ATOM   := [a-z][a-z0-9_]*

All constructors return canonical terms: double negation is collapsed and
the constants are closed under negation, so syntactic equivalence is plain
structural equality.
"""

from __future__ import annotations

import re
from typing import Union


class ParseError(ValueError):
    """Malformed statement text.

    ``offset`` is the byte offset of the offending token and ``expected`` the
    set of token kinds that would have been accepted there.
    """

    def __init__(self, message: str, offset: int, expected: frozenset[str] = frozenset()):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.expected = frozenset(expected)


class Statement:
    """Base class of canonical statements. Instances are immutable and hashable."""

    __slots__ = ("_hash",)

    def __setattr__(self, name, value):
        raise AttributeError("statements are immutable")

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {to_text(self)}>"

    def __str__(self) -> str:
        return to_text(self)


def _init(obj, **fields):
    for k, v in fields.items():
        object.__setattr__(obj, k, v)


class Atom(Statement):
    __slots__ = ("name",)

    def __init__(self, name: str):
        if not _ATOM_RE.fullmatch(name):
            raise ValueError(f"invalid atom name {name!r}")
        _init(self, name=name, _hash=hash(("atom", name)))

    def __eq__(self, other):
        return type(other) is Atom and other.name == self.name

    __hash__ = Statement.__hash__


class _Const(Statement):
    __slots__ = ("value",)

    def __init__(self, value: bool):
        _init(self, value=value, _hash=hash(("const", value)))

    def __eq__(self, other):
        return isinstance(other, _Const) and other.value == self.value

    __hash__ = Statement.__hash__

    def __reduce__(self):
        return (_const, (self.value,))


def _const(value: bool) -> _Const:
    return TRUE if value else FALSE


TRUE = _Const(True)
FALSE = _Const(False)


class Not(Statement):
    __slots__ = ("inner",)

    def __init__(self, inner: Statement):
        if isinstance(inner, (Not, _Const)):
            raise ValueError("non-canonical negation; use negate()")
        _init(self, inner=inner, _hash=hash(("not", inner._hash)))

    def __eq__(self, other):
        return self is other or (type(other) is Not and other._hash == self._hash and other.inner == self.inner)

    __hash__ = Statement.__hash__


class Implies(Statement):
    __slots__ = ("lhs", "rhs")

    def __init__(self, lhs: Statement, rhs: Statement):
        _init(self, lhs=lhs, rhs=rhs, _hash=hash(("imp", lhs._hash, rhs._hash)))

    def __eq__(self, other):
        return self is other or (
            type(other) is Implies
            and other._hash == self._hash
            and other.lhs == self.lhs
            and other.rhs == self.rhs
        )

    __hash__ = Statement.__hash__


class MetaUnprov(Statement):
    """``unprov(code)``: the statement with Gödel number ``code`` has no proof."""

    __slots__ = ("code",)

    def __init__(self, code: int):
        _init(self, code=int(code), _hash=hash(("unprov", int(code))))

    def __eq__(self, other):
        return type(other) is MetaUnprov and other.code == self.code

    __hash__ = Statement.__hash__


class MetaDegreeEq(Statement):
    """``deg(code)=n``: the reachability degree of statement ``code`` is ``n``."""

    __slots__ = ("code", "degree")

    def __init__(self, code: int, degree: int):
        if degree < 0:
            raise ValueError("degree must be a natural")
        _init(self, code=int(code), degree=int(degree), _hash=hash(("deg", int(code), int(degree))))

    def __eq__(self, other):
        return type(other) is MetaDegreeEq and other.code == self.code and other.degree == self.degree

    __hash__ = Statement.__hash__


def negate(s: Statement) -> Statement:
    if isinstance(s, Not):
        return s.inner
    if s is TRUE or s == TRUE:
        return FALSE
    if s is FALSE or s == FALSE:
        return TRUE
    return Not(s)


def is_canonical(s: Statement) -> bool:
    stack = [s]
    while stack:
        x = stack.pop()
        if isinstance(x, Not):
            if isinstance(x.inner, (Not, _Const)):
                return False
            stack.append(x.inner)
        elif isinstance(x, Implies):
            stack.append(x.lhs)
            stack.append(x.rhs)
    return True


def subterms(s: Statement):
    """Yield ``s`` and every sub-statement, parents before children."""
    stack = [s]
    while stack:
        x = stack.pop()
        yield x
        if isinstance(x, Not):
            stack.append(x.inner)
        elif isinstance(x, Implies):
            stack.append(x.rhs)
            stack.append(x.lhs)


# ---------------------------------------------------------------- printing

def _needs_parens(s: Statement) -> bool:
    return isinstance(s, Implies)


def to_text(s: Statement) -> str:
    if isinstance(s, Atom):
        return s.name
    if isinstance(s, _Const):
        return "T" if s.value else "F"
    if isinstance(s, Not):
        inner = to_text(s.inner)
        return f"!({inner})" if _needs_parens(s.inner) else f"!{inner}"
    if isinstance(s, Implies):
        lhs = to_text(s.lhs)
        if _needs_parens(s.lhs):
            lhs = f"({lhs})"
        return f"{lhs} => {to_text(s.rhs)}"
    if isinstance(s, MetaUnprov):
        return f"unprov({s.code})"
    if isinstance(s, MetaDegreeEq):
        return f"deg({s.code})={s.degree}"
    raise TypeError(f"not a statement: {s!r}")


# ----------------------------------------------------------------- parsing

_ATOM_RE = re.compile(r"[a-z][a-z0-9_]*")
_TOKEN_RE = re.compile(r"\s*(?:(=>)|([a-z][a-z0-9_]*)|([0-9]+)|([!()=TF]))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", len(text[:pos].encode()),
                             frozenset({"atom", "!", "(", "T", "F"}))
        start = m.start(m.lastindex)
        kind = {1: "=>", 2: "ident", 3: "nat", 4: m.group(4)}[m.lastindex]
        tokens.append((kind, m.group(m.lastindex), len(text[:start].encode())))
        pos = m.end()
    tokens.append(("eof", "", len(text.encode())))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind: str, expected=None):
        tok = self.tokens[self.i]
        if tok[0] != kind:
            self.fail(tok, expected or {kind})
        self.i += 1
        return tok

    def fail(self, tok, expected):
        what = "unexpected end" if tok[0] == "eof" else f"unexpected {tok[1]!r}"
        raise ParseError(what, tok[2], frozenset(expected))

    def statement(self) -> Statement:
        lhs = self.unary()
        if self.peek()[0] == "=>":
            self.i += 1
            return Implies(lhs, self.statement())
        return lhs

    def unary(self) -> Statement:
        tok = self.peek()
        kind = tok[0]
        if kind == "!":
            self.i += 1
            return negate(self.unary())
        if kind == "(":
            self.i += 1
            s = self.statement()
            self.take(")", {")", "=>"})
            return s
        if kind == "T":
            self.i += 1
            return TRUE
        if kind == "F":
            self.i += 1
            return FALSE
        if kind == "ident":
            self.i += 1
            name = tok[1]
            if name in ("unprov", "deg") and self.peek()[0] == "(":
                self.i += 1
                code_tok = self.take("nat")
                self.take(")")
                code = int(code_tok[1])
                if decode_statement(code) is None:
                    raise ParseError(f"{code} is not the Gödel number of a statement", code_tok[2], frozenset({"nat"}))
                if name == "unprov":
                    return MetaUnprov(code)
                self.take("=")
                return MetaDegreeEq(code, int(self.take("nat")[1]))
            return Atom(name)
        self.fail(tok, {"atom", "!", "(", "T", "F", "unprov", "deg"})


def parse(text: str) -> Statement:
    p = _Parser(text)
    s = p.statement()
    tok = p.peek()
    if tok[0] != "eof":
        p.fail(tok, {"=>", "end"})
    return s


# ---------------------------------------------------------- Gödel numbering
#
# A term is serialized to a compact token string; the number is the bijective
# base-k value of that string plus one, so shorter strings always get smaller
# numbers and every natural >= 1 names exactly one string.

STATEMENT_ALPHABET: tuple[str, ...] = (
    ("T", "F", "!", "=>", "(", ")", "unprov", "deg", "=", "_")
    + tuple("abcdefghijklmnopqrstuvwxyz")
    + tuple("0123456789")
)
_SYMBOL_INDEX = {tok: i for i, tok in enumerate(STATEMENT_ALPHABET)}
PROGRAM_BASE = 256


def bijective_value(digits, base: int) -> int:
    n = 0
    for d in digits:
        n = n * base + d + 1
    return n


def bijective_digits(n: int, base: int) -> list[int]:
    out = []
    while n > 0:
        n, r = divmod(n - 1, base)
        out.append(r)
    out.reverse()
    return out


def statement_tokens(s: Statement) -> list[str]:
    out: list[str] = []

    def emit(x: Statement):
        if isinstance(x, Atom):
            out.extend(x.name)
        elif isinstance(x, _Const):
            out.append("T" if x.value else "F")
        elif isinstance(x, Not):
            out.append("!")
            if _needs_parens(x.inner):
                out.append("(")
                emit(x.inner)
                out.append(")")
            else:
                emit(x.inner)
        elif isinstance(x, Implies):
            if _needs_parens(x.lhs):
                out.append("(")
                emit(x.lhs)
                out.append(")")
            else:
                emit(x.lhs)
            out.append("=>")
            emit(x.rhs)
        elif isinstance(x, MetaUnprov):
            out.extend(("unprov", "("))
            out.extend(str(x.code))
            out.append(")")
        elif isinstance(x, MetaDegreeEq):
            out.extend(("deg", "("))
            out.extend(str(x.code))
            out.extend((")", "="))
            out.extend(str(x.degree))
        else:
            raise TypeError(f"not a statement: {x!r}")

    emit(s)
    return out


def encode_statement(s: Statement) -> int:
    return 1 + bijective_value((_SYMBOL_INDEX[t] for t in statement_tokens(s)), len(STATEMENT_ALPHABET))


def decode_statement(n: int) -> Statement | None:
    """Inverse of :func:`encode_statement`; ``None`` when ``n`` names no canonical statement."""
    if n < 2:
        return None
    toks = [STATEMENT_ALPHABET[d] for d in bijective_digits(n - 1, len(STATEMENT_ALPHABET))]
    text = " ".join(_join_tokens(toks))
    try:
        s = parse(text)
    except (ParseError, ValueError):
        return None
    return s if statement_tokens(s) == toks else None


def _join_tokens(toks):
    # letters, digits and '_' glue into one lexeme; everything else stands alone
    buf = ""
    for t in toks:
        if len(t) == 1 and (t.isalnum() and t not in "TF" or t == "_"):
            buf += t
            continue
        if buf:
            yield buf
            buf = ""
        yield t
    if buf:
        yield buf


def encode_program(code: bytes) -> int:
    return 1 + bijective_value(code, PROGRAM_BASE)


def decode_program(n: int) -> bytes:
    if n < 1:
        raise ValueError("Gödel numbers start at 1")
    return bytes(bijective_digits(n - 1, PROGRAM_BASE))


def encode(x: Union[Statement, bytes, bytearray]) -> int:
    """Gödel number of a statement or a program (byte string)."""
    if isinstance(x, Statement):
        return encode_statement(x)
    if isinstance(x, (bytes, bytearray)):
        return encode_program(bytes(x))
    code = getattr(x, "code", None)
    if isinstance(code, (bytes, bytearray)):
        return encode_program(bytes(code))
    raise TypeError(f"cannot encode {x!r}")


def decode(n: int) -> bytes:
    """Total inverse of program encoding: every natural >= 1 names a program."""
    return decode_program(n)
