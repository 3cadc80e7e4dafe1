"""Recursive-descent parser for programs, assertions and entailments.

Assertion precedence, tightest first: ``!``, arithmetic, ``=``/``!=``,
``|->``/``~>``, ``*``, ``-*``, ``&&``, ``||``, ``=>``, quantifiers.  ``*``,
``-*`` and ``=>`` associate to the right.  Inside assertions ``*`` is always
separating conjunction; multiplication is written ``×`` (ASCII ``*`` is also
accepted as multiplication inside command expressions).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional, Union

from .ast import (
    TRUE,
    AExpr,
    Alloc,
    And,
    AnnotatedProgram,
    Annot,
    Assertion,
    Assign,
    BAnd,
    BExpr,
    BImplies,
    BinOp,
    BNot,
    BoolConst,
    BOr,
    Command,
    Emp,
    Eps,
    Eq,
    Exists,
    Forall,
    Free,
    If,
    Implies,
    ListRep,
    Lookup,
    Mutate,
    Not,
    Num,
    Or,
    PointsTo,
    Pure,
    SepConj,
    SepImp,
    SeqConcat,
    SeqCons,
    SeqEq,
    SeqExpr,
    SeqRev,
    SeqVar,
    Skip,
    Var,
    While,
    make_seq,
    offset,
    sep_all,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


KEYWORDS = {
    "vars", "skip", "if", "then", "else", "fi", "while", "invariant", "do", "od",
    "cons", "free", "emp", "true", "false", "nil", "exists", "forall", "listrep",
    "eps", "rev",
}

# Longest first so that "|->" wins over "|-" and "||".
SYMBOLS = [
    "|->", "-*", "~>", ":=", "!=", "&&", "||", "=>", "++", "|-",
    "(", ")", "[", "]", "{", "}", ",", ".", ";", "=", "!", "+", "-", "*", "×",
]

UNICODE = {
    "↦": "|->", "↪": "~>", "≠": "!=", "¬": "!", "∧": "&&", "∨": "||", "⇒": "=>",
    "⊢": "|-", "−": "-", "∗": "*", "ε": "eps", "∃": "exists", "∀": "forall",
}


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "ident", "seqvar", "kw", "sym", "eof"
    text: str
    line: int
    col: int


def _ident_char(ch: str) -> bool:
    return ch.isalnum() or ch in "_'"


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch.isspace():
            i, col = i + 1, col + 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("int", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_" or ch == "@":
            j = i + 1
            while j < n and _ident_char(text[j]):
                j += 1
            word = text[i:j]
            if ch == "@":
                if len(word) == 1:
                    raise ParseError("expected a sequence variable name after '@'", line, col)
                toks.append(Token("seqvar", word, line, start_col))
            elif word in KEYWORDS:
                toks.append(Token("kw", word, line, start_col))
            else:
                toks.append(Token("ident", word, line, start_col))
            col += j - i
            i = j
            continue
        if ch in UNICODE:
            mapped = UNICODE[ch]
            # "−∗" is the magic wand, not minus followed by star
            if ch == "−" and i + 1 < n and text[i + 1] in "∗*":
                toks.append(Token("sym", "-*", line, start_col))
                i, col = i + 2, col + 2
                continue
            kind = "kw" if mapped in KEYWORDS else "sym"
            toks.append(Token(kind, mapped, line, start_col))
            i, col = i + 1, col + 1
            continue
        for sym in SYMBOLS:
            if text.startswith(sym, i):
                toks.append(Token("sym", sym, line, start_col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    toks.append(Token("eof", "", line, col))
    return toks


class Parser:
    def __init__(self, text: str, declared: Optional[set[str]] = None):
        self.toks = tokenize(text)
        self.pos = 0
        self.declared = declared
        self.wild = itertools.count()

    # -- token helpers ----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("sym", "kw") and t.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}, found {self.describe(self.tok)}")
        t = self.tok
        self.pos += 1
        return t

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            self.fail(f"expected identifier, found {self.describe(self.tok)}")
        t = self.tok
        self.pos += 1
        return t

    @staticmethod
    def describe(t: Token) -> str:
        return "end of input" if t.kind == "eof" else repr(t.text)

    def fail(self, message: str, tok: Optional[Token] = None):
        t = tok or self.tok
        raise ParseError(message, t.line, t.col)

    def attempt(self, *alternatives: Callable[[], object]):
        """Try each alternative in turn; report the error that got furthest."""
        start = self.pos
        best: Optional[ParseError] = None
        for alt in alternatives:
            self.pos = start
            try:
                return alt()
            except ParseError as err:
                if best is None or (err.line, err.col) >= (best.line, best.col):
                    best = err
        assert best is not None
        raise best

    def end(self):
        if self.tok.kind != "eof":
            self.fail(f"unexpected {self.describe(self.tok)}")

    # -- arithmetic -------------------------------------------------------

    def aexp(self, command: bool = False) -> AExpr:
        left = self.term(command)
        while self.at("+") or self.at("-"):
            op = self.tok.text
            self.pos += 1
            left = BinOp(op, left, self.term(command))
        return left

    def term(self, command: bool) -> AExpr:
        left = self.unary_aexp(command)
        while self.at("×") or (command and self.at("*")):
            self.pos += 1
            left = BinOp("*", left, self.unary_aexp(command))
        return left

    def unary_aexp(self, command: bool) -> AExpr:
        if self.accept("-"):
            if self.tok.kind == "int":
                value = int(self.tok.text)
                self.pos += 1
                return Num(-value)
            return BinOp("-", Num(0), self.unary_aexp(command))
        return self.primary(command)

    def primary(self, command: bool) -> AExpr:
        t = self.tok
        if t.kind == "int":
            self.pos += 1
            return Num(int(t.text))
        if self.accept("nil"):
            return Num(0)
        if t.kind == "ident":
            self.pos += 1
            if command and self.declared is not None and t.text not in self.declared:
                self.fail(f"undeclared variable {t.text}", t)
            return Var(t.text)
        if self.accept("("):
            e = self.aexp(command)
            self.expect(")")
            return e
        if t.text in ("cons", "[") or (t.kind == "sym" and t.text == "["):
            self.fail("heap access is not allowed inside an expression")
        self.fail(f"expected expression, found {self.describe(t)}")

    def starts_aexp(self, t: Token) -> bool:
        return t.kind in ("int", "ident") or (t.kind in ("sym", "kw") and t.text in ("(", "-", "nil"))

    # -- boolean conditions -------------------------------------------------

    def bexp(self) -> BExpr:
        left = self.bor()
        if self.accept("=>"):
            return BImplies(left, self.bexp())
        return left

    def bor(self) -> BExpr:
        left = self.band()
        while self.accept("||"):
            left = BOr(left, self.band())
        return left

    def band(self) -> BExpr:
        left = self.bunary()
        while self.accept("&&"):
            left = BAnd(left, self.bunary())
        return left

    def bunary(self) -> BExpr:
        if self.accept("!"):
            return BNot(self.bunary())
        if self.accept("true"):
            return BoolConst(True)
        if self.accept("false"):
            return BoolConst(False)
        if self.at("("):
            return self.attempt(self.paren_bexp, self.comparison_bexp)
        return self.comparison_bexp()

    def paren_bexp(self) -> BExpr:
        self.expect("(")
        b = self.bexp()
        self.expect(")")
        return b

    def comparison_bexp(self) -> BExpr:
        left = self.aexp(command=True)
        if self.accept("="):
            return Eq(left, self.aexp(command=True))
        if self.accept("!="):
            return BNot(Eq(left, self.aexp(command=True)))
        self.fail(f"expected '=' or '!=', found {self.describe(self.tok)}")

    # -- sequences ----------------------------------------------------------

    def seq(self) -> SeqExpr:
        left = self.seq_term()
        if self.accept("++"):
            return SeqConcat(left, self.seq())
        return left

    def seq_term(self) -> SeqExpr:
        t = self.tok
        if t.kind == "seqvar":
            self.pos += 1
            return SeqVar(t.text)
        if self.accept("eps"):
            return Eps()
        if self.accept("rev"):
            self.expect("(")
            s = self.seq()
            self.expect(")")
            return SeqRev(s)
        if self.at("("):
            return self.attempt(self.seq_cons, self.paren_seq)
        return self.seq_cons()

    def paren_seq(self) -> SeqExpr:
        self.expect("(")
        s = self.seq()
        self.expect(")")
        return s

    def seq_cons(self) -> SeqExpr:
        head = self.aexp()
        self.expect(".")
        return SeqCons(head, self.seq_term())

    def operand(self) -> Union[AExpr, SeqExpr]:
        """An arithmetic expression, or a sequence expression when one follows."""
        t = self.tok
        if t.kind == "seqvar" or (t.kind == "kw" and t.text in ("eps", "rev")):
            return self.seq()
        start = self.pos
        try:
            e = self.aexp()
        except ParseError:
            self.pos = start
            return self.seq()
        if self.at("."):
            self.pos += 1
            s: SeqExpr = SeqCons(e, self.seq_term())
            if self.accept("++"):
                s = SeqConcat(s, self.seq())
            return s
        if self.at("++"):
            self.fail("expected a sequence before '++'")
        return e

    # -- assertions -----------------------------------------------------------

    def assertion(self) -> Assertion:
        return self.quant()

    def quant(self) -> Assertion:
        if self.at("exists") or self.at("forall"):
            kind = Exists if self.tok.text == "exists" else Forall
            self.pos += 1
            names = [self.binder()]
            while self.accept(","):
                names.append(self.binder())
            self.expect(".")
            body = self.quant()
            for name in reversed(names):
                body = kind(name, body)
            return body
        return self.implies()

    def binder(self) -> str:
        t = self.tok
        if t.kind in ("ident", "seqvar"):
            self.pos += 1
            return t.text
        self.fail(f"expected a variable to bind, found {self.describe(t)}")

    def implies(self) -> Assertion:
        left = self.disj()
        if self.accept("=>"):
            return Implies(left, self.quant())
        return left

    def disj(self) -> Assertion:
        left = self.conj()
        while self.accept("||"):
            left = Or(left, self.conj())
        return left

    def conj(self) -> Assertion:
        left = self.wand()
        while self.accept("&&"):
            left = And(left, self.wand())
        return left

    def wand(self) -> Assertion:
        left = self.sep()
        if self.accept("-*"):
            return SepImp(left, self.wand())
        return left

    def sep(self) -> Assertion:
        left = self.unary()
        if self.accept("*"):
            return SepConj(left, self.sep())
        return left

    def unary(self) -> Assertion:
        if self.accept("!"):
            return Not(self.unary())
        if self.at("exists") or self.at("forall"):
            return self.quant()
        return self.atom()

    def atom(self) -> Assertion:
        if self.accept("emp"):
            return Emp()
        if self.accept("true"):
            return TRUE
        if self.accept("false"):
            return Pure(BoolConst(False))
        if self.accept("listrep"):
            self.expect("(")
            s = self.seq()
            self.expect(",")
            i = self.aexp()
            self.expect(",")
            j = self.aexp()
            self.expect(")")
            return ListRep(s, i, j)
        if self.at("("):
            return self.attempt(self.paren_assertion, self.comparison)
        return self.comparison()

    def paren_assertion(self) -> Assertion:
        self.expect("(")
        a = self.assertion()
        self.expect(")")
        return a

    def comparison(self) -> Assertion:
        op_tok = None
        left = self.operand()
        if isinstance(left, (Eps, SeqVar, SeqCons, SeqConcat, SeqRev)):
            op_tok = self.tok
            if self.accept("="):
                return SeqEq(left, self.seq())
            if self.accept("!="):
                return Not(SeqEq(left, self.seq()))
            self.fail(f"expected '=' after a sequence, found {self.describe(self.tok)}", op_tok)
        if self.accept("="):
            return Pure(Eq(left, self.aexp()))
        if self.accept("!="):
            return Not(Pure(Eq(left, self.aexp())))
        if self.accept("|->"):
            return self.points_to(left, weak=False)
        if self.accept("~>"):
            return self.points_to(left, weak=True)
        self.fail(f"expected an assertion, found {self.describe(self.tok)}")

    def points_to(self, addr: AExpr, weak: bool) -> Assertion:
        cells: list[Assertion] = []
        k = 0
        while True:
            at = offset(addr, k)
            if self.at("-") and not self.starts_aexp(self.peek()):
                self.pos += 1
                v = f"_v{next(self.wild)}"
                cells.append(Exists(v, PointsTo(at, Var(v))))
            else:
                cells.append(PointsTo(at, self.aexp()))
            k += 1
            if not self.accept(","):
                break
        body = sep_all(cells)
        return SepConj(body, TRUE) if weak else body

    # -- commands -------------------------------------------------------------

    def block(self, stops: tuple[str, ...]) -> list[Command]:
        items: list[Command] = []
        while not (self.tok.kind == "eof" or any(self.at(s) for s in stops)):
            if self.at("{"):
                items.append(self.annotation())
                self.accept(";")
                continue
            items.append(self.command())
            if self.accept(";"):
                continue
            if not (self.at("{") or self.tok.kind == "eof" or any(self.at(s) for s in stops)):
                self.fail(f"expected ';', found {self.describe(self.tok)}")
        return items

    def annotation(self) -> Annot:
        t = self.expect("{")
        a = self.assertion()
        self.expect("}")
        return Annot(a, t.line, t.col)

    def sub_block(self, stops: tuple[str, ...], what: str) -> Command:
        t = self.tok
        items = self.block(stops)
        if not items:
            self.fail(f"empty {what}", t)
        return make_seq(items)

    def command(self) -> Command:
        t = self.tok
        if self.accept("skip"):
            return Skip()
        if self.accept("if"):
            cond = self.bexp()
            self.expect("then")
            then = self.sub_block(("else",), "then-branch")
            self.expect("else")
            else_ = self.sub_block(("fi",), "else-branch")
            self.expect("fi")
            return If(cond, then, else_)
        if self.accept("while"):
            cond = self.bexp()
            inv = None
            if self.accept("invariant"):
                self.expect("{")
                inv = self.assertion()
                self.expect("}")
            elif self.declared is not None:
                self.fail("while loop missing invariant", t)
            self.expect("do")
            body = self.sub_block(("od",), "loop body")
            self.expect("od")
            return While(cond, inv, body, t.line, t.col)
        if self.accept("("):
            c = self.sub_block((")",), "block")
            self.expect(")")
            return c
        if self.accept("["):
            addr = self.aexp(command=True)
            self.expect("]")
            self.expect(":=")
            return Mutate(addr, self.aexp(command=True))
        if self.accept("free"):
            self.expect("(")
            addr = self.aexp(command=True)
            self.expect(")")
            return Free(addr)
        if t.kind == "ident":
            name = self.ident().text
            if self.declared is not None and name not in self.declared:
                self.fail(f"undeclared variable {name}", t)
            self.expect(":=")
            if self.accept("cons"):
                self.expect("(")
                args = [self.aexp(command=True)]
                while self.accept(","):
                    args.append(self.aexp(command=True))
                self.expect(")")
                return Alloc(name, tuple(args))
            if self.accept("["):
                addr = self.aexp(command=True)
                self.expect("]")
                return Lookup(name, addr)
            return Assign(name, self.aexp(command=True))
        self.fail(f"expected a command, found {self.describe(t)}")

    def program(self) -> AnnotatedProgram:
        self.expect("vars")
        names: list[str] = []
        while self.tok.kind == "ident":
            names.append(self.ident().text)
        self.expect(";")
        if len(set(names)) != len(names):
            self.fail("duplicate variable declaration")
        self.declared = set(names)
        first = self.tok
        items = self.block(())
        self.end()
        if len(items) < 2 or not isinstance(items[0], Annot):
            self.fail("a program must start with a precondition {...}", first)
        if not isinstance(items[-1], Annot):
            self.fail("a program must end with a postcondition {...}")
        pre, post = items[0], items[-1]
        body = make_seq(items[1:-1]) if len(items) > 2 else Skip()
        return AnnotatedProgram(
            tuple(names), pre.assertion, body, post.assertion,
            (pre.line, pre.col), (post.line, post.col),
        )


def parse_program(text: str) -> AnnotatedProgram:
    return Parser(text).program()


def parse_assertion(text: str) -> Assertion:
    p = Parser(text)
    a = p.assertion()
    p.end()
    return a


def parse_aexp(text: str) -> AExpr:
    p = Parser(text)
    e = p.aexp()
    p.end()
    return e


def parse_bexp(text: str) -> BExpr:
    p = Parser(text)
    b = p.bexp()
    p.end()
    return b


def parse_command(text: str, declared: Optional[set[str]] = None) -> Command:
    """Parse a bare command sequence.

    Without ``declared`` any variable is accepted and loops may omit their
    invariant.
    """
    p = Parser(text, declared)
    items = p.block(())
    p.end()
    if not items:
        p.fail("expected a command")
    return make_seq(items)


def parse_seq(text: str) -> SeqExpr:
    p = Parser(text)
    s = p.seq()
    p.end()
    return s


def parse_entailment(text: str) -> tuple[Assertion, Assertion]:
    p = Parser(text)
    left = p.assertion()
    p.expect("|-")
    right = p.assertion()
    p.end()
    return left, right
