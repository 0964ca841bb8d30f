"""Abstract syntax for spatial and spatio-temporal formulas.

Terms are the set-level language: variables, Boolean set operations,
interior/closure, and the term-level temporal operators. Formulas
quantify terms with all/some, apply RCC-8 predicates, and combine with
Boolean and temporal connectives.

The surface syntax is ASCII; see the module-level GRAMMAR string.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

GRAMMAR = """
formula := 'all' term | 'some' term | PRED '(' term ',' term ')' | '!' formula
         | formula ('&&'|'||'|'->') formula | formula ('U'|'S') formula
         | ('X'|'F'|'G'|'G+'|'P'|'H'|'H+') formula
         | 'true' | 'false' | IDENT | '(' formula ')'
term    := IDENT | 'top' | 'bot' | '~' term | term '&' term | term '|' term
         | 'int' term | 'cl' term | 'Xt' term | term 'Ut' term | term 'St' term
         | 'Ft' term | 'Gt' term | 'Pt' term | 'Ht' term
         | 'reg(' term ')' | '(' term ')'
PRED    := DC|EC|PO|EQ|TPP|NTPP|TPPi|NTPPi

Precedence, tightest first: unary > '&' > '|' > 'Ut'/'St' for terms and
unary > '&&' > '||' > '->' > 'U'/'S' for formulas. '&', '|', '&&', '||'
associate to the left; '->', 'U', 'S', 'Ut', 'St' to the right. 'all' and
'some' consume the longest term they can. 'reg' regularizes its argument
at parse time. IDENT is [A-Za-z_][A-Za-z0-9_']*; primes are legal so
renamings like p' round-trip.
"""

RCC8_PREDICATES = ("DC", "EC", "PO", "EQ", "TPP", "NTPP", "TPPi", "NTPPi")


# ---------------------------------------------------------------- terms

class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Top(Term):
    pass


@dataclass(frozen=True)
class Bot(Term):
    pass


@dataclass(frozen=True)
class Comp(Term):
    arg: Term


@dataclass(frozen=True)
class Inter(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class UnionT(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Interior(Term):
    arg: Term


@dataclass(frozen=True)
class Closure(Term):
    arg: Term


@dataclass(frozen=True)
class NextT(Term):
    arg: Term


@dataclass(frozen=True)
class UntilT(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class SinceT(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class DiamFT(Term):
    arg: Term


@dataclass(frozen=True)
class BoxFT(Term):
    arg: Term


@dataclass(frozen=True)
class DiamPT(Term):
    arg: Term


@dataclass(frozen=True)
class BoxPT(Term):
    arg: Term


def CI(t: Term) -> Term:
    return Closure(Interior(t))


def normalize_term(t: Term) -> Term:
    """Expand the derived term operators to the primitive basis
    (Var/Top/Bot/Comp/Inter/Interior/Until/Since)."""
    match t:
        case Var() | Top() | Bot():
            return t
        case Comp(a):
            return Comp(normalize_term(a))
        case Inter(a, b):
            return Inter(normalize_term(a), normalize_term(b))
        case UnionT(a, b):
            return Comp(Inter(Comp(normalize_term(a)), Comp(normalize_term(b))))
        case Interior(a):
            return Interior(normalize_term(a))
        case Closure(a):
            return Comp(Interior(Comp(normalize_term(a))))
        case NextT(a):
            return UntilT(Bot(), normalize_term(a))
        case UntilT(a, b):
            return UntilT(normalize_term(a), normalize_term(b))
        case SinceT(a, b):
            return SinceT(normalize_term(a), normalize_term(b))
        case DiamFT(a):
            return UntilT(Top(), normalize_term(a))
        case BoxFT(a):
            return Comp(UntilT(Top(), Comp(normalize_term(a))))
        case DiamPT(a):
            return SinceT(Top(), normalize_term(a))
        case BoxPT(a):
            return Comp(SinceT(Top(), Comp(normalize_term(a))))
    raise TypeError(f"not a term: {t!r}")


# ------------------------------------------------------------- formulas

class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class PropAtom(Formula):
    name: str


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


@dataclass(frozen=True)
class All(Formula):
    term: Term


@dataclass(frozen=True)
class Rcc8Atom(Formula):
    pred: str
    left: Term
    right: Term

    def __post_init__(self):
        if self.pred not in RCC8_PREDICATES:
            raise ValueError(f"unknown RCC-8 predicate: {self.pred}")


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class UntilF(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class SinceF(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class NextF(Formula):
    arg: Formula


@dataclass(frozen=True)
class DiamFF(Formula):
    arg: Formula


@dataclass(frozen=True)
class BoxFF(Formula):
    arg: Formula


@dataclass(frozen=True)
class DiamPF(Formula):
    arg: Formula


@dataclass(frozen=True)
class BoxPF(Formula):
    arg: Formula


# Derived constructors. Some/Or/Implies build the stored primitives so
# that e.g. `some t` and `!(all ~t)` denote one and the same AST.

def Some(t: Term) -> Formula:
    return Not(All(Comp(t)))


def Or(a: Formula, b: Formula) -> Formula:
    return Not(And(Not(a), Not(b)))


def Implies(a: Formula, b: Formula) -> Formula:
    return Not(And(a, Not(b)))


def BoxFPlus(f: Formula) -> Formula:
    # "now and at all future times"
    return And(f, BoxFF(f))


def BoxPPlus(f: Formula) -> Formula:
    return And(f, BoxPF(f))


def conj(parts) -> Formula:
    parts = list(parts)
    if not parts:
        return TrueF()
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts) -> Formula:
    parts = list(parts)
    if not parts:
        return FalseF()
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def SubsetF(a: Term, b: Term) -> Formula:
    # all (~a | b): a is included in b everywhere
    return All(UnionT(Comp(a), b))


def normalize_formula(f: Formula) -> Formula:
    """Expand derived temporal formula operators to Until/Since."""
    match f:
        case PropAtom() | TrueF() | FalseF() | All() | Rcc8Atom():
            return f
        case Not(a):
            return Not(normalize_formula(a))
        case And(a, b):
            return And(normalize_formula(a), normalize_formula(b))
        case UntilF(a, b):
            return UntilF(normalize_formula(a), normalize_formula(b))
        case SinceF(a, b):
            return SinceF(normalize_formula(a), normalize_formula(b))
        case NextF(a):
            return UntilF(FalseF(), normalize_formula(a))
        case DiamFF(a):
            return UntilF(TrueF(), normalize_formula(a))
        case BoxFF(a):
            return Not(UntilF(TrueF(), Not(normalize_formula(a))))
        case DiamPF(a):
            return SinceF(TrueF(), normalize_formula(a))
        case BoxPF(a):
            return Not(SinceF(TrueF(), Not(normalize_formula(a))))
    raise TypeError(f"not a formula: {f!r}")


# ------------------------------------------------------------ tokenizer

class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


_KEYWORDS = {
    "all", "some", "int", "cl", "reg", "top", "bot", "true", "false",
    "Xt", "Ut", "St", "Ft", "Gt", "Pt", "Ht",
    "U", "S", "X", "F", "G", "P", "H",
    *RCC8_PREDICATES,
}

_TOKEN_RE = re.compile(
    r"\s+"
    r"|G\+|H\+|&&|\|\||->"
    r"|[A-Za-z_][A-Za-z0-9_']*"
    r"|[()~!&|,]"
)


def _tokenize(text: str):
    tokens = []  # (kind, value, line, col); kind 'ident' or 'op'
    pos, line, linestart = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}",
                             line, pos - linestart + 1)
        tok = m.group(0)
        if not tok.isspace():
            kind = "ident" if tok[0].isalpha() or tok[0] == "_" else "op"
            if kind == "ident" and tok in _KEYWORDS:
                kind = "kw"
            tokens.append((kind, tok, line, pos - linestart + 1))
        line += tok.count("\n")
        if "\n" in tok:
            linestart = pos + tok.rindex("\n") + 1
        pos = m.end()
    nl = text.count("\n") + 1
    tokens.append(("eof", "", nl, len(text) - linestart + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg):
        kind, val, line, col = self.peek()
        what = "end of input" if kind == "eof" else repr(val)
        raise ParseError(f"{msg}, got {what}", line, col)

    def expect(self, value):
        kind, val, _, _ = self.peek()
        if kind == "eof" or val != value:
            self.error(f"expected {value!r}")
        return self.next()

    def at(self, *values):
        kind, val, _, _ = self.peek()
        return kind != "eof" and val in values

    # formulas, loosest level first
    def formula(self) -> Formula:
        left = self.f_impl()
        if self.at("U", "S"):
            op = self.next()[1]
            right = self.formula()
            return UntilF(left, right) if op == "U" else SinceF(left, right)
        return left

    def f_impl(self) -> Formula:
        left = self.f_or()
        if self.at("->"):
            self.next()
            return Implies(left, self.f_impl())
        return left

    def f_or(self) -> Formula:
        left = self.f_and()
        while self.at("||"):
            self.next()
            left = Or(left, self.f_and())
        return left

    def f_and(self) -> Formula:
        left = self.f_unary()
        while self.at("&&"):
            self.next()
            left = And(left, self.f_unary())
        return left

    _F_UNARY = {"X": NextF, "F": DiamFF, "G": BoxFF, "P": DiamPF, "H": BoxPF}

    def f_unary(self) -> Formula:
        kind, val, _, _ = self.peek()
        if val == "!":
            self.next()
            return Not(self.f_unary())
        if val in self._F_UNARY:
            self.next()
            return self._F_UNARY[val](self.f_unary())
        if val == "G+":
            self.next()
            return BoxFPlus(self.f_unary())
        if val == "H+":
            self.next()
            return BoxPPlus(self.f_unary())
        if val == "all":
            self.next()
            return All(self.term())
        if val == "some":
            self.next()
            return Some(self.term())
        if val in RCC8_PREDICATES:
            self.next()
            self.expect("(")
            a = self.term()
            self.expect(",")
            b = self.term()
            self.expect(")")
            return Rcc8Atom(val, a, b)
        if val == "true":
            self.next()
            return TrueF()
        if val == "false":
            self.next()
            return FalseF()
        if kind == "ident":
            self.next()
            return PropAtom(val)
        if val == "(":
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        self.error("expected a formula")

    # terms
    def term(self) -> Term:
        left = self.t_or()
        if self.at("Ut", "St"):
            op = self.next()[1]
            right = self.term()
            return UntilT(left, right) if op == "Ut" else SinceT(left, right)
        return left

    def t_or(self) -> Term:
        left = self.t_and()
        while self.at("|"):
            self.next()
            left = UnionT(left, self.t_and())
        return left

    def t_and(self) -> Term:
        left = self.t_unary()
        while self.at("&"):
            self.next()
            left = Inter(left, self.t_unary())
        return left

    _T_UNARY = {"int": Interior, "cl": Closure, "Xt": NextT,
                "Ft": DiamFT, "Gt": BoxFT, "Pt": DiamPT, "Ht": BoxPT}

    def t_unary(self) -> Term:
        kind, val, _, _ = self.peek()
        if val == "~":
            self.next()
            return Comp(self.t_unary())
        if val in self._T_UNARY:
            self.next()
            return self._T_UNARY[val](self.t_unary())
        if val == "reg":
            self.next()
            self.expect("(")
            t = self.term()
            self.expect(")")
            return regularize(t)
        if val == "top":
            self.next()
            return Top()
        if val == "bot":
            self.next()
            return Bot()
        if kind == "ident":
            self.next()
            return Var(val)
        if val == "(":
            self.next()
            t = self.term()
            self.expect(")")
            return t
        self.error("expected a term")


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    if p.peek()[0] != "eof":
        p.error("unexpected trailing input")
    return f


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    if p.peek()[0] != "eof":
        p.error("unexpected trailing input")
    return t


# -------------------------------------------------------------- printer

# formula precedence: U/S 0, -> 1, || 2, && 3, unary 4, atoms 5
# term precedence:    Ut/St 0, | 1, & 2, unary 3, atoms 4

def _pt(t: Term, prec: int) -> str:
    match t:
        case Var(name):
            return name
        case Top():
            return "top"
        case Bot():
            return "bot"
        case Comp(a):
            s = "~" + _pt(a, 3)
        case Interior(a):
            s = "int " + _pt(a, 3)
        case Closure(a):
            s = "cl " + _pt(a, 3)
        case NextT(a):
            s = "Xt " + _pt(a, 3)
        case DiamFT(a):
            s = "Ft " + _pt(a, 3)
        case BoxFT(a):
            s = "Gt " + _pt(a, 3)
        case DiamPT(a):
            s = "Pt " + _pt(a, 3)
        case BoxPT(a):
            s = "Ht " + _pt(a, 3)
        case Inter(a, b):
            s = _pt(a, 2) + " & " + _pt(b, 3)
            return s if prec <= 2 else "(" + s + ")"
        case UnionT(a, b):
            s = _pt(a, 1) + " | " + _pt(b, 2)
            return s if prec <= 1 else "(" + s + ")"
        case UntilT(a, b):
            s = _pt(a, 1) + " Ut " + _pt(b, 0)
            return s if prec <= 0 else "(" + s + ")"
        case SinceT(a, b):
            s = _pt(a, 1) + " St " + _pt(b, 0)
            return s if prec <= 0 else "(" + s + ")"
        case _:
            raise TypeError(f"not a term: {t!r}")
    return s if prec <= 3 else "(" + s + ")"


def print_term(t: Term) -> str:
    return _pt(t, 0)


def _pf(f: Formula, prec: int) -> str:
    match f:
        case PropAtom(name):
            return name
        case TrueF():
            return "true"
        case FalseF():
            return "false"
        case All(t):
            s = "all " + _pt(t, 0)
        case Rcc8Atom(pred, a, b):
            return f"{pred}({_pt(a, 0)}, {_pt(b, 0)})"
        case Not(All(Comp(t))):
            s = "some " + _pt(t, 0)
        case Not(And(Not(a), Not(b))):
            s = _pf(a, 2) + " || " + _pf(b, 3)
            return s if prec <= 2 else "(" + s + ")"
        case Not(And(a, Not(b))):
            s = _pf(a, 2) + " -> " + _pf(b, 1)
            return s if prec <= 1 else "(" + s + ")"
        case And(a, BoxFF(b)) if a == b:
            s = "G+ " + _pf(a, 4)
        case And(a, BoxPF(b)) if a == b:
            s = "H+ " + _pf(a, 4)
        case Not(a):
            s = "!" + _pf(a, 4)
        case NextF(a):
            s = "X " + _pf(a, 4)
        case DiamFF(a):
            s = "F " + _pf(a, 4)
        case BoxFF(a):
            s = "G " + _pf(a, 4)
        case DiamPF(a):
            s = "P " + _pf(a, 4)
        case BoxPF(a):
            s = "H " + _pf(a, 4)
        case And(a, b):
            s = _pf(a, 3) + " && " + _pf(b, 4)
            return s if prec <= 3 else "(" + s + ")"
        case UntilF(a, b):
            s = _pf(a, 1) + " U " + _pf(b, 0)
            return s if prec <= 0 else "(" + s + ")"
        case SinceF(a, b):
            s = _pf(a, 1) + " S " + _pf(b, 0)
            return s if prec <= 0 else "(" + s + ")"
        case _:
            raise TypeError(f"not a formula: {f!r}")
    return s if prec <= 4 else "(" + s + ")"


def print_formula(f: Formula) -> str:
    return _pf(f, 0)


# -------------------------------------------------- regularize / expand

class RegularizeError(ValueError):
    pass


def regularize(t: Term) -> Term:
    """Wrap closure-of-interior around every subterm, turning a raw
    set-algebra term into a region term. Rejects int/cl in the input."""
    match t:
        case Var() | Top() | Bot():
            return CI(t)
        case Comp(a):
            return CI(Comp(regularize(a)))
        case Inter(a, b):
            return CI(Inter(regularize(a), regularize(b)))
        case UnionT(a, b):
            return CI(UnionT(regularize(a), regularize(b)))
        case NextT(a):
            return CI(NextT(regularize(a)))
        case UntilT(a, b):
            return CI(UntilT(regularize(a), regularize(b)))
        case SinceT(a, b):
            return CI(SinceT(regularize(a), regularize(b)))
        case DiamFT(a):
            return CI(DiamFT(regularize(a)))
        case BoxFT(a):
            return CI(BoxFT(regularize(a)))
        case DiamPT(a):
            return CI(DiamPT(regularize(a)))
        case BoxPT(a):
            return CI(BoxPT(regularize(a)))
        case Interior() | Closure():
            raise RegularizeError(
                f"regularize expects a raw set-algebra term, found {print_term(t)}")
    raise TypeError(f"not a term: {t!r}")


def strip_ci(t: Term) -> Term:
    """Remove every closure-of-interior wrapper (the inverse direction
    of regularize, used to state its idempotence)."""
    match t:
        case Closure(Interior(a)):
            return strip_ci(a)
        case Var() | Top() | Bot():
            return t
        case Comp(a):
            return Comp(strip_ci(a))
        case Inter(a, b):
            return Inter(strip_ci(a), strip_ci(b))
        case UnionT(a, b):
            return UnionT(strip_ci(a), strip_ci(b))
        case Interior(a):
            return Interior(strip_ci(a))
        case Closure(a):
            return Closure(strip_ci(a))
        case NextT(a):
            return NextT(strip_ci(a))
        case UntilT(a, b):
            return UntilT(strip_ci(a), strip_ci(b))
        case SinceT(a, b):
            return SinceT(strip_ci(a), strip_ci(b))
        case DiamFT(a):
            return DiamFT(strip_ci(a))
        case BoxFT(a):
            return BoxFT(strip_ci(a))
        case DiamPT(a):
            return DiamPT(strip_ci(a))
        case BoxPT(a):
            return BoxPT(strip_ci(a))
    raise TypeError(f"not a term: {t!r}")


def _as_region(t: Term) -> Term:
    return t if is_region_term(t) else regularize(t)


def _expand_atom(pred: str, x: Term, y: Term) -> Formula:
    r1, r2 = _as_region(x), _as_region(y)
    if pred == "DC":
        return Not(Some(Inter(r1, r2)))
    if pred == "EC":
        return And(Some(Inter(r1, r2)),
                   Not(Some(Inter(Interior(r1), Interior(r2)))))
    if pred == "EQ":
        return And(SubsetF(r1, r2), SubsetF(r2, r1))
    if pred == "PO":
        return conj([Some(Inter(Interior(r1), Interior(r2))),
                     Not(SubsetF(r1, r2)), Not(SubsetF(r2, r1))])
    if pred == "TPP":
        return conj([SubsetF(r1, r2), Not(SubsetF(r2, r1)),
                     Not(SubsetF(r1, Interior(r2)))])
    if pred == "NTPP":
        return And(SubsetF(r1, Interior(r2)), Not(SubsetF(r2, r1)))
    if pred == "TPPi":
        return _expand_atom("TPP", y, x)
    if pred == "NTPPi":
        return _expand_atom("NTPP", y, x)
    raise ValueError(f"unknown RCC-8 predicate: {pred}")


def expand_rcc8(f: Formula) -> Formula:
    """Replace every RCC-8 atom by its definition over region terms.
    Arguments that are not already region terms get regularized."""
    match f:
        case Rcc8Atom(pred, a, b):
            return _expand_atom(pred, a, b)
        case PropAtom() | TrueF() | FalseF() | All():
            return f
        case Not(a):
            return Not(expand_rcc8(a))
        case And(a, b):
            return And(expand_rcc8(a), expand_rcc8(b))
        case UntilF(a, b):
            return UntilF(expand_rcc8(a), expand_rcc8(b))
        case SinceF(a, b):
            return SinceF(expand_rcc8(a), expand_rcc8(b))
        case NextF(a):
            return NextF(expand_rcc8(a))
        case DiamFF(a):
            return DiamFF(expand_rcc8(a))
        case BoxFF(a):
            return BoxFF(expand_rcc8(a))
        case DiamPF(a):
            return DiamPF(expand_rcc8(a))
        case BoxPF(a):
            return BoxPF(expand_rcc8(a))
    raise TypeError(f"not a formula: {f!r}")


# -------------------------------------------------------- classification

SPATIAL_FRAGMENTS = ("RCC8", "RC2", "BRCC8", "RCminus", "RC", "RCmax", "S4u")
TERM_TEMPORAL = ("none", "next_only", "box_only", "full_US")
FORMULA_TEMPORAL = ("none", "box_only", "full_US")


@dataclass(frozen=True)
class FragmentProfile:
    spatial_fragment: str
    term_temporal: str
    formula_temporal: str


def spatial_leq(a: str, b: str) -> bool:
    """Order fragments along the classification chain."""
    return SPATIAL_FRAGMENTS.index(a) <= SPATIAL_FRAGMENTS.index(b)


def is_region_term(t: Term, atomic: bool = False) -> bool:
    """Region terms: closure-of-interior wrapped combinations. With
    atomic=True, no Boolean structure is allowed under the wrappers."""
    match t:
        case Closure(Interior(x)):
            pass
        case _:
            return False
    match x:
        case Var():
            return True
        case NextT(a):
            return is_region_term(a, atomic)
        case UntilT(a, b) | SinceT(a, b):
            return is_region_term(a, atomic) and is_region_term(b, atomic)
    if atomic:
        return False
    match x:
        case Top() | Bot():
            return True
        case Comp(Var()):
            return True
        case Comp(a):
            return is_region_term(a)
        case Inter(a, b) | UnionT(a, b):
            return is_region_term(a) and is_region_term(b)
    return False


def _nnf(t: Term, neg: bool) -> Term:
    """Negation normal view used by the classifiers: complements pushed
    through the set-Boolean structure, region terms kept opaque."""
    if is_region_term(t):
        return Comp(t) if neg else t
    match t:
        case Comp(a):
            return _nnf(a, not neg)
        case Inter(a, b):
            if neg:
                return UnionT(_nnf(a, True), _nnf(b, True))
            return Inter(_nnf(a, False), _nnf(b, False))
        case UnionT(a, b):
            if neg:
                return Inter(_nnf(a, True), _nnf(b, True))
            return UnionT(_nnf(a, False), _nnf(b, False))
        case Top():
            return Bot() if neg else t
        case Bot():
            return Top() if neg else t
        case Interior(a):
            if is_region_term(a):
                return Comp(Interior(a)) if neg else t
            return Closure(_nnf(a, True)) if neg else Interior(_nnf(a, False))
        case Closure(a):
            return Interior(_nnf(a, True)) if neg else Closure(_nnf(a, False))
    # temporal or variable leaf: opaque
    return Comp(t) if neg else t


def _lit_kind(t: Term):
    """Classify an nnf leaf as one of the four modal literal kinds over a
    region term; returns (kind, region) or None."""
    match t:
        case Comp(Interior(r)) if is_region_term(r):
            return ("cIR", r)
        case Comp(r) if is_region_term(r):
            return ("cR", r)
        case Interior(r) if is_region_term(r):
            return ("IR", r)
        case r if is_region_term(r):
            return ("R", r)
    return None


def _split(t: Term, node) -> list:
    if isinstance(t, node):
        return _split(t.left, node) + _split(t.right, node)
    return [t]


def _is_delta(t: Term) -> bool:
    # regular closed shapes: region terms, complements of interiors,
    # and unions of such
    k = _lit_kind(t)
    if k is not None:
        return k[0] in ("R", "cIR")
    if isinstance(t, UnionT):
        return _is_delta(t.left) and _is_delta(t.right)
    return False


def _is_sigma(t: Term) -> bool:
    # regular open shapes: interiors, complements of region terms, and
    # intersections of such
    k = _lit_kind(t)
    if k is not None:
        return k[0] in ("IR", "cR")
    if isinstance(t, Inter):
        return _is_sigma(t.left) and _is_sigma(t.right)
    return False


def _lits(t: Term):
    """All nnf leaves under the Boolean structure, or None if some leaf
    is not one of the four literal kinds."""
    if isinstance(t, (Inter, UnionT)):
        left = _lits(t.left)
        right = _lits(t.right)
        if left is None or right is None:
            return None
        return left + right
    k = _lit_kind(t)
    return None if k is None else [k]


# the operand shapes produced by the RCC-8 predicate definitions:
# ~r1|~r2, ~int r1|~int r2, ~r1|r2, ~r1|int r2 (order-insensitive)
_RCC8_PAIRS = {("cR", "cR"), ("cIR", "cIR"), ("R", "cR"), ("IR", "cR")}


def _rcc8_pair_ok(kinds: list) -> bool:
    return len(kinds) == 2 and tuple(sorted(kinds)) in _RCC8_PAIRS


def _atom_fits(tau: Term, fragment: str) -> bool:
    """Grammar membership of one spatial atom operand (the term under
    all) in the given fragment."""
    if fragment == "S4u":
        return True
    if isinstance(tau, Var):
        # bare variable under all: the propositional-flag idiom; fits
        # every fragment
        return True
    pos = _nnf(tau, False)
    if fragment == "RCmax":
        return _fits_rcmax(tau)
    if fragment == "RC":
        return _lits(pos) is not None
    if fragment == "RCminus":
        parts = _split(_nnf(tau, True), Inter)
        deltas = sigmas = 0
        for p in parts:
            if _is_delta(p):
                deltas += 1
            elif _is_sigma(p):
                sigmas += 1
            else:
                return False
        return deltas <= 1 or sigmas == 0
    disjuncts = _split(pos, UnionT)
    kinds = [_lit_kind(d) for d in disjuncts]
    if any(k is None for k in kinds):
        return False
    if fragment == "BRCC8":
        return _rcc8_pair_ok([k[0] for k in kinds])
    atomic = all(is_region_term(k[1], atomic=True) for k in kinds)
    if fragment == "RC2":
        return atomic and len(kinds) <= 2
    if fragment == "RCC8":
        return atomic and _rcc8_pair_ok([k[0] for k in kinds])
    raise ValueError(f"unknown fragment: {fragment}")


def _fits_rcmax(t: Term) -> bool:
    # arbitrary int/cl/Boolean structure over region-term atoms
    if is_region_term(t):
        return True
    match t:
        case Comp(a) | Interior(a) | Closure(a):
            return _fits_rcmax(a)
        case Inter(a, b) | UnionT(a, b):
            return _fits_rcmax(a) and _fits_rcmax(b)
    return False


def _collect(f: Formula, atoms: list, fops: set):
    match f:
        case PropAtom() | TrueF() | FalseF():
            return
        case All(t):
            atoms.append(t)
        case Rcc8Atom():
            atoms.append(f)
        case Not(a):
            _collect(a, atoms, fops)
        case And(a, b):
            _collect(a, atoms, fops)
            _collect(b, atoms, fops)
        case UntilF(a, b) | SinceF(a, b):
            fops.add("us")
            _collect(a, atoms, fops)
            _collect(b, atoms, fops)
        case NextF(a):
            fops.add("us")
            _collect(a, atoms, fops)
        case DiamFF(a) | BoxFF(a) | DiamPF(a) | BoxPF(a):
            fops.add("box")
            _collect(a, atoms, fops)
        case _:
            raise TypeError(f"not a formula: {f!r}")


def _term_temporal_ops(t: Term, ops: set):
    match t:
        case Var() | Top() | Bot():
            return
        case Comp(a) | Interior(a) | Closure(a):
            _term_temporal_ops(a, ops)
        case Inter(a, b) | UnionT(a, b):
            _term_temporal_ops(a, ops)
            _term_temporal_ops(b, ops)
        case NextT(a):
            ops.add("next")
            _term_temporal_ops(a, ops)
        case UntilT(a, b) | SinceT(a, b):
            ops.add("us")
            _term_temporal_ops(a, ops)
            _term_temporal_ops(b, ops)
        case DiamFT(a) | BoxFT(a) | DiamPT(a) | BoxPT(a):
            ops.add("box")
            _term_temporal_ops(a, ops)


def classify(f: Formula) -> FragmentProfile:
    """Least fragment profile the formula falls into, per grammar
    membership of every spatial atom."""
    atoms: list = []
    fops: set = set()
    _collect(f, atoms, fops)

    operands = []
    for a in atoms:
        if isinstance(a, Rcc8Atom):
            expanded: list = []
            _collect(expand_rcc8(a), expanded, set())
            operands.extend(expanded)
        else:
            operands.append(a)

    spatial = "S4u"
    for frag in SPATIAL_FRAGMENTS:
        if all(_atom_fits(t, frag) for t in operands):
            spatial = frag
            break

    tops: set = set()
    for t in operands:
        _term_temporal_ops(t, tops)
    if "us" in tops or ("next" in tops and "box" in tops):
        term_temporal = "full_US"
    elif "next" in tops:
        term_temporal = "next_only"
    elif "box" in tops:
        term_temporal = "box_only"
    else:
        term_temporal = "none"

    if "us" in fops:
        formula_temporal = "full_US"
    elif "box" in fops:
        formula_temporal = "box_only"
    else:
        formula_temporal = "none"

    return FragmentProfile(spatial, term_temporal, formula_temporal)


# --------------------------------------------------------------- metrics

@dataclass(frozen=True)
class Metrics:
    length: int
    width: int


def _subterms(t: Term, acc: set):
    if t in acc:
        return
    acc.add(t)
    match t:
        case Var() | Top() | Bot():
            return
        case Comp(a) | Interior(a) | Closure(a) | NextT(a) | DiamFT(a) \
                | BoxFT(a) | DiamPT(a) | BoxPT(a):
            _subterms(a, acc)
        case Inter(a, b) | UnionT(a, b) | UntilT(a, b) | SinceT(a, b):
            _subterms(a, acc)
            _subterms(b, acc)


def _subformulas(f: Formula, facc: set, tacc: set):
    if f in facc:
        return
    facc.add(f)
    match f:
        case PropAtom() | TrueF() | FalseF():
            return
        case All(t):
            _subterms(t, tacc)
        case Rcc8Atom(_, a, b):
            _subterms(a, tacc)
            _subterms(b, tacc)
        case Not(a) | NextF(a) | DiamFF(a) | BoxFF(a) | DiamPF(a) | BoxPF(a):
            _subformulas(a, facc, tacc)
        case And(a, b) | UntilF(a, b) | SinceF(a, b):
            _subformulas(a, facc, tacc)
            _subformulas(b, facc, tacc)


def length_of(f: Formula) -> int:
    facc: set = set()
    tacc: set = set()
    _subformulas(f, facc, tacc)
    return len(facc) + len(tacc)


def width_of(f: Formula) -> int:
    """Largest number of regular-closed conjuncts under a single all/some
    quantifier; 1 when no such group occurs."""
    atoms: list = []
    _collect(f, atoms, set())
    best = 1
    for a in atoms:
        if isinstance(a, Rcc8Atom):
            continue
        for tau in (_nnf(a, False), _nnf(a, True)):
            parts = _split(tau, Inter)
            if len(parts) >= 2 and all(_is_delta(p) for p in parts):
                best = max(best, len(parts))
    return best


def metrics(f: Formula) -> Metrics:
    return Metrics(length_of(f), width_of(f))
