"""Hilbert-style proof checking for the trimodal calculus.

The checker verifies concrete derivations: axiom lines against the eleven
schemas (with their coalition side conditions), ``taut`` lines by truth
table over maximal non-propositional subformulas, rule applications by
structural equality of lowered formulas, and ``lemma`` lines by uniform
substitution into a previously accepted result.  With premises present,
necessitation is forbidden on any line that depends on a premise: from
hypotheses, only modus ponens chains theorems together.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .errors import CapacityError, InputError, ProofFormatError
from .formula import (
    And, FalseLit, Formula, How, Implies, Know, Not, Or, Strat,
    TrueLit, Var, lower_derived, parse_formula, print_formula,
)
from .model import Coalition, coalition

TAUTOLOGY_ATOM_LIMIT = 20


# -- axiom schemas ------------------------------------------------------------

@dataclass(frozen=True)
class _MetaF:
    """Formula metavariable inside a schema pattern."""

    name: str


@dataclass(frozen=True)
class _MetaBot:
    """Falsum position: matches ``false`` or ``!(p -> p)`` for any one p."""


_Pattern = object  # patterns are Formula trees over _MetaF/_MetaBot leaves
_Binding = dict[str, object]


def _match(pattern, f: Formula, binding: _Binding) -> bool:
    if isinstance(pattern, _MetaF):
        seen = binding.get(pattern.name)
        if seen is None:
            binding[pattern.name] = f
            return True
        return seen == f
    if isinstance(pattern, _MetaBot):
        if isinstance(f, FalseLit):
            return True
        return (isinstance(f, Not) and isinstance(f.arg, Implies)
                and isinstance(f.arg.left, Var) and f.arg.left == f.arg.right)
    if isinstance(pattern, (Know, Strat, How)):
        if type(f) is not type(pattern):
            return False
        coal = pattern.coalition
        if len(coal) == 1 and coal[0].isupper():  # coalition metavariable
            seen = binding.get(coal[0])
            if seen is None:
                binding[coal[0]] = f.coalition
            elif seen != f.coalition:
                return False
        elif coal != f.coalition:
            return False
        return _match(pattern.arg, f.arg, binding)
    if isinstance(pattern, Not):
        return isinstance(f, Not) and _match(pattern.arg, f.arg, binding)
    if isinstance(pattern, Implies):
        return (isinstance(f, Implies)
                and _match(pattern.left, f.left, binding)
                and _match(pattern.right, f.right, binding))
    raise AssertionError(f"bad pattern node {pattern!r}")


@dataclass(frozen=True)
class AxiomSchema:
    name: str
    pattern: Formula
    side: Callable[[_Binding], bool] | None = None
    side_text: str = ""

    def match(self, f: Formula) -> _Binding | None:
        binding: _Binding = {}
        if not _match(self.pattern, lower_derived(f), binding):
            return None
        if self.side is not None and not self.side(binding):
            return None
        return binding


def _c(name: str) -> Coalition:
    # Single uppercase letter marks a coalition metavariable in patterns.
    return (name,)


_PHI, _PSI = _MetaF("phi"), _MetaF("psi")


def _union_ok(binding: _Binding, key: str = "U") -> bool:
    u = binding.get(key)
    c, d = binding.get("C", ()), binding.get("D", ())
    return u == coalition(tuple(c) + tuple(d))


def _disjoint(binding: _Binding) -> bool:
    return not (set(binding.get("C", ())) & set(binding.get("D", ())))


AXIOM_SCHEMAS: dict[str, AxiomSchema] = {
    s.name: s
    for s in (
        AxiomSchema(
            "truth",
            Implies(Know(_c("C"), _PHI), _PHI),
        ),
        AxiomSchema(
            "negative-introspection",
            Implies(Not(Know(_c("C"), _PHI)),
                    Know(_c("C"), Not(Know(_c("C"), _PHI)))),
        ),
        AxiomSchema(
            "distributivity",
            Implies(Know(_c("C"), Implies(_PHI, _PSI)),
                    Implies(Know(_c("C"), _PHI), Know(_c("C"), _PSI))),
        ),
        AxiomSchema(
            "monotonicity",
            Implies(Know(_c("C"), _PHI), Know(_c("D"), _PHI)),
            side=lambda b: set(b["C"]) <= set(b["D"]),
            side_text="C subset of D",
        ),
        AxiomSchema(
            "cooperation",
            Implies(Strat(_c("C"), Implies(_PHI, _PSI)),
                    Implies(Strat(_c("D"), _PHI), Strat(_c("U"), _PSI))),
            side=lambda b: _disjoint(b) and _union_ok(b),
            side_text="C and D disjoint, conclusion over their union",
        ),
        AxiomSchema(
            "strategic-negative-introspection",
            Implies(Not(How(_c("C"), _PHI)),
                    Know(_c("C"), Not(How(_c("C"), _PHI)))),
        ),
        AxiomSchema(
            "epistemic-cooperation",
            Implies(How(_c("C"), Implies(_PHI, _PSI)),
                    Implies(How(_c("D"), _PHI), How(_c("U"), _PSI))),
            side=lambda b: _disjoint(b) and _union_ok(b),
            side_text="C and D disjoint, conclusion over their union",
        ),
        AxiomSchema(
            "strategic-truth",
            Implies(How(_c("C"), _PHI), Strat(_c("C"), _PHI)),
        ),
        AxiomSchema(
            "epistemic-determinicity",
            Implies(How(_c("C"), Implies(_PHI, _PSI)),
                    Implies(Know(_c("C"), Strat((), _PHI)),
                            How(_c("C"), _PSI))),
        ),
        AxiomSchema(
            "empty-coalition",
            Implies(Know((), _PHI), How((), _PHI)),
        ),
        AxiomSchema(
            "nontermination",
            Not(Strat(_c("C"), _MetaBot())),
        ),
    )
}


def match_axiom(f: Formula, schema: str) -> _Binding | None:
    """Bindings if ``f`` instantiates the named schema (side conditions
    included), else ``None``."""
    try:
        s = AXIOM_SCHEMAS[schema]
    except KeyError:
        raise InputError(
            f"unknown axiom schema {schema!r}; known: "
            + " ".join(sorted(AXIOM_SCHEMAS))
        ) from None
    return s.match(f)


# -- propositional tautologies ------------------------------------------------

def _skeleton(f: Formula, atoms: dict[Formula, int]):
    """Reduce to a nested tuple over atom indices; modal subterms and
    variables are opaque atoms."""
    if isinstance(f, (Var, Know, Strat, How)):
        idx = atoms.setdefault(f, len(atoms))
        return ("atom", idx)
    if isinstance(f, TrueLit):
        return ("const", True)
    if isinstance(f, FalseLit):
        return ("const", False)
    if isinstance(f, Not):
        return ("not", _skeleton(f.arg, atoms))
    if isinstance(f, And):
        return ("and", _skeleton(f.left, atoms), _skeleton(f.right, atoms))
    if isinstance(f, Or):
        return ("or", _skeleton(f.left, atoms), _skeleton(f.right, atoms))
    if isinstance(f, Implies):
        return ("implies", _skeleton(f.left, atoms), _skeleton(f.right, atoms))
    raise InputError(f"not a formula: {f!r}")


def _sk_eval(sk, bits: int) -> bool:
    tag = sk[0]
    if tag == "atom":
        return bool((bits >> sk[1]) & 1)
    if tag == "const":
        return sk[1]
    if tag == "not":
        return not _sk_eval(sk[1], bits)
    if tag == "and":
        return _sk_eval(sk[1], bits) and _sk_eval(sk[2], bits)
    if tag == "or":
        return _sk_eval(sk[1], bits) or _sk_eval(sk[2], bits)
    return (not _sk_eval(sk[1], bits)) or _sk_eval(sk[2], bits)


def is_tautology(f: Formula) -> bool:
    """Truth-table validity with modal subterms abstracted as atoms.

    Raises :class:`CapacityError` beyond ``TAUTOLOGY_ATOM_LIMIT`` distinct
    atoms rather than silently giving up.
    """
    atoms: dict[Formula, int] = {}
    sk = _skeleton(f, atoms)
    n = len(atoms)
    if n > TAUTOLOGY_ATOM_LIMIT:
        raise CapacityError(
            f"tautology check over {n} distinct atoms exceeds the limit of "
            f"{TAUTOLOGY_ATOM_LIMIT}"
        )
    return all(_sk_eval(sk, bits) for bits in range(1 << n))


# -- proofs -------------------------------------------------------------------

@dataclass(frozen=True)
class Justification:
    rule: str                       # axiom | taut | premise | lemma | mp | nec-k | nec-h
    name: str = ""                  # axiom schema or lemma name
    refs: tuple[int, ...] = ()      # cited line numbers (or premise index)
    coalition: Coalition = ()

    def __str__(self) -> str:
        if self.rule == "axiom":
            return f"axiom {self.name}"
        if self.rule == "taut":
            return "taut"
        if self.rule == "premise":
            return f"premise {self.refs[0]}"
        if self.rule == "lemma":
            return f"lemma {self.name}"
        if self.rule == "mp":
            return f"mp {self.refs[0]} {self.refs[1]}"
        coal = "{" + ",".join(self.coalition) + "}"
        return f"{self.rule} {coal} {self.refs[0]}"


@dataclass(frozen=True)
class ProofLine:
    number: int
    formula: Formula
    justification: Justification


@dataclass(frozen=True)
class Proof:
    name: str
    lines: tuple[ProofLine, ...]
    premises: tuple[Formula, ...] = ()
    metavariables: tuple[str, ...] = ()

    @property
    def conclusion(self) -> Formula:
        return self.lines[-1].formula


@dataclass(frozen=True)
class LemmaEntry:
    """An accepted result available for citation by later proofs."""

    name: str
    formula: Formula                 # lowered
    metavariables: tuple[str, ...]   # variables open to uniform substitution


LemmaRegistry = Mapping[str, LemmaEntry]


@dataclass(frozen=True)
class ProofVerdict:
    accepted: bool
    bad_line: int | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.accepted


def _lemma_match(template: Formula, metas: frozenset[str], f: Formula,
                 binding: dict[str, Formula]) -> bool:
    if isinstance(template, Var) and template.name in metas:
        seen = binding.get(template.name)
        if seen is None:
            binding[template.name] = f
            return True
        return seen == f
    if type(template) is not type(f):
        return False
    if isinstance(template, (Var, TrueLit, FalseLit)):
        return template == f
    if isinstance(template, Not):
        return _lemma_match(template.arg, metas, f.arg, binding)
    if isinstance(template, (And, Or, Implies)):
        return (_lemma_match(template.left, metas, f.left, binding)
                and _lemma_match(template.right, metas, f.right, binding))
    if isinstance(template, (Know, Strat, How)):
        return (template.coalition == f.coalition
                and _lemma_match(template.arg, metas, f.arg, binding))
    return False


def check_proof(proof: Proof, lemmas: LemmaRegistry | None = None) -> ProofVerdict:
    """Accept iff every line is justified; otherwise report the first bad
    line and why."""
    lemmas = lemmas or {}
    lowered: dict[int, Formula] = {}
    hypothetical: dict[int, bool] = {}  # line depends on a premise
    premises = [lower_derived(p) for p in proof.premises]

    def reject(line: ProofLine, reason: str) -> ProofVerdict:
        return ProofVerdict(False, line.number, reason)

    for pos, line in enumerate(proof.lines):
        if line.number != pos + 1:
            return reject(line, f"line numbered {line.number}, expected {pos + 1}")
        f = lower_derived(line.formula)
        j = line.justification
        for r in j.refs:
            if j.rule != "premise" and not 1 <= r < line.number:
                return reject(line, f"reference to line {r} is not strictly "
                                    "backward")

        if j.rule == "axiom":
            try:
                if match_axiom(f, j.name) is None:
                    return reject(line, f"not an instance of axiom {j.name}")
            except InputError as exc:
                return reject(line, str(exc))
            depends = False
        elif j.rule == "taut":
            try:
                if not is_tautology(f):
                    return reject(line, "not a propositional tautology")
            except CapacityError as exc:
                return reject(line, str(exc))
            depends = False
        elif j.rule == "premise":
            k = j.refs[0]
            if not 1 <= k <= len(premises):
                return reject(line, f"premise {k} does not exist")
            if premises[k - 1] != f:
                return reject(line, f"line is not premise {k}")
            depends = True
        elif j.rule == "lemma":
            entry = lemmas.get(j.name)
            if entry is None:
                return reject(line, f"unknown lemma {j.name!r}")
            binding: dict[str, Formula] = {}
            if not _lemma_match(entry.formula, frozenset(entry.metavariables),
                                f, binding):
                return reject(line, f"not a substitution instance of lemma "
                                    f"{j.name}")
            depends = False
        elif j.rule == "mp":
            i, k = j.refs
            expected = Implies(lowered[i], f)
            if lowered[k] != expected:
                return reject(line, f"mp: line {k} is not (line {i} -> this "
                                    "line)")
            depends = hypothetical[i] or hypothetical[k]
        elif j.rule in ("nec-k", "nec-h"):
            i = j.refs[0]
            if hypothetical[i]:
                return reject(line, f"{j.rule}: necessitation over line {i}, "
                                    "which depends on a premise")
            wrap = Know if j.rule == "nec-k" else How
            if f != wrap(j.coalition, lowered[i]):
                return reject(line, f"{j.rule}: line is not the "
                                    f"{'K' if wrap is Know else 'H'}-closure "
                                    f"of line {i}")
            depends = False
        else:
            return reject(line, f"unknown justification rule {j.rule!r}")

        lowered[line.number] = f
        hypothetical[line.number] = depends

    if not proof.lines:
        return ProofVerdict(False, None, "empty proof")
    return ProofVerdict(True)


# -- proof script format --------------------------------------------------------
#
#   # comment
#   meta: p              (optional: variables open to substitution on citation)
#   premises:            (optional: one bare formula per line until the first
#   K{a} p                numbered line)
#   1. FORMULA [axiom truth]
#   2. FORMULA [mp 1 2] / [taut] / [premise 1] / [lemma name]
#   3. K{a} ... [nec-k {a} 1] / [nec-h {a,b} 2]

_LINE = re.compile(r"(\d+)\.\s*(.*?)\s*\[([^\]]*)\]\s*\Z")
_COAL = re.compile(r"\{([^{}]*)\}\Z")


def _parse_justification(text: str, where: str) -> Justification:
    parts = text.split()
    if not parts:
        raise ProofFormatError(f"{where}: empty justification")
    rule = parts[0]
    if rule == "axiom":
        if len(parts) != 2:
            raise ProofFormatError(f"{where}: expected 'axiom NAME'")
        return Justification("axiom", name=parts[1])
    if rule == "taut":
        if len(parts) != 1:
            raise ProofFormatError(f"{where}: expected bare 'taut'")
        return Justification("taut")
    if rule == "premise":
        if len(parts) != 2 or not parts[1].isdigit():
            raise ProofFormatError(f"{where}: expected 'premise K'")
        return Justification("premise", refs=(int(parts[1]),))
    if rule == "lemma":
        if len(parts) != 2:
            raise ProofFormatError(f"{where}: expected 'lemma NAME'")
        return Justification("lemma", name=parts[1])
    if rule == "mp":
        if len(parts) != 3 or not (parts[1].isdigit() and parts[2].isdigit()):
            raise ProofFormatError(f"{where}: expected 'mp I J'")
        return Justification("mp", refs=(int(parts[1]), int(parts[2])))
    if rule in ("nec-k", "nec-h"):
        if len(parts) != 3 or not parts[2].isdigit():
            raise ProofFormatError(f"{where}: expected '{rule} {{coalition}} I'")
        m = _COAL.match(parts[1])
        if not m:
            raise ProofFormatError(f"{where}: bad coalition {parts[1]!r}")
        members = m.group(1).replace(",", " ").split()
        return Justification(rule, refs=(int(parts[2]),),
                             coalition=coalition(members))
    raise ProofFormatError(f"{where}: unknown rule {rule!r}")


def parse_proof(text: str, name: str = "<proof>") -> Proof:
    metavariables: tuple[str, ...] = ()
    premises: list[Formula] = []
    lines: list[ProofLine] = []
    in_premises = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{name}: line {lineno}"
        if line.startswith("meta:"):
            if lines or premises:
                raise ProofFormatError(f"{where}: meta: must come first")
            metavariables = tuple(line[5:].split())
            continue
        if line == "premises:":
            if lines:
                raise ProofFormatError(f"{where}: premises: after proof lines")
            in_premises = True
            continue
        m = _LINE.match(line)
        if m:
            in_premises = False
            try:
                f = parse_formula(m.group(2))
            except Exception as exc:
                raise ProofFormatError(f"{where}: {exc}") from exc
            j = _parse_justification(m.group(3), where)
            lines.append(ProofLine(int(m.group(1)), f, j))
        elif in_premises:
            try:
                premises.append(parse_formula(line))
            except Exception as exc:
                raise ProofFormatError(f"{where}: {exc}") from exc
        else:
            raise ProofFormatError(f"{where}: expected 'N. FORMULA "
                                   "[justification]'")

    if not lines:
        raise ProofFormatError(f"{name}: no proof lines")
    return Proof(name=name, lines=tuple(lines), premises=tuple(premises),
                 metavariables=metavariables)


def format_proof(proof: Proof) -> str:
    out = []
    if proof.metavariables:
        out.append("meta: " + " ".join(proof.metavariables))
    if proof.premises:
        out.append("premises:")
        out.extend(print_formula(p) for p in proof.premises)
    out.extend(
        f"{ln.number}. {print_formula(ln.formula)} [{ln.justification}]"
        for ln in proof.lines
    )
    return "\n".join(out) + "\n"


# -- lemma registries and the bundled derivations -------------------------------

def parse_registry(text: str, name: str = "<registry>") -> list[tuple[str, str]]:
    """Ordered (lemma name, relative script path) pairs."""
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        lemma, sep, path = line.partition(":")
        if not sep or not lemma.split() or not path.split():
            raise ProofFormatError(f"{name}: line {lineno}: expected "
                                   "'NAME: PATH'")
        entries.append((lemma.strip(), path.strip()))
    return entries


def check_with_registry(
    scripts: Iterable[tuple[str, Proof]]
) -> tuple[dict[str, ProofVerdict], dict[str, LemmaEntry]]:
    """Check scripts in order, making each accepted result citable by the
    ones after it."""
    verdicts: dict[str, ProofVerdict] = {}
    registry: dict[str, LemmaEntry] = {}
    for lemma_name, proof in scripts:
        verdict = check_proof(proof, registry)
        verdicts[lemma_name] = verdict
        if verdict and not proof.premises:
            registry[lemma_name] = LemmaEntry(
                name=lemma_name,
                formula=lower_derived(proof.conclusion),
                metavariables=proof.metavariables,
            )
    return verdicts, registry


def bundled_derivations() -> list[tuple[str, Proof]]:
    """The shipped derivations, in citation order."""
    from importlib.resources import files

    root = files("etskit") / "data" / "proofs"
    registry = parse_registry(
        (root / "registry.txt").read_text(encoding="utf-8"), "registry.txt"
    )
    return [
        (name, parse_proof((root / path).read_text(encoding="utf-8"), path))
        for name, path in registry
    ]
