"""
InputParser - reads the text format carrying a presentation, a matrix group,
generator images, an optional one-parameter family, cocycles and cover data
"""
import logging
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from errors import CocycleError, PresentationSyntaxError, UnknownGeneratorError, ZeroExponentError
from presentation import FreeWord, Presentation
from rep import Cocycle, GroupSpec, Representation
from smoothness import FamilySpec, MatrixFactor


log = logging.getLogger(__name__)

NAME = r'[A-Za-z_][A-Za-z0-9_]*'
NUMBER = r'(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?'

_NAME_RE = re.compile(NAME)
_WORD_TOKEN_RE = re.compile(rf'({NAME})(?:\^([+-]?\d+))?')
_REAL_RE = re.compile(rf'[+-]?{NUMBER}')
_IMAG_RE = re.compile(rf'([+-]?)({NUMBER})?i')
_COMPLEX_RE = re.compile(rf'([+-]?{NUMBER})([+-])({NUMBER})?i')
_SCALE_RE = re.compile(rf'([+-])?(?:({NUMBER})\*)?pi\*t')

KEYWORDS = ('gens', 'rel', 'group', 'mat', 'param', 'cocycle', 'cover', 'embed')


def _tokens(body: str, start: int = 0) -> List[Tuple[str, int]]:
    """Whitespace separated tokens with their offsets in the enclosing statement body"""
    return [(m.group(0), start + m.start()) for m in re.finditer(r'\S+', body)]


@dataclass
class Statement:
    keyword: str
    body: str
    line: int
    column: int

    def error(self, reason: str, token: Optional[str] = None, offset: Optional[int] = None,
              cls=PresentationSyntaxError) -> PresentationSyntaxError:
        # offset is relative to the body; without one the token's first occurrence is used
        column = self.column
        if offset is not None:
            column = self.body_column + offset
        elif token is not None and token in self.body:
            column = self.body_column + self.body.index(token)
        return cls(reason, self.line, column, token)

    @property
    def body_column(self) -> int:
        return self.column + len(self.keyword) + 1


@dataclass
class InputDocument:
    """Everything one input file declares; sections are optional except gens"""

    presentation: Presentation
    spec: Optional[GroupSpec] = None
    factors: Dict[str, Tuple[MatrixFactor, ...]] = field(default_factory=dict)
    samples: Optional[Tuple[float, ...]] = None
    cocycles: Dict[str, Dict[str, np.ndarray]] = field(default_factory=dict)
    cover_generators: Optional[Tuple[str, ...]] = None
    cover_relators: List[FreeWord] = field(default_factory=list)
    embedding: Dict[str, FreeWord] = field(default_factory=dict)

    def _require_group(self) -> GroupSpec:
        if self.spec is None:
            raise PresentationSyntaxError("missing 'group' statement")
        return self.spec

    def _factor_chains(self) -> Tuple[Tuple[MatrixFactor, ...], ...]:
        chains = []
        for name in self.presentation.generator_names:
            if name not in self.factors:
                raise PresentationSyntaxError("missing 'mat' statement for generator", token=name)
            chains.append(self.factors[name])
        return tuple(chains)

    @property
    def is_family(self) -> bool:
        return any(not f.is_constant for chain in self.factors.values() for f in chain)

    def representation(self, t: Optional[float] = None) -> Representation:
        spec = self._require_group()
        chains = self._factor_chains()
        if self.is_family and t is None:
            raise PresentationSyntaxError("generator images depend on t; use a family command or fix t")
        family = FamilySpec(self.presentation, spec, chains, (0.0 if t is None else t,))
        return family.instance(0.0 if t is None else t)

    def family(self) -> FamilySpec:
        spec = self._require_group()
        if self.samples is None:
            raise PresentationSyntaxError("missing 'param t' statement for the family grid")
        return FamilySpec(self.presentation, spec, self._factor_chains(), self.samples)

    def cocycle(self, label: str) -> Cocycle:
        spec = self._require_group()
        if label not in self.cocycles:
            raise CocycleError(f"no cocycle labelled {label!r}; declared: {sorted(self.cocycles)}")
        values = np.zeros((self.presentation.generator_count, spec.lie_dim), dtype=complex)
        for name, vector in self.cocycles[label].items():
            if vector.shape != (spec.lie_dim,):
                raise CocycleError(
                    f"cocycle {label} value at {name} has {vector.shape[0]} entries, "
                    f"{spec.label} needs {spec.lie_dim}"
                )
            values[self.presentation.index(name)] = vector
        return Cocycle(values)

    def cover_presentation(self) -> Optional[Presentation]:
        if self.cover_generators is None:
            return None
        return Presentation(self.cover_generators, tuple(self.cover_relators))

    def embedding_words(self) -> Optional[List[FreeWord]]:
        if self.cover_generators is None:
            return None
        missing = [n for n in self.cover_generators if n not in self.embedding]
        if missing:
            raise PresentationSyntaxError("missing 'embed' statement for cover generator", token=missing[0])
        return [self.embedding[n] for n in self.cover_generators]


class InputParser:
    """Parser for the presentation / representation input format"""

    @staticmethod
    def split_statements(text: str) -> List[Statement]:
        """Strips comments, splits on newlines and ';', records line and column of every statement"""
        statements = []
        for line_no, raw in enumerate(text.splitlines(), start=1):
            line = raw.split('#', 1)[0]
            start = 0
            for chunk in line.split(';'):
                stripped = chunk.strip()
                if stripped:
                    column = start + (len(chunk) - len(chunk.lstrip())) + 1
                    parts = stripped.split(None, 1)
                    body = parts[1] if len(parts) > 1 else ''
                    statements.append(Statement(parts[0], body.strip(), line_no, column))
                start += len(chunk) + 1
        return statements

    @staticmethod
    def parse_complex(token: str, stmt: Statement) -> complex:
        """Complex literal: re, re+imi, re-imi, imi, i"""
        text = token.strip()
        if _REAL_RE.fullmatch(text):
            return complex(float(text), 0.0)
        match = _IMAG_RE.fullmatch(text)
        if match:
            sign = -1.0 if match.group(1) == '-' else 1.0
            im = float(match.group(2)) if match.group(2) else 1.0
            return complex(0.0, sign * im)
        match = _COMPLEX_RE.fullmatch(text)
        if match:
            sign = -1.0 if match.group(2) == '-' else 1.0
            im = float(match.group(3)) if match.group(3) else 1.0
            return complex(float(match.group(1)), sign * im)
        raise stmt.error("malformed complex number", text)

    @staticmethod
    def parse_vector(text: str, stmt: Statement) -> np.ndarray:
        body = text.strip()
        if not (body.startswith('[') and body.endswith(']')) or body.startswith('[['):
            raise stmt.error("expected a vector [c, c, ...]", body)
        entries = [e for e in body[1:-1].split(',')]
        if any(not e.strip() for e in entries):
            raise stmt.error("empty vector entry", body)
        return np.array([InputParser.parse_complex(e, stmt) for e in entries], dtype=complex)

    @staticmethod
    def parse_matrix(text: str, stmt: Statement) -> np.ndarray:
        body = re.sub(r'\s+', '', text)
        if not (body.startswith('[[') and body.endswith(']]')):
            raise stmt.error("expected a matrix [[c, c], [c, c]]", text.strip())
        rows = [InputParser.parse_vector('[' + r + ']', stmt) for r in body[2:-2].split('],[')]
        width = len(rows[0])
        if any(len(r) != width for r in rows) or width != len(rows):
            raise stmt.error("matrix must be square with rows of equal length", text.strip())
        return np.array(rows, dtype=complex)

    @staticmethod
    def parse_word(body: str, names: Sequence[str], stmt: Statement, start: int = 0) -> FreeWord:
        """Whitespace separated tokens name or name^k with k a nonzero integer.

        start is the offset of body inside the statement body, for error columns.
        """
        tokens = _tokens(body, start)
        if not tokens:
            raise stmt.error("empty word")
        syllables = []
        for token, at in tokens:
            match = _WORD_TOKEN_RE.fullmatch(token)
            if not match:
                raise stmt.error("malformed word token", token, at)
            name, power = match.group(1), match.group(2)
            if name not in names:
                raise stmt.error("unknown generator", token, at, cls=UnknownGeneratorError)
            exponent = int(power) if power is not None else 1
            if exponent == 0:
                raise stmt.error("zero exponent", token, at, cls=ZeroExponentError)
            syllables.append((names.index(name), exponent))
        return FreeWord(tuple(syllables))

    @staticmethod
    def parse_names(body: str, stmt: Statement, start: int = 0) -> Tuple[str, ...]:
        tokens = _tokens(body, start)
        if not tokens:
            raise stmt.error("expected at least one generator name")
        for name, at in tokens:
            if not _NAME_RE.fullmatch(name):
                raise stmt.error("invalid generator name", name, at)
        seen = set()
        for name, at in tokens:
            if name in seen:
                raise stmt.error("duplicate generator name", name, at)
            seen.add(name)
        return tuple(name for name, _ in tokens)

    @staticmethod
    def parse_scale(token: str, stmt: Statement) -> float:
        match = _SCALE_RE.fullmatch(token)
        if not match:
            raise stmt.error("expected a scale of the form [-][c*]pi*t", token)
        value = float(match.group(2)) if match.group(2) else 1.0
        return -value if match.group(1) == '-' else value

    @staticmethod
    def parse_factors(rhs: str, stmt: Statement) -> Tuple[MatrixFactor, ...]:
        """factor (* factor)*, factor := [CONST] matrix | EXPI scale matrix"""
        factors = []
        pos = 0
        n = len(rhs)

        def skip_spaces(k: int) -> int:
            while k < n and rhs[k].isspace():
                k += 1
            return k

        while True:
            pos = skip_spaces(pos)
            scale = None
            if rhs.startswith('CONST', pos):
                pos = skip_spaces(pos + len('CONST'))
            elif rhs.startswith('EXPI', pos):
                pos = skip_spaces(pos + len('EXPI'))
                end = pos
                while end < n and not rhs[end].isspace() and rhs[end] != '[':
                    end += 1
                scale = InputParser.parse_scale(rhs[pos:end], stmt)
                pos = skip_spaces(end)
            if pos >= n or rhs[pos] != '[':
                raise stmt.error("expected a matrix", rhs[pos:].split(' ')[0] or None)
            depth = 0
            end = pos
            while end < n:
                if rhs[end] == '[':
                    depth += 1
                elif rhs[end] == ']':
                    depth -= 1
                    if depth == 0:
                        break
                end += 1
            if depth != 0:
                raise stmt.error("unbalanced brackets", rhs[pos:])
            factors.append(MatrixFactor(InputParser.parse_matrix(rhs[pos:end + 1], stmt), scale))
            pos = skip_spaces(end + 1)
            if pos >= n:
                return tuple(factors)
            if rhs[pos] != '*':
                raise stmt.error("expected '*' between factors", rhs[pos:].split(' ')[0])
            pos += 1

    @staticmethod
    def parse_param(body: str, stmt: Statement) -> Tuple[float, ...]:
        tokens = body.split()
        if not tokens or tokens[0] != 't':
            raise stmt.error("the family parameter must be named t", tokens[0] if tokens else None)
        try:
            if len(tokens) == 7 and tokens[1] == 'from' and tokens[3] == 'to' and tokens[5] == 'steps':
                steps = int(tokens[6])
                if steps < 1:
                    raise stmt.error("steps must be positive", tokens[6])
                return tuple(float(v) for v in np.linspace(float(tokens[2]), float(tokens[4]), steps))
            if len(tokens) >= 3 and tokens[1] == 'values':
                return tuple(float(v) for v in tokens[2:])
        except ValueError as e:
            if isinstance(e, PresentationSyntaxError):
                raise
            raise stmt.error("malformed number in parameter grid", body)
        raise stmt.error("expected 'param t from a to b steps n' or 'param t values v ...'", body)

    @staticmethod
    def parse(text: str) -> InputDocument:
        """Two passes: declarations (gens, group, cover gens) first, then everything that refers to them"""
        statements = InputParser.split_statements(text)
        for stmt in statements:
            if stmt.keyword not in KEYWORDS:
                raise PresentationSyntaxError("unknown keyword", stmt.line, stmt.column, stmt.keyword)

        gens_stmt = [s for s in statements if s.keyword == 'gens']
        if not gens_stmt:
            raise PresentationSyntaxError("missing 'gens' statement")
        if len(gens_stmt) > 1:
            raise gens_stmt[1].error("duplicate 'gens' statement", 'gens')
        names = InputParser.parse_names(gens_stmt[0].body, gens_stmt[0])

        spec = None
        cover_names = None
        for stmt in statements:
            if stmt.keyword == 'group':
                if spec is not None:
                    raise stmt.error("duplicate 'group' statement")
                try:
                    spec = GroupSpec.parse(stmt.body)
                except ValueError:
                    raise stmt.error("unknown matrix group", stmt.body)
            elif stmt.keyword == 'cover' and stmt.body.split(' ', 1)[0] == 'gens':
                if cover_names is not None:
                    raise stmt.error("duplicate 'cover gens' statement")
                cover_names = InputParser.parse_names(stmt.body[len('gens'):], stmt, len('gens'))

        relators: List[FreeWord] = []
        doc = InputDocument(Presentation(names), spec, cover_generators=cover_names)
        for stmt in statements:
            handler = InputParser._HANDLERS.get(stmt.keyword)
            if handler is not None:
                handler(stmt, names, doc, relators)

        doc.presentation = Presentation(names, tuple(relators))
        if doc.cover_relators and cover_names is None:
            raise PresentationSyntaxError("'cover rel' without 'cover gens'")
        log.info("parsed presentation with %d generators and %d relators",
                 len(names), len(relators))
        return doc

    @staticmethod
    def _rel(stmt: Statement, names, doc: InputDocument, relators: List[FreeWord]):
        relators.append(InputParser.parse_word(stmt.body, names, stmt))

    @staticmethod
    def _mat(stmt: Statement, names, doc: InputDocument, relators):
        lhs, eq, rhs = stmt.body.partition('=')
        name = lhs.strip()
        if not eq:
            raise stmt.error("expected 'mat <generator> = <factors>'", stmt.body)
        if name not in names:
            raise stmt.error("unknown generator", name, cls=UnknownGeneratorError)
        if name in doc.factors:
            raise stmt.error("duplicate 'mat' statement for generator", name)
        factors = InputParser.parse_factors(rhs, stmt)
        if doc.spec is not None:
            for f in factors:
                if f.matrix.shape != (doc.spec.n, doc.spec.n):
                    raise stmt.error(f"matrix size does not match {doc.spec.label}", name)
        doc.factors[name] = factors

    @staticmethod
    def _param(stmt: Statement, names, doc: InputDocument, relators):
        if doc.samples is not None:
            raise stmt.error("duplicate 'param' statement")
        doc.samples = InputParser.parse_param(stmt.body, stmt)

    @staticmethod
    def _cocycle(stmt: Statement, names, doc: InputDocument, relators):
        head, eq, rhs = stmt.body.partition('=')
        parts = head.split()
        if not eq or len(parts) != 2:
            raise stmt.error("expected 'cocycle <label> <generator> = [...]'", stmt.body)
        label, name = parts
        if name not in names:
            raise stmt.error("unknown generator", name, cls=UnknownGeneratorError)
        values = doc.cocycles.setdefault(label, {})
        if name in values:
            raise stmt.error("duplicate cocycle value", name)
        values[name] = InputParser.parse_vector(rhs, stmt)

    @staticmethod
    def _cover(stmt: Statement, names, doc: InputDocument, relators):
        sub, _, rest = stmt.body.partition(' ')
        if sub == 'gens':
            return
        if sub != 'rel':
            raise stmt.error("expected 'cover gens' or 'cover rel'", sub)
        if doc.cover_generators is None:
            raise stmt.error("'cover rel' without 'cover gens'")
        doc.cover_relators.append(InputParser.parse_word(rest, doc.cover_generators, stmt, len(sub) + 1))

    @staticmethod
    def _embed(stmt: Statement, names, doc: InputDocument, relators):
        lhs, eq, rhs = stmt.body.partition('=')
        name = lhs.strip()
        if not eq:
            raise stmt.error("expected 'embed <cover generator> = <word>'", stmt.body)
        if doc.cover_generators is None or name not in doc.cover_generators:
            raise stmt.error("unknown cover generator", name, cls=UnknownGeneratorError)
        if name in doc.embedding:
            raise stmt.error("duplicate 'embed' statement", name)
        doc.embedding[name] = InputParser.parse_word(rhs, names, stmt, len(lhs) + 1)


InputParser._HANDLERS = {
    'rel': InputParser._rel,
    'mat': InputParser._mat,
    'param': InputParser._param,
    'cocycle': InputParser._cocycle,
    'cover': InputParser._cover,
    'embed': InputParser._embed,
}


def parse_presentation(text: str) -> Presentation:
    """Presentation declared by the gens and rel statements of the text"""
    return InputParser.parse(text).presentation


def parse_document(text: str) -> InputDocument:
    return InputParser.parse(text)


def format_complex(z: complex) -> str:
    re_part = repr(float(z.real))
    im_part = float(z.imag)
    if im_part == 0:
        return re_part
    sign = '-' if im_part < 0 else '+'
    return f"{re_part}{sign}{repr(abs(im_part))}i"


def format_matrix(m: np.ndarray) -> str:
    rows = ['[' + ', '.join(format_complex(z) for z in row) + ']' for row in np.asarray(m)]
    return '[' + ', '.join(rows) + ']'


def format_representation(rep: Representation, header: Optional[str] = None) -> str:
    """Input-file text for a representation, loadable by parse_document"""
    lines = []
    if header:
        lines += [f'# {line}' for line in header.splitlines()]
    lines.append(rep.presentation.format())
    lines.append(f'group {rep.spec.label}')
    for name, image in zip(rep.presentation.generator_names, rep.images):
        lines.append(f'mat {name} = {format_matrix(image)}')
    return '\n'.join(lines) + '\n'
