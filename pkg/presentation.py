"""
Free-group words, the integral group ring, finitely presented groups,
Fox derivatives and index-2 Reidemeister-Schreier rewriting
"""
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from errors import ParityError, PresentationShapeError


Syllable = Tuple[int, int]


def _reduce(syllables: Iterable[Syllable]) -> Tuple[Syllable, ...]:
    word: List[Syllable] = []
    for gen, power in syllables:
        if power == 0:
            continue
        if word and word[-1][0] == gen:
            merged = word[-1][1] + power
            word.pop()
            if merged != 0:
                word.append((gen, merged))
        else:
            word.append((gen, power))
    return tuple(word)


@dataclass(frozen=True)
class FreeWord:
    """Freely reduced word, run-length encoded as (generator index, exponent) syllables"""

    syllables: Tuple[Syllable, ...] = ()

    def __post_init__(self):
        reduced = _reduce((int(g), int(p)) for g, p in self.syllables)
        for gen, _ in reduced:
            if gen < 0:
                raise ValueError(f"Generator index must be non-negative, got {gen}")
        object.__setattr__(self, 'syllables', reduced)

    @classmethod
    def identity(cls) -> "FreeWord":
        return cls(())

    @classmethod
    def generator(cls, index: int, power: int = 1) -> "FreeWord":
        return cls(((index, power),))

    @classmethod
    def from_letters(cls, letters: Iterable[Syllable]) -> "FreeWord":
        return cls(tuple(letters))

    def is_identity(self) -> bool:
        return not self.syllables

    def letters(self) -> Iterator[Syllable]:
        """Unit letters (generator, +1 or -1) left to right"""
        for gen, power in self.syllables:
            step = 1 if power > 0 else -1
            for _ in range(abs(power)):
                yield gen, step

    def __len__(self) -> int:
        return sum(abs(p) for _, p in self.syllables)

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return word_multiply(self, other)

    def __invert__(self) -> "FreeWord":
        return word_invert(self)

    def __pow__(self, n: int) -> "FreeWord":
        if n < 0:
            return word_invert(self) ** (-n)
        result = FreeWord.identity()
        for _ in range(n):
            result = result * self
        return result

    def max_generator(self) -> int:
        return max((g for g, _ in self.syllables), default=-1)

    def exponent_sum(self, index: int) -> int:
        return sum(p for g, p in self.syllables if g == index)

    def parity(self, parity: Sequence[int]) -> int:
        return sum(p * parity[g] for g, p in self.syllables) % 2

    def format(self, names: Optional[Sequence[str]] = None) -> str:
        if not self.syllables:
            return '1'
        tokens = []
        for gen, power in self.syllables:
            name = names[gen] if names is not None else f'x{gen + 1}'
            tokens.append(name if power == 1 else f'{name}^{power}')
        return ' '.join(tokens)

    def __str__(self) -> str:
        return self.format()


def word_multiply(u: FreeWord, v: FreeWord) -> FreeWord:
    return FreeWord(u.syllables + v.syllables)


def word_invert(u: FreeWord) -> FreeWord:
    return FreeWord(tuple((g, -p) for g, p in reversed(u.syllables)))


class GroupRingElement:
    """Finite integer combination of free words; zero coefficients are never stored"""

    __slots__ = ('_terms',)

    def __init__(self, terms: Optional[Mapping[FreeWord, int]] = None):
        cleaned: Dict[FreeWord, int] = {}
        for word, coeff in (terms or {}).items():
            if coeff:
                cleaned[word] = cleaned.get(word, 0) + int(coeff)
        self._terms = {w: c for w, c in cleaned.items() if c}

    @classmethod
    def zero(cls) -> "GroupRingElement":
        return cls()

    @classmethod
    def one(cls) -> "GroupRingElement":
        return cls({FreeWord.identity(): 1})

    @classmethod
    def from_word(cls, word: FreeWord, coeff: int = 1) -> "GroupRingElement":
        return cls({word: coeff})

    @property
    def terms(self) -> Dict[FreeWord, int]:
        return dict(self._terms)

    def items(self):
        # sorted so that downstream floating point sums are reproducible
        return sorted(self._terms.items(), key=lambda kv: (len(kv[0]), kv[0].syllables))

    def is_zero(self) -> bool:
        return not self._terms

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        terms = dict(self._terms)
        for word, coeff in other._terms.items():
            terms[word] = terms.get(word, 0) + coeff
        return GroupRingElement(terms)

    def __neg__(self) -> "GroupRingElement":
        return GroupRingElement({w: -c for w, c in self._terms.items()})

    def __sub__(self, other: "GroupRingElement") -> "GroupRingElement":
        return self + (-other)

    def __mul__(self, other) -> "GroupRingElement":
        if isinstance(other, int):
            return GroupRingElement({w: c * other for w, c in self._terms.items()})
        terms: Dict[FreeWord, int] = {}
        for u, a in self._terms.items():
            for v, b in other._terms.items():
                w = u * v
                terms[w] = terms.get(w, 0) + a * b
        return GroupRingElement(terms)

    def __rmul__(self, other: int) -> "GroupRingElement":
        return self * other

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupRingElement) and self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        if not self._terms:
            return 'GroupRingElement(0)'
        parts = [f'{c}*({w})' for w, c in self.items()]
        return f"GroupRingElement({' + '.join(parts)})"


def augmentation(u: GroupRingElement) -> int:
    return sum(u.terms.values())


@dataclass(frozen=True)
class Presentation:
    """Finitely presented group F/N with N the normal closure of the relators"""

    generator_names: Tuple[str, ...]
    relators: Tuple[FreeWord, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'generator_names', tuple(self.generator_names))
        object.__setattr__(self, 'relators', tuple(self.relators))
        if len(set(self.generator_names)) != len(self.generator_names):
            raise ValueError(f"Generator names must be distinct: {self.generator_names}")
        for k, rel in enumerate(self.relators):
            if rel.max_generator() >= len(self.generator_names):
                raise ValueError(
                    f"Relator {k + 1} uses generator index {rel.max_generator()} "
                    f"but only {len(self.generator_names)} generators are declared"
                )

    @property
    def generator_count(self) -> int:
        return len(self.generator_names)

    @property
    def relator_count(self) -> int:
        return len(self.relators)

    def index(self, name: str) -> int:
        return self.generator_names.index(name)

    def format_word(self, word: FreeWord) -> str:
        return word.format(self.generator_names)

    def format(self) -> str:
        lines = ['gens ' + ' '.join(self.generator_names)]
        lines += ['rel ' + self.format_word(r) for r in self.relators]
        return '\n'.join(lines)


def fox_derivative(w: FreeWord, i: int, generator_count: Optional[int] = None) -> GroupRingElement:
    """Left Fox derivative d_i w, using the closed forms for the powers x^n"""
    if i < 0 or (generator_count is not None and i >= generator_count):
        raise IndexError(f"Fox derivative index {i} out of range")
    terms: Dict[FreeWord, int] = {}
    prefix = FreeWord.identity()
    for gen, power in w.syllables:
        if gen == i:
            if power > 0:
                # x^n -> 1 + x + ... + x^(n-1)
                exponents = range(0, power)
                sign = 1
            else:
                # x^n -> -(x^-1 + ... + x^n)
                exponents = range(-1, power - 1, -1)
                sign = -1
            for k in exponents:
                term = prefix * FreeWord.generator(gen, k)
                terms[term] = terms.get(term, 0) + sign
        prefix = prefix * FreeWord.generator(gen, power)
    return GroupRingElement(terms)


def fox_jacobian(presentation: Presentation) -> List[List[GroupRingElement]]:
    """Rows indexed by relators, columns by generators"""
    d = presentation.generator_count
    return [[fox_derivative(r, i, d) for i in range(d)] for r in presentation.relators]


@dataclass(frozen=True)
class SubgroupPresentation:
    """Reidemeister-Schreier presentation of the kernel of a parity map onto Z/2"""

    parity: Tuple[int, ...]
    coset_generator: int
    schreier_generators: Tuple[FreeWord, ...]
    relators: Tuple[FreeWord, ...]
    rewriting_table: Mapping[Tuple[int, int], FreeWord] = field(repr=False)

    @property
    def coset_representatives(self) -> Tuple[FreeWord, FreeWord]:
        return FreeWord.identity(), FreeWord.generator(self.coset_generator)

    def rewrite(self, word: FreeWord, coset: int = 0) -> FreeWord:
        """Rewrite a word read from the given coset into Schreier generators"""
        syllables: List[Syllable] = []
        for gen, step in word.letters():
            if step > 0:
                syllables.extend(self.rewriting_table[(coset, gen)].syllables)
                coset ^= self.parity[gen]
            else:
                coset ^= self.parity[gen]
                syllables.extend((~self.rewriting_table[(coset, gen)]).syllables)
        return FreeWord(tuple(syllables))

    def expand(self, schreier_word: FreeWord) -> FreeWord:
        """Substitute ambient words for Schreier generators"""
        result = FreeWord.identity()
        for gen, power in schreier_word.syllables:
            result = result * (self.schreier_generators[gen] ** power)
        return result

    def as_presentation(self, names: Optional[Sequence[str]] = None) -> Presentation:
        if names is None:
            names = [f's{k + 1}' for k in range(len(self.schreier_generators))]
        return Presentation(tuple(names), self.relators)


def index2_subgroup(p: Presentation, parity: Sequence[int]) -> SubgroupPresentation:
    """Kernel of the parity map, with coset representatives {e, c}, c the first odd generator"""
    parity = tuple(int(b) % 2 for b in parity)
    if len(parity) != p.generator_count:
        raise PresentationShapeError(
            f"Parity vector has {len(parity)} entries, presentation has "
            f"{p.generator_count} generators"
        )
    if not any(parity):
        raise ParityError("All-even parity vector: the subgroup is not proper")
    # the parity map must vanish on every relator
    for k, rel in enumerate(p.relators):
        if rel.parity(parity):
            raise ParityError(
                f"Relator {k + 1} ({p.format_word(rel)}) has odd parity; "
                f"the parity map does not factor through the group"
            )

    # transversal {e, c}; it is Schreier since c is a single letter
    c = parity.index(1)
    coset_word = (FreeWord.identity(), FreeWord.generator(c))
    generators: List[FreeWord] = []
    table: Dict[Tuple[int, int], FreeWord] = {}
    for coset in (0, 1):
        for gen in range(p.generator_count):
            target = coset ^ parity[gen]
            ambient = coset_word[coset] * FreeWord.generator(gen) * ~coset_word[target]
            # c c^-1 from coset 0 is trivial and gets no generator
            if ambient.is_identity():
                table[(coset, gen)] = FreeWord.identity()
                continue
            table[(coset, gen)] = FreeWord.generator(len(generators))
            generators.append(ambient)

    sub = SubgroupPresentation(parity, c, tuple(generators), (), table)
    relators = []
    # every relator is read from both cosets
    for rel in p.relators:
        for coset in (0, 1):
            relators.append(sub.rewrite(rel, coset))
    return SubgroupPresentation(parity, c, tuple(generators), tuple(relators), table)
