"""CHEMKIN-II mechanism and NASA-7 thermodynamic data reader.

Species names are case-insensitive and stored uppercase. Activation
energies are kept in cal/mol on the parsed records; the kinetics module
converts them to erg/mol when it builds its rate arrays.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .constants import ATOMIC_WEIGHTS, AVOGADRO, CAL_TO_ERG, EV_TO_ERG, R_U

__all__ = [
    "ElementSpec",
    "NASA7Thermo",
    "SpeciesSpec",
    "Falloff",
    "ReactionSpec",
    "Mechanism",
    "MechanismError",
    "parse_mechanism",
    "parse_mechanism_files",
    "load_gri30",
    "validate_mechanism",
    "format_mechanism",
]


class MechanismError(ValueError):
    """Raised for malformed or inconsistent mechanism input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class ElementSpec:
    symbol: str
    atomic_weight: float


@dataclass(frozen=True)
class NASA7Thermo:
    """Two-range NASA polynomial fit. Coefficients are a1..a7 per range."""

    t_low: float
    t_mid: float
    t_high: float
    coeffs_low: tuple[float, ...]
    coeffs_high: tuple[float, ...]

    def coeffs(self, T: float) -> tuple[float, ...]:
        return self.coeffs_low if T < self.t_mid else self.coeffs_high


@dataclass(frozen=True)
class SpeciesSpec:
    name: str
    composition: tuple[tuple[str, int], ...]
    molecular_weight: float
    thermo: NASA7Thermo

    def count(self, element: str) -> int:
        return dict(self.composition).get(element, 0)


@dataclass(frozen=True)
class Falloff:
    """Low-pressure limit (A, beta, E[cal/mol]) and optional Troe parameters."""

    low: tuple[float, float, float]
    troe: tuple[float, ...] | None = None


@dataclass(frozen=True)
class ReactionSpec:
    """One elementary reaction.

    ``third_body`` is None when no collision partner participates. Otherwise
    it holds the enhanced efficiencies (species, eff); species not listed
    count with efficiency 1. ``collider`` names a single species when the
    falloff partner is explicit, e.g. ``(+N2)``.
    """

    reactants: tuple[tuple[str, float], ...]
    products: tuple[tuple[str, float], ...]
    reversible: bool
    arrhenius: tuple[float, float, float]
    third_body: tuple[tuple[str, float], ...] | None = None
    falloff: Falloff | None = None
    collider: str | None = None
    duplicate: bool = False

    @property
    def equation(self) -> str:
        def side(terms):
            parts = [(f"{_fmt_coeff(c)} {s}" if c != 1 else s) for s, c in terms]
            lhs = " + ".join(parts)
            if self.falloff is not None:
                lhs += f" (+{self.collider or 'M'})"
            elif self.third_body is not None:
                lhs += " + M"
            return lhs

        arrow = " <=> " if self.reversible else " => "
        return side(self.reactants) + arrow + side(self.products)

    @property
    def reactant_order(self) -> float:
        return sum(c for _, c in self.reactants)


@dataclass(frozen=True)
class Mechanism:
    elements: tuple[ElementSpec, ...]
    species: tuple[SpeciesSpec, ...]
    reactions: tuple[ReactionSpec, ...]
    # per-module compiled arrays; excluded from equality
    _derived: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def K(self) -> int:
        return len(self.species)

    @property
    def I(self) -> int:  # noqa: E743
        return len(self.reactions)

    @property
    def species_names(self) -> list[str]:
        return [s.name for s in self.species]

    def species_index(self, name: str) -> int:
        index = self._derived.get("species_index")
        if index is None:
            index = {s.name: k for k, s in enumerate(self.species)}
            self._derived["species_index"] = index
        try:
            return index[name.upper()]
        except KeyError:
            raise KeyError(f"unknown species {name!r}") from None

    def molecular_weights(self):
        import numpy as np

        return np.array([s.molecular_weight for s in self.species])


def _fmt_coeff(c: float) -> str:
    return str(int(c)) if float(c).is_integer() else repr(float(c))


# --------------------------------------------------------------------------
# text handling

_BLOCKS = {"ELEM": "ELEMENTS", "SPEC": "SPECIES", "REAC": "REACTIONS", "THER": "THERMO"}
_UNSUPPORTED = {
    "REV", "SRI", "PLOG", "CHEB", "FORD", "RORD", "HIGH", "TDEP", "LT", "RLT",
    "UNITS", "MOME", "XSMI", "EXCI", "JAN", "FIT1", "PCHEB", "TCHEB",
}
_FALLOFF_RE = re.compile(r"\(\s*\+\s*([^()\s]+)\s*\)")
_COEFF_RE = re.compile(r"^(\d+(?:\.\d*)?)\s*(\S.*)$")
_AUX_RE = re.compile(r"([^\s/]+)\s*/([^/]*)/")
_ENERGY_UNITS = {
    "CAL/MOLE": 1.0,
    "KCAL/MOLE": 1000.0,
    "JOULES/MOLE": 1e7 / CAL_TO_ERG,
    "KJOULES/MOLE": 1e10 / CAL_TO_ERG,
    "KELVINS": R_U / CAL_TO_ERG,
    "EVOLTS": EV_TO_ERG * AVOGADRO / CAL_TO_ERG,
}


def _block_key(token: str) -> str | None:
    t = token.upper()
    for prefix, name in _BLOCKS.items():
        if t.startswith(prefix) and name.startswith(t[: len(name)]):
            return name
    return None


def _strip_comment(line: str) -> str:
    i = line.find("!")
    return line if i < 0 else line[:i]


def _float(text: str, lineno: int | None, what: str) -> float:
    try:
        return float(text.strip().replace("D", "E").replace("d", "e"))
    except ValueError:
        raise MechanismError(f"cannot read {what} from {text.strip()!r}", lineno) from None


@dataclass
class _RawReaction:
    line: int
    reactants: list
    products: list
    reversible: bool
    arrhenius: tuple
    third_body: dict | None
    falloff_low: tuple | None = None
    troe: tuple | None = None
    collider: str | None = None
    duplicate: bool = False


def _split_sections(text: str):
    """Sort meaningful lines into ELEMENTS/SPECIES/REACTIONS/THERMO buckets."""
    block = None
    thermo_raw: list[tuple[int, str]] = []
    out: dict[str, list] = {"ELEMENTS": [], "SPECIES": [], "REACTIONS": [], "THERMO": thermo_raw}
    reaction_header: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if block == "THERMO":
            if raw.strip().upper().startswith("END"):
                block = None
                continue
            thermo_raw.append((lineno, raw))
            continue
        line = _strip_comment(raw)
        tokens = line.split()
        if not tokens:
            continue
        key = _block_key(tokens[0])
        if key is not None:
            block = key
            rest = tokens[1:]
            if key == "REACTIONS":
                reaction_header.extend(rest)
                continue
            if key == "THERMO":
                continue
            tokens = rest
            line = " ".join(rest)
        if block is None:
            if tokens[0].upper() == "END":
                continue
            raise MechanismError(f"text outside any block: {line.strip()!r}", lineno)
        if block == "REACTIONS":
            if tokens[0].upper() == "END" and len(tokens) == 1:
                block = None
                continue
            out["REACTIONS"].append((lineno, line.strip()))
            continue
        section = block
        kept = []
        for tok in tokens:
            if tok.upper() == "END":
                block = None
                break
            kept.append(tok)
        if kept:
            out[section].append((lineno, " ".join(kept)))
    return out, reaction_header


def _parse_elements(lines) -> list[ElementSpec]:
    elements: list[ElementSpec] = []
    seen = set()
    for lineno, line in lines:
        pos = 0
        text = line.strip()
        for m in re.finditer(r"([A-Za-z][A-Za-z0-9]*)\s*(?:/([^/]*)/)?", text):
            sym = m.group(1).upper()
            if m.group(2) is not None:
                weight = _float(m.group(2), lineno, f"atomic weight of {sym}")
            elif sym in ATOMIC_WEIGHTS:
                weight = ATOMIC_WEIGHTS[sym]
            else:
                raise MechanismError(f"unknown element {sym!r} without atomic weight", lineno)
            if sym in seen:
                raise MechanismError(f"element {sym!r} declared twice", lineno)
            seen.add(sym)
            elements.append(ElementSpec(sym, weight))
            pos = m.end()
        if text[pos:].strip():
            raise MechanismError(f"cannot parse element entry {text[pos:].strip()!r}", lineno)
    return elements


def _parse_species_names(lines) -> list[tuple[str, int]]:
    names: list[tuple[str, int]] = []
    seen = set()
    for lineno, line in lines:
        for tok in line.split():
            name = tok.upper()
            if name in seen:
                raise MechanismError(f"species {name!r} declared twice", lineno)
            seen.add(name)
            names.append((name, lineno))
    return names


def _parse_side(text: str, species: set, lineno: int):
    """Return (terms, has_M) for one side of a reaction equation."""
    terms: dict[str, float] = {}
    has_m = False
    for part in text.split("+"):
        part = part.strip()
        if not part:
            raise MechanismError(f"empty term in reaction side {text.strip()!r}", lineno)
        if part == "M":
            has_m = True
            continue
        if part in species:
            coeff, name = 1.0, part
        else:
            m = _COEFF_RE.match(part)
            if m is None or m.group(2).strip() not in species:
                bad = m.group(2).strip() if m else part
                raise MechanismError(f"unknown species {bad!r} in reaction", lineno)
            coeff, name = float(m.group(1)), m.group(2).strip()
        if coeff <= 0:
            raise MechanismError(f"non-positive coefficient for {name}", lineno)
        terms[name] = terms.get(name, 0.0) + coeff
    return terms, has_m


def _parse_equation(eq: str, species: set, lineno: int):
    for arrow, rev in (("<=>", True), ("=>", False), ("=", True)):
        if arrow in eq:
            lhs, rhs = eq.split(arrow, 1)
            break
    else:
        raise MechanismError(f"no reaction arrow in {eq!r}", lineno)
    if "<" in rhs or "=" in rhs or lhs.endswith("<"):
        raise MechanismError(f"malformed reaction arrow in {eq!r}", lineno)
    fl = _FALLOFF_RE.search(lhs), _FALLOFF_RE.search(rhs)
    collider = None
    falloff = False
    if fl[0] or fl[1]:
        if not (fl[0] and fl[1]) or fl[0].group(1) != fl[1].group(1):
            raise MechanismError(f"inconsistent falloff partner in {eq!r}", lineno)
        falloff = True
        collider = fl[0].group(1)
        lhs = _FALLOFF_RE.sub("", lhs)
        rhs = _FALLOFF_RE.sub("", rhs)
        if collider != "M" and collider not in species:
            raise MechanismError(f"unknown species {collider!r} in reaction", lineno)
    reac, m_l = _parse_side(lhs, species, lineno)
    prod, m_r = _parse_side(rhs, species, lineno)
    if m_l != m_r:
        raise MechanismError(f"third body only on one side of {eq!r}", lineno)
    if falloff and m_l:
        raise MechanismError(f"both (+M) and +M in {eq!r}", lineno)
    return reac, prod, rev, m_l, falloff, collider


def _parse_reactions(lines, species: set, header: list[str]) -> list[_RawReaction]:
    e_scale = 1.0
    molecules = False
    for tok in header:
        t = tok.upper()
        if t in _ENERGY_UNITS:
            e_scale = _ENERGY_UNITS[t]
        elif t in ("MOLES", "MOLE"):
            molecules = False
        elif t == "MOLECULES":
            molecules = True
        else:
            raise MechanismError(f"unknown REACTIONS unit keyword {tok!r}")

    def a_factor(order: float) -> float:
        return AVOGADRO ** (order - 1.0) if molecules else 1.0

    reactions: list[_RawReaction] = []
    for lineno, line in lines:
        if "=" in line:
            parts = line.rsplit(None, 3)
            if len(parts) < 4:
                raise MechanismError(f"reaction needs A, beta, E: {line!r}", lineno)
            eq = parts[0].upper()
            A = _float(parts[1], lineno, "pre-exponential factor")
            beta = _float(parts[2], lineno, "temperature exponent")
            E = _float(parts[3], lineno, "activation energy") * e_scale
            reac, prod, rev, has_m, falloff, collider = _parse_equation(eq, species, lineno)
            order = sum(reac.values()) + (1.0 if has_m else 0.0)
            rx = _RawReaction(
                line=lineno,
                reactants=list(reac.items()),
                products=list(prod.items()),
                reversible=rev,
                arrhenius=(A * a_factor(order), beta, E),
                third_body={} if (has_m or (falloff and collider == "M")) else None,
                collider=collider if falloff else None,
            )
            rx.falloff_low = () if falloff else None
            reactions.append(rx)
            continue
        if not reactions:
            raise MechanismError(f"auxiliary data before any reaction: {line!r}", lineno)
        rx = reactions[-1]
        _parse_aux(line.upper(), rx, species, lineno, e_scale, a_factor)

    for rx in reactions:
        if rx.falloff_low == ():
            raise MechanismError("falloff reaction without LOW parameters", rx.line)
        if rx.troe is not None and rx.falloff_low is None:
            raise MechanismError("TROE given for a non-falloff reaction", rx.line)
    return reactions


def _parse_aux(line: str, rx: _RawReaction, species: set, lineno: int, e_scale, a_factor):
    text = line.strip()
    while text:
        m = _AUX_RE.match(text)
        if m is None:
            word = text.split()[0]
            if word in ("DUP", "DUPLICATE"):
                rx.duplicate = True
                text = text[len(word):].strip()
                continue
            raise MechanismError(f"cannot parse auxiliary data {text!r}", lineno)
        key, body = m.group(1), m.group(2)
        text = text[m.end():].strip()
        values = [_float(v, lineno, f"{key} value") for v in body.split()]
        if key == "LOW":
            if rx.falloff_low is None:
                raise MechanismError("LOW given for a non-falloff reaction", lineno)
            if len(values) != 3:
                raise MechanismError("LOW needs 3 values", lineno)
            order = sum(c for _, c in rx.reactants) + 1.0
            rx.falloff_low = (values[0] * a_factor(order), values[1], values[2] * e_scale)
        elif key == "TROE":
            if len(values) not in (3, 4):
                raise MechanismError("TROE needs 3 or 4 values", lineno)
            rx.troe = tuple(values)
        elif key in _UNSUPPORTED:
            raise MechanismError(f"unsupported reaction keyword {key}", lineno)
        elif key in species:
            if rx.third_body is None:
                raise MechanismError(f"efficiency for {key} on a reaction without third body", lineno)
            if len(values) != 1:
                raise MechanismError(f"efficiency for {key} needs one value", lineno)
            rx.third_body[key] = values[0]
        else:
            raise MechanismError(f"unknown species {key!r} in auxiliary data", lineno)


def _parse_thermo_lines(lines) -> dict[str, tuple[int, list[str], tuple[float, float, float] | None]]:
    """Group raw THERMO lines into 4-line cards keyed by species name."""
    cards: dict[str, tuple] = {}
    defaults = None
    rows = [(n, l.rstrip("\n")) for n, l in lines if l.strip() and not l.lstrip().startswith("!")]
    i = 0
    if rows:
        head = rows[0][1].split()
        if len(head) == 3 and all(_is_float(h) for h in head):
            defaults = tuple(float(h) for h in head)
            i = 1
    while i < len(rows):
        lineno, first = rows[i]
        if len(rows) - i < 4:
            raise MechanismError("truncated NASA-7 thermo card", lineno)
        name = first[:18].split()[0].upper() if first[:18].split() else ""
        if not name:
            raise MechanismError("thermo card without species name", lineno)
        if name not in cards:
            cards[name] = (lineno, [first] + [rows[i + j][1] for j in (1, 2, 3)], defaults)
        i += 4
    return cards


def _is_float(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def _read_card(name: str, lineno: int, card: list[str], defaults, elements: dict):
    first = card[0].ljust(80)
    comp: list[tuple[str, int]] = []
    slots = [first[24 + 5 * j: 29 + 5 * j] for j in range(4)] + [first[73:78]]
    for slot in slots:
        el = slot[:2].strip().upper()
        cnt = slot[2:].strip()
        if not el or not cnt:
            continue
        n = _float(cnt, lineno, f"element count for {name}")
        if n == 0:
            continue
        if el not in elements:
            raise MechanismError(f"species {name} uses undeclared element {el!r}", lineno)
        if not float(n).is_integer():
            raise MechanismError(f"non-integer element count for {name}", lineno)
        comp.append((el, int(n)))
    t_fields = first[45:55], first[55:65], first[65:73]
    temps = []
    for j, f in enumerate(t_fields):
        if f.strip():
            temps.append(_float(f, lineno, f"temperature range of {name}"))
        elif defaults is not None:
            temps.append(defaults[(0, 2, 1)[j]])
        else:
            raise MechanismError(f"missing temperature range for {name}", lineno)
    t_low, t_high, t_mid = temps
    coeffs = []
    for j in (1, 2, 3):
        row = card[j].ljust(80)
        n_fields = 5 if j < 3 else 4
        for f in range(n_fields):
            coeffs.append(_float(row[15 * f: 15 * f + 15], lineno + j, f"NASA coefficient of {name}"))
    thermo = NASA7Thermo(
        t_low=t_low,
        t_mid=t_mid,
        t_high=t_high,
        coeffs_low=tuple(coeffs[7:14]),
        coeffs_high=tuple(coeffs[0:7]),
    )
    return tuple(comp), thermo


# --------------------------------------------------------------------------
# public API


def parse_mechanism(mech_text: str, thermo_text: str | None = None) -> Mechanism:
    """Parse CHEMKIN-II mechanism text (and optional separate thermo text).

    Thermo entries embedded in the mechanism's own THERMO block take
    precedence over ``thermo_text``. Raises :class:`MechanismError` on any
    syntax or consistency problem, naming the line where possible.
    """
    sections, header = _split_sections(mech_text)
    elements = _parse_elements(sections["ELEMENTS"])
    if not elements:
        raise MechanismError("no ELEMENTS block")
    names = _parse_species_names(sections["SPECIES"])
    if not names:
        raise MechanismError("no SPECIES block")
    species_set = {n for n, _ in names}
    raw_reactions = _parse_reactions(sections["REACTIONS"], species_set, header)

    cards = _parse_thermo_lines(sections["THERMO"])
    if thermo_text is not None:
        extra, _ = _split_sections(thermo_text) if _has_thermo_keyword(thermo_text) else (
            {"THERMO": list(enumerate(thermo_text.splitlines(), start=1))},
            None,
        )
        for name, card in _parse_thermo_lines(extra["THERMO"]).items():
            cards.setdefault(name, card)

    element_map = {e.symbol: e for e in elements}
    species = []
    for name, lineno in names:
        if name not in cards:
            raise MechanismError(f"missing thermo entry for species {name!r}", lineno)
        card_line, card, defaults = cards[name]
        comp, thermo = _read_card(name, card_line, card, defaults, element_map)
        weight = sum(n * element_map[el].atomic_weight for el, n in comp)
        species.append(SpeciesSpec(name, comp, weight, thermo))

    comp_of = {s.name: dict(s.composition) for s in species}
    reactions = []
    for rx in raw_reactions:
        bal = _element_balance(rx.reactants, rx.products, comp_of)
        if bal:
            raise MechanismError(f"unbalanced elements {bal} in reaction", rx.line)
        if rx.arrhenius[0] <= 0 and not (rx.falloff_low and rx.falloff_low[0] > 0):
            raise MechanismError("pre-exponential factor must be positive", rx.line)
        reactions.append(
            ReactionSpec(
                reactants=tuple(rx.reactants),
                products=tuple(rx.products),
                reversible=rx.reversible,
                arrhenius=rx.arrhenius,
                third_body=tuple(rx.third_body.items()) if rx.third_body is not None else None,
                falloff=Falloff(rx.falloff_low, rx.troe) if rx.falloff_low is not None else None,
                collider=rx.collider if rx.collider not in (None, "M") else None,
                duplicate=rx.duplicate,
            )
        )
    mech = Mechanism(tuple(elements), tuple(species), tuple(reactions))
    problems = validate_mechanism(mech)
    if problems:
        raise MechanismError("; ".join(problems))
    return mech


def _has_thermo_keyword(text: str) -> bool:
    for raw in text.splitlines():
        line = _strip_comment(raw).strip()
        if line:
            return line.upper().startswith("THER")
    return False


def parse_mechanism_files(mech_path, thermo_path=None) -> Mechanism:
    mech_text = Path(mech_path).read_text()
    thermo_text = Path(thermo_path).read_text() if thermo_path else None
    return parse_mechanism(mech_text, thermo_text)


_GRI_CACHE: list[Mechanism] = []


def load_gri30() -> Mechanism:
    """The bundled GRI-Mech 3.0 mechanism (parsed once per process)."""
    if not _GRI_CACHE:
        data = resources.files("chemtau") / "data"
        _GRI_CACHE.append(
            parse_mechanism((data / "gri30.inp").read_text(), (data / "thermo30.dat").read_text())
        )
    return _GRI_CACHE[0]


def _element_balance(reactants, products, comp_of) -> dict[str, float]:
    net: dict[str, float] = {}
    for terms, sign in ((reactants, -1.0), (products, 1.0)):
        for name, c in terms:
            for el, n in comp_of.get(name, {}).items():
                net[el] = net.get(el, 0.0) + sign * c * n
    return {el: v for el, v in net.items() if v != 0}


def validate_mechanism(m: Mechanism) -> list[str]:
    """Check every type invariant; returns one message per violation."""
    out: list[str] = []
    if not m.species:
        out.append("mechanism has no species")
    if not m.reactions:
        out.append("mechanism has no reactions")
    symbols = [e.symbol for e in m.elements]
    if len(set(symbols)) != len(symbols):
        out.append("duplicate element symbols")
    weights = {e.symbol: e.atomic_weight for e in m.elements}
    for e in m.elements:
        if not e.atomic_weight > 0:
            out.append(f"element {e.symbol}: non-positive atomic weight")
    names = [s.name for s in m.species]
    if len(set(names)) != len(names):
        out.append("duplicate species names")
    for s in m.species:
        if not s.molecular_weight > 0:
            out.append(f"species {s.name}: non-positive molecular weight")
            continue
        unknown = [el for el, _ in s.composition if el not in weights]
        if unknown:
            out.append(f"species {s.name}: undeclared elements {unknown}")
            continue
        expected = sum(n * weights[el] for el, n in s.composition)
        if abs(expected - s.molecular_weight) > 1e-3 * expected:
            out.append(
                f"species {s.name}: molecular weight {s.molecular_weight:g} "
                f"inconsistent with composition ({expected:g})"
            )
        th = s.thermo
        if not th.t_low < th.t_mid < th.t_high:
            out.append(f"species {s.name}: thermo temperature ranges out of order")
        else:
            lo = _cp_r(th.coeffs_low, th.t_mid)
            hi = _cp_r(th.coeffs_high, th.t_mid)
            if abs(lo - hi) > 1e-2 * max(abs(lo), abs(hi)):
                out.append(f"species {s.name}: cp/R discontinuous at t_mid ({lo:g} vs {hi:g})")
    known = set(names)
    comp_of = {s.name: dict(s.composition) for s in m.species}
    for i, r in enumerate(m.reactions):
        label = f"reaction {i} ({r.equation})"
        refs = [n for n, _ in r.reactants + r.products]
        refs += [n for n, _ in (r.third_body or ())]
        if r.collider:
            refs.append(r.collider)
        missing = sorted(set(refs) - known)
        if missing:
            out.append(f"{label}: unknown species {missing}")
            continue
        bal = _element_balance(r.reactants, r.products, comp_of)
        if bal:
            out.append(f"{label}: element imbalance {bal}")
        if not r.arrhenius[0] > 0:
            out.append(f"{label}: non-positive pre-exponential factor")
    return out


def _cp_r(a, T):
    return a[0] + T * (a[1] + T * (a[2] + T * (a[3] + T * a[4])))


# --------------------------------------------------------------------------
# normalized writer


def _field(value: float, width: int) -> str:
    text = repr(float(value))
    if len(text) > width:
        text = f"{value:.8E}"
        if float(text) != value or len(text) > width:
            raise ValueError(f"{value!r} does not fit a {width}-column field")
    return text.rjust(width)


def _thermo_card(s: SpeciesSpec) -> list[str]:
    th = s.thermo
    comp = list(s.composition)
    slots = "".join(f"{el:<2}{n:>3}" for el, n in comp[:4]).ljust(20)
    fifth = f"{comp[4][0]:<2}{comp[4][1]:>3}" if len(comp) > 4 else ""
    if len(comp) > 5:
        raise ValueError(f"species {s.name} has more than 5 elements")
    first = (
        f"{s.name:<18}{'':6}{slots}G"
        f"{_field(th.t_low, 10)}{_field(th.t_high, 10)}{_field(th.t_mid, 8)}"
    )
    first = f"{first}{fifth:<5}".ljust(79) + "1"
    c = list(th.coeffs_high) + list(th.coeffs_low)
    rows = [c[0:5], c[5:10], c[10:14]]
    lines = [first]
    for n, row in enumerate(rows, start=2):
        lines.append("".join(_field(v, 15) for v in row).ljust(79) + str(n))
    return lines


def format_mechanism(m: Mechanism) -> str:
    """Serialize to a single normalized CHEMKIN-II text with embedded THERMO."""
    out = ["ELEMENTS"]
    out += [f"{e.symbol} /{e.atomic_weight!r}/" for e in m.elements]
    out.append("END")
    out.append("SPECIES")
    out += [s.name for s in m.species]
    out.append("END")
    out.append("THERMO")
    for s in m.species:
        out += _thermo_card(s)
    out.append("END")
    out.append("REACTIONS CAL/MOLE MOLES")
    for r in m.reactions:
        A, b, E = r.arrhenius
        out.append(f"{r.equation}  {A!r} {b!r} {E!r}")
        if r.falloff is not None:
            out.append("LOW / {!r} {!r} {!r} /".format(*r.falloff.low))
            if r.falloff.troe is not None:
                out.append("TROE / " + " ".join(repr(v) for v in r.falloff.troe) + " /")
        if r.third_body:
            out.append(" ".join(f"{s}/{e!r}/" for s, e in r.third_body))
        if r.duplicate:
            out.append("DUPLICATE")
    out.append("END")
    return "\n".join(out) + "\n"

