import math
import re
from dataclasses import replace
from importlib import resources

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from chemtau.constants import AVOGADRO, R_U, CAL_TO_ERG
from chemtau.mech_parser import (
    Mechanism,
    MechanismError,
    format_mechanism,
    parse_mechanism,
    parse_mechanism_files,
    validate_mechanism,
)

from conftest import gri_thermo_text, toy_mechanism

MINIMAL = """ELEMENTS H END
SPECIES H2 H END
REACTIONS
H2=>H+H 1.0 0.0 0.0
END
"""


def test_minimal_mechanism():
    m = parse_mechanism(MINIMAL, gri_thermo_text())
    assert (m.K, m.I) == (2, 1)
    r = m.reactions[0]
    assert r.reactants == (("H2", 1.0),)
    assert r.products == (("H", 2.0),)
    assert not r.reversible


def test_gri_counts_match_file(gri):
    text = (resources.files("chemtau") / "data" / "gri30.inp").read_text()
    # independent count: tokens of the SPECIES block, lines carrying a reaction arrow
    body = re.search(r"SPECIES(.*?)END", text, re.S).group(1)
    n_species = len(body.split())
    rx = text[text.index("REACTIONS"):]
    n_reactions = sum(1 for line in rx.splitlines()[1:] if "=" in line.split("!")[0])
    assert (n_species, n_reactions) == (53, 325)
    assert (gri.K, gri.I) == (n_species, n_reactions)


def test_gri_validates_clean(gri):
    assert validate_mechanism(gri) == []


def test_gri_structure(gri):
    assert sum(r.duplicate for r in gri.reactions) == 6
    assert gri.species_index("h2o") == gri.species_index("H2O")
    troe = [r for r in gri.reactions if r.falloff is not None and r.falloff.troe is not None]
    assert troe and all(len(r.falloff.troe) in (3, 4) for r in troe)
    # every reaction balances and every species has a thermo card
    for s in gri.species:
        assert s.thermo.t_low < s.thermo.t_mid < s.thermo.t_high


def test_unknown_species_names_it_and_line():
    text = MINIMAL.replace("H2=>H+H", "H2+XYZ=>H+H+XYZ")
    with pytest.raises(MechanismError) as exc:
        parse_mechanism(text, gri_thermo_text())
    assert "XYZ" in str(exc.value)
    assert exc.value.line == 4


def test_unbalanced_reaction_rejected():
    with pytest.raises(MechanismError, match="unbalanced"):
        parse_mechanism(MINIMAL.replace("H2=>H+H", "H2=>H"), gri_thermo_text())


def test_missing_thermo():
    with pytest.raises(MechanismError, match="missing thermo entry for species 'H2'"):
        parse_mechanism(MINIMAL, "")


def test_validate_flags_weight(gri):
    bad = replace(gri.species[3], molecular_weight=gri.species[3].molecular_weight * 1.01)
    m = Mechanism(gri.elements, gri.species[:3] + (bad,) + gri.species[4:], gri.reactions)
    diags = validate_mechanism(m)
    assert len(diags) == 1 and gri.species[3].name in diags[0]


def test_validate_flags_imbalance(gri):
    m0 = parse_mechanism(MINIMAL, gri_thermo_text())
    broken = replace(m0.reactions[0], products=(("H", 1.0),))
    diags = validate_mechanism(Mechanism(m0.elements, m0.species, (broken,)))
    assert len(diags) == 1 and "H2 => H" in diags[0]


def test_units_keywords():
    base = "ELEMENTS H O END\nSPECIES H O OH H2 END\nREACTIONS {units}\nH+O+M<=>OH+M 1.0E10 0.5 {E}\nH2+O<=>H+OH 2.0E8 1.0 {E}\nEND\n"
    th = gri_thermo_text()
    ref = parse_mechanism(base.format(units="", E="1000.0"), th)
    kcal = parse_mechanism(base.format(units="KCAL/MOLE", E="1.0"), th)
    assert kcal.reactions[0].arrhenius[2] == pytest.approx(1000.0)
    kelv = parse_mechanism(base.format(units="KELVINS", E="1000.0"), th)
    assert kelv.reactions[1].arrhenius[2] == pytest.approx(1000.0 * R_U / CAL_TO_ERG)
    joule = parse_mechanism(base.format(units="JOULES/MOLE", E="4184.0"), th)
    assert joule.reactions[1].arrhenius[2] == pytest.approx(1000.0)
    mol = parse_mechanism(base.format(units="MOLECULES", E="1000.0"), th)
    # termolecular (H+O+M) and bimolecular orders
    assert mol.reactions[0].arrhenius[0] == pytest.approx(1.0e10 * AVOGADRO**2)
    assert mol.reactions[1].arrhenius[0] == pytest.approx(2.0e8 * AVOGADRO)
    assert ref.reactions[0].third_body == ()


def test_auxiliary_lines_attach_to_previous_reaction():
    rx = """H+O2(+M)<=>HO2(+M) 4.65E12 0.44 0.0
LOW / 6.37E20 -1.72 525.0 /
TROE / 0.5 1.0E-30 1.0E30 /
H2O/14.0/ AR/0.67/
H+OH+M<=>H2O+M 3.5E22 -2.0 0.0
H2/0.73/ DUPLICATE
"""
    m = toy_mechanism(rx, "H O2 HO2 OH H2O H2 AR")
    a, b = m.reactions
    assert a.falloff.low == (6.37e20, -1.72, 525.0)
    assert a.falloff.troe == (0.5, 1e-30, 1e30)
    assert dict(a.third_body) == {"H2O": 14.0, "AR": 0.67}
    assert dict(b.third_body) == {"H2": 0.73} and b.duplicate and b.falloff is None


def test_explicit_falloff_collider():
    m = toy_mechanism("H+O2(+N2)<=>HO2(+N2) 4.65E12 0.44 0.0\nLOW/6.37E20 -1.72 525.0/", "H O2 HO2 N2")
    assert m.reactions[0].collider == "N2"


@pytest.mark.parametrize(
    "aux, msg",
    [
        ("TROE / 0.5 100 1000 /", "TROE given for a non-falloff"),
        ("PLOG / 1.0 1e10 0 0 /", "unsupported reaction keyword PLOG"),
        ("LOW / 1 2 /", "LOW given for a non-falloff"),
        ("H2O / 2.0 /", "without third body"),
    ],
)
def test_bad_auxiliary_data(aux, msg):
    with pytest.raises(MechanismError, match=msg):
        toy_mechanism(f"H2+O<=>H+OH 3.87E4 2.7 6260.0\n{aux}", "H2 O H OH H2O")


def test_combined_file_with_thermo_block(tmp_path):
    th = gri_thermo_text()
    cards = []
    lines = th.splitlines()
    for i, line in enumerate(lines):
        if line[:18].split() and line[:18].split()[0] in ("H2", "H") and line.rstrip().endswith("1"):
            cards += lines[i:i + 4]
    text = MINIMAL.replace("END\n", "END\n", 2) + "THERMO\n300.0 1000.0 5000.0\n" + "\n".join(cards) + "\nEND\n"
    path = tmp_path / "combined.inp"
    path.write_text(text)
    m = parse_mechanism_files(path)
    assert m.K == 2 and m.species[0].thermo == parse_mechanism(MINIMAL, th).species[0].thermo


def test_round_trip_gri(gri):
    again = parse_mechanism(format_mechanism(gri))
    assert again == gri
    assert format_mechanism(again) == format_mechanism(gri)


# a balanced reaction pool for property-based round trips
_POOL = [
    ("H2+O", "H+OH", False),
    ("H+O2", "HO2", True),
    ("OH+OH", "H2O2", "falloff"),
    ("H+O", "OH", True),
    ("H2O2+H", "H2O+OH", False),
    ("2OH", "H2O+O", False),
]


@st.composite
def _mechanisms(draw):
    picks = draw(st.lists(st.sampled_from(range(len(_POOL))), min_size=1, max_size=6))
    lines = []
    for j in picks:
        lhs, rhs, kind = _POOL[j]
        arrow = draw(st.sampled_from(["<=>", "=>", "="]))
        A = draw(st.floats(1e-3, 1e20, allow_nan=False))
        b = draw(st.floats(-3, 3, allow_nan=False))
        E = draw(st.floats(-5e3, 1e5, allow_nan=False))
        if kind == "falloff":
            lines.append(f"{lhs}(+M){arrow}{rhs}(+M) {A!r} {b!r} {E!r}")
            lines.append(f"LOW / {A * 1e5!r} {b - 1!r} {E / 2!r} /")
            if draw(st.booleans()):
                lines.append(f"TROE / {draw(st.floats(0.01, 0.99))!r} 100.0 2000.0 5000.0 /")
            lines.append(f"H2O/{draw(st.floats(0.1, 20))!r}/")
        elif kind is True:
            lines.append(f"{lhs}+M{arrow}{rhs}+M {A!r} {b!r} {E!r}")
            lines.append(f"H2/{draw(st.floats(0.0, 5))!r}/ AR/0.7/")
        else:
            lines.append(f"{lhs}{arrow}{rhs} {A!r} {b!r} {E!r}")
        if draw(st.booleans()):
            lines.append("DUPLICATE")
    return toy_mechanism("\n".join(lines), "H H2 O O2 OH H2O HO2 H2O2 AR")


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(_mechanisms())
def test_round_trip_property(m):
    assert parse_mechanism(format_mechanism(m)) == m


_VOCAB = ["ELEMENTS", "SPECIES", "REACTIONS", "THERMO", "END", "H", "O", "H2", "O2", "OH", "=",
          "<=>", "=>", "+", "M", "(+M)", "LOW", "TROE", "/", "DUP", "1.0", "-2", "3e5", "!", "\n",
          " ", "KCAL/MOLE", "PLOG", "XYZ", "0"]


@settings(max_examples=300, deadline=None)
@given(st.lists(st.sampled_from(_VOCAB), max_size=60).map(" ".join), st.text(max_size=40))
def test_parser_is_total(tokens, noise):
    for text in (tokens, tokens + noise, noise):
        try:
            parse_mechanism(text, gri_thermo_text())
        except MechanismError:
            pass


def test_arrhenius_exponent_unit():
    # E given in cal/mol is stored as-is; kinetics converts with CAL_TO_ERG
    m = toy_mechanism("H2+O<=>H+OH 3.87E4 2.7 6260.0", "H2 O H OH")
    assert m.reactions[0].arrhenius == (3.87e4, 2.7, 6260.0)
    assert math.isclose(6260.0 * CAL_TO_ERG / R_U, 3150.2, rel_tol=1e-3)
