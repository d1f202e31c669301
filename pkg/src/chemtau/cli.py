"""Command-line driver.

    chemtau cases
    chemtau run <case|config.json> [--out PATH] [--atol X] [--rtol X] [--isothermal|--adiabatic]
    chemtau compare a.csv b.csv --rules rules.json

Exit codes: 0 success, 1 comparison failure, 2 input error, 3 integration failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import re
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from .mech_parser import Mechanism, MechanismError, load_gri30, parse_mechanism_files
from .reactor import ADIABATIC, ISOTHERMAL, IntegrationError, ReactorConfig, integrate
from .reactor.integrate import Sample

log = logging.getLogger(__name__)

EXIT_OK, EXIT_COMPARE, EXIT_INPUT, EXIT_INTEGRATION = 0, 1, 2, 3

HEADER = (
    "time_s,temperature_K,tau_irrts_s,irrts_reaction,tau_rts_s,rts_species,tau_rpts_s,rpts_species,"
    "tau_iets_s,tau_proposed_s,proposed_fast_species,tau_proposed_slow_s,proposed_slow_species"
).split(",")
NA = "NA"
FAILED = "FAILED"


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class CaseDefinition:
    name: str
    mode: str
    T0: float
    P0_atm: float
    t_end: float
    composition: dict | None = None  # explicit moles
    fuel: str | dict | None = None  # fuel species (or species -> moles) for a phi preset
    phi: float | None = None
    oxidizer: str = "air"
    mechanism: str | None = None  # None -> bundled GRI-Mech 3.0
    thermo: str | None = None
    rtol: float = 1e-16
    atol: float = 1e-21
    samples_per_decade: int = 20

    def __post_init__(self):
        if (self.composition is None) == (self.fuel is None):
            raise InputError(f"case {self.name!r}: give either an explicit composition or fuel + phi")
        if self.fuel is not None and not (self.phi is not None and self.phi > 0):
            raise InputError(f"case {self.name!r}: phi must be > 0")
        if self.oxidizer.lower() not in ("air", "o2"):
            raise InputError(f"case {self.name!r}: oxidizer must be 'air' or 'O2'")

    def moles(self, m: Mechanism) -> dict:
        """Explicit species -> moles map; phi presets use air = O2 + 3.76 N2."""
        if self.composition is not None:
            return dict(self.composition)
        fuel = {self.fuel: 1.0} if isinstance(self.fuel, str) else dict(self.fuel)
        o2 = 0.0
        for name, n in fuel.items():
            comp = dict(m.species[m.species_index(name)].composition)
            o2 += n * (comp.get("C", 0) + comp.get("H", 0) / 4 - comp.get("O", 0) / 2)
        if o2 <= 0:
            raise InputError(f"case {self.name!r}: fuel needs no oxygen")
        out = {k.upper(): float(v) for k, v in fuel.items()}
        out["O2"] = out.get("O2", 0.0) + o2 / self.phi
        if self.oxidizer.lower() == "air":
            out["N2"] = out.get("N2", 0.0) + 3.76 * o2 / self.phi
        return out

    def reactor_config(self, m: Mechanism) -> ReactorConfig:
        return ReactorConfig(
            mode=self.mode,
            T0=self.T0,
            P0_atm=self.P0_atm,
            composition=self.moles(m),
            t_end=self.t_end,
            rtol=self.rtol,
            atol=self.atol,
            samples_per_decade=self.samples_per_decade,
        )


def _builtin_cases() -> dict:
    cases = [
        CaseDefinition("co-isothermal", ISOTHERMAL, 1500, 1, 1e-2, {"CO": 2, "O2": 1, "H2O": 0.5}),
        CaseDefinition("co-adiabatic", ADIABATIC, 1500, 1, 1e-2, {"CO": 2, "O2": 1, "H2O": 0.5}),
    ]
    for tag, fuel, phi in (("h2", "H2", 1.0), ("ch4-stoich", "CH4", 1.0), ("ch4-lean", "CH4", 0.8)):
        for mode, suffix in ((ISOTHERMAL, "isothermal"), (ADIABATIC, "adiabatic")):
            cases.append(CaseDefinition(f"{tag}-{suffix}", mode, 1500, 1, 1e-2, fuel=fuel, phi=phi))
    # at 750 K the mixture takes tens of seconds to ignite
    cases.append(CaseDefinition("engine-stoich", ADIABATIC, 750, 25, 100.0, fuel="CH4", phi=1.0))
    cases.append(CaseDefinition("engine-lean", ADIABATIC, 750, 25, 100.0, fuel="CH4", phi=0.8))
    return {c.name: c for c in cases}


CASES = _builtin_cases()

_MODE_ALIASES = {"isothermal": ISOTHERMAL, "adiabatic": ADIABATIC, "adiabatic_isobaric": ADIABATIC}


def case_from_json(path: str | Path) -> CaseDefinition:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read case config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{path}: top level must be an object")
    known = {"name", "mechanism", "thermo", "mode", "T0_K", "P0_atm", "composition", "fuel", "phi",
             "oxidizer", "t_end_s", "rtol", "atol", "samples_per_decade"}
    extra = set(doc) - known
    if extra:
        raise InputError(f"{path}: unknown keys {sorted(extra)}")
    comp = doc.get("composition")
    fuel, phi, oxidizer = doc.get("fuel"), doc.get("phi"), doc.get("oxidizer", "air")
    if isinstance(comp, dict) and "fuel" in comp:
        fuel, phi, oxidizer = comp["fuel"], comp.get("phi"), comp.get("oxidizer", oxidizer)
        comp = None
    mode = _MODE_ALIASES.get(str(doc.get("mode", "")).lower())
    if mode is None:
        raise InputError(f"{path}: mode must be 'isothermal' or 'adiabatic_isobaric'")

    def rel(p):
        if p is None or str(p).lower() == "gri30":
            return None
        p = Path(p)
        return str(p if p.is_absolute() else path.parent / p)

    try:
        return CaseDefinition(
            name=str(doc.get("name", path.stem)),
            mode=mode,
            T0=float(doc["T0_K"]),
            P0_atm=float(doc["P0_atm"]),
            t_end=float(doc["t_end_s"]),
            composition=comp,
            fuel=fuel,
            phi=None if phi is None else float(phi),
            oxidizer=oxidizer,
            mechanism=rel(doc.get("mechanism")),
            thermo=rel(doc.get("thermo")),
            rtol=float(doc.get("rtol", 1e-16)),
            atol=float(doc.get("atol", 1e-21)),
            samples_per_decade=int(doc.get("samples_per_decade", 20)),
        )
    except KeyError as exc:
        raise InputError(f"{path}: missing key {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def resolve_case(arg: str) -> CaseDefinition:
    if arg in CASES:
        return CASES[arg]
    if arg.endswith(".json") or Path(arg).is_file():
        return case_from_json(arg)
    raise InputError(f"unknown case {arg!r}; run 'chemtau cases' for the list")


def load_mechanism(case: CaseDefinition) -> Mechanism:
    if case.mechanism is None:
        return load_gri30()
    try:
        return parse_mechanism_files(case.mechanism, case.thermo)
    except OSError as exc:
        raise InputError(f"cannot read mechanism: {exc}") from exc


# -- CSV ---------------------------------------------------------------------

def _num(x) -> str:
    return NA if x is None or not math.isfinite(x) else f"{x:.9e}"


def _label(x) -> str:
    return NA if x is None else str(x)


def sample_row(sample: Sample, species_idx=()) -> list[str]:
    ts = sample.timescales
    row = [
        _num(sample.t),
        _num(sample.state.T),
        _num(ts.tau_irrts) if ts.valid_irrts else NA,
        NA if ts.irrts_reaction is None else str(ts.irrts_reaction + 1),
        _num(ts.tau_rts) if ts.valid_rts else NA,
        _label(ts.rts_species),
        _num(ts.tau_rpts) if ts.valid_rpts else NA,
        _label(ts.rpts_species),
        _num(ts.tau_iets) if ts.valid_iets else NA,
        _num(ts.tau_proposed_fast) if ts.valid_proposed else NA,
        _label(ts.proposed_fast_species),
        _num(ts.tau_proposed_slow) if ts.valid_proposed else NA,
        _label(ts.proposed_slow_species),
    ]
    row += [_num(float(sample.state.Y[k])) for k in species_idx]
    return row


def _species_columns(m: Mechanism, spec: str | None) -> list[int]:
    if not spec:
        return []
    if spec.lower() == "all":
        return list(range(m.K))
    try:
        return [m.species_index(s.strip()) for s in spec.split(",") if s.strip()]
    except KeyError as exc:
        raise InputError(f"--species: {exc}") from exc


def _summary(case: CaseDefinition, traj, out) -> None:
    last = traj.samples[-1]
    ts = last.timescales

    def fmt(v, ok):
        return f"{v:.3e} s" if ok else "NA"

    print(f"case {case.name}: t = {last.t:.3e} s, T = {last.state.T:.1f} K", file=out)
    print(f"  IRRTS     {fmt(ts.tau_irrts, ts.valid_irrts):>14}  reaction {NA if ts.irrts_reaction is None else ts.irrts_reaction + 1}", file=out)
    print(f"  RTS       {fmt(ts.tau_rts, ts.valid_rts):>14}  {_label(ts.rts_species)}", file=out)
    print(f"  RPTS      {fmt(ts.tau_rpts, ts.valid_rpts):>14}  {_label(ts.rpts_species)}", file=out)
    print(f"  IETS      {fmt(ts.tau_iets, ts.valid_iets):>14}", file=out)
    print(f"  P/C fast  {fmt(ts.tau_proposed_fast, ts.valid_proposed):>14}  {_label(ts.proposed_fast_species)}", file=out)
    print(f"  P/C slow  {fmt(ts.tau_proposed_slow, ts.valid_proposed):>14}  {_label(ts.proposed_slow_species)}", file=out)
    st = traj.stats
    print(f"  {len(traj.samples)} samples, {st.get('steps', 0)} steps, {st.get('jacobians', 0)} Jacobians, "
          f"{st.get('newton', 0)} Newton iterations, rtol used {traj.rtol_used:.0e}", file=out)


def run_case(case: CaseDefinition, out_path: str | Path | None, species: str | None = None,
             summary_stream=None) -> int:
    """Integrate a case and stream its CSV; returns an exit code."""
    m = load_mechanism(case)
    try:
        cfg = case.reactor_config(m)
    except (KeyError, ValueError) as exc:
        raise InputError(f"case {case.name!r}: {exc}") from exc
    idx = _species_columns(m, species)
    header = HEADER + [f"Y_{m.species_names[k]}" for k in idx]
    fh = open(out_path, "w", newline="") if out_path else sys.stdout
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)

        def on_sample(s):
            writer.writerow(sample_row(s, idx))
            fh.flush()

        try:
            traj = integrate(m, cfg, on_sample=on_sample)
        except IntegrationError as exc:
            writer.writerow([FAILED] + [NA] * (len(header) - 1))
            fh.flush()
            print(f"error: integration failed: {exc}", file=sys.stderr)
            return EXIT_INTEGRATION
    finally:
        if out_path:
            fh.close()
    if out_path:
        _summary(case, traj, summary_stream or sys.stdout)
    return EXIT_OK


def list_cases(out=None) -> None:
    out = out or sys.stdout
    print(f"{'name':<24}{'mode':<20}{'T0_K':>7}{'P0_atm':>8}{'phi':>6}  {'t_end_s':>8}  mixture", file=out)
    for c in CASES.values():
        if c.composition is not None:
            mix = " + ".join(f"{v:g} {k}" for k, v in c.composition.items())
            phi = "-"
        else:
            mix = f"{c.fuel}/{c.oxidizer}"
            phi = f"{c.phi:g}"
        print(f"{c.name:<24}{c.mode:<20}{c.T0:>7g}{c.P0_atm:>8g}{phi:>6}  {c.t_end:>8g}  {mix}", file=out)


# -- comparison -------------------------------------------------------------

_RULE = re.compile(r"^\s*(ratio_within|rel_err)\s*\(\s*([A-Za-z0-9_()\-]+?)\s*,\s*([^)\s]+)\s*\)\s*$")


@dataclass(frozen=True)
class Rule:
    kind: str
    column: str
    value: float

    def __str__(self):
        return f"{self.kind}({self.column}, {self.value:g})"

    def check(self, a: str, b: str) -> bool:
        if a == NA or b == NA:
            return a == b
        try:
            x, y = float(a), float(b)
        except ValueError:
            return a == b
        if self.kind == "rel_err":
            return abs(x - y) <= self.value * max(abs(x), abs(y))
        if x == y:
            return True
        if x <= 0 or y <= 0:
            return False
        return max(x / y, y / x) <= self.value


def parse_rules(doc) -> list[Rule]:
    items = doc.get("rules", []) if isinstance(doc, dict) else doc
    if not isinstance(items, list) or not items:
        raise InputError("rules file must hold a non-empty list of rules")
    rules = []
    for item in items:
        mt = _RULE.match(str(item))
        if not mt:
            raise InputError(f"bad rule {item!r}; expected ratio_within(col, f) or rel_err(col, eps)")
        value = float(mt.group(3))
        if mt.group(1) == "ratio_within" and value < 1:
            raise InputError(f"{item}: factor must be >= 1")
        if value < 0:
            raise InputError(f"{item}: tolerance must be >= 0")
        rules.append(Rule(mt.group(1), mt.group(2), value))
    return rules


def _read_csv(path) -> tuple[list[str], list[list[str]]]:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise InputError(f"{path} is empty")
    header, body = rows[0], rows[1:]
    if header[: len(HEADER)] != HEADER:
        raise InputError(f"{path}: header does not match the timescale CSV schema")
    good = [r for r in body if r and r[0] != FAILED]
    if len(good) < len(body):
        log.warning("%s: skipping %d FAILED row(s)", path, len(body) - len(good))
    return header, good


def compare_csv(path_a, path_b, rules: list[Rule], time_rtol: float = 1e-9, out=None) -> int:
    out = out or sys.stdout
    ha, ra = _read_csv(path_a)
    hb, rb = _read_csv(path_b)
    for rule in rules:
        if rule.column not in ha or rule.column not in hb:
            raise InputError(f"column {rule.column!r} missing from one of the files")
    ca = {c: i for i, c in enumerate(ha)}
    cb = {c: i for i, c in enumerate(hb)}
    # time-aligned intersection
    tb = [(float(r[0]), r) for r in rb]
    pairs = []
    j = 0
    for r in ra:
        t = float(r[0])
        while j < len(tb) and tb[j][0] < t * (1 - time_rtol) - 1e-300:
            j += 1
        if j < len(tb) and abs(tb[j][0] - t) <= time_rtol * max(abs(t), abs(tb[j][0])):
            pairs.append((r, tb[j][1]))
            j += 1
    if not pairs:
        raise InputError("the two files share no sample times")
    failed = 0
    for rule in rules:
        bad = [(a[0], a[ca[rule.column]], b[cb[rule.column]]) for a, b in pairs
               if not rule.check(a[ca[rule.column]], b[cb[rule.column]])]
        status = "PASS" if not bad else "FAIL"
        print(f"{status} {rule} on {len(pairs)} aligned rows" + (f", {len(bad)} violations" if bad else ""),
              file=out)
        for t, x, y in bad[:5]:
            print(f"    t={t}: {x} vs {y}", file=out)
        failed += bool(bad)
    return EXIT_COMPARE if failed else EXIT_OK


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chemtau", description="Chemical timescales of 0-D reactors")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="integrate a built-in case or a JSON case config")
    r.add_argument("case", help="built-in case name or path to a .json config")
    r.add_argument("--out", help="CSV output path (default: stdout)")
    r.add_argument("--atol", type=float, help="override the absolute tolerance")
    r.add_argument("--rtol", type=float, help="override the relative tolerance")
    mode = r.add_mutually_exclusive_group()
    mode.add_argument("--isothermal", action="store_true")
    mode.add_argument("--adiabatic", action="store_true")
    r.add_argument("--t-end", type=float, help="override the final time [s]")
    r.add_argument("--samples-per-decade", type=int)
    r.add_argument("--species", help="comma-separated species (or 'all') for extra Y_<name> columns")

    sub.add_parser("cases", help="list the built-in cases")

    c = sub.add_parser("compare", help="compare two timescale CSVs under tolerance rules")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--rules", required=True, help="JSON file with a list of rule strings")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "cases":
            list_cases()
            return EXIT_OK
        if args.command == "compare":
            try:
                rules = parse_rules(json.loads(Path(args.rules).read_text()))
            except (OSError, json.JSONDecodeError) as exc:
                raise InputError(f"cannot read rules: {exc}") from exc
            return compare_csv(args.a, args.b, rules)
        case = resolve_case(args.case)
        over = {}
        if args.atol is not None:
            over["atol"] = args.atol
        if args.rtol is not None:
            over["rtol"] = args.rtol
        if args.isothermal:
            over["mode"] = ISOTHERMAL
        if args.adiabatic:
            over["mode"] = ADIABATIC
        if args.t_end is not None:
            over["t_end"] = args.t_end
        if args.samples_per_decade is not None:
            over["samples_per_decade"] = args.samples_per_decade
        case = replace(case, **over)
        return run_case(case, args.out, args.species)
    except (InputError, MechanismError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
