"""Line-oriented text format for matrix models and roster instances.

A model file looks like:

    MATRIX 3 4 3
    VALUES -1 0 1
    NAME example
    DOMAIN 0 2 0 1         # cell (0,2) restricted to external values {0, 1}
    COL_GCC 1 0 0 2        # column 1: value 0 occurs 0..2 times
    COL_SUM 3 -1 3         # column 3: cell sum between -1 and 3
    LEX 1                  # order the rows lexicographically
    COUNTGROUP 0 1         # rule resource 0 counts occurrences of value 1
    PROPERTY word 2 2      # property specs; sets are comma-joined values
    PROPERTY stretchcount 1,2
    PROPERTY stretchlen 2
    ROW_DFA
    wdfa 2 0
    alphabet 0 1 2
    ...
    END

A roster file instead starts with ROSTER and compiles through the rostering
front end:

    ROSTER 5 7 3           # nurses, days, shifts (shift 3 = off duty)
    NAME week1
    COVER 2 1 0            # one line per day: per-shift coverage lower bounds
    ...
    WORK 3 5 1 4           # occurrence interval, stretch-length interval
    SHIFT 1 0 4 1 3        # same per shift; '-' means unbounded
    SHIFT 2 0 3 1 2
    SHIFT 3 2 4 1 3

Blank lines and '#' comments are ignored.  DOMAIN/COL_GCC/COL_SUM/COUNTGROUP/
PROPERTY use external values; the ROW_DFA block (the dump_automaton format)
runs over the internal indices 0..V-1 of the ascending VALUES table.  Files
without PROPERTY lines get the default property set in wa/cwa modes.
"""

from __future__ import annotations

from .automata import dump_automaton, parse_automaton
from .model import (
    MatrixModel,
    StretchCountProp,
    StretchLengthProp,
    WordProp,
)


class FormatError(ValueError):
    """Malformed model text."""


def dump_model(model):
    lines = [f"MATRIX {model.n_rows} {model.n_cols} {model.n_values}"]
    lines.append("VALUES " + " ".join(str(v) for v in model.values))
    if model.name:
        lines.append(f"NAME {model.name}")
    full = frozenset(range(model.n_values))
    if model.cell_domains is not None:
        for i in range(model.n_rows):
            for k in range(model.n_cols):
                dm = model.cell_domains[i][k]
                if dm != full:
                    ext = " ".join(str(model.values[v]) for v in sorted(dm))
                    lines.append(f"DOMAIN {i} {k} {ext}")
    for k in range(model.n_cols):
        for v in sorted(model.col_gcc[k]):
            lo, hi = model.col_gcc[k][v]
            lines.append(f"COL_GCC {k} {model.values[v]} {lo} {hi}")
    for k in range(model.n_cols):
        if model.col_sums[k] is not None:
            lo, hi = model.col_sums[k]
            lines.append(f"COL_SUM {k} {lo} {hi}")
    if model.lex_rows:
        lines.append("LEX 1")
    for group, r in model.rule_count_groups:
        ext = " ".join(str(model.values[v]) for v in sorted(group))
        lines.append(f"COUNTGROUP {r} {ext}")
    for prop in model.properties or []:
        if isinstance(prop, WordProp):
            sets = [
                ",".join(str(model.values[v]) for v in sorted(p))
                for p in prop.pattern
            ]
            lines.append("PROPERTY word " + " ".join(sets))
        elif isinstance(prop, StretchCountProp):
            s = ",".join(str(model.values[v]) for v in sorted(prop.vhat))
            lines.append(f"PROPERTY stretchcount {s}")
        elif isinstance(prop, StretchLengthProp):
            s = ",".join(str(model.values[v]) for v in sorted(prop.vhat))
            lines.append(f"PROPERTY stretchlen {s}")
    lines.append("ROW_DFA")
    lines.append(dump_automaton(model.row_rule).rstrip("\n"))
    lines.append("END")
    return "\n".join(lines) + "\n"


def dump_roster(inst, rules):
    def tok(x):
        return "-" if x is None else str(x)

    lines = [f"ROSTER {inst.n_nurses} {inst.n_days} {inst.n_shifts}"]
    if inst.name:
        lines.append(f"NAME {inst.name}")
    for day in inst.cover:
        lines.append("COVER " + " ".join(str(x) for x in day))
    w = rules.work
    lines.append(f"WORK {w.occ_lo} {w.occ_hi} {w.stretch_lo} {tok(w.stretch_hi)}")
    for s, r in enumerate(rules.shifts, start=1):
        lines.append(
            f"SHIFT {s} {r.occ_lo} {r.occ_hi} {r.stretch_lo} {tok(r.stretch_hi)}"
        )
    return "\n".join(lines) + "\n"


def _clean_lines(text):
    out = []
    for no, raw in enumerate(text.splitlines(), start=1):
        ln = raw.split("#", 1)[0].strip()
        if ln:
            out.append((no, ln))
    return out


def _parse_roster(lines):
    from .roster import CaseRules, NspInstance, ShiftRule, roster_model

    def num(tok):
        return None if tok == "-" else int(tok)

    header = None
    name = ""
    cover = []
    work = None
    shifts = {}
    for no, ln in lines:
        parts = ln.split()
        tag = parts[0]
        try:
            if tag == "ROSTER":
                header = (int(parts[1]), int(parts[2]), int(parts[3]))
            elif tag == "NAME":
                name = " ".join(parts[1:])
            elif tag == "COVER":
                cover.append([int(x) for x in parts[1:]])
            elif tag == "WORK":
                work = ShiftRule(
                    int(parts[1]), int(parts[2]), int(parts[3]), num(parts[4])
                )
            elif tag == "SHIFT":
                shifts[int(parts[1])] = ShiftRule(
                    int(parts[2]), int(parts[3]), int(parts[4]), num(parts[5])
                )
            else:
                raise FormatError(f"line {no}: unknown roster line: {ln}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"line {no}: {exc}") from exc
    n, d, s = header
    if len(cover) != d:
        raise FormatError(f"expected {d} COVER lines, found {len(cover)}")
    if any(len(day) != s for day in cover):
        raise FormatError("every COVER line needs one bound per shift")
    rules = CaseRules(shifts=[ShiftRule() for _ in range(s)])
    if work is not None:
        rules.work = work
    for idx, rule in shifts.items():
        if not 1 <= idx <= s:
            raise FormatError(f"SHIFT {idx} out of range 1..{s}")
        rules.shifts[idx - 1] = rule
    inst = NspInstance(n, d, s, cover, name=name)
    return roster_model(inst, rules)


def parse_model(text):
    """Parse canonical text; roster files are compiled to their matrix model."""
    lines = _clean_lines(text)
    if not lines:
        raise FormatError("empty model text")
    if lines[0][1].split()[0] == "ROSTER":
        return _parse_roster(lines)
    header = None
    values = None
    name = ""
    doms = {}
    gcc = {}
    sums = {}
    lex = False
    groups = []
    props = []
    rule = None
    i = 0
    while i < len(lines):
        no, ln = lines[i]
        parts = ln.split()
        tag = parts[0]
        try:
            if tag == "MATRIX":
                header = (int(parts[1]), int(parts[2]), int(parts[3]))
            elif tag == "VALUES":
                values = tuple(int(x) for x in parts[1:])
            elif tag == "NAME":
                name = " ".join(parts[1:])
            elif tag == "DOMAIN":
                r, k = int(parts[1]), int(parts[2])
                doms[(r, k)] = [int(x) for x in parts[3:]]
            elif tag == "COL_GCC":
                k, v = int(parts[1]), int(parts[2])
                gcc.setdefault(k, {})[v] = (int(parts[3]), int(parts[4]))
            elif tag == "COL_SUM":
                sums[int(parts[1])] = (int(parts[2]), int(parts[3]))
            elif tag == "LEX":
                lex = bool(int(parts[1]))
            elif tag == "COUNTGROUP":
                groups.append((int(parts[1]), [int(x) for x in parts[2:]]))
            elif tag == "PROPERTY":
                props.append((no, parts[1], parts[2:]))
            elif tag == "ROW_DFA":
                j = i + 1
                block = []
                while j < len(lines) and lines[j][1] != "END":
                    block.append(lines[j][1])
                    j += 1
                if j == len(lines):
                    raise FormatError(f"line {no}: ROW_DFA block missing END")
                rule = parse_automaton(block)
                i = j
            else:
                raise FormatError(f"line {no}: unknown line: {ln}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"line {no}: {exc}") from exc
        i += 1
    if header is None or values is None or rule is None:
        raise FormatError("model needs MATRIX, VALUES and ROW_DFA sections")
    R, K, V = header
    if V != len(values):
        raise FormatError("MATRIX value count disagrees with the VALUES table")
    idx = {v: j for j, v in enumerate(values)}

    def to_idx(ext):
        if ext not in idx:
            raise FormatError(f"value {ext} not in the VALUES table")
        return idx[ext]

    cell_domains = None
    if doms:
        cell_domains = [
            [frozenset(range(len(values))) for _ in range(K)] for _ in range(R)
        ]
        for (r, k), ext in doms.items():
            cell_domains[r][k] = frozenset(to_idx(e) for e in ext)
    col_gcc = [
        {to_idx(v): b for v, b in gcc.get(k, {}).items()} for k in range(K)
    ]
    col_sums = [sums.get(k) for k in range(K)]
    rule_count_groups = [
        (frozenset(to_idx(e) for e in ext), r) for r, ext in groups
    ]

    def parse_set(tok):
        return frozenset(to_idx(int(x)) for x in tok.split(","))

    properties = None
    if props:
        properties = []
        for no, kind, args in props:
            if kind == "word":
                properties.append(WordProp(tuple(parse_set(a) for a in args)))
            elif kind == "stretchcount":
                properties.append(StretchCountProp(parse_set(args[0])))
            elif kind == "stretchlen":
                properties.append(StretchLengthProp(parse_set(args[0])))
            else:
                raise FormatError(f"line {no}: unknown property kind {kind!r}")
    return MatrixModel(
        R, K, values, rule,
        col_gcc=col_gcc,
        col_sums=col_sums,
        cell_domains=cell_domains,
        properties=properties,
        rule_count_groups=rule_count_groups,
        lex_rows=lex,
        name=name,
    )
