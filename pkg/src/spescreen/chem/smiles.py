"""SMILES parsing, aromaticity perception, and canonical output.

Supported grammar: the organic subset (B C N O P S F Cl Br I and the
aromatic forms b c n o p s), bracket atoms with isotope/charge/H-count,
bond symbols - = # :, branches, ring closures including %nn, and the dot
disconnect. Stereo markers (/ \\ @ @@) are consumed and recorded on the
graph but carry no geometric meaning here.
"""

from __future__ import annotations

import networkx as nx

from .graph import (
    AROMATIC,
    AROMATIC_ELEMENTS,
    Atom,
    Bond,
    DEFAULT_VALENCES,
    MolecularGraph,
    ORGANIC_SUBSET,
    assign_implicit_hydrogens,
    bond_order_sum,
)


class SmilesParseError(ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} (at character {position})")
        self.position = position


_ORGANIC_TWO = ("Cl", "Br")
_ORGANIC_ONE = set("BCNOPSFI")
_AROMATIC_ONE = set("bcnops")
_BOND_CHARS = {"-": 1, "=": 2, "#": 3, ":": AROMATIC, "/": 1, "\\": 1}

_ELEMENT_SYMBOLS = set(DEFAULT_VALENCES) | {
    "H", "He", "Li", "Be", "Ne", "Na", "Mg", "Al", "Si", "Ar", "K", "Ca",
    "Ti", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn",
}


def _parse_bracket(text, start):
    """Parse a bracket atom starting at text[start] == '['. Returns (Atom, end)."""
    pos = start + 1
    end = text.find("]", pos)
    if end < 0:
        raise SmilesParseError("unterminated bracket atom", start)
    body = text[pos:end]
    i = 0
    isotope = None
    while i < len(body) and body[i].isdigit():
        i += 1
    if i > 0:
        isotope = int(body[:i])
    # element symbol (aromatic lowercase allowed for single letters)
    aromatic = False
    if i < len(body) and body[i : i + 2] in _ELEMENT_SYMBOLS:
        element = body[i : i + 2]
        i += 2
    elif i < len(body) and body[i].upper() in _ELEMENT_SYMBOLS and body[i].islower():
        element = body[i].upper()
        aromatic = True
        i += 1
    elif i < len(body) and body[i] in _ELEMENT_SYMBOLS:
        element = body[i]
        i += 1
    else:
        raise SmilesParseError(f"unknown element token in bracket '{body}'", start)
    # chirality markers: consumed, not interpreted
    stereo = None
    while i < len(body) and body[i] == "@":
        stereo = (stereo or "") + "@"
        i += 1
    h_count = 0
    if i < len(body) and body[i] == "H":
        i += 1
        j = i
        while j < len(body) and body[j].isdigit():
            j += 1
        h_count = int(body[i:j]) if j > i else 1
        i = j
    charge = 0
    while i < len(body) and body[i] in "+-":
        sign = 1 if body[i] == "+" else -1
        i += 1
        j = i
        while j < len(body) and body[j].isdigit():
            j += 1
        if j > i:
            charge += sign * int(body[i:j])
            i = j
        else:
            charge += sign
    if i < len(body) and body[i] == ":":
        # atom class: consumed and discarded
        i = len(body)
    if i != len(body):
        raise SmilesParseError(f"unrecognized bracket content '{body[i:]}'", start + 1 + i)
    atom = Atom(element=element, charge=charge, h_count=h_count,
                aromatic=aromatic, isotope=isotope, bracket=True)
    return atom, stereo, end + 1


def parse_smiles(text: str) -> MolecularGraph:
    """Parse a SMILES string into a MolecularGraph.

    Implicit hydrogens are completed by standard organic-subset valence
    rules and kekulized aromatic rings are perceived via a Hueckel 4n+2
    test, so 'c1ccccc1' and 'C1=CC=CC=C1' yield the same graph.
    """
    if not text or not text.strip():
        raise SmilesParseError("empty SMILES", 0)
    text = text.strip()
    graph = MolecularGraph(source=text)
    positions = {}
    stereo_markers = []
    prev = None          # previous atom index
    pending_bond = None  # explicit bond symbol awaiting use
    stack = []
    ring_open = {}       # closure number -> (atom index, bond symbol, char pos)
    pos = 0
    n = len(text)

    def add_atom(atom):
        graph.atoms.append(atom)
        idx = len(graph.atoms) - 1
        positions[idx] = pos
        return idx

    def connect(a, b, symbol, at):
        nonlocal pending_bond
        if symbol is None:
            ai, bi = graph.atoms[a], graph.atoms[b]
            order = AROMATIC if (ai.aromatic and bi.aromatic) else 1
        else:
            order = symbol
        for existing in graph.bonds:
            if existing.key() == (min(a, b), max(a, b)):
                raise SmilesParseError("duplicate bond", at)
        graph.bonds.append(Bond(a, b, order))

    while pos < n:
        ch = text[pos]
        if ch in _BOND_CHARS:
            if pending_bond is not None:
                raise SmilesParseError("two bond symbols in a row", pos)
            if ch in ("/", "\\"):
                stereo_markers.append((pos, ch))
            pending_bond = _BOND_CHARS[ch]
            pos += 1
            continue
        if ch == "(":
            if prev is None:
                raise SmilesParseError("branch with no preceding atom", pos)
            stack.append(prev)
            pos += 1
            continue
        if ch == ")":
            if not stack:
                raise SmilesParseError("unbalanced parentheses", pos)
            prev = stack.pop()
            pos += 1
            continue
        if ch == ".":
            if pending_bond is not None:
                raise SmilesParseError("bond symbol before dot disconnect", pos)
            prev = None
            pos += 1
            continue
        if ch.isdigit() or ch == "%":
            if prev is None:
                raise SmilesParseError("ring closure with no preceding atom", pos)
            if ch == "%":
                if pos + 2 >= n or not text[pos + 1 : pos + 3].isdigit():
                    raise SmilesParseError("malformed %nn ring closure", pos)
                num = int(text[pos + 1 : pos + 3])
                width = 3
            else:
                num = int(ch)
                width = 1
            if num in ring_open:
                other, sym, _ = ring_open.pop(num)
                if other == prev:
                    raise SmilesParseError("ring closure forms self-loop", pos)
                if sym is not None and pending_bond is not None and sym != pending_bond:
                    raise SmilesParseError("conflicting ring-closure bond orders", pos)
                connect(prev, other, sym if sym is not None else pending_bond, pos)
            else:
                ring_open[num] = (prev, pending_bond, pos)
            pending_bond = None
            pos += width
            continue
        if ch == "[":
            atom, stereo, newpos = _parse_bracket(text, pos)
            if stereo:
                stereo_markers.append((pos, stereo))
            idx = add_atom(atom)
            if prev is not None:
                connect(prev, idx, pending_bond, pos)
            pending_bond = None
            prev = idx
            pos = newpos
            continue
        # organic-subset atom
        if text[pos : pos + 2] in _ORGANIC_TWO:
            atom = Atom(element=text[pos : pos + 2])
            width = 2
        elif ch in _ORGANIC_ONE:
            atom = Atom(element=ch)
            width = 1
        elif ch in _AROMATIC_ONE:
            atom = Atom(element=ch.upper(), aromatic=True)
            width = 1
        else:
            raise SmilesParseError(f"unknown element token '{ch}'", pos)
        idx = add_atom(atom)
        if prev is not None:
            connect(prev, idx, pending_bond, pos)
        pending_bond = None
        prev = idx
        pos += width

    if stack:
        raise SmilesParseError("unbalanced parentheses", n)
    if ring_open:
        num, (_, _, at) = next(iter(ring_open.items()))
        raise SmilesParseError(f"unmatched ring closure digit {num}", at)
    if pending_bond is not None:
        raise SmilesParseError("dangling bond symbol", n)

    graph.stereo_markers = stereo_markers
    assign_implicit_hydrogens(graph, positions)
    perceive_aromaticity(graph)
    assign_implicit_hydrogens(graph, positions)
    graph.validate()
    return graph


def _pi_contribution(graph, idx):
    """Electrons an atom donates to a candidate aromatic ring, or None."""
    atom = graph.atoms[idx]
    if atom.element not in AROMATIC_ELEMENTS:
        return None
    nbrs = graph.neighbors(idx)
    if len(nbrs) > 3:
        return None
    if atom.aromatic:
        return 2 if atom.element in ("O", "S") and not any(
            b.order == 2 for _, b in nbrs) else 1
    has_double = any(b.order == 2 for _, b in nbrs)
    if atom.element == "C":
        if has_double:
            return 1
        if atom.charge == -1:
            return 2
        if atom.charge == 1:
            return 0
        return None
    if atom.element in ("N", "P"):
        if has_double:
            return 1
        if atom.h_count > 0 or len(nbrs) == 3:
            return 2
        return None
    if atom.element in ("O", "S"):
        return None if has_double else 2
    if atom.element == "B":
        return 0
    return None


def perceive_aromaticity(graph: MolecularGraph):
    """Mark Hueckel 4n+2 simple rings aromatic (atoms and in-ring bonds).

    Works on the minimum cycle basis; chorded 'rings' are skipped. This is
    deliberately simple-ring perception, enough to unify kekulized and
    aromatic spellings of fused polycyclic systems.
    """
    g = graph.to_networkx()
    try:
        basis = nx.minimum_cycle_basis(g)
    except Exception:
        basis = []
    rings = []
    for nodes in basis:
        nodeset = set(nodes)
        if not 3 <= len(nodeset) <= 8:
            continue
        induced = [b for b in graph.bonds if b.i in nodeset and b.j in nodeset]
        if len(induced) != len(nodeset):
            continue  # chorded
        rings.append((nodeset, induced))

    changed = True
    while changed:
        changed = False
        for nodeset, induced in rings:
            if all(graph.atoms[i].aromatic for i in nodeset):
                continue
            pis = [_pi_contribution(graph, i) for i in nodeset]
            if any(p is None for p in pis):
                continue
            if sum(pis) % 4 != 2:
                continue
            for i in nodeset:
                graph.atoms[i].aromatic = True
            for b in induced:
                b.order = AROMATIC
            changed = True
    # bonds written ':' or defaulted to aromatic between already-aromatic
    # bracket atoms may sit outside a perceived ring; keep validate() happy
    for b in graph.bonds:
        if b.order == AROMATIC:
            graph.atoms[b.i].aromatic = True
            graph.atoms[b.j].aromatic = True
    return graph


# --- canonical output ------------------------------------------------------

_BOND_RANK = {1: 1, 2: 2, 3: 3, AROMATIC: 4}


def _dense_rank(keys):
    order = {k: r for r, k in enumerate(sorted(set(keys)))}
    return [order[k] for k in keys]


def _wl_refine(graph, ranks):
    nbrs = [graph.neighbors(i) for i in range(len(graph))]
    while True:
        keys = []
        for i in range(len(graph)):
            env = sorted((_BOND_RANK[b.order], ranks[j]) for j, b in nbrs[i])
            keys.append((ranks[i], tuple(env)))
        new = _dense_rank(keys)
        if len(set(new)) == len(set(ranks)):
            return new
        ranks = new


def _initial_ranks(graph):
    keys = []
    for i, a in enumerate(graph.atoms):
        keys.append((a.element, graph.degree(i), a.h_count, a.charge,
                     a.aromatic, a.isotope or 0))
    return _dense_rank(keys)


def _discrete_rankings(graph, ranks, budget):
    """Yield total orderings via individualization-refinement (bounded)."""
    stack = [ranks]
    while stack and budget[0] > 0:
        ranks = stack.pop()
        cells = {}
        for i, r in enumerate(ranks):
            cells.setdefault(r, []).append(i)
        tied = [c for c in sorted(cells) if len(cells[c]) > 1]
        if not tied:
            budget[0] -= 1
            yield ranks
            continue
        cell = cells[tied[0]]
        for a in cell:
            keys = [(r, 0 if i == a else 1) for i, r in enumerate(ranks)]
            stack.append(_wl_refine(graph, _dense_rank(keys)))


def _implicit_h_if_bare(graph, idx):
    """H count a reparse would assign to a bare (non-bracket) atom token."""
    atom = graph.atoms[idx]
    valences = DEFAULT_VALENCES.get(atom.element)
    if valences is None:
        return None
    used = bond_order_sum(graph, idx)
    for v in valences:
        if used <= v:
            return int(round(v - used))
    return None


def _atom_token(graph, idx):
    atom = graph.atoms[idx]
    sym = atom.element.lower() if atom.aromatic else atom.element
    needs_bracket = (
        atom.isotope is not None
        or atom.charge != 0
        or atom.element not in ORGANIC_SUBSET
        or (atom.aromatic and atom.element not in AROMATIC_ELEMENTS)
        or _implicit_h_if_bare(graph, idx) != atom.h_count
    )
    if not needs_bracket:
        return sym
    parts = ["["]
    if atom.isotope is not None:
        parts.append(str(atom.isotope))
    parts.append(sym)
    if atom.h_count == 1:
        parts.append("H")
    elif atom.h_count > 1:
        parts.append(f"H{atom.h_count}")
    if atom.charge:
        sign = "+" if atom.charge > 0 else "-"
        mag = abs(atom.charge)
        parts.append(sign if mag == 1 else f"{sign}{mag}")
    parts.append("]")
    return "".join(parts)


def _bond_token(graph, bond):
    if bond.order == 2:
        return "="
    if bond.order == 3:
        return "#"
    if bond.order == AROMATIC:
        return ""
    if graph.atoms[bond.i].aromatic and graph.atoms[bond.j].aromatic:
        return "-"  # single bond between aromatic atoms must be explicit
    return ""


def _component_string(graph, ranks, atoms_in_comp):
    start = min(atoms_in_comp, key=lambda i: ranks[i])

    # pass 1: build the DFS spanning tree and classify ring-closure bonds
    visited = set()
    children = {i: [] for i in atoms_in_comp}
    closure_bonds = {i: [] for i in atoms_in_comp}
    seen_keys = set()

    def dfs(i):
        visited.add(i)
        for j, b in sorted(graph.neighbors(i), key=lambda nb: ranks[nb[0]]):
            key = b.key()
            if key in seen_keys:
                continue
            seen_keys.add(key)
            if j in visited:
                closure_bonds[i].append(b)
                closure_bonds[j].append(b)
            else:
                children[i].append((j, b))
                dfs(j)

    dfs(start)

    # pass 2: emit atoms in tree order with closure digits
    out = []
    open_numbers = {}
    free_numbers = list(range(99, 0, -1))

    def digit_str(num):
        return str(num) if num < 10 else f"%{num:02d}"

    def emit(i):
        out.append(_atom_token(graph, i))
        for b in sorted(closure_bonds[i],
                        key=lambda b: ranks[b.j if b.i == i else b.i]):
            key = b.key()
            if key in open_numbers:
                num = open_numbers.pop(key)
                free_numbers.append(num)
                free_numbers.sort(reverse=True)
                out.append(digit_str(num))
            else:
                num = free_numbers.pop()
                open_numbers[key] = num
                out.append(_bond_token(graph, b) + digit_str(num))
        for k, (j, b) in enumerate(children[i]):
            last = k == len(children[i]) - 1
            if not last:
                out.append("(")
            out.append(_bond_token(graph, b))
            emit(j)
            if not last:
                out.append(")")

    emit(start)
    return "".join(out)


def write_smiles(graph: MolecularGraph, ranks=None) -> str:
    """Serialize a molecular graph to SMILES using the given atom ranks."""
    if ranks is None:
        ranks = list(range(len(graph)))
    g = graph.to_networkx()
    comps = [sorted(c) for c in nx.connected_components(g)]
    parts = sorted(_component_string(graph, ranks, c) for c in comps)
    return ".".join(parts)


def canonicalize(graph: MolecularGraph, max_leaves: int = 200) -> str:
    """Return a canonical SMILES string, invariant under atom relabeling.

    Uses Weisfeiler-Lehman refinement with individualization; among the
    explored discrete orderings the lexicographically smallest serialization
    is returned. `max_leaves` bounds the symmetry search.
    """
    if len(graph) == 0:
        raise ValueError("cannot canonicalize an empty graph")
    ranks0 = _wl_refine(graph, _initial_ranks(graph))
    budget = [max_leaves]
    best = None
    for ranks in _discrete_rankings(graph, ranks0, budget):
        s = write_smiles(graph, ranks)
        if best is None or s < best:
            best = s
    return best


def canonical_smiles(text: str) -> str:
    return canonicalize(parse_smiles(text))
