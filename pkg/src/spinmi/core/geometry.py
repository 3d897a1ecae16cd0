"""Square-lattice geometry: sites, bonds, bipartitions and boundary configs.

Sites are indexed row-major: site = r * cols + c.  Boundary site lists are
ordered top-to-bottom (and, for nested rings, clockwise from the top-left
corner); this fixes the bit layout of serialized boundary configurations.
"""

from __future__ import annotations

from dataclasses import dataclass, field


def site_index(r: int, c: int, cols: int) -> int:
    return r * cols + c


def lattice_bonds(rows: int, cols: int, vertical_bc: str = "open") -> list[tuple[int, int]]:
    """All nearest-neighbour bonds of the grid as (site_i, site_j), i < j ordering
    along the lattice (horizontal bonds first run, then verticals)."""
    bonds = []
    for r in range(rows):
        for c in range(cols - 1):
            bonds.append((site_index(r, c, cols), site_index(r, c + 1, cols)))
    for c in range(cols):
        for r in range(rows - 1):
            bonds.append((site_index(r, c, cols), site_index(r + 1, c, cols)))
        if vertical_bc == "periodic" and rows > 2:
            bonds.append((site_index(rows - 1, c, cols), site_index(0, c, cols)))
    return bonds


@dataclass(frozen=True)
class Bipartition:
    """A cut of the lattice into parts A and B.

    border_A / border_B are the ordered site lists that share a bond with
    the other part; interior_A / interior_B hold the remaining sites.
    """

    geometry: str
    rows: int
    cols: int
    vertical_bc: str
    border_A: tuple[int, ...]
    border_B: tuple[int, ...]
    interior_A: frozenset[int]
    interior_B: frozenset[int]

    @property
    def sites_A(self) -> tuple[int, ...]:
        return tuple(sorted(self.interior_A)) + self.border_A

    @property
    def sites_B(self) -> tuple[int, ...]:
        return tuple(sorted(self.interior_B)) + self.border_B

    def validate(self) -> None:
        """Check the four site sets partition the lattice and that the borders
        are exactly the sites bonded to the other part."""
        n = self.rows * self.cols
        all_sets = [set(self.border_A), set(self.border_B), set(self.interior_A), set(self.interior_B)]
        union = set().union(*all_sets)
        if len(union) != n or sum(len(s) for s in all_sets) != n:
            raise ValueError("bipartition site sets do not partition the lattice")
        in_a = set(self.border_A) | set(self.interior_A)
        in_b = set(self.border_B) | set(self.interior_B)
        touching_a = set()
        touching_b = set()
        for i, j in lattice_bonds(self.rows, self.cols, self.vertical_bc):
            if i in in_a and j in in_b or i in in_b and j in in_a:
                touching_a.add(i if i in in_a else j)
                touching_b.add(j if j in in_b else i)
        if touching_a != set(self.border_A) or touching_b != set(self.border_B):
            raise ValueError("border sites are not exactly the sites sharing a bond with the other part")


def half_cut(rows: int, cols: int, vertical_bc: str = "open", cut_col: int | None = None) -> Bipartition:
    """Vertical cut between columns cut_col and cut_col+1 (default: middle)."""
    if cut_col is None:
        cut_col = cols // 2 - 1
    if not 0 <= cut_col < cols - 1:
        raise ValueError("cut_col out of range")
    border_a = tuple(site_index(r, cut_col, cols) for r in range(rows))
    border_b = tuple(site_index(r, cut_col + 1, cols) for r in range(rows))
    int_a = frozenset(site_index(r, c, cols) for r in range(rows) for c in range(cut_col))
    int_b = frozenset(site_index(r, c, cols) for r in range(rows) for c in range(cut_col + 2, cols))
    part = Bipartition("half_cut", rows, cols, vertical_bc, border_a, border_b, int_a, int_b)
    part.validate()
    return part


def rectangle_ring(r0: int, c0: int, r1: int, c1: int, cols: int) -> tuple[int, ...]:
    """Perimeter sites of the rectangle [r0..r1] x [c0..c1], clockwise from (r0,c0)."""
    ring = []
    for c in range(c0, c1 + 1):
        ring.append(site_index(r0, c, cols))
    for r in range(r0 + 1, r1 + 1):
        ring.append(site_index(r, c1, cols))
    if r1 > r0:
        for c in range(c1 - 1, c0 - 1, -1):
            ring.append(site_index(r1, c, cols))
    if c1 > c0:
        for r in range(r1 - 1, r0, -1):
            ring.append(site_index(r, c0, cols))
    return tuple(ring)


def nested_cut(rows: int, cols: int, inner_r0: int, inner_c0: int,
               inner_rows: int, inner_cols: int) -> Bipartition:
    """Part A is the inner rectangle, fully embedded in the open-boundary grid B."""
    r1 = inner_r0 + inner_rows - 1
    c1 = inner_c0 + inner_cols - 1
    if inner_r0 < 1 or inner_c0 < 1 or r1 > rows - 2 or c1 > cols - 2:
        raise ValueError("inner region must be strictly inside the outer grid")
    border_a = rectangle_ring(inner_r0, inner_c0, r1, c1, cols)
    inner_all = {site_index(r, c, cols)
                 for r in range(inner_r0, r1 + 1) for c in range(inner_c0, c1 + 1)}
    int_a = frozenset(inner_all - set(border_a))
    # B border: outer sites adjacent to the inner rectangle
    outer_ring = rectangle_ring(inner_r0 - 1, inner_c0 - 1, r1 + 1, c1 + 1, cols)
    corner_sites = {site_index(r, c, cols)
                    for r in (inner_r0 - 1, r1 + 1) for c in (inner_c0 - 1, c1 + 1)}
    border_b = tuple(s for s in outer_ring if s not in corner_sites)
    all_sites = set(range(rows * cols))
    int_b = frozenset(all_sites - inner_all - set(border_b))
    part = Bipartition("nested", rows, cols, "open", border_a, border_b, int_a, int_b)
    part.validate()
    return part


@dataclass(frozen=True)
class BoundaryConfig:
    """Spin states on the two borders of a bipartition (the MC state)."""

    alpha: tuple[int, ...]
    beta: tuple[int, ...]

    def validate(self, q: int) -> None:
        for s in self.alpha + self.beta:
            if not 0 <= s < q:
                raise ValueError(f"boundary state {s} out of range [0,{q})")

    def serialize(self) -> str:
        """Base-q digit string, alpha then beta, '|'-separated."""
        return "".join(str(s) for s in self.alpha) + "|" + "".join(str(s) for s in self.beta)

    @classmethod
    def deserialize(cls, line: str) -> "BoundaryConfig":
        a, _, b = line.strip().partition("|")
        return cls(tuple(int(ch) for ch in a), tuple(int(ch) for ch in b))


def write_boundary_configs(path, configs) -> None:
    with open(path, "w") as fh:
        for cfg in configs:
            fh.write(cfg.serialize() + "\n")


def read_boundary_configs(path) -> list[BoundaryConfig]:
    with open(path) as fh:
        return [BoundaryConfig.deserialize(line) for line in fh if line.strip()]
