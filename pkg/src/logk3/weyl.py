"""Weyl groups of del Pezzo Picard lattices as explicit matrix groups.

Group elements act on the lattice by unimodular matrices that preserve the
pairing and fix the canonical class.  Since the lines span the lattice
rationally and every isometry permutes them, the action on the sorted line
list is faithful; elements are therefore stored as permutations packed into
``bytes`` (at most 240 lines, so one byte per image), which makes products
a single ``bytes.translate`` call.  Matrices are kept alongside when the
group is small enough and reconstructed from the line permutation on
demand otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import lcm

from .lattice import PicardLattice
from .zcohomology import (
    Matrix,
    Vector,
    from_columns,
    identity_matrix,
    mat_mul,
    mat_vec,
    solve_exact,
    transpose,
)

GROUP_BUDGET = 10**7
MATRIX_STORE_LIMIT = 200_000


class BudgetExceeded(RuntimeError):
    """Raised when a closure outgrows its element budget.

    ``partial_count`` carries how many distinct elements had been found."""

    def __init__(self, message: str, partial_count: int):
        super().__init__(message)
        self.partial_count = partial_count


def reflection(lattice: PicardLattice, root: Vector) -> Matrix:
    """Matrix of x -> x + (x.root) root; requires an honest (-2)-root."""
    if lattice.intersect(root, root) != -2:
        raise ValueError("reflection requires a class of self-pairing -2")
    if lattice.intersect(root, lattice.canonical) != 0:
        raise ValueError("reflection requires a class orthogonal to K")
    cols = []
    for j in range(lattice.rank):
        e = tuple(1 if i == j else 0 for i in range(lattice.rank))
        cols.append(lattice.reflect(root, e))
    return from_columns(cols, rows=lattice.rank)


def is_isometry(lattice: PicardLattice, matrix: Matrix) -> bool:
    """Check pairing preservation and that K is fixed."""
    if mat_vec(matrix, lattice.canonical) != lattice.canonical:
        return False
    g = lattice.gram_diagonal
    mt = transpose(matrix)
    for i, row_i in enumerate(mt):
        for j, row_j in enumerate(mt):
            val = sum(row_i[k] * g[k] * row_j[k] for k in range(lattice.rank))
            expect = g[i] if i == j else 0
            if val != expect:
                return False
    return True


def orbit(
    lattice: PicardLattice,
    generators: tuple[Matrix, ...],
    seed: Vector,
    cap: int = 10**6,
) -> tuple[Vector, ...]:
    """Orbit of a class under the group generated by ``generators``."""
    seen = {seed}
    frontier = [seed]
    while frontier:
        x = frontier.pop()
        for g in generators:
            y = mat_vec(g, x)
            if y not in seen:
                if len(seen) >= cap:
                    raise BudgetExceeded("orbit exceeded cap", len(seen))
                seen.add(y)
                frontier.append(y)
    return tuple(sorted(seen))


_PAD = bytes(range(256))


def pad_table(p: bytes) -> bytes:
    """Extend an n-point permutation to the 256-byte translate table."""
    return p + _PAD[len(p):]


def mult_perm(a: bytes, b: bytes) -> bytes:
    """Permutation of the product: apply b's matrix first, then a's."""
    return b.translate(pad_table(a))


def invert_perm(p: bytes) -> bytes:
    out = bytearray(len(p))
    for i, img in enumerate(p):
        out[img] = i
    return bytes(out)


def perm_order(p: bytes) -> int:
    n = len(p)
    seen = [False] * n
    order = 1
    for start in range(n):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = p[i]
            length += 1
        order = lcm(order, length)
    return order


@dataclass
class MatrixGroup:
    """Fully enumerated matrix group with its faithful line permutation action.

    ``elements[0]`` is always the identity, discovery order is the
    deterministic breadth-first order, and ``index`` inverts the listing.
    """

    lattice: PicardLattice
    generator_matrices: tuple[Matrix, ...]
    lines: tuple[Vector, ...]
    elements: list[bytes]
    tables: list[bytes]
    index: dict[bytes, int]
    matrices: list[Matrix] | None
    generator_indices: tuple[int, ...]
    _inverse: list[int] | None = field(default=None, repr=False)
    _orders: list[int] | None = field(default=None, repr=False)
    _class_ids: list[int] | None = field(default=None, repr=False)
    _line_solver: tuple[tuple[int, ...], Matrix] | None = field(
        default=None, repr=False
    )

    @property
    def order(self) -> int:
        return len(self.elements)

    def mult(self, i: int, j: int) -> int:
        return self.index[self.elements[j].translate(self.tables[i])]

    def inverse(self, i: int) -> int:
        if self._inverse is None:
            self._inverse = [0] * self.order
            for k, p in enumerate(self.elements):
                self._inverse[k] = self.index[invert_perm(p)]
        return self._inverse[i]

    def conjugate(self, i: int, by: int) -> int:
        # g x g^{-1}: apply the inverse first, then x, then g
        step = self.elements[self.inverse(by)].translate(self.tables[i])
        return self.index[step.translate(self.tables[by])]

    def order_of(self, i: int) -> int:
        if self._orders is None:
            self._orders = [perm_order(p) for p in self.elements]
        return self._orders[i]

    def conjugacy_class_ids(self) -> list[int]:
        """Class id per element; ids follow the smallest member's index."""
        if self._class_ids is None:
            ids = [-1] * self.order
            next_id = 0
            for start in range(self.order):
                if ids[start] >= 0:
                    continue
                ids[start] = next_id
                frontier = [start]
                while frontier:
                    x = frontier.pop()
                    for gi in self.generator_indices:
                        y = self.conjugate(x, gi)
                        if ids[y] < 0:
                            ids[y] = next_id
                            frontier.append(y)
                next_id += 1
            self._class_ids = ids
        return self._class_ids

    def matrix_of(self, i: int) -> Matrix:
        if self.matrices is not None:
            return self.matrices[i]
        if self._line_solver is None:
            # a spanning subset of lines pins every isometry down
            rank = self.lattice.rank
            chosen: list[int] = []
            rows: list[Vector] = []
            for idx, line in enumerate(self.lines):
                probe = rows + [line]
                if _rational_rank(probe) == len(probe):
                    chosen.append(idx)
                    rows.append(line)
                if len(chosen) == rank:
                    break
            if len(chosen) != rank:
                raise AssertionError("lines failed to span the lattice")
            span = from_columns([self.lines[c] for c in chosen], rows=rank)
            self._line_solver = (tuple(chosen), span)
        chosen, span = self._line_solver
        perm = self.elements[i]
        images = from_columns(
            [self.lines[perm[c]] for c in chosen], rows=self.lattice.rank
        )
        # M @ span == images with M integral
        mt = solve_exact(transpose(span), transpose(images))
        return transpose(mt)

    def perm_of_matrix(self, matrix: Matrix) -> bytes:
        line_index = {line: k for k, line in enumerate(self.lines)}
        out = bytearray(len(self.lines))
        for k, line in enumerate(self.lines):
            image = mat_vec(matrix, line)
            if image not in line_index:
                raise ValueError("matrix does not permute the lines")
            out[k] = line_index[image]
        return bytes(out)


def _rational_rank(vectors: list[Vector]) -> int:
    from fractions import Fraction

    rows = [[Fraction(x) for x in v] for v in vectors]
    rank = 0
    cols = len(rows[0]) if rows else 0
    for c in range(cols):
        pivot = None
        for r in range(rank, len(rows)):
            if rows[r][c]:
                pivot = r
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][c]:
                f = rows[r][c] / rows[rank][c]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def generate_group(
    lattice: PicardLattice,
    generators: tuple[Matrix, ...],
    budget: int = GROUP_BUDGET,
    store_matrices: bool | None = None,
) -> MatrixGroup:
    """Breadth-first closure of the generators inside the isometry group.

    Deterministic: elements are numbered in discovery order with the
    generator list applied in the given order, so indices are reproducible.
    Raises BudgetExceeded (carrying the count reached) past ``budget``.
    """
    lines = lattice.lines()
    if len(lines) > 255:
        raise ValueError("line permutations no longer fit a byte")
    line_index = {line: k for k, line in enumerate(lines)}
    gen_perms: list[bytes] = []
    for g in generators:
        if not is_isometry(lattice, g):
            raise ValueError("generator is not an isometry fixing K")
        out = bytearray(len(lines))
        for k, line in enumerate(lines):
            out[k] = line_index[mat_vec(g, line)]
        gen_perms.append(bytes(out))

    identity = bytes(range(len(lines)))
    elements: list[bytes] = [identity]
    tables: list[bytes] = [pad_table(identity)]
    index: dict[bytes, int] = {identity: 0}
    keep_matrices = store_matrices if store_matrices is not None else True
    matrices: list[Matrix] | None = (
        [identity_matrix(lattice.rank)] if keep_matrices else None
    )
    head = 0
    while head < len(elements):
        table = tables[head]
        for gi, gp in enumerate(gen_perms):
            product = gp.translate(table)
            if product not in index:
                if len(elements) >= budget:
                    raise BudgetExceeded(
                        f"group closure exceeded budget {budget}", len(elements)
                    )
                index[product] = len(elements)
                elements.append(product)
                tables.append(pad_table(product))
                if matrices is not None:
                    matrices.append(mat_mul(matrices[head], generators[gi]))
                    if (
                        store_matrices is None
                        and len(elements) > MATRIX_STORE_LIMIT
                    ):
                        matrices = None
                        keep_matrices = False
        head += 1
    if not keep_matrices:
        matrices = None
    gen_indices = tuple(index[p] for p in gen_perms)
    group = MatrixGroup(
        lattice=lattice,
        generator_matrices=tuple(generators),
        lines=lines,
        elements=elements,
        tables=tables,
        index=index,
        matrices=matrices,
        generator_indices=gen_indices,
    )
    # every element must be a K-fixing isometry: check all when small,
    # a deterministic sample when reconstruction would dominate runtime
    if group.order <= 10_000:
        to_check = range(group.order)
    else:
        stride = group.order // 32 or 1
        to_check = range(0, group.order, stride)
    for i in to_check:
        if not is_isometry(lattice, group.matrix_of(i)):
            raise AssertionError(f"element {i} is not an isometry")
    return group


def weyl_group(
    lattice: PicardLattice,
    budget: int = GROUP_BUDGET,
    store_matrices: bool | None = None,
) -> MatrixGroup:
    """The full Weyl group, generated by reflections in the simple roots."""
    gens = tuple(reflection(lattice, r) for r in lattice.simple_roots())
    return generate_group(lattice, gens, budget=budget, store_matrices=store_matrices)
