"""Sparse exact linear algebra over the coefficient rings.

Matrices are stored as {(row, col): value} dicts with explicit shape; vectors
as {index: value} dicts.  Gaussian elimination handles fields; Smith normal
form (with magnitude-minimizing pivot selection) handles the integers.  No
floats anywhere.
"""

from __future__ import annotations

from .coeff import Ring
from .errors import MixedRings


def xgcd(a: int, b: int):
    """Extended euclid: returns (x, y, g) with x*a + y*b == g >= 0."""
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


class Mat:
    """A sparse matrix over an exact ring."""

    __slots__ = ("ring", "nrows", "ncols", "d")

    def __init__(self, ring: Ring, nrows: int, ncols: int, entries=None):
        self.ring = ring
        self.nrows = nrows
        self.ncols = ncols
        self.d = {}
        if entries:
            for (i, j), v in entries.items():
                self.set(i, j, v)

    @staticmethod
    def zeros(ring, nrows, ncols) -> "Mat":
        return Mat(ring, nrows, ncols)

    @staticmethod
    def identity(ring, n) -> "Mat":
        m = Mat(ring, n, n)
        one = ring.one
        for i in range(n):
            m.d[(i, i)] = one
        return m

    @staticmethod
    def from_rows(ring, rows) -> "Mat":
        m = Mat(ring, len(rows), len(rows[0]) if rows else 0)
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                m.set(i, j, ring.canon(v))
        return m

    def get(self, i, j):
        return self.d.get((i, j), self.ring.zero)

    def set(self, i, j, v):
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError((i, j))
        if self.ring.is_zero(v):
            self.d.pop((i, j), None)
        else:
            self.d[(i, j)] = v

    def add_to(self, i, j, v):
        self.set(i, j, self.ring.add(self.get(i, j), v))

    def clone(self) -> "Mat":
        m = Mat(self.ring, self.nrows, self.ncols)
        m.d = dict(self.d)
        return m

    def is_zero(self) -> bool:
        return not self.d

    def __eq__(self, other):
        return (
            isinstance(other, Mat)
            and self.ring == other.ring
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.d == other.d
        )

    def __hash__(self):
        raise TypeError("Mat is mutable")

    def __repr__(self):
        return f"Mat({self.nrows}x{self.ncols}, {len(self.d)} entries)"

    def add(self, other: "Mat") -> "Mat":
        self._check(other)
        out = self.clone()
        for (i, j), v in other.d.items():
            out.add_to(i, j, v)
        return out

    def sub(self, other: "Mat") -> "Mat":
        return self.add(other.neg())

    def neg(self) -> "Mat":
        out = Mat(self.ring, self.nrows, self.ncols)
        out.d = {k: self.ring.neg(v) for k, v in self.d.items()}
        return out

    def scale(self, c) -> "Mat":
        out = Mat(self.ring, self.nrows, self.ncols)
        for k, v in self.d.items():
            w = self.ring.mul(c, v)
            if not self.ring.is_zero(w):
                out.d[k] = w
        return out

    def scale_int(self, n: int) -> "Mat":
        return self.scale(self.ring.from_int(n))

    def mul(self, other: "Mat") -> "Mat":
        if self.ring != other.ring:
            raise MixedRings("matrix product over different rings")
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.ncols} vs {other.nrows}")
        ring = self.ring
        by_row = {}
        for (i, k), v in other.d.items():
            by_row.setdefault(i, []).append((k, v))
        out = Mat(ring, self.nrows, other.ncols)
        acc = {}
        for (i, j), v in self.d.items():
            hits = by_row.get(j)
            if not hits:
                continue
            for k, w in hits:
                key = (i, k)
                prod = ring.mul(v, w)
                if key in acc:
                    acc[key] = ring.add(acc[key], prod)
                else:
                    acc[key] = prod
        out.d = {k: v for k, v in acc.items() if not ring.is_zero(v)}
        return out

    def transpose(self) -> "Mat":
        out = Mat(self.ring, self.ncols, self.nrows)
        out.d = {(j, i): v for (i, j), v in self.d.items()}
        return out

    def apply(self, vec: dict) -> dict:
        """Matrix times a sparse column vector."""
        ring = self.ring
        by_col = {}
        for (i, j), v in self.d.items():
            by_col.setdefault(j, []).append((i, v))
        out = {}
        for j, c in vec.items():
            for i, v in by_col.get(j, ()):  # noqa: B905
                w = ring.mul(v, c)
                if i in out:
                    out[i] = ring.add(out[i], w)
                else:
                    out[i] = w
        return {i: v for i, v in out.items() if not ring.is_zero(v)}

    def column(self, j) -> dict:
        return {i: v for (i, jj), v in self.d.items() if jj == j}

    def map_ring(self, new_ring: Ring, fn) -> "Mat":
        out = Mat(new_ring, self.nrows, self.ncols)
        for (i, j), v in self.d.items():
            w = new_ring.canon(fn(v))
            if not new_ring.is_zero(w):
                out.d[(i, j)] = w
        return out

    def to_rows(self):
        rows = [[self.ring.zero] * self.ncols for _ in range(self.nrows)]
        for (i, j), v in self.d.items():
            rows[i][j] = v
        return rows

    def _check(self, other: "Mat"):
        if self.ring != other.ring:
            raise MixedRings("matrices over different rings")
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch")


# ---------------------------------------------------------------------------
# Field routines (Gaussian elimination on dict-of-rows)
# ---------------------------------------------------------------------------


def _rows_of(mat: Mat):
    rows = {}
    for (i, j), v in mat.d.items():
        rows.setdefault(i, {})[j] = v
    return rows


def _rref_insert(ring, row, pivots):
    """Reduce a row against a fully reduced pivot set, then insert it.

    `pivots` maps pivot column -> row dict; every pivot row has a unit pivot
    and contains no other pivot column, and that invariant is preserved.
    Special column keys (non-integers, e.g. "rhs") are never chosen as pivots.
    """
    row = dict(row)
    for j in [j for j in row if j in pivots]:
        c = row.pop(j)
        if ring.is_zero(c):
            continue
        for kk, vv in pivots[j].items():
            if kk == j:
                continue
            acc = ring.sub(row.get(kk, ring.zero), ring.mul(c, vv))
            if ring.is_zero(acc):
                row.pop(kk, None)
            else:
                row[kk] = acc
    real_cols = [k for k in row if isinstance(k, int)]
    if not real_cols:
        return row if row else None
    j = min(real_cols)
    inv = ring.invert(row[j])
    row = {k: ring.mul(inv, v) for k, v in row.items()}
    for pj, prow in pivots.items():
        c = prow.get(j)
        if c is None:
            continue
        for kk, vv in row.items():
            if kk == j:
                prow.pop(j, None)
                continue
            acc = ring.sub(prow.get(kk, ring.zero), ring.mul(c, vv))
            if ring.is_zero(acc):
                prow.pop(kk, None)
            else:
                prow[kk] = acc
    pivots[j] = row
    return None


def _field_rref(mat: Mat, rhs: dict | None = None):
    """Fully reduced row echelon form; returns (pivots, inconsistent)."""
    ring = mat.ring
    rows = _rows_of(mat)
    pivots = {}
    inconsistent = False
    for i in range(mat.nrows):
        row = dict(rows.get(i, {}))
        if rhs is not None:
            b = rhs.get(i)
            if b is not None and not ring.is_zero(b):
                row["rhs"] = b
        if not row:
            continue
        leftover = _rref_insert(ring, row, pivots)
        if leftover:
            inconsistent = True
    return pivots, inconsistent


def field_rank(mat: Mat) -> int:
    pivots, _ = _field_rref(mat)
    return len(pivots)


def field_kernel(mat: Mat):
    """Basis of the right kernel, as sparse column vectors."""
    ring = mat.ring
    pivots, _ = _field_rref(mat)
    basis = []
    for j in range(mat.ncols):
        if j in pivots:
            continue
        vec = {j: ring.one}
        for pj, row in pivots.items():
            c = row.get(j)
            if c is not None:
                vec[pj] = ring.neg(c)
        basis.append(vec)
    return basis


def field_solve(mat: Mat, rhs: dict):
    """One solution x of mat @ x = rhs over a field, or None."""
    ring = mat.ring
    pivots, inconsistent = _field_rref(mat, rhs=rhs)
    if inconsistent:
        return None
    x = {}
    for j, row in pivots.items():
        b = row.get("rhs")
        if b is not None and not ring.is_zero(b):
            x[j] = b
    return x


def field_solve_mat(mat: Mat, rhs: Mat):
    """Solve mat @ X = rhs column by column; None if any column fails."""
    cols = {}
    for j in range(rhs.ncols):
        x = field_solve(mat, rhs.column(j))
        if x is None:
            return None
        cols[j] = x
    out = Mat(mat.ring, mat.ncols, rhs.ncols)
    for j, x in cols.items():
        for i, v in x.items():
            out.set(i, j, v)
    return out


# ---------------------------------------------------------------------------
# Integer routines (Smith normal form)
# ---------------------------------------------------------------------------


class _ZWorker:
    """Row/column reduction over Z with optional transform tracking.

    Maintains A as dict-of-rows plus a column-occupancy index.  Column
    operations are mirrored on V (so A_orig @ V tracks column history) and row
    operations on U (so U @ A_orig tracks row history).
    """

    def __init__(self, mat: Mat, track_u=False, track_v=False):
        self.m = mat.nrows
        self.n = mat.ncols
        self.rows = {}
        self.colocc = {}
        for (i, j), v in mat.d.items():
            self.rows.setdefault(i, {})[j] = v
            self.colocc.setdefault(j, set()).add(i)
        self.U = {i: {i: 1} for i in range(self.m)} if track_u else None
        self.V = {j: {j: 1} for j in range(self.n)} if track_v else None
        # V stored as dict col -> {row_index_of_V: val}; V starts as identity.

    # -- elementary ops (also applied to transforms) ----------------------

    def _set(self, i, j, v):
        row = self.rows.setdefault(i, {})
        if v == 0:
            if j in row:
                del row[j]
                occ = self.colocc.get(j)
                occ.discard(i)
                if not occ:
                    del self.colocc[j]
            if not row:
                del self.rows[i]
        else:
            row[j] = v
            self.colocc.setdefault(j, set()).add(i)

    def swap_rows(self, i1, i2):
        if i1 == i2:
            return
        r1 = self.rows.pop(i1, {})
        r2 = self.rows.pop(i2, {})
        for j in r1:
            self.colocc[j].discard(i1)
        for j in r2:
            self.colocc[j].discard(i2)
        if r2:
            self.rows[i1] = r2
            for j in r2:
                self.colocc.setdefault(j, set()).add(i1)
        if r1:
            self.rows[i2] = r1
            for j in r1:
                self.colocc.setdefault(j, set()).add(i2)
        for j, occ in list(self.colocc.items()):
            if not occ:
                del self.colocc[j]
        if self.U is not None:
            self.U[i1], self.U[i2] = self.U.get(i2, {}), self.U.get(i1, {})

    def swap_cols(self, j1, j2):
        if j1 == j2:
            return
        occ = self.colocc.get(j1, set()) | self.colocc.get(j2, set())
        for i in occ:
            row = self.rows.get(i, {})
            a, b = row.get(j1), row.get(j2)
            self._set(i, j1, b or 0)
            self._set(i, j2, a or 0)
        if self.V is not None:
            self.V[j1], self.V[j2] = self.V.get(j2, {}), self.V.get(j1, {})

    def addmul_row(self, dst, src, c):
        """row[dst] += c * row[src]"""
        if c == 0:
            return
        for j, v in list(self.rows.get(src, {}).items()):
            cur = self.rows.get(dst, {}).get(j, 0)
            self._set(dst, j, cur + c * v)
        if self.U is not None:
            udst = self.U.setdefault(dst, {})
            for k, v in self.U.get(src, {}).items():
                acc = udst.get(k, 0) + c * v
                if acc:
                    udst[k] = acc
                else:
                    udst.pop(k, None)

    def addmul_col(self, dst, src, c):
        """col[dst] += c * col[src]"""
        if c == 0:
            return
        for i in list(self.colocc.get(src, set())):
            v = self.rows.get(i, {}).get(src, 0)
            cur = self.rows.get(i, {}).get(dst, 0)
            self._set(i, dst, cur + c * v)
        if self.V is not None:
            vdst = self.V.setdefault(dst, {})
            for k, v in self.V.get(src, {}).items():
                acc = vdst.get(k, 0) + c * v
                if acc:
                    vdst[k] = acc
                else:
                    vdst.pop(k, None)

    def gcd_rows(self, i1, i2, j):
        """Unimodular 2x2 row op making A[i1,j] = gcd, A[i2,j] = 0."""
        a = self.rows.get(i1, {}).get(j, 0)
        b = self.rows.get(i2, {}).get(j, 0)
        if b == 0:
            return
        if a != 0 and b % a == 0:
            self.addmul_row(i2, i1, -(b // a))
            return
        if a == 0:
            self.swap_rows(i1, i2)
            return
        x, y, g = xgcd(a, b)
        ag, bg = a // g, b // g
        r1 = dict(self.rows.get(i1, {}))
        r2 = dict(self.rows.get(i2, {}))
        for jj in set(r1) | set(r2):
            aa, bb = r1.get(jj, 0), r2.get(jj, 0)
            self._set(i1, jj, x * aa + y * bb)
            self._set(i2, jj, -bg * aa + ag * bb)
        if self.U is not None:
            u1 = self.U.get(i1, {})
            u2 = self.U.get(i2, {})
            new1, new2 = {}, {}
            for k in set(u1) | set(u2):
                aa, bb = u1.get(k, 0), u2.get(k, 0)
                s = x * aa + y * bb
                t = -bg * aa + ag * bb
                if s:
                    new1[k] = s
                if t:
                    new2[k] = t
            self.U[i1], self.U[i2] = new1, new2

    def gcd_cols(self, j1, j2, i):
        a = self.rows.get(i, {}).get(j1, 0)
        b = self.rows.get(i, {}).get(j2, 0)
        if b == 0:
            return
        if a != 0 and b % a == 0:
            self.addmul_col(j2, j1, -(b // a))
            return
        if a == 0:
            self.swap_cols(j1, j2)
            return
        x, y, g = xgcd(a, b)
        ag, bg = a // g, b // g
        occ = set(self.colocc.get(j1, set())) | set(self.colocc.get(j2, set()))
        for ii in occ:
            row = self.rows.get(ii, {})
            aa, bb = row.get(j1, 0), row.get(j2, 0)
            self._set(ii, j1, x * aa + y * bb)
            self._set(ii, j2, -bg * aa + ag * bb)
        if self.V is not None:
            v1 = self.V.get(j1, {})
            v2 = self.V.get(j2, {})
            new1, new2 = {}, {}
            for k in set(v1) | set(v2):
                aa, bb = v1.get(k, 0), v2.get(k, 0)
                s = x * aa + y * bb
                t = -bg * aa + ag * bb
                if s:
                    new1[k] = s
                if t:
                    new2[k] = t
            self.V[j1], self.V[j2] = new1, new2

    # -- main loop --------------------------------------------------------

    def diagonalize(self):
        """Bring A to diagonal form; returns the list of nonzero diagonals."""
        diag = []
        k = 0
        limit = min(self.m, self.n)
        while k < limit:
            piv = self._pick_pivot(k)
            if piv is None:
                break
            pi, pj = piv
            self.swap_rows(k, pi)
            self.swap_cols(k, pj)
            while True:
                col_rows = [i for i in self.colocc.get(k, set()) if i > k]
                for i in sorted(col_rows):
                    self.gcd_rows(k, i, k)
                row = self.rows.get(k, {})
                row_cols = [j for j in row if j > k]
                if not row_cols:
                    if not any(i > k for i in self.colocc.get(k, set())):
                        break
                    continue
                for j in sorted(row_cols):
                    self.gcd_cols(k, j, k)
                if not any(i > k for i in self.colocc.get(k, set())):
                    row = self.rows.get(k, {})
                    if not any(j > k for j in row):
                        break
            d = self.rows.get(k, {}).get(k, 0)
            if d == 0:
                break
            diag.append(abs(d))
            k += 1
        return diag

    def _pick_pivot(self, k):
        """Smallest-magnitude entry in the trailing block, fewest-fill tie-break."""
        best = None
        best_key = None
        for j, occ in self.colocc.items():
            if j < k:
                continue
            for i in occ:
                if i < k:
                    continue
                v = abs(self.rows[i][j])
                fill = len(self.rows[i]) + len(self.colocc[j])
                key = (v, fill, i, j)
                if best_key is None or key < best_key:
                    best_key = key
                    best = (i, j)
        return best


def snf_diagonal(mat: Mat):
    """Nonzero diagonal of the Smith normal form, as a divisibility chain."""
    if mat.ring.kind != "Z":
        raise ValueError("snf_diagonal is an integer routine")
    w = _ZWorker(mat)
    diag = w.diagonalize()
    # enforce d1 | d2 | ... by gcd/lcm passes on the diagonal values
    diag = sorted(diag)
    changed = True
    while changed:
        changed = False
        for i in range(len(diag) - 1):
            a, b = diag[i], diag[i + 1]
            if b % a != 0:
                _, _, g = xgcd(a, b)
                diag[i], diag[i + 1] = g, a * b // g
                changed = True
        diag.sort()
    return diag


def z_rank(mat: Mat) -> int:
    w = _ZWorker(mat)
    return len(w.diagonalize())


def z_kernel_basis(mat: Mat):
    """Integer basis of the kernel, as sparse column vectors."""
    if mat.ring.kind != "Z":
        raise ValueError("integer routine")
    w = _ZWorker(mat, track_v=True)
    diag = w.diagonalize()
    r = len(diag)
    basis = []
    for j in range(mat.ncols):
        if j < r:
            continue
        col = w.V.get(j, {})
        if col:
            basis.append(dict(col))
    return basis


def z_solve(mat: Mat, rhs: dict):
    """Integer solution x of mat @ x = rhs, or None."""
    if mat.ring.kind != "Z":
        raise ValueError("integer routine")
    w = _ZWorker(mat, track_u=True, track_v=True)
    diag_signed = w.diagonalize()
    r = len(diag_signed)
    # U @ rhs
    ub = {}
    for i, urow in w.U.items():
        acc = 0
        for k, v in urow.items():
            b = rhs.get(k)
            if b:
                acc += v * b
        if acc:
            ub[i] = acc
    y = {}
    for i, v in ub.items():
        if i >= r:
            return None
        d = w.rows.get(i, {}).get(i, 0)
        if v % d != 0:
            return None
        y[i] = v // d
    # x = V @ y
    x = {}
    for jcol, col in w.V.items():
        c = y.get(jcol)
        if not c:
            continue
        for i, v in col.items():
            acc = x.get(i, 0) + c * v
            if acc:
                x[i] = acc
            else:
                x.pop(i, None)
    return x


def z_solve_mat(mat: Mat, rhs: Mat):
    cols = {}
    for j in range(rhs.ncols):
        x = z_solve(mat, {i: v for i, v in rhs.column(j).items()})
        if x is None:
            return None
        cols[j] = x
    out = Mat(mat.ring, mat.ncols, rhs.ncols)
    for j, x in cols.items():
        for i, v in x.items():
            out.set(i, j, v)
    return out


def mat_rank(mat: Mat) -> int:
    if mat.ring.is_field:
        return field_rank(mat)
    if mat.ring.kind == "Z":
        return z_rank(mat)
    raise ValueError(f"no rank over {mat.ring!r}")
