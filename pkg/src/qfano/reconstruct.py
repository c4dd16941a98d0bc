"""Reconstruction of the divisor quantum multiplication matrices.

Entries are polynomials in the two curve-class parameters q1 (base ray)
and q2 (fibre ray), stored as {(a, b): Fraction} maps.  Column j of a
matrix encodes divisor * phi_j in the monomial basis.  Starting from the
seed columns (degree <= n) the two matrices are filled degree by degree:

  * p-direction: p * (xi * v) = xi * (p * v) rewrites the unknown column
    in terms of strictly earlier ones, provided the p-power descends
    within each degree so the one same-degree column needed has already
    been done (or is killed by p^(n+1) = 0);
  * xi-direction: the divisor axiom fixes every q1^a q2^b term with
    a >= 1 as b/a times the matching p-entry, the classical part is ring
    multiplication, and the only pure-q2 term is the fibre-line insertion
    at the p^k row when the column monomial is p^k xi^(r-1).
"""

from fractions import Fraction

from qfano import seeds as seeds_mod
from qfano.ring import classical_mul, monomial_class, pairing_matrix

ZERO = Fraction(0)
ONE = Fraction(1)


def qp_add_into(dst, src, scale=ONE, shift=(0, 0)):
    """dst += scale * q^shift * src, dropping cancelled terms."""
    for (a, b), v in src.items():
        key = (a + shift[0], b + shift[1])
        dst[key] = dst.get(key, ZERO) + scale * v
        if not dst[key]:
            del dst[key]
    return dst


def col_add_into(dst, src, scale=ONE, shift=(0, 0)):
    for row, qp in src.items():
        tgt = dst.setdefault(row, {})
        qp_add_into(tgt, qp, scale, shift)
        if not tgt:
            del dst[row]
    return dst


class QuantumMatrix:
    """Square matrix of q-polynomials; label 'p' or 'xi' picks the purity rule."""

    def __init__(self, spec, label):
        if label not in ("p", "xi"):
            raise ValueError("label must be 'p' or 'xi'")
        self.spec = spec
        self.label = label
        self.cols = [None] * spec.size

    def set_column(self, j, col):
        spec = self.spec
        dcol = spec.degree(j)
        clean = {}
        for row, qp in col.items():
            keep = {k: v for k, v in qp.items() if v}
            if not keep:
                continue
            for (a, b) in keep:
                if spec.degree(row) != dcol + 1 - a * spec.d1 - b * spec.d2:
                    raise ValueError(
                        "grading violated at entry (%d,%d) term q1^%d q2^%d"
                        % (row + 1, j + 1, a, b))
                if self.label == "p" and a == 0 and b >= 1:
                    raise ValueError(
                        "pure-q2 term in the p matrix at (%d,%d)"
                        % (row + 1, j + 1))
                if self.label == "xi" and a >= 1 and b == 0:
                    raise ValueError(
                        "pure-q1 term in the xi matrix at (%d,%d)"
                        % (row + 1, j + 1))
            clean[row] = keep
        self.cols[j] = clean

    def column(self, j):
        if self.cols[j] is None:
            raise AssertionError("column %d read before being filled" % (j + 1))
        return self.cols[j]

    def entry(self, i, j):
        return self.column(j).get(i, {})

    def apply(self, vec):
        """Matrix times a column vector {row: QPoly} over the q-polynomials."""
        out = {}
        for j, qp_in in vec.items():
            for row, qp_m in self.column(j).items():
                tgt = out.setdefault(row, {})
                for (a1, b1), v1 in qp_m.items():
                    for (a2, b2), v2 in qp_in.items():
                        key = (a1 + a2, b1 + b2)
                        tgt[key] = tgt.get(key, ZERO) + v1 * v2
                        if not tgt[key]:
                            del tgt[key]
                if not tgt:
                    del out[row]
        return out

    def classical(self):
        """The q = 0 matrix as a dense grid of Fractions."""
        size = self.spec.size
        grid = [[ZERO] * size for _ in range(size)]
        for j in range(size):
            for row, qp in self.column(j).items():
                grid[row][j] = qp.get((0, 0), ZERO)
        return grid

    def set_q_zero(self):
        """A copy with every quantum term dropped."""
        out = QuantumMatrix(self.spec, self.label)
        for j in range(self.spec.size):
            col = {}
            for row, qp in self.column(j).items():
                if (0, 0) in qp:
                    col[row] = {(0, 0): qp[(0, 0)]}
            out.set_column(j, col)
        return out

    def triplet_lines(self):
        """Sparse export: `row col a b value`, 1-based indices."""
        lines = []
        for j in range(self.spec.size):
            for row in sorted(self.column(j)):
                for (a, b) in sorted(self.column(j)[row]):
                    lines.append("%d %d %d %d %s"
                                 % (row + 1, j + 1, a, b,
                                    self.column(j)[row][(a, b)]))
        lines.sort(key=lambda s: tuple(int(t) for t in s.split()[:2]))
        return lines

    @classmethod
    def from_triplet_lines(cls, spec, label, lines):
        cols = [{} for _ in range(spec.size)]
        for lineno, raw in enumerate(lines, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tok = line.split()
            if len(tok) != 5:
                raise ValueError("triplet line %d: expected 5 fields" % lineno)
            row, col, a, b = (int(t) for t in tok[:4])
            value = Fraction(tok[4])
            qp = cols[col - 1].setdefault(row - 1, {})
            qp[(a, b)] = qp.get((a, b), ZERO) + value
        out = cls(spec, label)
        for j, col in enumerate(cols):
            out.set_column(j, col)
        return out

    def entry_string(self, i, j):
        qp = self.entry(i, j)
        if not qp:
            return "0"
        parts = []
        for (a, b) in sorted(qp):
            v = qp[(a, b)]
            atoms = []
            if abs(v) != 1 or (a, b) == (0, 0):
                atoms.append(str(abs(v)))
            if a:
                atoms.append("q1" if a == 1 else "q1^%d" % a)
            if b:
                atoms.append("q2" if b == 1 else "q2^%d" % b)
            term = "*".join(atoms)
            parts.append(("-" if v < 0 else ("+" if parts else "")) + term)
        return "".join(parts)

    def dense_lines(self):
        """CSV grid of entry strings, one line per row."""
        size = self.spec.size
        return [",".join(self.entry_string(i, j) for j in range(size))
                for i in range(size)]

    def first_mismatch(self, other):
        for j in range(self.spec.size):
            for i in range(self.spec.size):
                if self.entry(i, j) != other.entry(i, j):
                    return (i, j)
        return None

    def __eq__(self, other):
        return (isinstance(other, QuantumMatrix)
                and self.label == other.label
                and self.cols == other.cols)

    __hash__ = None


def p_lemma_step(mp, mxi, spec, d, k):
    """Fill the p-matrix column of p^k xi^(d-k) from lower columns."""
    target = spec.position(k, d - k)
    prev = spec.position(k, d - 1 - k)
    col_p_prev = mp.column(prev)
    col_xi_prev = mxi.column(prev)
    t1 = mxi.apply(col_p_prev)
    w = {}
    col_add_into(w, col_xi_prev)
    qp_add_into(w.setdefault(target, {}), {(0, 0): ONE}, scale=Fraction(-1))
    if not w.get(target):
        w.pop(target, None)
    else:
        if (0, 0) in w.get(target, {}):
            raise AssertionError(
                "xi column of degree %d lacks the expected leading term" % (d - 1))
    t2 = mp.apply(w)
    col = t1
    col_add_into(col, t2, scale=Fraction(-1))
    mp.set_column(target, col)


def xi_column_from_p(spec, p_col, k, b0):
    """The xi-matrix column of p^k xi^b0 implied by the p-matrix column."""
    col = {}
    xi = monomial_class(spec, 0, 1)
    for row, c in enumerate(classical_mul(spec, xi, monomial_class(spec, k, b0))):
        if c:
            col.setdefault(row, {})[(0, 0)] = c
    if b0 == spec.r - 1:
        qp_add_into(col.setdefault(spec.position(k, 0), {}), {(0, 1): ONE})
    for row, qp in p_col.items():
        for (a, b), v in qp.items():
            if a >= 1 and b >= 1:
                qp_add_into(col.setdefault(row, {}),
                            {(a, b): v * Fraction(b, a)})
    for row in [r for r, qp in col.items() if not qp]:
        del col[row]
    return col


def xi_lemma_step(mp, mxi, spec, d, k):
    """Fill the xi-matrix column of p^k xi^(d-k) from the matching p column."""
    target = spec.position(k, d - k)
    mxi.set_column(target, xi_column_from_p(spec, mp.column(target), k, d - k))


def reconstruct(spec, source=None):
    """Both divisor matrices, from seed columns up to the top degree."""
    if source is None:
        source = seeds_mod.builtin_source(spec)
    cols_p, cols_xi = seeds_mod.seed_columns(spec, source)
    mp = QuantumMatrix(spec, "p")
    mxi = QuantumMatrix(spec, "xi")
    for j, col in cols_p.items():
        mp.set_column(j, col)
    for j, col in cols_xi.items():
        mxi.set_column(j, col)
    for d in range(spec.n + 1, spec.dim + 1):
        for k in range(min(d, spec.n), max(0, d - spec.r + 1) - 1, -1):
            p_lemma_step(mp, mxi, spec, d, k)
            xi_lemma_step(mp, mxi, spec, d, k)
    return mp, mxi


def parse_star_polynomial(text):
    """Parse a polynomial in star-powers of p, xi and scalars q1, q2.

    Grammar: terms joined by + or -, each a `*`-separated product of an
    optional integer (or rational) coefficient and atoms p, xi, q1, q2
    with optional ^exponent.  Returns a list of
    (coefficient, q1-power, q2-power, p-star-power, xi-star-power).
    """
    stripped = text.replace(" ", "")
    if not stripped:
        raise ValueError("empty relation")
    terms = []
    buf = []
    sign = 1
    pieces = []
    for ch in stripped:
        if ch in "+-" and buf:
            pieces.append((sign, "".join(buf)))
            buf = []
            sign = 1 if ch == "+" else -1
        elif ch in "+-":
            sign = sign * (1 if ch == "+" else -1)
        else:
            buf.append(ch)
    if buf:
        pieces.append((sign, "".join(buf)))
    for sign, word in pieces:
        coeff = Fraction(sign)
        powers = {"p": 0, "xi": 0, "q1": 0, "q2": 0}
        for factor in word.split("*"):
            if not factor:
                raise ValueError("empty factor in %r" % word)
            name, _, exp = factor.partition("^")
            e = int(exp) if exp else 1
            if name in powers:
                powers[name] += e
            else:
                coeff *= Fraction(name) ** e
        terms.append((coeff, powers["q1"], powers["q2"],
                      powers["p"], powers["xi"]))
    return terms


def verify_relation(mp, mxi, relation):
    """Residual of a star-polynomial applied to the identity class.

    `relation` is a grammar string or a parsed term list; the result is a
    {row: QPoly} map, empty exactly when the relation holds.
    """
    if isinstance(relation, str):
        relation = parse_star_polynomial(relation)
    spec = mp.spec
    out = {}
    for coeff, qa, qb, ep, exi in relation:
        vec = {0: {(0, 0): ONE}}
        for _ in range(ep):
            vec = mp.apply(vec)
        for _ in range(exi):
            vec = mxi.apply(vec)
        col_add_into(out, vec, scale=coeff, shift=(qa, qb))
    return out


def check_grading(mat):
    """Re-validate the grading of every stored entry (set_column enforces it)."""
    spec = mat.spec
    for j in range(spec.size):
        for row, qp in mat.column(j).items():
            for (a, b) in qp:
                if spec.degree(row) != (spec.degree(j) + 1
                                        - a * spec.d1 - b * spec.d2):
                    return (row, j, a, b)
    return None


def check_commutativity(mp, mxi):
    """First basis index where p * (xi * phi_j) != xi * (p * phi_j), if any."""
    for j in range(mp.spec.size):
        left = mp.apply(mxi.column(j))
        right = mxi.apply(mp.column(j))
        if left != right:
            return j
    return None


def check_three_point_symmetry(mat):
    """First (i, j) where pairing(M phi_i, phi_j) != pairing(M phi_j, phi_i)."""
    spec = mat.spec
    gram = pairing_matrix(spec)
    size = spec.size

    def paired(i, j):
        out = {}
        for row, qp in mat.column(i).items():
            if gram[row][j]:
                qp_add_into(out, qp, scale=gram[row][j])
        return out

    for i in range(size):
        for j in range(i, size):
            if paired(i, j) != paired(j, i):
                return (i, j)
    return None


def check_purity(mat):
    """First entry violating the no-pure-q2 / no-pure-q1 rule, if any."""
    for j in range(mat.spec.size):
        for row, qp in mat.column(j).items():
            for (a, b) in qp:
                if mat.label == "p" and a == 0 and b >= 1:
                    return (row, j, a, b)
                if mat.label == "xi" and a >= 1 and b == 0:
                    return (row, j, a, b)
    return None
