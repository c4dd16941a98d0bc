"""Seed two-point invariants and the degree <= n matrix columns built from them.

The reconstruction needs, for every basis class gamma of degree <= n, the
two-point invariants <gamma, phi_j> in the fibre direction (0,1) and in the
base directions (k,0) with k*d1 <= deg(gamma) + 1.  Fibre invariants are
intrinsic (pushforward to the base, vanishing for multiplicity >= 2).  The
base-direction invariants come from a pluggable source:

  * BlowupSeeds   - the flagship geometry, via the exceptional divisor
                    over G(2,5) (vanishing for multiplicity >= 2);
  * ProductSeeds  - bundles with all Chern coefficients zero, where the
                    second projection is itself a fibration and the same
                    pushforward argument applies on the other side;
  * SeedTable     - explicit user-supplied entries.
"""

from fractions import Fraction

from qfano import schubert
from qfano.ring import (
    basis_index,
    classical_mul,
    dual_basis,
    monomial_class,
    pushforward_to_base,
)

ZERO = Fraction(0)


class MissingSeedError(ValueError):
    """A demanded seed invariant is not available from the source."""

    def __init__(self, spec, i, j, a, b):
        self.key = (i, j, a, b)
        da, ka = spec.basis[i][0] + spec.basis[i][1], spec.basis[i][0]
        db, kb = spec.basis[j][0] + spec.basis[j][1], spec.basis[j][0]
        super().__init__(
            "missing seed invariant (%d,%d) (%d,%d) %d %d"
            % (da, ka, db, kb, a, b))


def fiber_invariant(spec, alpha, beta, k):
    """Two-point invariant of k times the fibre line class.

    Zero for k >= 2; for k = 1 the integral over the base of the two
    pushforwards (zero whenever the dimension constraint fails).
    """
    if k < 1:
        raise ValueError("multiplicity must be >= 1")
    if k >= 2:
        return ZERO
    pa = pushforward_to_base(spec, alpha)
    pb = pushforward_to_base(spec, beta)
    return sum((pa[a] * pb[spec.n - a] for a in range(spec.n + 1)), ZERO)


def blowup_invariant(spec, alpha, beta, k):
    """Two-point invariant of k times the base ray, flagship geometry.

    Zero for k >= 2; for k = 1 the Grassmannian pairing of the two
    classes restricted to the exceptional divisor and pushed down.
    """
    if not schubert.is_flagship(spec):
        raise ValueError("blow-up seed geometry is flagship-specific")
    if k < 1:
        raise ValueError("multiplicity must be >= 1")
    if k >= 2:
        return ZERO
    gr = schubert.g25()
    ra = schubert.pushforward_divisor(schubert.restrict_to_divisor(spec, alpha))
    rb = schubert.pushforward_divisor(schubert.restrict_to_divisor(spec, beta))
    return gr.pair(ra, rb)


def product_invariant(spec, alpha, beta, k):
    """Base-ray invariant for an all-zero-Chern (product) bundle.

    The second projection X = P^n x P^(r-1) -> P^(r-1) is a fibration
    whose fibre line is the base ray, so the fibre argument applies with
    the roles of p and xi exchanged: multiplicity >= 2 vanishes, and for
    k = 1 the pushforward keeps only the p^n layer.
    """
    if any(spec.chern):
        raise ValueError("product seed geometry needs all Chern coefficients zero")
    if k < 1:
        raise ValueError("multiplicity must be >= 1")
    if k >= 2:
        return ZERO
    pa = [ZERO] * spec.r
    pb = [ZERO] * spec.r
    for i, c in enumerate(alpha):
        if c and spec.basis[i][0] == spec.n:
            pa[spec.basis[i][1]] += c
    for i, c in enumerate(beta):
        if c and spec.basis[i][0] == spec.n:
            pb[spec.basis[i][1]] += c
    return sum((pa[b] * pb[spec.r - 1 - b] for b in range(spec.r)), ZERO)


class BlowupSeeds:
    """Builtin base-direction seed source for the flagship bundle."""

    def __init__(self, spec):
        if not schubert.is_flagship(spec):
            raise ValueError("builtin blow-up seeds are flagship-specific")
        self.spec = spec

    def pure_base(self, i, j, k):
        spec = self.spec
        return blowup_invariant(spec,
                                monomial_class(spec, *spec.basis[i]),
                                monomial_class(spec, *spec.basis[j]), k)


class ProductSeeds:
    """Builtin base-direction seed source for all-zero-Chern bundles."""

    def __init__(self, spec):
        if any(spec.chern):
            raise ValueError("builtin product seeds need all Chern coefficients zero")
        self.spec = spec

    def pure_base(self, i, j, k):
        spec = self.spec
        return product_invariant(spec,
                                 monomial_class(spec, *spec.basis[i]),
                                 monomial_class(spec, *spec.basis[j]), k)


class SeedTable:
    """Explicit table of base-direction invariants keyed by basis pairs."""

    def __init__(self, spec):
        self.spec = spec
        self.entries = {}

    def set(self, i, j, a, value):
        spec = self.spec
        if a < 1:
            raise ValueError("curve class must be a positive multiple of the base ray")
        di = spec.degree(i)
        dj = spec.degree(j)
        if di + dj != spec.dim - 1 + a * spec.d1:
            raise ValueError(
                "dimension constraint violated for (%d,%d) (%d,%d) %d 0"
                % (di, spec.basis[i][0], dj, spec.basis[j][0], a))
        key = (min(i, j), max(i, j), a)
        old = self.entries.get(key)
        if old is not None and old != value:
            raise ValueError(
                "symmetry violation: conflicting values for (%d,%d) (%d,%d) %d 0"
                % (di, spec.basis[i][0], dj, spec.basis[j][0], a))
        self.entries[key] = Fraction(value)

    def pure_base(self, i, j, k):
        key = (min(i, j), max(i, j), k)
        try:
            return self.entries[key]
        except KeyError:
            raise MissingSeedError(self.spec, i, j, k, 0) from None


def _parse_pair(tok):
    tok = tok.strip()
    if not (tok.startswith("(") and tok.endswith(")")):
        raise ValueError("expected a (degree,p-power) pair, got %r" % tok)
    d, _, k = tok[1:-1].partition(",")
    return int(d), int(k)


def load_seeds(path, spec):
    """Parse a seed file: lines `(d,k) (d,k) a b value`, # comments."""
    table = SeedTable(spec)
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tok = line.split()
            if len(tok) != 5:
                raise ValueError("%s:%d: expected 5 fields, got %d"
                                 % (path, lineno, len(tok)))
            try:
                (da, ka) = _parse_pair(tok[0])
                (db, kb) = _parse_pair(tok[1])
                a = int(tok[2])
                b = int(tok[3])
                value = Fraction(tok[4])
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError("%s:%d: %s" % (path, lineno, exc)) from None
            if b != 0:
                raise ValueError(
                    "%s:%d: only base-ray rows (b = 0) are accepted; "
                    "fibre and mixed classes are computed internally"
                    % (path, lineno))
            try:
                i = basis_index(spec, da, ka) - 1
                j = basis_index(spec, db, kb) - 1
            except ValueError as exc:
                raise ValueError("%s:%d: %s" % (path, lineno, exc)) from None
            try:
                table.set(i, j, a, value)
            except ValueError as exc:
                raise ValueError("%s:%d: %s" % (path, lineno, exc)) from None
    return table


def builtin_source(spec):
    """Pick the builtin seed source a spec supports, or raise."""
    if schubert.is_flagship(spec):
        return BlowupSeeds(spec)
    if not any(spec.chern):
        return ProductSeeds(spec)
    raise ValueError(
        "no builtin seed source for this spec; provide a seed table")


def demanded_invariants(spec):
    """All (i, j, k) base-direction invariants the seed columns consume."""
    out = []
    for i, (a0, b0) in enumerate(spec.basis):
        deg = a0 + b0
        if deg > spec.n:
            continue
        k = 1
        while k * spec.d1 <= deg + 1:
            degj = spec.dim - 1 + k * spec.d1 - deg
            for j in range(spec.size):
                if spec.degree(j) == degj:
                    out.append((i, j, k))
            k += 1
    return out


def seed_columns(spec, source):
    """Columns of the two divisor matrices for every degree <= n class.

    Returns (cols_p, cols_xi): maps column index -> {row: {(a,b): Fraction}}.
    Raises MissingSeedError when the source lacks a demanded invariant and
    ValueError when a mixed curve class passes the dimension filter (outside
    the reconstruction's scope).
    """
    dual = dual_basis(spec)
    p = monomial_class(spec, 1, 0)
    xi = monomial_class(spec, 0, 1)
    # mixed classes must not pass the dimension filter for degree <= n columns
    if spec.d1 + spec.d2 <= spec.n + 1:
        raise ValueError(
            "mixed curve class (1,1) passes the dimension filter; "
            "its seeds are outside the reconstruction's scope")
    cols_p = {}
    cols_xi = {}

    def put(col, row, a, b, value):
        if value:
            qp = col.setdefault(row, {})
            qp[(a, b)] = qp.get((a, b), ZERO) + value
            if not qp[(a, b)]:
                del qp[(a, b)]
            if not qp:
                del col[row]

    for ci, (a0, b0) in enumerate(spec.basis):
        deg = a0 + b0
        if deg > spec.n:
            continue
        gamma = monomial_class(spec, a0, b0)
        col_p = {}
        col_xi = {}
        for row, c in enumerate(classical_mul(spec, p, gamma)):
            put(col_p, row, 0, 0, c)
        for row, c in enumerate(classical_mul(spec, xi, gamma)):
            put(col_xi, row, 0, 0, c)

        # base directions: divisor factor k into M_p, none into M_xi
        k = 1
        while k * spec.d1 <= deg + 1:
            degj = spec.dim - 1 + k * spec.d1 - deg
            for j in range(spec.size):
                if spec.degree(j) != degj:
                    continue
                val = source.pure_base(ci, j, k)
                if val:
                    for row in range(spec.size):
                        put(col_p, row, k, 0, k * val * dual[j][row])
            k += 1

        # fibre direction: divisor factor 1 into M_xi, none into M_p
        degj = spec.dim - 1 + spec.d2 - deg
        if degj <= spec.dim:
            for j in range(spec.size):
                if spec.degree(j) != degj:
                    continue
                val = fiber_invariant(spec, gamma,
                                      monomial_class(spec, *spec.basis[j]), 1)
                if val:
                    for row in range(spec.size):
                        put(col_xi, row, 0, 1, val * dual[j][row])

        cols_p[ci] = col_p
        cols_xi[ci] = col_xi
    return cols_p, cols_xi


def dump_seed_lines(spec, source):
    """Serialize every demanded base-direction invariant in the file grammar."""
    lines = ["# seed invariants: (deg,p-power) (deg,p-power) a b value"]
    for (i, j, k) in demanded_invariants(spec):
        if i > j:
            continue
        val = source.pure_base(i, j, k)
        ai, bi = spec.basis[i]
        aj, bj = spec.basis[j]
        lines.append("(%d,%d) (%d,%d) %d 0 %s"
                     % (ai + bi, ai, aj + bj, aj, k, val))
    return lines
