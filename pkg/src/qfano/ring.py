"""Classical cohomology ring of X = P(E) for a bundle E -> P^n.

H*(X) = Q[p, xi] / (p^(n+1), xi^r + c_1 p xi^(r-1) + ... + c_r p^r)
with p the hyperplane pullback and xi the relative hyperplane class
(subspace convention).  Classes are dense Fraction vectors over the
monomial basis p^k xi^(d-k), ordered by total degree ascending and then
p-power descending.
"""

from fractions import Fraction

from qfano.linalg import invert

ZERO = Fraction(0)
ONE = Fraction(1)


class BundleSpec:
    """Validated bundle data: base dimension n, rank r, Chern integers.

    Derived fields: Novikov degrees d1 = n+1+c1 (base ray) and d2 = r
    (fibre ray), dim = n+r-1, the ordered monomial basis, and the Segre
    numbers s_0..s_n of E.
    """

    def __init__(self, n, r, chern):
        self.n = n
        self.r = r
        self.chern = tuple(chern)  # length r, c_1..c_r
        self.d1 = n + 1 + self.chern[0]
        self.d2 = r
        self.dim = n + r - 1
        self.basis = tuple(
            (k, d - k)
            for d in range(self.dim + 1)
            for k in range(min(d, n), max(0, d - r + 1) - 1, -1)
        )
        self.size = len(self.basis)
        self._pos = {mono: i for i, mono in enumerate(self.basis)}
        # s(E) = 1/c(E) truncated at p^n
        segre = [ONE]
        for j in range(1, n + 1):
            segre.append(-sum(Fraction(self.chern[i - 1]) * segre[j - i]
                              for i in range(1, min(j, r) + 1)))
        self.segre = tuple(segre)
        self._mul_table = {}
        self._pairing = None
        self._dual = None

    def degree(self, i):
        """Total degree of basis element i (0-based)."""
        a, b = self.basis[i]
        return a + b

    def position(self, a, b):
        """0-based basis position of the monomial p^a xi^b."""
        return self._pos[(a, b)]

    def __repr__(self):
        return "BundleSpec(n=%d, r=%d, chern=%s)" % (self.n, self.r, list(self.chern))


def make_bundle(n, r, chern=()):
    """Build and validate a BundleSpec; missing Chern entries are zero."""
    if n < 1:
        raise ValueError("base dimension must satisfy n >= 1")
    if r < 2:
        raise ValueError("rank must satisfy r >= 2")
    chern = list(chern)
    if len(chern) > r:
        raise ValueError("got %d Chern coefficients for rank %d" % (len(chern), r))
    chern += [0] * (r - len(chern))
    c1 = chern[0]
    if r + 1 + c1 <= 0:
        raise ValueError(
            "assumption violated: r + 1 + c_1 = %d <= 0" % (r + 1 + c1))
    if n + 1 + c1 <= 0:
        raise ValueError(
            "positivity violated: n + 1 + c_1 = %d <= 0" % (n + 1 + c1))
    return BundleSpec(n, r, chern)


def load_bundle_config(path):
    """Read a bundle spec from a flat key-value file (keys n, r, chern)."""
    data = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError("%s:%d: expected 'key = value'" % (path, lineno))
            key, _, val = line.partition("=")
            data[key.strip()] = val.strip()
    missing = [k for k in ("n", "r") if k not in data]
    if missing:
        raise ValueError("%s: missing keys: %s" % (path, ", ".join(missing)))
    chern = [int(tok) for tok in data.get("chern", "").replace(",", " ").split()]
    return make_bundle(int(data["n"]), int(data["r"]), chern)


def basis_index(spec, d, k):
    """1-based basis position of p^k xi^(d-k), by enumeration."""
    if not (0 <= k <= min(d, spec.n)) or d - k > spec.r - 1:
        raise ValueError("no basis monomial with degree %d and p-power %d" % (d, k))
    return spec.position(k, d - k) + 1


def zero_class(spec):
    return [ZERO] * spec.size


def monomial_class(spec, a, b):
    """Basis vector for the monomial p^a xi^b."""
    vec = zero_class(spec)
    vec[spec.position(a, b)] = ONE
    return vec


def _reduce_monomial(spec, a, b):
    """Expand p^a xi^b in the basis; returns {position: Fraction}."""
    if a > spec.n:
        return {}
    if b <= spec.r - 1:
        return {spec.position(a, b): ONE}
    key = (a, b)
    cached = spec._mul_table.get(key)
    if cached is not None:
        return cached
    # xi^r = -(c_1 p xi^(r-1) + ... + c_r p^r)
    out = {}
    for i in range(1, spec.r + 1):
        ci = spec.chern[i - 1]
        if ci == 0:
            continue
        for pos, coef in _reduce_monomial(spec, a + i, b - i).items():
            val = out.get(pos, ZERO) - ci * coef
            if val:
                out[pos] = val
            elif pos in out:
                del out[pos]
    spec._mul_table[key] = out
    return out


def classical_mul(spec, x, y):
    """Cup product of two classes in basis coordinates."""
    out = zero_class(spec)
    nz_y = [(j, cy) for j, cy in enumerate(y) if cy]
    for i, cx in enumerate(x):
        if not cx:
            continue
        ai, bi = spec.basis[i]
        for j, cy in nz_y:
            aj, bj = spec.basis[j]
            for pos, coef in _reduce_monomial(spec, ai + aj, bi + bj).items():
                out[pos] += cx * cy * coef
    return out


def integrate_monomial(spec, a, b):
    """Integral of p^a xi^b over X, via the Segre pushforward.

    Nonzero only in the top degree a + b = n + r - 1 with b >= r - 1,
    where it equals s_(b-r+1)(E).
    """
    if a < 0 or b < spec.r - 1:
        return ZERO
    if a > spec.n or a + b != spec.dim:
        return ZERO
    return spec.segre[b - spec.r + 1]


def integrate(spec, x):
    """Integral of a class over X."""
    total = ZERO
    for i, c in enumerate(x):
        if c:
            a, b = spec.basis[i]
            total += c * integrate_monomial(spec, a, b)
    return total


def pushforward_monomial(spec, a, b):
    """pi_*(p^a xi^b) as a p-coefficient list of length n+1."""
    out = [ZERO] * (spec.n + 1)
    i = b - (spec.r - 1)
    if i >= 0 and a + i <= spec.n:
        out[a + i] = spec.segre[i]
    return out


def pushforward_to_base(spec, x):
    """pi_* of a class, as a polynomial in p on the base (length n+1)."""
    out = [ZERO] * (spec.n + 1)
    for i, c in enumerate(x):
        if c:
            a, b = spec.basis[i]
            for k, s in enumerate(pushforward_monomial(spec, a, b)):
                if s:
                    out[k] += c * s
    return out


def pairing_matrix(spec):
    """Poincare pairing G with G[i][j] = integral of phi_i cup phi_j."""
    if spec._pairing is None:
        spec._pairing = [
            [integrate_monomial(spec, ai + aj, bi + bj) for (aj, bj) in spec.basis]
            for (ai, bi) in spec.basis
        ]
    return spec._pairing


def dual_basis(spec):
    """Inverse pairing matrix; row i gives phi^i in basis coordinates."""
    if spec._dual is None:
        try:
            spec._dual = invert(pairing_matrix(spec))
        except ValueError:
            raise ValueError("degenerate Poincare pairing; invalid spec")
    return spec._dual


def dual_class(spec, i):
    """The class phi^i dual to basis element i (0-based)."""
    return list(dual_basis(spec)[i])


def format_rational(x):
    return str(Fraction(x))


def format_class(spec, x):
    """Serialize a class as a list of exact rational strings."""
    return [format_rational(c) for c in x]
