"""Prime-field arithmetic, channel states, and exact linear-dependence tests.

This is the algebraic substrate for the alignment schemes: fields F_q for
prime q < 2**16 with elements stored as machine integers, fast-fading channel
states (square matrices with all entries nonzero), and the two solvers every
scheme relies on -- linear dependence of interference vectors and the
per-receiver recovery test (interference combination zero, direct combination
nonzero).

All values are immutable and all operations pure; sampling takes an explicit
seed and is deterministic (see `ialab._kernels.rng`).  Receiver and matrix
indices are 0-based throughout.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

from . import _kernels
from .errors import DimensionError

MAX_PRIME = 1 << 16


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


@dataclass(frozen=True)
class PrimeField:
    """The prime field F_q; primality checked by trial division."""

    q: int

    def __post_init__(self):
        if not isinstance(self.q, int) or not 2 <= self.q < MAX_PRIME:
            raise ValueError(f"field size must be an integer in [2, {MAX_PRIME}), got {self.q}")
        if not _is_prime(self.q):
            raise ValueError(f"field size must be prime, got {self.q}")

    def check(self, a: int) -> int:
        if not 0 <= a < self.q:
            raise ValueError(f"{a} is not an element of F_{self.q}")
        return a

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.q

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.q

    def neg(self, a: int) -> int:
        return (-a) % self.q

    def inv(self, a: int) -> int:
        """Multiplicative inverse by the extended Euclidean algorithm."""
        if a % self.q == 0:
            raise ZeroDivisionError(f"0 has no inverse in F_{self.q}")
        r0, r1 = self.q, a % self.q
        s0, s1 = 0, 1
        while r1:
            quot = r0 // r1
            r0, r1 = r1, r0 - quot * r1
            s0, s1 = s1, s0 - quot * s1
        return s0 % self.q

    def elements(self) -> range:
        return range(self.q)

    def nonzero_elements(self) -> range:
        return range(1, self.q)


@dataclass(frozen=True)
class FieldVector:
    field: PrimeField
    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))
        for e in self.entries:
            self.field.check(e)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class ChannelState:
    """One fast-fading realisation: an n x n matrix over F_q with every entry
    nonzero; entry (j, i) is the coefficient at receiver j from transmitter i."""

    field: PrimeField
    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(e) for e in row) for row in self.entries)
        object.__setattr__(self, "entries", rows)
        n = len(rows)
        if n < 1:
            raise ValueError("channel state must have dimension >= 1")
        for row in rows:
            if len(row) != n:
                raise ValueError("channel state must be square")
            for e in row:
                self.field.check(e)
                if e == 0:
                    raise ValueError("channel state entries must be nonzero")

    @property
    def n(self) -> int:
        return len(self.entries)

    def interference_row(self, j: int) -> FieldVector:
        """Row j with column j deleted: the interference vector of receiver j."""
        row = self.entries[j]
        return FieldVector(self.field, row[:j] + row[j + 1 :])

    def direct(self, j: int) -> int:
        return self.entries[j][j]


@dataclass(frozen=True)
class NoiseModel:
    """Additive noise Z on F_q, given by its pmf over {0, ..., q-1}."""

    field: PrimeField
    pmf: tuple

    def __post_init__(self):
        pmf = tuple(float(p) for p in self.pmf)
        object.__setattr__(self, "pmf", pmf)
        if len(pmf) != self.field.q:
            raise ValueError("pmf length must equal the field size")
        if any(p < 0 for p in pmf):
            raise ValueError("pmf entries must be nonnegative")
        if abs(sum(pmf) - 1.0) > 1e-12:
            raise ValueError("pmf must sum to 1 within 1e-12")

    def entropy_bits(self) -> float:
        from math import log2

        return -sum(p * log2(p) for p in self.pmf if p > 0)

    def capacity_bits(self) -> float:
        """Single-user capacity log2(q) - H(Z) of the finite field channel."""
        from math import log2

        return log2(self.field.q) - self.entropy_bits()


def sample_channel_state(field: PrimeField, n: int, seed: int) -> ChannelState:
    """Draw an n x n state with entries independent uniform on {1,...,q-1}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    state = _kernels.substream_state(seed, 0)
    mat, _ = _kernels.sample_matrix(field.q, n, state)
    return ChannelState(field, tuple(tuple(int(e) for e in row) for row in mat))


def _common_field(vectors: Sequence[FieldVector]) -> PrimeField:
    if not vectors:
        raise DimensionError("need at least one vector")
    field = vectors[0].field
    length = len(vectors[0])
    for v in vectors[1:]:
        if v.field != field:
            raise DimensionError("vectors live in different fields")
        if len(v) != length:
            raise DimensionError("vectors have mismatched lengths")
    return field


def _normalize(field: PrimeField, lam: Sequence[int]) -> tuple:
    """Scale so the first nonzero coefficient is 1 (deterministic output)."""
    lead = next(c for c in lam if c)
    inv = field.inv(lead)
    return tuple((c * inv) % field.q for c in lam)


def _nullspace(field: PrimeField, columns: Sequence[Sequence[int]]) -> list:
    """Null-space basis of the matrix with the given columns, by Gaussian
    elimination with a fixed left-to-right column-pivot order.

    Basis vectors come out one per non-pivot column in column order, which
    makes the output of the dependence solvers deterministic.
    """
    q = field.q
    ncols = len(columns)
    nrows = len(columns[0])
    # rows of the matrix (row-reduce the nrows x ncols system)
    rows = [[columns[c][r] % q for c in range(ncols)] for r in range(nrows)]
    pivots = []  # (row, col)
    prow = 0
    for col in range(ncols):
        sel = None
        for r in range(prow, nrows):
            if rows[r][col]:
                sel = r
                break
        if sel is None:
            continue
        rows[prow], rows[sel] = rows[sel], rows[prow]
        inv = field.inv(rows[prow][col])
        rows[prow] = [(x * inv) % q for x in rows[prow]]
        for r in range(nrows):
            if r != prow and rows[r][col]:
                f = rows[r][col]
                rows[r] = [(a - f * b) % q for a, b in zip(rows[r], rows[prow])]
        pivots.append((prow, col))
        prow += 1
        if prow == nrows:
            break
    pivot_cols = {col for _, col in pivots}
    basis = []
    for free in range(ncols):
        if free in pivot_cols:
            continue
        lam = [0] * ncols
        lam[free] = 1
        for r, col in pivots:
            lam[col] = (-rows[r][free]) % q
        basis.append(tuple(lam))
    return basis


def solve_dependence(vectors: Sequence[FieldVector]) -> Optional[tuple]:
    """Nonzero coefficients lambda with sum_k lambda_k v_k = 0, or None if the
    vectors are linearly independent.  The first dependence under the fixed
    column order is returned, scaled to leading coefficient 1."""
    field = _common_field(vectors)
    basis = _nullspace(field, [v.entries for v in vectors])
    if not basis:
        return None
    return _normalize(field, basis[0])


def recovery_check(j: int, states: Sequence[ChannelState]) -> Optional[tuple]:
    """Coefficients lambda under which receiver j's interference rows combine
    to zero while its direct coefficients combine to something nonzero, or
    None when no such lambda exists.  Receiver j can recover its message from
    the given states exactly when the result is present."""
    if not states:
        raise DimensionError("need at least one state")
    field = states[0].field
    n = states[0].n
    for st in states[1:]:
        if st.field != field or st.n != n:
            raise DimensionError("states have mismatched field or dimension")
    if not 0 <= j < n:
        raise ValueError(f"receiver index {j} out of range for n={n}")
    q = field.q
    diag = [st.direct(j) for st in states]
    if n == 1:
        # no interference: any single nonzero coefficient works
        return (1,) + (0,) * (len(states) - 1)
    columns = [st.interference_row(j).entries for st in states]
    for lam in _nullspace(field, columns):
        if sum(c * d for c, d in zip(lam, diag)) % q != 0:
            return _normalize(field, lam)
    return None
