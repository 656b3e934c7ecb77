"""Stabilizer reference simulation with symbolic measurement outcomes.

Runs the ideal part of a circuit through an Aaronson-Gottesman tableau.
Each random measurement outcome introduces a fresh GF(2) variable; every
outcome is then an affine expression in those variables, stored as a Python
int bitmask (bit 0 the constant term, bit k the coefficient of variable k).
Detector and observable parities are XORs of outcome expressions, so
checking that a parity is deterministic (no linear part) and zero (no
constant term) is exact, with no sampling involved.

Row phase updates stay classical: the rowsum carry depends only on the x/z
bits, so signs compose by XOR of bitmask expressions plus a classical carry
into the constant bit.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit, GateKind


class NondeterministicCircuitError(ValueError):
    """A detector or observable parity is not deterministic (or not zero)."""


@dataclass(frozen=True)
class ReferenceOutcomes:
    """Noiseless measurement expressions and the derived reference sample.

    `measurement_bits[m]` fixes every random variable to 0; detectors and
    observables are guaranteed deterministic and zero, so frame sampling
    relative to this reference is exact.
    """

    measurement_exprs: tuple[int, ...]
    measurement_bits: tuple[int, ...]
    num_variables: int


class _Tableau:
    """CHP-style tableau over n qubits with symbolic phases."""

    def __init__(self, n: int):
        self.n = n
        # Rows 0..n-1 destabilizers, n..2n-1 stabilizers; start at Z^n.
        self.xs = [1 << i if i < n else 0 for i in range(2 * n)]
        self.zs = [0 if i < n else 1 << (i - n) for i in range(2 * n)]
        self.sign = [0] * (2 * n)
        self.num_vars = 0

    def _rowsum_into(self, xh: int, zh: int, sh: int, i: int) -> tuple[int, int, int]:
        """Return row (xh, zh, sh) multiplied by row i."""
        x1, z1 = self.xs[i], self.zs[i]
        x2, z2 = xh, zh
        pos = (x1 & ~z1 & x2 & z2) | (x1 & z1 & z2 & ~x2) | (~x1 & z1 & x2 & ~z2)
        neg = (x1 & ~z1 & z2 & ~x2) | (x1 & z1 & x2 & ~z2) | (~x1 & z1 & x2 & z2)
        # The i-exponent sum is always even for commuting sign bookkeeping,
        # so (sum mod 4) / 2 is the classical carry into the constant bit.
        sum_mod4 = (pos.bit_count() - neg.bit_count()) % 4
        assert sum_mod4 % 2 == 0
        return xh ^ x1, zh ^ z1, sh ^ self.sign[i] ^ (sum_mod4 >> 1)

    def _rowsum(self, h: int, i: int) -> None:
        self.xs[h], self.zs[h], self.sign[h] = self._rowsum_into(
            self.xs[h], self.zs[h], self.sign[h], i
        )

    def h(self, q: int) -> None:
        bit = 1 << q
        for r in range(2 * self.n):
            x, z = self.xs[r] & bit, self.zs[r] & bit
            if x and z:
                self.sign[r] ^= 1
            self.xs[r] ^= x ^ z
            self.zs[r] ^= x ^ z

    def cx(self, c: int, t: int) -> None:
        cb, tb = 1 << c, 1 << t
        for r in range(2 * self.n):
            xc = bool(self.xs[r] & cb)
            zt = bool(self.zs[r] & tb)
            xt = bool(self.xs[r] & tb)
            zc = bool(self.zs[r] & cb)
            if xc and zt and (xt == zc):
                self.sign[r] ^= 1
            if xc:
                self.xs[r] ^= tb
            if zt:
                self.zs[r] ^= cb

    def cz(self, a: int, b: int) -> None:
        self.h(b)
        self.cx(a, b)
        self.h(b)

    def measure_z(self, q: int) -> int:
        """Measure Z_q; return the outcome expression."""
        bit = 1 << q
        n = self.n
        p = next((r for r in range(n, 2 * n) if self.xs[r] & bit), None)
        if p is not None:
            for r in range(2 * n):
                if r != p and self.xs[r] & bit:
                    self._rowsum(r, p)
            self.xs[p - n], self.zs[p - n], self.sign[p - n] = (
                self.xs[p],
                self.zs[p],
                self.sign[p],
            )
            self.num_vars += 1
            outcome = 1 << self.num_vars
            self.xs[p], self.zs[p], self.sign[p] = 0, bit, outcome
            return outcome
        xh, zh, sh = 0, 0, 0
        for r in range(n):
            if self.xs[r] & bit:
                xh, zh, sh = self._rowsum_into(xh, zh, sh, r + n)
        assert xh == 0 and zh == bit
        return sh

    def measure_x(self, q: int) -> int:
        self.h(q)
        out = self.measure_z(q)
        self.h(q)
        return out

    def _conditional_pauli(self, xmask: int, zmask: int, expr: int) -> None:
        """Apply the Pauli with the given support, conditioned on `expr`."""
        for r in range(2 * self.n):
            # Phase flips where the row anticommutes with the Pauli.
            if ((self.xs[r] & zmask).bit_count() + (self.zs[r] & xmask).bit_count()) % 2:
                self.sign[r] ^= expr

    def reset_z(self, q: int) -> None:
        out = self.measure_z(q)
        self._conditional_pauli(1 << q, 0, out)

    def reset_x(self, q: int) -> None:
        self.h(q)
        self.reset_z(q)
        self.h(q)


def simulate_ideal(circuit: Circuit) -> ReferenceOutcomes:
    """Run the noiseless circuit; return symbolic measurement outcomes."""
    tab = _Tableau(circuit.num_qubits)
    exprs: list[int] = []
    for layer in circuit.layers:
        for op in layer.ideal_ops:
            k = op.kind
            if k is GateKind.H:
                tab.h(op.targets[0])
            elif k is GateKind.CX:
                tab.cx(*op.targets)
            elif k is GateKind.CZ:
                tab.cz(*op.targets)
            elif k is GateKind.RESET_Z:
                tab.reset_z(op.targets[0])
            elif k is GateKind.RESET_X:
                tab.reset_x(op.targets[0])
            elif k is GateKind.MEASURE_Z:
                exprs.append(tab.measure_z(op.targets[0]))
            elif k is GateKind.MEASURE_X:
                exprs.append(tab.measure_x(op.targets[0]))
            else:
                raise AssertionError(k)
    bits = tuple(e & 1 for e in exprs)
    return ReferenceOutcomes(tuple(exprs), bits, tab.num_vars)


def verify_deterministic(circuit: Circuit) -> ReferenceOutcomes:
    """Check every detector/observable parity is deterministic and zero.

    Raises NondeterministicCircuitError naming the first offending parity.
    """
    ref = simulate_ideal(circuit)
    for name, groups in (("detector", circuit.detectors), ("observable", circuit.observables)):
        for idx, group in enumerate(groups):
            expr = 0
            for m in group:
                expr ^= ref.measurement_exprs[m]
            if expr & ~1:
                raise NondeterministicCircuitError(
                    f"{name} {idx} is not deterministic (measurements {group})"
                )
            if expr:
                raise NondeterministicCircuitError(
                    f"{name} {idx} is deterministic but nonzero (measurements {group})"
                )
    return ref
