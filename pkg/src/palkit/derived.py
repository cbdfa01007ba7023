"""Proof construction helpers over the core schemas S1, S2, S3 and MP.

Proofs are written with temporary hypotheses (:class:`Hyp` leaves) and then
closed with :func:`discharge`, the usual deduction-theorem translation.  The
``*_witness`` functions derive the redundant axioms S2', S3' and Conjmp
without using them, which shows on concrete instances that those axioms add
no strength.
"""

from __future__ import annotations

from dataclasses import dataclass

from .proof import (Ax1, Ax2, Ax3, Mp, ProofError, ProofTerm, check_proof,
                    id_provable)
from .syntax import BOTTOM, Implies, Sentence, conj, neg

__all__ = ["Hyp", "conclusion", "discharge", "uses_only_core",
           "s2p_witness", "s3p_witness", "conjmp_witness"]


@dataclass(frozen=True)
class Hyp(ProofTerm):
    formula: Sentence


def conclusion(t: ProofTerm) -> Sentence:
    """Like :func:`check_proof` but tolerating open hypotheses."""
    if isinstance(t, Hyp):
        return t.formula
    if isinstance(t, Mp):
        major, minor = conclusion(t.major), conclusion(t.minor)
        if not isinstance(major, Implies) or major.left != minor:
            raise ProofError("mp", t, "matching implication", major)
        return major.right
    return check_proof(t).conclusion


def _mentions(t: ProofTerm, h: Sentence) -> bool:
    if isinstance(t, Hyp):
        return t.formula == h
    if isinstance(t, Mp):
        return _mentions(t.major, h) or _mentions(t.minor, h)
    return False


def discharge(h: Sentence, t: ProofTerm) -> ProofTerm:
    """Turn a proof of ``c`` using hypothesis ``h`` into a proof of ``h -> c``."""
    if isinstance(t, Hyp) and t.formula == h:
        return id_provable(h)
    if not _mentions(t, h):
        return Mp(Ax1(conclusion(t), h), t)
    if isinstance(t, Mp):
        imp = conclusion(t.major)
        a, b = imp.left, imp.right
        return Mp(Mp(Ax2(h, a, b), discharge(h, t.major)), discharge(h, t.minor))
    raise ValueError(f"cannot discharge through {type(t).__name__}")


def uses_only_core(t: ProofTerm) -> bool:
    if isinstance(t, Mp):
        return uses_only_core(t.major) and uses_only_core(t.minor)
    return isinstance(t, (Ax1, Ax2, Ax3))


def s2p_witness(phi: Sentence) -> ProofTerm:
    """phi -> ~~phi"""
    h_phi, h_not = Hyp(phi), Hyp(neg(phi))
    bottom = Mp(h_not, h_phi)
    return discharge(phi, discharge(neg(phi), bottom))


def s3p_witness(phi: Sentence, psi: Sentence) -> ProofTerm:
    """(phi -> psi) -> (~phi -> psi) -> psi"""
    h1 = Hyp(Implies(phi, psi))
    h2 = Hyp(Implies(neg(phi), psi))
    h3 = Hyp(neg(psi))
    not_phi = discharge(phi, Mp(h3, Mp(h1, Hyp(phi))))
    bottom = Mp(h3, Mp(h2, not_phi))
    got_psi = Mp(Ax3(psi), discharge(neg(psi), bottom))
    return discharge(h1.formula, discharge(h2.formula, got_psi))


def conjmp_witness(phi: Sentence, psi: Sentence) -> ProofTerm:
    """(phi -> psi) & phi -> psi"""
    imp = Implies(phi, psi)
    h = Hyp(conj(imp, phi))            # ~((phi -> psi) -> ~phi)
    h_not_psi = Hyp(neg(psi))
    inner = discharge(imp, discharge(phi, Mp(h_not_psi, Mp(Hyp(imp), Hyp(phi)))))
    bottom = Mp(h, inner)
    assert conclusion(bottom) == BOTTOM
    got_psi = Mp(Ax3(psi), discharge(neg(psi), bottom))
    return discharge(h.formula, got_psi)
