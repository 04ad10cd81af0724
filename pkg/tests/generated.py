"""Batches of random well-typed declarations, checked against the helper signature."""

import random
from dataclasses import dataclass

from hottcheck.checker import check_module, run_deep
from hottcheck.core import Const
from hottcheck.evaluator import eval_term, normalize, readback
from hottcheck.surface import parse_source
from oracles import HELPERS, SubstNormalizer, TermGen


@dataclass
class Sample:
    src: str
    name: str
    decl: object  # core Declaration
    sig: object  # helpers plus this declaration


def helper_signature():
    module = parse_source(HELPERS)
    sig, report = check_module([module])
    assert report.ok
    bodies = {d.name: d.to_declaration().body for d in module.declarations if d.kind == "def"}
    return sig, bodies


def samples(n: int, seed: int, depth: int = 6) -> list[Sample]:
    """``n`` generated declarations; raises if the checker rejects any of them."""
    base, _ = helper_signature()
    gen = TermGen(random.Random(seed))
    out = []
    for i in range(n):
        name = f"g{i}"
        src = gen.declaration(name, depth)
        module = parse_source(src)
        sig, report = check_module([module], base.copy())
        if not report.ok:
            raise AssertionError(f"generated term rejected: {report.entries[0].error}\n{src}")
        out.append(Sample(src, name, module.declarations[0].to_declaration(), sig))
    return out


def nbe_beta_normal(sample: Sample):
    """NbE normal form without eta, comparable to the substitution oracle."""
    return run_deep(lambda: readback(0, eval_term((), sample.decl.body, sample.sig.entries), None, eta=False))


def oracle_normal(sample: Sample, bodies: dict):
    return run_deep(SubstNormalizer(bodies).nf, sample.decl.body)


def nbe_eta_long(sample: Sample):
    return run_deep(normalize, Const(sample.name), sample.sig.entries, type=sample.sig.entries[sample.name].type)
